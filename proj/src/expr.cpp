#include "fannot/expr.hpp"

namespace fannot {

struct Expr::Node {
  ExprOp op;
  std::string name;
  std::vector<Expr> args;
  Value lit;
};

const char* expr_op_symbol(ExprOp op) {
  switch (op) {
    case ExprOp::Lit: return "lit";
    case ExprOp::Var: return "var";
    case ExprOp::Field: return "field";
    case ExprOp::Get: return "get";
    case ExprOp::RecUpd: return "rec-upd";
    case ExprOp::MapUpd: return "map-upd";
    case ExprOp::Lookup: return "lookup";
    case ExprOp::The: return "the";
    case ExprOp::Dom: return "dom";
    case ExprOp::SetMinus: return "set-minus";
    case ExprOp::SetOf: return "set-of";
    case ExprOp::Cons: return "cons";
    case ExprOp::Apply: return "apply";
    case ExprOp::Assign: return "assign";
    case ExprOp::In: return "in";
    case ExprOp::NotIn: return "not-in";
    case ExprOp::Eq: return "=";
    case ExprOp::Not: return "not";
    case ExprOp::And: return "and";
    case ExprOp::Or: return "or";
    case ExprOp::Add: return "+";
    case ExprOp::Mod: return "mod";
    case ExprOp::Lt: return "<";
    case ExprOp::Le: return "<=";
  }
  return "?";
}

Expr::Expr() : node_(std::make_shared<const Node>(Node{ExprOp::Lit, {}, {}, Value::unit()})) {}

Expr Expr::make(ExprOp op, std::string name, std::vector<Expr> args, Value lit) {
  return Expr(std::make_shared<const Node>(Node{op, std::move(name), std::move(args), std::move(lit)}));
}

Expr Expr::lit(Value v) { return make(ExprOp::Lit, {}, {}, std::move(v)); }
Expr Expr::var(std::string name) { return make(ExprOp::Var, std::move(name), {}); }
Expr Expr::field(std::string name) { return make(ExprOp::Field, std::move(name), {}); }
Expr Expr::get(Expr rec, std::string field) { return make(ExprOp::Get, std::move(field), {std::move(rec)}); }
Expr Expr::rec_upd(Expr rec, std::string field, Expr v) {
  return make(ExprOp::RecUpd, std::move(field), {std::move(rec), std::move(v)});
}
Expr Expr::map_upd(Expr m, Expr k, Expr v) { return make(ExprOp::MapUpd, {}, {std::move(m), std::move(k), std::move(v)}); }
Expr Expr::lookup(Expr m, Expr k) { return make(ExprOp::Lookup, {}, {std::move(m), std::move(k)}); }
Expr Expr::the(Expr e) { return make(ExprOp::The, {}, {std::move(e)}); }
Expr Expr::dom(Expr m) { return make(ExprOp::Dom, {}, {std::move(m)}); }
Expr Expr::set_minus(Expr a, Expr b) { return make(ExprOp::SetMinus, {}, {std::move(a), std::move(b)}); }
Expr Expr::set_of(std::vector<Expr> elems) { return make(ExprOp::SetOf, {}, std::move(elems)); }
Expr Expr::cons(Expr x, Expr q) { return make(ExprOp::Cons, {}, {std::move(x), std::move(q)}); }
Expr Expr::apply(Expr m, Expr k) { return make(ExprOp::Apply, {}, {std::move(m), std::move(k)}); }
Expr Expr::assign(Expr m, Expr k, Expr v) { return make(ExprOp::Assign, {}, {std::move(m), std::move(k), std::move(v)}); }
Expr Expr::in(Expr x, Expr c) { return make(ExprOp::In, {}, {std::move(x), std::move(c)}); }
Expr Expr::not_in(Expr x, Expr c) { return make(ExprOp::NotIn, {}, {std::move(x), std::move(c)}); }
Expr Expr::eq(Expr a, Expr b) { return make(ExprOp::Eq, {}, {std::move(a), std::move(b)}); }
Expr Expr::not_(Expr a) { return make(ExprOp::Not, {}, {std::move(a)}); }
Expr Expr::and_(std::vector<Expr> args) { return make(ExprOp::And, {}, std::move(args)); }
Expr Expr::or_(std::vector<Expr> args) { return make(ExprOp::Or, {}, std::move(args)); }
Expr Expr::add(Expr a, Expr b) { return make(ExprOp::Add, {}, {std::move(a), std::move(b)}); }
Expr Expr::mod(Expr a, Expr b) { return make(ExprOp::Mod, {}, {std::move(a), std::move(b)}); }
Expr Expr::lt(Expr a, Expr b) { return make(ExprOp::Lt, {}, {std::move(a), std::move(b)}); }
Expr Expr::le(Expr a, Expr b) { return make(ExprOp::Le, {}, {std::move(a), std::move(b)}); }

ExprOp Expr::op() const { return node_->op; }
const Value& Expr::value() const { return node_->lit; }
const std::string& Expr::name() const { return node_->name; }
const std::vector<Expr>& Expr::args() const { return node_->args; }

std::strong_ordering Expr::operator<=>(const Expr& other) const {
  if (node_ == other.node_) return std::strong_ordering::equal;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (auto c = a.op <=> b.op; c != 0) return c;
  if (auto c = a.name <=> b.name; c != 0) return c;
  if (auto c = a.lit <=> b.lit; c != 0) return c;
  return a.args <=> b.args;
}

std::string Expr::to_string() const {
  const Node& n = *node_;
  switch (n.op) {
    case ExprOp::Lit:
      switch (n.lit.kind()) {
        case Value::Kind::Unit:
        case Value::Kind::Bool:
        case Value::Kind::Nat:
        case Value::Kind::Id:
        case Value::Kind::Absent:
          return n.lit.to_string();
        default:
          return "(lit " + n.lit.to_string() + ")";
      }
    case ExprOp::Var:
      return n.name;
    case ExprOp::Field:
      return "(field " + n.name + ")";
    default:
      break;
  }
  std::string s = "(";
  s += expr_op_symbol(n.op);
  // Record ops carry the field name after the first operand.
  if (n.op == ExprOp::Get || n.op == ExprOp::RecUpd) {
    s += " " + n.args[0].to_string() + " " + n.name;
    for (std::size_t i = 1; i < n.args.size(); ++i) s += " " + n.args[i].to_string();
    return s + ")";
  }
  for (const auto& a : n.args) s += " " + a.to_string();
  return s + ")";
}

namespace {

[[noreturn]] void fault(const std::string& msg) { throw EvalFault(msg); }

const Value& need(const Value& v, Value::Kind k, const char* what) {
  if (!v.is(k)) fault(std::string(what) + ": unexpected operand " + v.to_string());
  return v;
}

// Evaluates into `tmp` unless the result already lives somewhere stable
// (a literal, a binding, a state field); returns a reference to the result.
// Expression evaluation never pushes bindings, so references into the
// environment stay valid for the duration of the enclosing call.
const Value& eval_ref(const Expr& e, Env& env, const State& s, Value& tmp);

bool membership(const Value& x, const Value& c) {
  switch (c.kind()) {
    case Value::Kind::Set: return c.set_contains(x);
    case Value::Kind::Seq: return c.seq_contains(x);
    case Value::Kind::Map: return c.map_find(x) != nullptr;
    default: fault("membership test on " + c.to_string());
  }
}

Value eval_value(const Expr& e, Env& env, const State& s) {
  const auto& a = e.args();
  switch (e.op()) {
    case ExprOp::Lit:
    case ExprOp::Var:
    case ExprOp::Field: {
      Value tmp;
      return eval_ref(e, env, s, tmp);
    }
    case ExprOp::Get: {
      Value t;
      const Value& r = eval_ref(a[0], env, s, t);
      need(r, Value::Kind::Record, "get");
      const Value* f = r.record_field(e.name());
      if (!f) fault("record has no field '" + e.name() + "'");
      return *f;
    }
    case ExprOp::RecUpd: {
      Value r = eval_value(a[0], env, s);
      need(r, Value::Kind::Record, "rec-upd");
      if (!r.record_field(e.name())) fault("record has no field '" + e.name() + "'");
      return r.record_update(e.name(), eval_value(a[1], env, s));
    }
    case ExprOp::MapUpd:
    case ExprOp::Assign: {
      Value t;
      const Value& m = eval_ref(a[0], env, s, t);
      need(m, Value::Kind::Map, expr_op_symbol(e.op()));
      return m.map_assign(eval_value(a[1], env, s), eval_value(a[2], env, s));
    }
    case ExprOp::Lookup: {
      Value t1, t2;
      const Value& m = eval_ref(a[0], env, s, t1);
      need(m, Value::Kind::Map, "lookup");
      const Value* v = m.map_find(eval_ref(a[1], env, s, t2));
      return v ? *v : Value::absent();
    }
    case ExprOp::Apply: {
      Value t1, t2;
      const Value& m = eval_ref(a[0], env, s, t1);
      need(m, Value::Kind::Map, "apply");
      const Value& k = eval_ref(a[1], env, s, t2);
      const Value* v = m.map_find(k);
      if (!v) fault("apply: key " + k.to_string() + " not in map");
      return *v;
    }
    case ExprOp::The: {
      Value v = eval_value(a[0], env, s);
      if (v.is(Value::Kind::Absent)) fault("the: value is absent");
      return v;
    }
    case ExprOp::Dom: {
      Value t;
      const Value& m = eval_ref(a[0], env, s, t);
      need(m, Value::Kind::Map, "dom");
      std::vector<Value> keys;
      keys.reserve(m.map_size());
      for (std::size_t i = 0; i < m.map_size(); ++i) keys.push_back(m.map_key(i));
      return Value::set(std::move(keys));
    }
    case ExprOp::SetMinus: {
      Value t1, t2;
      const Value& x = eval_ref(a[0], env, s, t1);
      const Value& y = eval_ref(a[1], env, s, t2);
      need(x, Value::Kind::Set, "set-minus");
      need(y, Value::Kind::Set, "set-minus");
      std::vector<Value> out;
      for (const auto& v : x.elems())
        if (!y.set_contains(v)) out.push_back(v);
      return Value::set(std::move(out));
    }
    case ExprOp::SetOf: {
      std::vector<Value> out;
      out.reserve(a.size());
      for (const auto& x : a) out.push_back(eval_value(x, env, s));
      return Value::set(std::move(out));
    }
    case ExprOp::Cons: {
      Value x = eval_value(a[0], env, s);
      Value t;
      const Value& q = eval_ref(a[1], env, s, t);
      need(q, Value::Kind::Seq, "cons");
      std::vector<Value> out;
      out.reserve(q.elems().size() + 1);
      out.push_back(std::move(x));
      out.insert(out.end(), q.elems().begin(), q.elems().end());
      return Value::seq(std::move(out));
    }
    case ExprOp::In:
    case ExprOp::NotIn: {
      Value t1, t2;
      const Value& x = eval_ref(a[0], env, s, t1);
      bool r;
      // x in dom m: avoid building the key set.
      if (a[1].op() == ExprOp::Dom) {
        const Value& m = eval_ref(a[1].arg(0), env, s, t2);
        need(m, Value::Kind::Map, "dom");
        r = m.map_find(x) != nullptr;
      } else {
        r = membership(x, eval_ref(a[1], env, s, t2));
      }
      return Value::boolean(e.op() == ExprOp::In ? r : !r);
    }
    case ExprOp::Eq: {
      Value t1, t2;
      return Value::boolean(eval_ref(a[0], env, s, t1) == eval_ref(a[1], env, s, t2));
    }
    case ExprOp::Not:
      return Value::boolean(!eval_bool(a[0], env, s));
    case ExprOp::And:
      for (const auto& x : a)
        if (!eval_bool(x, env, s)) return Value::boolean(false);
      return Value::boolean(true);
    case ExprOp::Or:
      for (const auto& x : a)
        if (eval_bool(x, env, s)) return Value::boolean(true);
      return Value::boolean(false);
    case ExprOp::Add:
    case ExprOp::Mod:
    case ExprOp::Lt:
    case ExprOp::Le: {
      Value t1, t2;
      const Value& x = eval_ref(a[0], env, s, t1);
      const Value& y = eval_ref(a[1], env, s, t2);
      Nat l = need(x, Value::Kind::Nat, expr_op_symbol(e.op())).as_nat();
      Nat r = need(y, Value::Kind::Nat, expr_op_symbol(e.op())).as_nat();
      switch (e.op()) {
        case ExprOp::Add: return Value::nat(l + r);
        case ExprOp::Mod:
          if (r == 0) fault("mod: division by zero");
          return Value::nat(l % r);
        case ExprOp::Lt: return Value::boolean(l < r);
        default: return Value::boolean(l <= r);
      }
    }
  }
  fault("unknown expression operator");
}

const Value& eval_ref(const Expr& e, Env& env, const State& s, Value& tmp) {
  switch (e.op()) {
    case ExprOp::Lit:
      return e.value();
    case ExprOp::Var: {
      const Value* v = env.find(e.name());
      if (!v) fault("unbound variable '" + e.name() + "'");
      return *v;
    }
    case ExprOp::Field: {
      auto i = s.schema().index_of(e.name());
      if (i == StateSchema::npos) fault("no state field '" + e.name() + "'");
      return s.at(i);
    }
    case ExprOp::Get: {
      Value t;
      const Value& r = eval_ref(e.arg(0), env, s, t);
      if (&r != &t) {
        need(r, Value::Kind::Record, "get");
        const Value* f = r.record_field(e.name());
        if (!f) fault("record has no field '" + e.name() + "'");
        return *f;
      }
      break;
    }
    default:
      break;
  }
  tmp = eval_value(e, env, s);
  return tmp;
}

}  // namespace

Env::Env(std::initializer_list<std::pair<std::string, Value>> init) : slots_(init) {}

Value eval_expr(const Expr& e, Env& env, const State& s) { return eval_value(e, env, s); }

bool eval_bool(const Expr& e, Env& env, const State& s) {
  Value t;
  const Value& v = eval_ref(e, env, s, t);
  if (!v.is(Value::Kind::Bool)) fault("expected a boolean, got " + v.to_string() + " from " + e.to_string());
  return v.as_bool();
}

void collect_free_vars(const Expr& e, std::set<std::string>& out) {
  if (e.op() == ExprOp::Var) {
    out.insert(e.name());
    return;
  }
  for (const auto& a : e.args()) collect_free_vars(a, out);
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  collect_free_vars(e, out);
  return out;
}

void collect_fields(const Expr& e, std::set<std::string>& out) {
  if (e.op() == ExprOp::Field) {
    out.insert(e.name());
    return;
  }
  for (const auto& a : e.args()) collect_fields(a, out);
}

bool reads_state(const Expr& e) {
  if (e.op() == ExprOp::Field) return true;
  for (const auto& a : e.args())
    if (reads_state(a)) return true;
  return false;
}

Expr subst(const Expr& e, const std::string& var, const Expr& replacement) {
  if (e.op() == ExprOp::Var) return e.name() == var ? replacement : e;
  if (e.args().empty()) return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  bool changed = false;
  for (const auto& a : e.args()) {
    args.push_back(subst(a, var, replacement));
    changed = changed || !(args.back() == a);
  }
  if (!changed) return e;
  return Expr::make(e.op(), e.name(), std::move(args), e.value());
}

}  // namespace fannot

#include "fannot/comp.hpp"

#include <algorithm>

namespace fannot {

struct Comp::Node {
  CompOp op;
  std::string name;
  Expr expr;
  std::vector<Expr> args;
  std::vector<Comp> kids;
  Pred pred;
};

namespace {

std::shared_ptr<const Comp::Node> node(CompOp op, std::string name = {}, Expr e = {}, std::vector<Expr> args = {},
                                       std::vector<Comp> kids = {}, Pred p = {}) {
  return std::make_shared<const Comp::Node>(
      Comp::Node{op, std::move(name), std::move(e), std::move(args), std::move(kids), std::move(p)});
}

}  // namespace

Comp::Comp() : node_(node(CompOp::Return)) {}

Comp Comp::ret(Expr e) { return Comp(node(CompOp::Return, {}, std::move(e))); }
Comp Comp::gets(std::string field) { return Comp(node(CompOp::Gets, std::move(field))); }
Comp Comp::put(std::string field, Expr e) { return Comp(node(CompOp::Put, std::move(field), std::move(e))); }
Comp Comp::select(Expr set) { return Comp(node(CompOp::Select, {}, std::move(set))); }
Comp Comp::bind(std::string x, Comp first, Comp rest) {
  return Comp(node(CompOp::Bind, std::move(x), {}, {}, {std::move(first), std::move(rest)}));
}
Comp Comp::if_(Expr cond, Comp then_c, Comp else_c) {
  return Comp(node(CompOp::If, {}, std::move(cond), {}, {std::move(then_c), std::move(else_c)}));
}
Comp Comp::call(std::string name, std::vector<Expr> args) {
  return Comp(node(CompOp::Call, std::move(name), {}, std::move(args)));
}
Comp Comp::assert_(Pred p) { return Comp(node(CompOp::Assert, {}, {}, {}, {}, std::move(p))); }

Comp Comp::seq(std::vector<std::pair<std::string, Comp>> steps, Comp last) {
  Comp out = std::move(last);
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) out = bind(std::move(it->first), std::move(it->second), out);
  return out;
}

CompOp Comp::op() const { return node_->op; }
const std::string& Comp::name() const { return node_->name; }
const Expr& Comp::expr() const { return node_->expr; }
const std::vector<Expr>& Comp::args() const { return node_->args; }
const std::vector<Comp>& Comp::kids() const { return node_->kids; }
const Pred& Comp::pred() const { return node_->pred; }

std::strong_ordering Comp::operator<=>(const Comp& other) const {
  if (node_ == other.node_) return std::strong_ordering::equal;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (auto c = a.op <=> b.op; c != 0) return c;
  if (auto c = a.name <=> b.name; c != 0) return c;
  if (auto c = a.expr <=> b.expr; c != 0) return c;
  if (auto c = a.args <=> b.args; c != 0) return c;
  if (auto c = a.kids <=> b.kids; c != 0) return c;
  return a.pred <=> b.pred;
}

std::string Comp::to_string() const {
  const Node& n = *node_;
  switch (n.op) {
    case CompOp::Return: return "(return " + n.expr.to_string() + ")";
    case CompOp::Gets: return "(gets " + n.name + ")";
    case CompOp::Put: return "(put " + n.name + " " + n.expr.to_string() + ")";
    case CompOp::Select: return "(select " + n.expr.to_string() + ")";
    case CompOp::If:
      return "(if " + n.expr.to_string() + " " + n.kids[0].to_string() + " " + n.kids[1].to_string() + ")";
    case CompOp::Call: {
      std::string s = "(call " + n.name;
      for (const auto& a : n.args) s += " " + a.to_string();
      return s + ")";
    }
    case CompOp::Assert: return "(assert " + n.pred.to_string() + ")";
    case CompOp::Bind: {
      std::string s = "(do";
      const Comp* c = this;
      while (c->op() == CompOp::Bind) {
        if (c->name() == "_")
          s += " " + c->kid(0).to_string();
        else
          s += " (<- " + c->name() + " " + c->kid(0).to_string() + ")";
        c = &c->kid(1);
      }
      return s + " " + c->to_string() + ")";
    }
  }
  return "?";
}

namespace {

struct PopGuard {
  Env& env;
  std::size_t n;
  ~PopGuard() { env.pop(n); }
};

}  // namespace

void exec(const Comp& c, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s,
          const OutcomeSink& sink) {
  switch (c.op()) {
    case CompOp::Return:
      sink(eval_expr(c.expr(), env, s), s);
      return;
    case CompOp::Gets:
      if (!s.schema().has(c.name())) throw EvalFault("no state field '" + c.name() + "'");
      sink(s.get(c.name()), s);
      return;
    case CompOp::Put: {
      if (!s.schema().has(c.name())) throw EvalFault("no state field '" + c.name() + "'");
      sink(Value::unit(), s.with(c.name(), eval_expr(c.expr(), env, s)));
      return;
    }
    case CompOp::Select: {
      Value set = eval_expr(c.expr(), env, s);
      if (!set.is(Value::Kind::Set)) throw EvalFault("select over a non-set " + set.to_string());
      for (const auto& v : set.elems()) sink(v, s);
      return;
    }
    case CompOp::Bind: {
      const std::string& x = c.name();
      const Comp& rest = c.kid(1);
      if (x == "_") {
        exec(c.kid(0), progs, defs, env, s, [&](const Value&, const State& s1) { exec(rest, progs, defs, env, s1, sink); });
      } else {
        exec(c.kid(0), progs, defs, env, s, [&](const Value& r, const State& s1) {
          env.push(x, r);
          PopGuard g{env, 1};
          exec(rest, progs, defs, env, s1, sink);
        });
      }
      return;
    }
    case CompOp::If:
      exec(eval_bool(c.expr(), env, s) ? c.kid(0) : c.kid(1), progs, defs, env, s, sink);
      return;
    case CompOp::Call: {
      auto it = progs.find(c.name());
      if (it == progs.end()) throw EvalFault("undefined program '" + c.name() + "'");
      const ProgramDef& def = it->second;
      if (def.params.size() != c.args().size())
        throw EvalFault("program '" + c.name() + "' called with the wrong number of arguments");
      std::vector<Value> args;
      for (const auto& a : c.args()) args.push_back(eval_expr(a, env, s));
      // The continuation must run in the caller's scope, so buffer the
      // callee's outcomes before handing them on.
      std::vector<Outcome> outs;
      {
        std::size_t saved = env.begin_frame();
        struct Frame {
          Env& env;
          std::size_t saved;
          ~Frame() { env.end_frame(saved); }
        } frame{env, saved};
        for (std::size_t i = 0; i < args.size(); ++i) env.push(def.params[i].name, std::move(args[i]));
        exec(def.body, progs, defs, env, s, [&](const Value& r, const State& s1) { outs.push_back({r, s1}); });
      }
      for (const auto& o : outs) sink(o.ret, o.state);
      return;
    }
    case CompOp::Assert:
      if (!eval_pred(c.pred(), defs, env, s)) throw EvalFault("assertion failed: " + c.pred().to_string());
      sink(Value::unit(), s);
      return;
  }
}

std::vector<Outcome> run(const Comp& c, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s) {
  std::vector<Outcome> out;
  exec(c, progs, defs, env, s, [&](const Value& r, const State& s1) { out.push_back({r, s1}); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_atomic(const Comp& c) {
  switch (c.op()) {
    case CompOp::Bind:
    case CompOp::Call:
      return false;
    case CompOp::If:
      return is_atomic(c.kid(0)) && is_atomic(c.kid(1));
    default:
      return true;
  }
}

void collect_free_vars(const Comp& c, std::set<std::string>& out) {
  switch (c.op()) {
    case CompOp::Return:
    case CompOp::Put:
    case CompOp::Select:
      collect_free_vars(c.expr(), out);
      return;
    case CompOp::Gets:
      return;
    case CompOp::Call:
      for (const auto& a : c.args()) collect_free_vars(a, out);
      return;
    case CompOp::Assert:
      collect_free_vars(c.pred(), out);
      return;
    case CompOp::If:
      collect_free_vars(c.expr(), out);
      collect_free_vars(c.kid(0), out);
      collect_free_vars(c.kid(1), out);
      return;
    case CompOp::Bind: {
      collect_free_vars(c.kid(0), out);
      std::set<std::string> inner;
      collect_free_vars(c.kid(1), inner);
      if (c.name() != "_") inner.erase(c.name());
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

std::set<std::string> free_vars(const Comp& c) {
  std::set<std::string> out;
  collect_free_vars(c, out);
  return out;
}

namespace {

void fields_read_rec(const Comp& c, const ProgramTable& progs, const PredDefs& defs, std::set<std::string>& out,
                     std::set<std::string>& seen) {
  switch (c.op()) {
    case CompOp::Gets:
      out.insert(c.name());
      return;
    case CompOp::Return:
    case CompOp::Put:
    case CompOp::Select:
      collect_fields(c.expr(), out);
      return;
    case CompOp::Assert:
      collect_fields(c.pred(), defs, out);
      return;
    case CompOp::If:
      collect_fields(c.expr(), out);
      [[fallthrough]];
    case CompOp::Bind:
      for (const auto& k : c.kids()) fields_read_rec(k, progs, defs, out, seen);
      return;
    case CompOp::Call: {
      for (const auto& a : c.args()) collect_fields(a, out);
      if (!seen.insert(c.name()).second) return;
      auto it = progs.find(c.name());
      if (it != progs.end()) fields_read_rec(it->second.body, progs, defs, out, seen);
      return;
    }
  }
}

void fields_written_rec(const Comp& c, const ProgramTable& progs, std::set<std::string>& out,
                        std::set<std::string>& seen) {
  switch (c.op()) {
    case CompOp::Put:
      out.insert(c.name());
      return;
    case CompOp::If:
    case CompOp::Bind:
      for (const auto& k : c.kids()) fields_written_rec(k, progs, out, seen);
      return;
    case CompOp::Call: {
      if (!seen.insert(c.name()).second) return;
      auto it = progs.find(c.name());
      if (it != progs.end()) fields_written_rec(it->second.body, progs, out, seen);
      return;
    }
    default:
      return;
  }
}

}  // namespace

void collect_fields_read(const Comp& c, const ProgramTable& progs, const PredDefs& defs, std::set<std::string>& out) {
  std::set<std::string> seen;
  fields_read_rec(c, progs, defs, out, seen);
}

void collect_fields_written(const Comp& c, const ProgramTable& progs, std::set<std::string>& out) {
  std::set<std::string> seen;
  fields_written_rec(c, progs, out, seen);
}

bool reads_state(const Comp& c, const ProgramTable& progs, const PredDefs& defs) {
  std::set<std::string> f;
  collect_fields_read(c, progs, defs, f);
  return !f.empty();
}

void collect_binders(const Comp& c, std::set<std::string>& out) {
  if (c.op() == CompOp::Bind && c.name() != "_") out.insert(c.name());
  for (const auto& k : c.kids()) collect_binders(k, out);
}

Comp subst(const Comp& c, const std::string& var, const Expr& e) {
  if (reads_state(e)) throw CompError("cannot substitute a state-reading expression into a program");
  switch (c.op()) {
    case CompOp::Return: return Comp::ret(subst(c.expr(), var, e));
    case CompOp::Gets: return c;
    case CompOp::Put: return Comp::put(c.name(), subst(c.expr(), var, e));
    case CompOp::Select: return Comp::select(subst(c.expr(), var, e));
    case CompOp::Assert: return Comp::assert_(subst(c.pred(), var, e));
    case CompOp::If:
      return Comp::if_(subst(c.expr(), var, e), subst(c.kid(0), var, e), subst(c.kid(1), var, e));
    case CompOp::Call: {
      std::vector<Expr> args;
      for (const auto& a : c.args()) args.push_back(subst(a, var, e));
      return Comp::call(c.name(), std::move(args));
    }
    case CompOp::Bind: {
      Comp first = subst(c.kid(0), var, e);
      const std::string& x = c.name();
      if (x == var) return Comp::bind(x, first, c.kid(1));
      auto rest_free = free_vars(c.kid(1));
      if (!rest_free.count(var)) return Comp::bind(x, first, c.kid(1));
      auto efree = free_vars(e);
      if (x != "_" && efree.count(x)) {
        std::set<std::string> avoid = efree;
        avoid.insert(rest_free.begin(), rest_free.end());
        avoid.insert(var);
        collect_binders(c.kid(1), avoid);
        std::string fresh = fresh_name(x, avoid);
        return Comp::bind(fresh, first, subst(subst(c.kid(1), x, Expr::var(fresh)), var, e));
      }
      return Comp::bind(x, first, subst(c.kid(1), var, e));
    }
  }
  return c;
}

namespace {

void require_bound(const std::set<std::string>& vars, const std::set<std::string>& bound, const std::string& where) {
  for (const auto& v : vars)
    if (!bound.count(v)) throw CompError("unbound variable '" + v + "' in " + where);
}

void calls_of(const Comp& c, std::set<std::string>& out) {
  if (c.op() == CompOp::Call) out.insert(c.name());
  for (const auto& k : c.kids()) calls_of(k, out);
}

void check_call_cycles(const std::string& name, const ProgramTable& progs, std::map<std::string, int>& mark) {
  int& m = mark[name];
  if (m == 2) return;
  if (m == 1) throw CompError("programs are recursive through '" + name + "'");
  m = 1;
  std::set<std::string> callees;
  calls_of(progs.at(name).body, callees);
  for (const auto& d : callees)
    if (progs.count(d)) check_call_cycles(d, progs, mark);
  mark[name] = 2;
}

}  // namespace

void validate_comp(const Comp& c, const std::set<std::string>& bound, const ProgramTable& progs,
                   const PredDefs& defs) {
  switch (c.op()) {
    case CompOp::Return:
    case CompOp::Put:
    case CompOp::Select:
      require_bound(free_vars(c.expr()), bound, c.to_string());
      return;
    case CompOp::Gets:
      return;
    case CompOp::Assert:
      require_bound(free_vars(c.pred()), bound, c.to_string());
      try {
        validate_refs(c.pred(), defs);
      } catch (const PredError& e) {
        throw CompError(e.what());
      }
      return;
    case CompOp::If:
      require_bound(free_vars(c.expr()), bound, c.to_string());
      validate_comp(c.kid(0), bound, progs, defs);
      validate_comp(c.kid(1), bound, progs, defs);
      return;
    case CompOp::Call: {
      auto it = progs.find(c.name());
      if (it == progs.end()) throw CompError("undefined program '" + c.name() + "'");
      if (it->second.params.size() != c.args().size())
        throw CompError("program '" + c.name() + "' expects " + std::to_string(it->second.params.size()) +
                        " argument(s), got " + std::to_string(c.args().size()));
      for (const auto& a : c.args()) require_bound(free_vars(a), bound, c.to_string());
      return;
    }
    case CompOp::Bind: {
      validate_comp(c.kid(0), bound, progs, defs);
      if (c.name() == "_") {
        validate_comp(c.kid(1), bound, progs, defs);
      } else {
        auto inner = bound;
        inner.insert(c.name());
        validate_comp(c.kid(1), inner, progs, defs);
      }
      return;
    }
  }
}

void validate_programs(const ProgramTable& progs, const PredDefs& defs) {
  for (const auto& [name, def] : progs) {
    std::set<std::string> bound;
    for (const auto& p : def.params)
      if (!bound.insert(p.name).second) throw CompError("program '" + name + "' repeats parameter '" + p.name + "'");
    validate_comp(def.body, bound, progs, defs);
  }
  std::map<std::string, int> mark;
  for (const auto& [name, def] : progs) check_call_cycles(name, progs, mark);
}

}  // namespace fannot

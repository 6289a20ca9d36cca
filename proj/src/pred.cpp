#include "fannot/pred.hpp"

#include <algorithm>

namespace fannot {

struct Pred::Node {
  PredOp op;
  std::string name;
  Domain dom;
  Expr expr;
  std::vector<Expr> args;
  std::vector<Pred> kids;
};

namespace {

std::shared_ptr<const Pred::Node> make_node(PredOp op, std::string name = {}, Domain dom = {}, Expr e = {},
                                            std::vector<Expr> args = {}, std::vector<Pred> kids = {}) {
  return std::make_shared<const Pred::Node>(
      Pred::Node{op, std::move(name), std::move(dom), std::move(e), std::move(args), std::move(kids)});
}

const std::shared_ptr<const Pred::Node>& true_node() {
  static const auto n = make_node(PredOp::True);
  return n;
}

const std::shared_ptr<const Pred::Node>& false_node() {
  static const auto n = make_node(PredOp::False);
  return n;
}

}  // namespace

Pred::Pred() : node_(true_node()) {}

Pred Pred::true_() { return Pred(true_node()); }
Pred Pred::false_() { return Pred(false_node()); }
Pred Pred::atom(Expr e) { return Pred(make_node(PredOp::Atom, {}, {}, std::move(e))); }
Pred Pred::and_(std::vector<Pred> ps) { return Pred(make_node(PredOp::And, {}, {}, {}, {}, std::move(ps))); }
Pred Pred::or_(std::vector<Pred> ps) { return Pred(make_node(PredOp::Or, {}, {}, {}, {}, std::move(ps))); }
Pred Pred::not_(Pred p) { return Pred(make_node(PredOp::Not, {}, {}, {}, {}, {std::move(p)})); }
Pred Pred::imp(Pred a, Pred b) {
  return Pred(make_node(PredOp::Imp, {}, {}, {}, {}, {std::move(a), std::move(b)}));
}
Pred Pred::iff(Pred a, Pred b) {
  return Pred(make_node(PredOp::Iff, {}, {}, {}, {}, {std::move(a), std::move(b)}));
}
Pred Pred::forall(std::string var, Domain d, Pred body) {
  return Pred(make_node(PredOp::Forall, std::move(var), std::move(d), {}, {}, {std::move(body)}));
}
Pred Pred::exists(std::string var, Domain d, Pred body) {
  return Pred(make_node(PredOp::Exists, std::move(var), std::move(d), {}, {}, {std::move(body)}));
}
Pred Pred::ref(std::string name, std::vector<Expr> args) {
  return Pred(make_node(PredOp::Ref, std::move(name), {}, {}, std::move(args)));
}
Pred Pred::let(std::string var, Expr e, Pred body) {
  return Pred(make_node(PredOp::Let, std::move(var), {}, std::move(e), {}, {std::move(body)}));
}
Pred Pred::with_field(std::string field, Expr e, Pred body) {
  return Pred(make_node(PredOp::WithField, std::move(field), {}, std::move(e), {}, {std::move(body)}));
}

PredOp Pred::op() const { return node_->op; }
const std::string& Pred::name() const { return node_->name; }
const Domain& Pred::domain() const { return node_->dom; }
const Expr& Pred::expr() const { return node_->expr; }
const std::vector<Expr>& Pred::ref_args() const { return node_->args; }
const std::vector<Pred>& Pred::kids() const { return node_->kids; }

std::strong_ordering Pred::operator<=>(const Pred& other) const {
  if (node_ == other.node_) return std::strong_ordering::equal;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (auto c = a.op <=> b.op; c != 0) return c;
  if (auto c = a.name <=> b.name; c != 0) return c;
  if (auto c = a.dom <=> b.dom; c != 0) return c;
  if (auto c = a.expr <=> b.expr; c != 0) return c;
  if (auto c = a.args <=> b.args; c != 0) return c;
  return a.kids <=> b.kids;
}

namespace {

// Atoms print bare unless the expression could be read as a predicate form.
bool atom_needs_tag(const Expr& e) {
  switch (e.op()) {
    case ExprOp::And:
    case ExprOp::Or:
    case ExprOp::Not:
    case ExprOp::Lit:
    case ExprOp::Var:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string Pred::to_string() const {
  const Node& n = *node_;
  auto list = [&](const char* head) {
    std::string s = std::string("(") + head;
    for (const auto& k : n.kids) s += " " + k.to_string();
    return s + ")";
  };
  switch (n.op) {
    case PredOp::True: return "true";
    case PredOp::False: return "false";
    case PredOp::Atom:
      if (atom_needs_tag(n.expr)) return "(atom " + n.expr.to_string() + ")";
      return n.expr.to_string();
    case PredOp::And: return list("and");
    case PredOp::Or: return list("or");
    case PredOp::Not: return list("not");
    case PredOp::Imp: return list("imp");
    case PredOp::Iff: return list("iff");
    case PredOp::Forall:
    case PredOp::Exists:
      return std::string(n.op == PredOp::Forall ? "(forall " : "(exists ") + n.name + " " + n.dom.to_string() + " " +
             n.kids[0].to_string() + ")";
    case PredOp::Ref: {
      std::string s = "(pred " + n.name;
      for (const auto& a : n.args) s += " " + a.to_string();
      return s + ")";
    }
    case PredOp::Let:
      return "(let " + n.name + " " + n.expr.to_string() + " " + n.kids[0].to_string() + ")";
    case PredOp::WithField:
      return "(with-field " + n.name + " " + n.expr.to_string() + " " + n.kids[0].to_string() + ")";
  }
  return "?";
}

std::string PostPred::to_string() const { return "(post " + ret + " " + body.to_string() + ")"; }

namespace {

struct PopGuard {
  Env& env;
  std::size_t n;
  ~PopGuard() { env.pop(n); }
};

struct FrameGuard {
  Env& env;
  std::size_t saved;
  ~FrameGuard() { env.end_frame(saved); }
};

}  // namespace

bool eval_pred(const Pred& p, const PredDefs& defs, Env& env, const State& s) {
  switch (p.op()) {
    case PredOp::True: return true;
    case PredOp::False: return false;
    case PredOp::Atom: return eval_bool(p.expr(), env, s);
    case PredOp::And:
      for (const auto& k : p.kids())
        if (!eval_pred(k, defs, env, s)) return false;
      return true;
    case PredOp::Or:
      for (const auto& k : p.kids())
        if (eval_pred(k, defs, env, s)) return true;
      return false;
    case PredOp::Not: return !eval_pred(p.kid(0), defs, env, s);
    case PredOp::Imp: return !eval_pred(p.kid(0), defs, env, s) || eval_pred(p.kid(1), defs, env, s);
    case PredOp::Iff: return eval_pred(p.kid(0), defs, env, s) == eval_pred(p.kid(1), defs, env, s);
    case PredOp::Forall:
    case PredOp::Exists: {
      const bool want = p.op() == PredOp::Exists;
      for (const auto& v : p.domain().values()) {
        env.push(p.name(), v);
        PopGuard g{env, 1};
        if (eval_pred(p.body(), defs, env, s) == want) return want;
      }
      return !want;
    }
    case PredOp::Ref: {
      auto it = defs.find(p.name());
      if (it == defs.end()) throw EvalFault("undefined predicate '" + p.name() + "'");
      const PredDef& d = it->second;
      if (d.params.size() != p.ref_args().size())
        throw EvalFault("predicate '" + p.name() + "' applied to the wrong number of arguments");
      std::vector<Value> args;
      args.reserve(d.params.size());
      for (const auto& a : p.ref_args()) args.push_back(eval_expr(a, env, s));
      FrameGuard g{env, env.begin_frame()};
      for (std::size_t i = 0; i < args.size(); ++i) env.push(d.params[i], std::move(args[i]));
      return eval_pred(d.body, defs, env, s);
    }
    case PredOp::Let: {
      env.push(p.name(), eval_expr(p.expr(), env, s));
      PopGuard g{env, 1};
      return eval_pred(p.body(), defs, env, s);
    }
    case PredOp::WithField: {
      if (!s.schema().has(p.name())) throw EvalFault("no state field '" + p.name() + "'");
      State t = s.with(p.name(), eval_expr(p.expr(), env, s));
      return eval_pred(p.body(), defs, env, t);
    }
  }
  throw EvalFault("unknown predicate operator");
}

bool eval_post(const PostPred& q, const PredDefs& defs, Env& env, const Value& ret, const State& s) {
  env.push(q.ret, ret);
  PopGuard g{env, 1};
  return eval_pred(q.body, defs, env, s);
}

void collect_free_vars(const Pred& p, std::set<std::string>& out) {
  switch (p.op()) {
    case PredOp::True:
    case PredOp::False:
      return;
    case PredOp::Atom:
      collect_free_vars(p.expr(), out);
      return;
    case PredOp::Ref:
      for (const auto& a : p.ref_args()) collect_free_vars(a, out);
      return;
    case PredOp::Forall:
    case PredOp::Exists:
    case PredOp::Let: {
      if (p.op() == PredOp::Let) collect_free_vars(p.expr(), out);
      std::set<std::string> inner;
      collect_free_vars(p.body(), inner);
      inner.erase(p.name());
      out.insert(inner.begin(), inner.end());
      return;
    }
    case PredOp::WithField:
      collect_free_vars(p.expr(), out);
      collect_free_vars(p.body(), out);
      return;
    default:
      for (const auto& k : p.kids()) collect_free_vars(k, out);
  }
}

std::set<std::string> free_vars(const Pred& p) {
  std::set<std::string> out;
  collect_free_vars(p, out);
  return out;
}

std::set<std::string> free_vars(const PostPred& q) {
  auto out = free_vars(q.body);
  out.erase(q.ret);
  return out;
}

namespace {

void fields_rec(const Pred& p, const PredDefs& defs, std::set<std::string>& out, std::set<std::string>& seen) {
  switch (p.op()) {
    case PredOp::True:
    case PredOp::False:
      return;
    case PredOp::Atom:
      collect_fields(p.expr(), out);
      return;
    case PredOp::Ref: {
      for (const auto& a : p.ref_args()) collect_fields(a, out);
      if (!seen.insert(p.name()).second) return;
      auto it = defs.find(p.name());
      if (it != defs.end()) fields_rec(it->second.body, defs, out, seen);
      return;
    }
    case PredOp::Let:
      collect_fields(p.expr(), out);
      fields_rec(p.body(), defs, out, seen);
      return;
    case PredOp::WithField: {
      // The body sees the replaced field's new value, not the old one.
      std::set<std::string> inner;
      std::set<std::string> inner_seen;
      fields_rec(p.body(), defs, inner, inner_seen);
      if (inner.erase(p.name())) collect_fields(p.expr(), out);
      out.insert(inner.begin(), inner.end());
      return;
    }
    default:
      for (const auto& k : p.kids()) fields_rec(k, defs, out, seen);
  }
}

}  // namespace

void collect_fields(const Pred& p, const PredDefs& defs, std::set<std::string>& out) {
  std::set<std::string> seen;
  fields_rec(p, defs, out, seen);
}

bool reads_state(const Pred& p, const PredDefs& defs) {
  std::set<std::string> f;
  collect_fields(p, defs, f);
  return !f.empty();
}

void collect_refs(const Pred& p, const PredDefs& defs, std::set<std::string>& out) {
  if (p.op() == PredOp::Ref) {
    if (!out.insert(p.name()).second) return;
    auto it = defs.find(p.name());
    if (it != defs.end()) collect_refs(it->second.body, defs, out);
    return;
  }
  for (const auto& k : p.kids()) collect_refs(k, defs, out);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + "_" + std::to_string(i);
    if (!avoid.count(n)) return n;
  }
}

namespace {

bool contains_with_field(const Pred& p) {
  if (p.op() == PredOp::WithField) return true;
  for (const auto& k : p.kids())
    if (contains_with_field(k)) return true;
  return false;
}

Pred subst_rec(const Pred& p, const std::string& var, const Expr& e, const std::set<std::string>& efree) {
  switch (p.op()) {
    case PredOp::True:
    case PredOp::False:
      return p;
    case PredOp::Atom:
      return Pred::atom(subst(p.expr(), var, e));
    case PredOp::Ref: {
      std::vector<Expr> args;
      for (const auto& a : p.ref_args()) args.push_back(subst(a, var, e));
      return Pred::ref(p.name(), std::move(args));
    }
    case PredOp::WithField:
      return Pred::with_field(p.name(), subst(p.expr(), var, e), subst_rec(p.body(), var, e, efree));
    case PredOp::Forall:
    case PredOp::Exists:
    case PredOp::Let: {
      Expr bound = p.op() == PredOp::Let ? subst(p.expr(), var, e) : Expr();
      auto rebuild = [&](std::string name, Pred body) {
        if (p.op() == PredOp::Let) return Pred::let(std::move(name), bound, std::move(body));
        if (p.op() == PredOp::Forall) return Pred::forall(std::move(name), p.domain(), std::move(body));
        return Pred::exists(std::move(name), p.domain(), std::move(body));
      };
      if (p.name() == var) return rebuild(p.name(), p.body());
      auto body_free = free_vars(p.body());
      if (!body_free.count(var)) return rebuild(p.name(), p.body());
      std::string name = p.name();
      Pred body = p.body();
      if (efree.count(name)) {
        std::set<std::string> avoid = efree;
        avoid.insert(body_free.begin(), body_free.end());
        avoid.insert(var);
        std::string fresh = fresh_name(name, avoid);
        body = rename(body, name, fresh);
        name = fresh;
      }
      return rebuild(std::move(name), subst_rec(body, var, e, efree));
    }
    default: {
      std::vector<Pred> kids;
      for (const auto& k : p.kids()) kids.push_back(subst_rec(k, var, e, efree));
      switch (p.op()) {
        case PredOp::And: return Pred::and_(std::move(kids));
        case PredOp::Or: return Pred::or_(std::move(kids));
        case PredOp::Not: return Pred::not_(std::move(kids[0]));
        case PredOp::Imp: return Pred::imp(std::move(kids[0]), std::move(kids[1]));
        default: return Pred::iff(std::move(kids[0]), std::move(kids[1]));
      }
    }
  }
}

}  // namespace

Pred subst(const Pred& p, const std::string& var, const Expr& e) {
  if (!free_vars(p).count(var)) return p;
  // Under a field replacement a state-reading expression would be evaluated
  // in the wrong state; bind it once at the current state instead.
  if (reads_state(e) && contains_with_field(p)) return Pred::let(var, e, p);
  return subst_rec(p, var, e, free_vars(e));
}

Pred rename(const Pred& p, const std::string& from, const std::string& to) {
  if (from == to) return p;
  return subst(p, from, Expr::var(to));
}

namespace {

void flatten_and(const Pred& p, std::vector<Pred>& out) {
  if (p.op() == PredOp::And) {
    for (const auto& k : p.kids()) flatten_and(k, out);
  } else {
    out.push_back(p);
  }
}

}  // namespace

Pred normalize(const Pred& p) {
  switch (p.op()) {
    case PredOp::True:
    case PredOp::False:
    case PredOp::Atom:
    case PredOp::Ref:
      return p;
    case PredOp::And: {
      std::vector<Pred> flat;
      for (const auto& k : p.kids()) flatten_and(normalize(k), flat);
      std::vector<Pred> out;
      for (auto& k : flat) {
        if (k.is_false()) return Pred::false_();
        if (!k.is_true()) out.push_back(std::move(k));
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      if (out.empty()) return Pred::true_();
      if (out.size() == 1) return out[0];
      return Pred::and_(std::move(out));
    }
    case PredOp::Or: {
      std::vector<Pred> kids;
      for (const auto& k : p.kids()) kids.push_back(normalize(k));
      return Pred::or_(std::move(kids));
    }
    case PredOp::Not: return Pred::not_(normalize(p.kid(0)));
    case PredOp::Imp: return Pred::imp(normalize(p.kid(0)), normalize(p.kid(1)));
    case PredOp::Iff: return Pred::iff(normalize(p.kid(0)), normalize(p.kid(1)));
    case PredOp::Forall: return Pred::forall(p.name(), p.domain(), normalize(p.body()));
    case PredOp::Exists: return Pred::exists(p.name(), p.domain(), normalize(p.body()));
    case PredOp::Let: return Pred::let(p.name(), p.expr(), normalize(p.body()));
    case PredOp::WithField: return Pred::with_field(p.name(), p.expr(), normalize(p.body()));
  }
  return p;
}

std::vector<Pred> conjuncts(const Pred& p) {
  Pred n = normalize(p);
  if (n.is_true()) return {};
  if (n.op() == PredOp::And) return n.kids();
  return {n};
}

Pred conj(std::vector<Pred> ps) { return normalize(Pred::and_(std::move(ps))); }
Pred conj(const Pred& a, const Pred& b) { return conj(std::vector<Pred>{a, b}); }

namespace {

void check_refs(const Pred& p, const PredDefs& defs) {
  if (p.op() == PredOp::Ref) {
    auto it = defs.find(p.name());
    if (it == defs.end()) throw PredError("undefined predicate '" + p.name() + "'");
    if (it->second.params.size() != p.ref_args().size())
      throw PredError("predicate '" + p.name() + "' expects " + std::to_string(it->second.params.size()) +
                      " argument(s), got " + std::to_string(p.ref_args().size()));
  }
  for (const auto& k : p.kids()) check_refs(k, defs);
}

void check_acyclic(const std::string& name, const PredDefs& defs, std::map<std::string, int>& mark) {
  int& m = mark[name];
  if (m == 2) return;
  if (m == 1) throw PredError("predicate definitions are cyclic through '" + name + "'");
  m = 1;
  std::set<std::string> direct;
  std::vector<const Pred*> stack{&defs.at(name).body};
  while (!stack.empty()) {
    const Pred* q = stack.back();
    stack.pop_back();
    if (q->op() == PredOp::Ref) direct.insert(q->name());
    for (const auto& k : q->kids()) stack.push_back(&k);
  }
  for (const auto& d : direct) check_acyclic(d, defs, mark);
  mark[name] = 2;
}

}  // namespace

void validate_refs(const Pred& p, const PredDefs& defs) { check_refs(p, defs); }

void validate_defs(const PredDefs& defs) {
  for (const auto& [name, d] : defs) {
    check_refs(d.body, defs);
    std::set<std::string> params(d.params.begin(), d.params.end());
    if (params.size() != d.params.size()) throw PredError("predicate '" + name + "' repeats a parameter");
    for (const auto& v : free_vars(d.body))
      if (!params.count(v)) throw PredError("predicate '" + name + "' mentions unbound variable '" + v + "'");
  }
  std::map<std::string, int> mark;
  for (const auto& [name, d] : defs) check_acyclic(name, defs, mark);
}

}  // namespace fannot

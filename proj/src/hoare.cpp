#include "fannot/hoare.hpp"

namespace fannot {

namespace {

struct StopScan {};

}  // namespace

std::string Triple::to_string() const {
  return "(triple " + fixes_to_string(fixes) + " (pre " + pre.to_string() + ") (prog " + prog.to_string() + ") " +
         post.to_string() + ")";
}

Verdict check_triple(const Workspace& ws, const Triple& t) {
  std::set<std::string> vars = free_vars(t.pre);
  collect_free_vars(t.prog, vars);
  auto pv = free_vars(t.post);
  vars.insert(pv.begin(), pv.end());
  std::set<std::string> fields;
  collect_fields(t.pre, ws.preds, fields);
  collect_fields_read(t.prog, ws.programs, ws.preds, fields);
  collect_fields(t.post.body, ws.preds, fields);

  return scan(ws, used_fixes(t.fixes, vars), fields, [&](Env& env, const State& s) {
    if (!eval_pred(t.pre, ws.preds, env, s)) return Probe::pass();
    // Program binders must not shadow fixed variables in the postcondition.
    Env post_env = env;
    try {
      exec(t.prog, ws.programs, ws.preds, env, s, [&](const Value& r, const State& s1) {
        if (!eval_post(t.post, ws.preds, post_env, r, s1)) throw StopScan{};
      });
    } catch (const StopScan&) {
      for (const auto& o : run(t.prog, ws.programs, ws.preds, env, s))
        if (!eval_post(t.post, ws.preds, post_env, o.ret, o.state)) return Probe::fail("postcondition fails", o);
    }
    return Probe::pass();
  });
}

Pred subst_ret(const PostPred& q, const Expr& e) {
  if (!free_vars(q.body).count(q.ret)) return q.body;
  return subst(q.body, q.ret, e);
}

Pred wp_atomic(const Workspace& ws, const Comp& c, const PostPred& q, const DomainCtx& ctx) {
  switch (c.op()) {
    case CompOp::Return: return subst_ret(q, c.expr());
    case CompOp::Gets: return subst_ret(q, Expr::field(c.name()));
    case CompOp::Put: {
      Pred body = subst_ret(q, Expr::lit(Value::unit()));
      std::set<std::string> read;
      collect_fields(body, ws.preds, read);
      if (!read.count(c.name())) return body;
      return Pred::with_field(c.name(), c.expr(), body);
    }
    case CompOp::Select: {
      Domain set_dom = infer_expr(c.expr(), ctx, *ws.schema);
      if (set_dom.kind() != Domain::Kind::Set) throw TypeError("select over non-set " + c.expr().to_string());
      std::set<std::string> avoid = free_vars(c.expr());
      collect_free_vars(q.body, avoid);
      for (const auto& [n, d] : ctx) avoid.insert(n);
      std::string v = q.ret;
      Pred body = q.body;
      if (v == "_" || free_vars(c.expr()).count(v)) {
        v = fresh_name("v", avoid);
        body = rename(q.body, q.ret, v);
      }
      return Pred::forall(v, set_dom.base(), Pred::imp(Pred::atom(Expr::in(Expr::var(v), c.expr())), body));
    }
    case CompOp::Assert: return Pred::and_({c.pred(), subst_ret(q, Expr::lit(Value::unit()))});
    case CompOp::If: {
      Pred cond = Pred::atom(c.expr());
      return Pred::and_({Pred::imp(cond, wp_atomic(ws, c.kid(0), q, ctx)),
                         Pred::imp(Pred::not_(cond), wp_atomic(ws, c.kid(1), q, ctx))});
    }
    case CompOp::Bind:
    case CompOp::Call:
      break;
  }
  throw CheckError("wp_atomic: not an atomic program: " + c.to_string());
}

std::pair<Triple, Triple> split(const Workspace& ws, const Triple& goal, const PostPred& mid) {
  if (goal.prog.op() != CompOp::Bind) throw CheckError("split: program is not a bind: " + goal.prog.to_string());
  const Comp& f = goal.prog.kid(0);
  const Comp& g = goal.prog.kid(1);
  std::string x = goal.prog.name();
  if (x == "_") {
    std::set<std::string> avoid = free_vars(mid.body);
    collect_free_vars(g, avoid);
    collect_free_vars(goal.post.body, avoid);
    for (const auto& b : goal.fixes) avoid.insert(b.name);
    x = fresh_name("x", avoid);
  }
  for (const auto& b : goal.fixes)
    if (b.name == x) throw CheckError("split: binder '" + x + "' shadows a fixed variable");
  std::vector<Binder> inner = goal.fixes;
  inner.push_back({x, infer_comp(f, ctx_of(goal.fixes), *ws.schema, ws.programs)});
  Triple cont{inner, rename(mid.body, mid.ret, x), g, goal.post};
  Triple head{goal.fixes, goal.pre, f, mid};
  return {cont, head};
}

Triple weaken(const Workspace& ws, const Triple& t, const Pred& p) {
  Verdict v = entails(ws, t.fixes, p, t.pre);
  if (!v.holds()) throw CheckError("weaken: precondition does not entail the original\n" + v.to_string());
  return {t.fixes, p, t.prog, t.post};
}

}  // namespace fannot

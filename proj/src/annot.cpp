#include "fannot/annot.hpp"

#include <algorithm>

namespace fannot {

struct AnnComp::Node {
  AnnOp op;
  Pred pred;
  Comp comp;
  std::string name;
  Expr cond;
  std::vector<AnnComp> kids;
};

AnnComp::AnnComp() : node_(std::make_shared<const Node>(Node{AnnOp::Step, {}, {}, {}, {}, {}})) {}

AnnComp AnnComp::step(Pred p, Comp c) {
  return AnnComp(std::make_shared<const Node>(Node{AnnOp::Step, std::move(p), std::move(c), {}, {}, {}}));
}
AnnComp AnnComp::bind(std::string x, AnnComp first, AnnComp rest) {
  return AnnComp(
      std::make_shared<const Node>(Node{AnnOp::Bind, {}, {}, std::move(x), {}, {std::move(first), std::move(rest)}}));
}
AnnComp AnnComp::if_(Expr cond, AnnComp then_a, AnnComp else_a) {
  return AnnComp(
      std::make_shared<const Node>(Node{AnnOp::If, {}, {}, {}, std::move(cond), {std::move(then_a), std::move(else_a)}}));
}
AnnComp AnnComp::seq(std::vector<std::pair<std::string, AnnComp>> steps, AnnComp last) {
  AnnComp out = std::move(last);
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) out = bind(std::move(it->first), std::move(it->second), out);
  return out;
}

AnnOp AnnComp::op() const { return node_->op; }
const Pred& AnnComp::pred() const { return node_->pred; }
const Comp& AnnComp::comp() const { return node_->comp; }
const std::string& AnnComp::name() const { return node_->name; }
const Expr& AnnComp::cond() const { return node_->cond; }
const std::vector<AnnComp>& AnnComp::kids() const { return node_->kids; }

std::strong_ordering AnnComp::operator<=>(const AnnComp& other) const {
  if (node_ == other.node_) return std::strong_ordering::equal;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (auto c = a.op <=> b.op; c != 0) return c;
  if (auto c = a.pred <=> b.pred; c != 0) return c;
  if (auto c = a.comp <=> b.comp; c != 0) return c;
  if (auto c = a.name <=> b.name; c != 0) return c;
  if (auto c = a.cond <=> b.cond; c != 0) return c;
  return a.kids <=> b.kids;
}

std::string AnnComp::to_string() const {
  switch (op()) {
    case AnnOp::Step: return "(ann " + pred().to_string() + " " + comp().to_string() + ")";
    case AnnOp::If:
      return "(if-a " + cond().to_string() + " " + kid(0).to_string() + " " + kid(1).to_string() + ")";
    case AnnOp::Bind: {
      std::string s = "(do-a";
      const AnnComp* a = this;
      while (a->op() == AnnOp::Bind) {
        if (a->name() == "_")
          s += " " + a->kid(0).to_string();
        else
          s += " (<- " + a->name() + " " + a->kid(0).to_string() + ")";
        a = &a->kid(1);
      }
      return s + " " + a->to_string() + ")";
    }
  }
  return "?";
}

Comp drop_ann(const AnnComp& f) {
  switch (f.op()) {
    case AnnOp::Step: return f.comp();
    case AnnOp::Bind: return Comp::bind(f.name(), drop_ann(f.kid(0)), drop_ann(f.kid(1)));
    case AnnOp::If: return Comp::if_(f.cond(), drop_ann(f.kid(0)), drop_ann(f.kid(1)));
  }
  return {};
}

AnnComp lift(const Pred& p, const Comp& c) { return AnnComp::step(p, c); }

AnnComp annotate_uniform(const Comp& c, const Pred& p) {
  switch (c.op()) {
    case CompOp::Bind: return AnnComp::bind(c.name(), annotate_uniform(c.kid(0), p), annotate_uniform(c.kid(1), p));
    case CompOp::If:
      if (!is_atomic(c)) return AnnComp::if_(c.expr(), annotate_uniform(c.kid(0), p), annotate_uniform(c.kid(1), p));
      return AnnComp::step(p, c);
    default:
      return AnnComp::step(p, c);
  }
}

namespace {

struct PopGuard {
  Env& env;
  ~PopGuard() { env.pop(); }
};

}  // namespace

bool exec_ann(const AnnComp& f, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s,
              const OutcomeSink& sink) {
  switch (f.op()) {
    case AnnOp::Step: {
      const bool fails = !eval_pred(f.pred(), defs, env, s);
      exec(f.comp(), progs, defs, env, s, sink);
      return fails;
    }
    case AnnOp::If:
      return exec_ann(eval_bool(f.cond(), env, s) ? f.kid(0) : f.kid(1), progs, defs, env, s, sink);
    case AnnOp::Bind: {
      bool cont_fails = false;
      const std::string& x = f.name();
      const bool head_fails = exec_ann(f.kid(0), progs, defs, env, s, [&](const Value& r, const State& s1) {
        if (x == "_") {
          cont_fails = exec_ann(f.kid(1), progs, defs, env, s1, sink) || cont_fails;
        } else {
          env.push(x, r);
          PopGuard g{env};
          cont_fails = exec_ann(f.kid(1), progs, defs, env, s1, sink) || cont_fails;
        }
      });
      return head_fails || cont_fails;
    }
  }
  return false;
}

AnnRun run_ann(const AnnComp& f, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s) {
  AnnRun out;
  out.fails = exec_ann(f, progs, defs, env, s, [&](const Value& r, const State& s1) { out.outcomes.push_back({r, s1}); });
  std::sort(out.outcomes.begin(), out.outcomes.end());
  out.outcomes.erase(std::unique(out.outcomes.begin(), out.outcomes.end()), out.outcomes.end());
  return out;
}

bool afails(const AnnComp& f, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s) {
  return exec_ann(f, progs, defs, env, s, [](const Value&, const State&) {});
}

bool same_skeleton(const AnnComp& f, const AnnComp& g) {
  if (f.op() != g.op()) return false;
  switch (f.op()) {
    case AnnOp::Step: return f.comp() == g.comp();
    case AnnOp::Bind: return f.name() == g.name() && same_skeleton(f.kid(0), g.kid(0)) && same_skeleton(f.kid(1), g.kid(1));
    case AnnOp::If: return f.cond() == g.cond() && same_skeleton(f.kid(0), g.kid(0)) && same_skeleton(f.kid(1), g.kid(1));
  }
  return false;
}

AnnComp merge(const AnnComp& f, const AnnComp& g) {
  if (!same_skeleton(f, g)) throw AnnError("merge: annotations have different skeletons");
  switch (f.op()) {
    case AnnOp::Step: return AnnComp::step(conj(f.pred(), g.pred()), f.comp());
    case AnnOp::Bind: return AnnComp::bind(f.name(), merge(f.kid(0), g.kid(0)), merge(f.kid(1), g.kid(1)));
    case AnnOp::If: return AnnComp::if_(f.cond(), merge(f.kid(0), g.kid(0)), merge(f.kid(1), g.kid(1)));
  }
  return f;
}

Comp to_asserting_comp(const AnnComp& f) {
  switch (f.op()) {
    case AnnOp::Step: return Comp::bind("_", Comp::assert_(f.pred()), f.comp());
    case AnnOp::Bind: return Comp::bind(f.name(), to_asserting_comp(f.kid(0)), to_asserting_comp(f.kid(1)));
    case AnnOp::If: return Comp::if_(f.cond(), to_asserting_comp(f.kid(0)), to_asserting_comp(f.kid(1)));
  }
  return {};
}

AnnComp normalize(const AnnComp& f) {
  switch (f.op()) {
    case AnnOp::Step: return AnnComp::step(normalize(f.pred()), f.comp());
    case AnnOp::Bind: return AnnComp::bind(f.name(), normalize(f.kid(0)), normalize(f.kid(1)));
    case AnnOp::If: return AnnComp::if_(f.cond(), normalize(f.kid(0)), normalize(f.kid(1)));
  }
  return f;
}

namespace {

void steps_rec(const Workspace& ws, const AnnComp& f, const DomainCtx& ctx, std::vector<AnnStepView>& out) {
  switch (f.op()) {
    case AnnOp::Step:
      out.push_back({out.size(), f.pred(), f.comp(), ctx});
      return;
    case AnnOp::If:
      steps_rec(ws, f.kid(0), ctx, out);
      steps_rec(ws, f.kid(1), ctx, out);
      return;
    case AnnOp::Bind: {
      steps_rec(ws, f.kid(0), ctx, out);
      if (f.name() == "_") {
        steps_rec(ws, f.kid(1), ctx, out);
      } else {
        DomainCtx inner = ctx;
        inner[f.name()] = infer_comp(drop_ann(f.kid(0)), ctx, *ws.schema, ws.programs);
        steps_rec(ws, f.kid(1), inner, out);
      }
      return;
    }
  }
}

constexpr std::size_t kReplaced = static_cast<std::size_t>(-1);

AnnComp replace_rec(const AnnComp& f, std::size_t& index, const Pred& p) {
  switch (f.op()) {
    case AnnOp::Step:
      if (index == kReplaced) return f;
      if (index-- > 0) return f;
      index = kReplaced;
      return AnnComp::step(p, f.comp());
    case AnnOp::Bind: {
      AnnComp a = replace_rec(f.kid(0), index, p);
      return AnnComp::bind(f.name(), a, replace_rec(f.kid(1), index, p));
    }
    case AnnOp::If: {
      AnnComp a = replace_rec(f.kid(0), index, p);
      return AnnComp::if_(f.cond(), a, replace_rec(f.kid(1), index, p));
    }
  }
  return f;
}

void ann_free_vars(const AnnComp& f, std::set<std::string>& out) {
  switch (f.op()) {
    case AnnOp::Step:
      collect_free_vars(f.pred(), out);
      collect_free_vars(f.comp(), out);
      return;
    case AnnOp::If:
      collect_free_vars(f.cond(), out);
      ann_free_vars(f.kid(0), out);
      ann_free_vars(f.kid(1), out);
      return;
    case AnnOp::Bind: {
      ann_free_vars(f.kid(0), out);
      std::set<std::string> inner;
      ann_free_vars(f.kid(1), inner);
      if (f.name() != "_") inner.erase(f.name());
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

void ann_fields(const Workspace& ws, const AnnComp& f, std::set<std::string>& out) {
  switch (f.op()) {
    case AnnOp::Step:
      collect_fields(f.pred(), ws.preds, out);
      collect_fields_read(f.comp(), ws.programs, ws.preds, out);
      return;
    case AnnOp::If:
      collect_fields(f.cond(), out);
      [[fallthrough]];
    case AnnOp::Bind:
      for (const auto& k : f.kids()) ann_fields(ws, k, out);
      return;
  }
}

std::set<std::string> vars_of(std::initializer_list<const Pred*> preds, std::initializer_list<const AnnComp*> anns,
                              const Comp* prog, const PostPred* post) {
  std::set<std::string> vars;
  for (const auto* p : preds) collect_free_vars(*p, vars);
  for (const auto* a : anns) ann_free_vars(*a, vars);
  if (prog) collect_free_vars(*prog, vars);
  if (post) {
    auto pv = free_vars(*post);
    vars.insert(pv.begin(), pv.end());
  }
  return vars;
}

std::set<std::string> fields_of(const Workspace& ws, std::initializer_list<const Pred*> preds,
                                std::initializer_list<const AnnComp*> anns, const Comp* prog, const PostPred* post) {
  std::set<std::string> fields;
  for (const auto* p : preds) collect_fields(*p, ws.preds, fields);
  for (const auto* a : anns) ann_fields(ws, *a, fields);
  if (prog) collect_fields_read(*prog, ws.programs, ws.preds, fields);
  if (post) collect_fields(post->body, ws.preds, fields);
  return fields;
}

}  // namespace

std::vector<AnnStepView> ann_steps(const Workspace& ws, const AnnComp& f, const DomainCtx& ctx) {
  std::vector<AnnStepView> out;
  steps_rec(ws, f, ctx, out);
  return out;
}

AnnComp with_step_pred(const AnnComp& f, std::size_t index, const Pred& p) {
  std::size_t i = index;
  AnnComp out = replace_rec(f, i, p);
  if (i != kReplaced) throw AnnError("annotation has no step " + std::to_string(index));
  return out;
}

std::string AnnTriple::to_string() const {
  return "(ann-triple " + fixes_to_string(fixes) + " (pre " + pre.to_string() + ") (ann " + ann.to_string() + ") " +
         post.to_string() + ")";
}
std::string Ordering::to_string() const {
  return "(ordering " + fixes_to_string(fixes) + " (pre " + pre.to_string() + ") (prog " + prog.to_string() +
         ") (ann " + ann.to_string() + "))";
}
std::string Annotator::to_string() const {
  return "(annotator " + fixes_to_string(fixes) + " (pre " + pre.to_string() + ") (prog " + prog.to_string() + ") " +
         post.to_string() + " (ann " + ann.to_string() + "))";
}
std::string StrongAnnotator::to_string() const {
  return "(strong-annotator " + fixes_to_string(fixes) + " (pre " + pre.to_string() + ") (ann " + ann_in.to_string() +
         ") " + post.to_string() + " (out " + ann_out.to_string() + "))";
}
std::string Refinement::to_string() const {
  return "(refinement " + fixes_to_string(fixes) + " (lhs " + lhs.to_string() + ") (rhs " + rhs.to_string() + "))";
}

Verdict check_order(const Workspace& ws, const Ordering& o) {
  if (!(drop_ann(o.ann) == o.prog)) throw AnnError("ordering: annotation does not annotate the program");
  auto vars = vars_of({&o.pre}, {&o.ann}, &o.prog, nullptr);
  auto fields = fields_of(ws, {&o.pre}, {&o.ann}, &o.prog, nullptr);
  return scan(ws, used_fixes(o.fixes, vars), fields, [&](Env& env, const State& s) {
    if (!eval_pred(o.pre, ws.preds, env, s)) return Probe::pass();
    if (afails(o.ann, ws.programs, ws.preds, env, s)) return Probe::fail("annotation fails");
    return Probe::pass();
  });
}

Verdict check_ann_triple(const Workspace& ws, const AnnTriple& t) {
  auto vars = vars_of({&t.pre}, {&t.ann}, nullptr, &t.post);
  auto fields = fields_of(ws, {&t.pre}, {&t.ann}, nullptr, &t.post);
  return scan(ws, used_fixes(t.fixes, vars), fields, [&](Env& env, const State& s) {
    if (!eval_pred(t.pre, ws.preds, env, s)) return Probe::pass();
    AnnRun r = run_ann(t.ann, ws.programs, ws.preds, env, s);
    if (r.fails) return Probe::pass();
    for (const auto& o : r.outcomes)
      if (!eval_post(t.post, ws.preds, env, o.ret, o.state)) return Probe::fail("postcondition fails", o);
    return Probe::pass();
  });
}

Verdict check_annotator(const Workspace& ws, const Annotator& a) {
  Verdict v = check_triple(ws, Triple{a.fixes, a.pre, a.prog, a.post});
  if (!v.holds()) return v;
  v = check_order(ws, Ordering{a.fixes, a.pre, a.prog, a.ann});
  if (!v.holds() && v.diagnostic.empty()) v.diagnostic = "annotation fails";
  return v;
}

Verdict check_strong_annotator(const Workspace& ws, const StrongAnnotator& a) {
  if (!(drop_ann(a.ann_in) == drop_ann(a.ann_out)))
    throw AnnError("strong annotator: annotations have different underlying programs");
  Verdict v = check_ann_triple(ws, AnnTriple{a.fixes, a.pre, a.ann_in, a.post});
  if (!v.holds()) return v;
  auto vars = vars_of({&a.pre}, {&a.ann_in, &a.ann_out}, nullptr, nullptr);
  auto fields = fields_of(ws, {&a.pre}, {&a.ann_in, &a.ann_out}, nullptr, nullptr);
  return scan(ws, used_fixes(a.fixes, vars), fields, [&](Env& env, const State& s) {
    if (!eval_pred(a.pre, ws.preds, env, s)) return Probe::pass();
    if (afails(a.ann_in, ws.programs, ws.preds, env, s)) return Probe::pass();
    if (afails(a.ann_out, ws.programs, ws.preds, env, s)) return Probe::fail("output annotation fails");
    return Probe::pass();
  });
}

Verdict check_refinement(const Workspace& ws, const Refinement& r) {
  auto vars = vars_of({}, {&r.lhs, &r.rhs}, nullptr, nullptr);
  auto fields = fields_of(ws, {}, {&r.lhs, &r.rhs}, nullptr, nullptr);
  return scan(ws, used_fixes(r.fixes, vars), fields, [&](Env& env, const State& s) {
    AnnRun a = run_ann(r.lhs, ws.programs, ws.preds, env, s);
    AnnRun b = run_ann(r.rhs, ws.programs, ws.preds, env, s);
    if (!a.fails && a.outcomes != b.outcomes) return Probe::fail("outcomes differ where the left side does not fail");
    if (b.fails && !a.fails) return Probe::fail("right side fails where the left side does not");
    return Probe::pass();
  });
}

}  // namespace fannot

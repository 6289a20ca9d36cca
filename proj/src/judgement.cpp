#include "fannot/judgement.hpp"

#include <functional>

namespace fannot {

struct Judgement::Node {
  Claim claim;
  std::string rule;
  std::vector<Judgement> premises;
  std::vector<std::string> sides;
};

struct JudgementAccess {
  static Judgement make(Claim c, std::string rule, std::vector<Judgement> premises, std::vector<std::string> sides) {
    return Judgement(std::make_shared<const Judgement::Node>(
        Judgement::Node{std::move(c), std::move(rule), std::move(premises), std::move(sides)}));
  }
  static const Judgement::Node* id(const Judgement& j) { return j.node_.get(); }
};

// ---------------------------------------------------------------- claims

const char* claim_kind(const Claim& c) {
  static const char* names[] = {"triple", "ann-triple", "ordering", "annotator", "strong-annotator", "refinement"};
  return names[c.index()];
}

std::string claim_to_string(const Claim& c) {
  return std::visit([](const auto& x) { return x.to_string(); }, c);
}

const std::vector<Binder>& claim_fixes(const Claim& c) {
  return std::visit([](const auto& x) -> const std::vector<Binder>& { return x.fixes; }, c);
}

Verdict check_claim(const Workspace& ws, const Claim& c) {
  struct V {
    const Workspace& ws;
    Verdict operator()(const Triple& t) const { return check_triple(ws, t); }
    Verdict operator()(const AnnTriple& t) const { return check_ann_triple(ws, t); }
    Verdict operator()(const Ordering& o) const { return check_order(ws, o); }
    Verdict operator()(const Annotator& a) const { return check_annotator(ws, a); }
    Verdict operator()(const StrongAnnotator& a) const { return check_strong_annotator(ws, a); }
    Verdict operator()(const Refinement& r) const { return check_refinement(ws, r); }
  };
  return std::visit(V{ws}, c);
}

namespace {

void ann_vars(const AnnComp& f, std::set<std::string>& out) {
  switch (f.op()) {
    case AnnOp::Step:
      collect_free_vars(f.pred(), out);
      collect_free_vars(f.comp(), out);
      return;
    case AnnOp::Bind: {
      ann_vars(f.kid(0), out);
      std::set<std::string> rest;
      ann_vars(f.kid(1), rest);
      rest.erase(f.name());
      out.insert(rest.begin(), rest.end());
      return;
    }
    case AnnOp::If:
      collect_free_vars(f.cond(), out);
      ann_vars(f.kid(0), out);
      ann_vars(f.kid(1), out);
      return;
  }
}

void post_vars(const PostPred& q, std::set<std::string>& out) {
  auto v = free_vars(q);
  out.insert(v.begin(), v.end());
}

std::set<std::string> claim_vars(const Claim& c) {
  std::set<std::string> out;
  struct V {
    std::set<std::string>& out;
    void operator()(const Triple& t) const {
      collect_free_vars(t.pre, out);
      collect_free_vars(t.prog, out);
      post_vars(t.post, out);
    }
    void operator()(const AnnTriple& t) const {
      collect_free_vars(t.pre, out);
      ann_vars(t.ann, out);
      post_vars(t.post, out);
    }
    void operator()(const Ordering& o) const {
      collect_free_vars(o.pre, out);
      collect_free_vars(o.prog, out);
      ann_vars(o.ann, out);
    }
    void operator()(const Annotator& a) const {
      collect_free_vars(a.pre, out);
      collect_free_vars(a.prog, out);
      post_vars(a.post, out);
      ann_vars(a.ann, out);
    }
    void operator()(const StrongAnnotator& a) const {
      collect_free_vars(a.pre, out);
      ann_vars(a.ann_in, out);
      post_vars(a.post, out);
      ann_vars(a.ann_out, out);
    }
    void operator()(const Refinement& r) const {
      ann_vars(r.lhs, out);
      ann_vars(r.rhs, out);
    }
  };
  std::visit(V{out}, c);
  return out;
}

Judgement make(Claim c, std::string rule, std::vector<Judgement> premises = {},
               std::vector<std::string> sides = {}) {
  std::set<std::string> names;
  for (const auto& b : claim_fixes(c))
    if (!names.insert(b.name).second) throw RuleError(rule + ": variable '" + b.name + "' fixed twice");
  for (const auto& v : claim_vars(c))
    if (!names.count(v)) throw RuleError(rule + ": variable '" + v + "' is not fixed in the conclusion");
  return JudgementAccess::make(std::move(c), std::move(rule), std::move(premises), std::move(sides));
}

std::vector<Binder> merge_fixes(const std::string& rule, const std::vector<Binder>& a, const std::vector<Binder>& b) {
  std::vector<Binder> out = a;
  for (const auto& x : b) {
    bool dup = false;
    for (const auto& y : out) {
      if (y.name != x.name) continue;
      if (!(y.dom == x.dom))
        throw RuleError(rule + ": variable '" + x.name + "' fixed over " + y.dom.to_string() + " and " +
                        x.dom.to_string());
      dup = true;
    }
    if (!dup) out.push_back(x);
  }
  return out;
}

std::vector<Binder> without(const std::vector<Binder>& fixes, const std::string& name) {
  std::vector<Binder> out;
  for (const auto& b : fixes)
    if (b.name != name) out.push_back(b);
  return out;
}

const Binder* find_fix(const std::vector<Binder>& fixes, const std::string& name) {
  for (const auto& b : fixes)
    if (b.name == name) return &b;
  return nullptr;
}

std::set<std::string> names_of(const std::vector<Binder>& fixes) {
  std::set<std::string> out;
  for (const auto& b : fixes) out.insert(b.name);
  return out;
}

bool structurally_entails(const Pred& p, const Pred& q) {
  const Pred pn = normalize(p);
  if (pn.is_false()) return true;
  const auto have = conjuncts(pn);
  const std::set<Pred> have_set(have.begin(), have.end());
  for (const auto& c : conjuncts(normalize(q)))
    if (!have_set.count(c)) return false;
  return true;
}

// Side condition p ⇒ q; throws RuleError with the counterexample.
void discharge(const Workspace& ws, const std::string& rule, const std::string& what,
               const std::vector<Binder>& fixes, const Pred& p, const Pred& q, std::vector<std::string>& sides) {
  if (structurally_entails(p, q)) {
    sides.push_back(what + ": by inclusion");
    return;
  }
  Verdict v;
  try {
    v = entails(ws, fixes, p, q);
  } catch (const CheckError& e) {
    throw RuleError(rule + ": " + what + ": " + e.what());
  }
  if (!v.holds()) throw RuleError(rule + ": " + what + " does not hold\n" + v.to_string(), v);
  sides.push_back(what + ": checked over " + std::to_string(v.states) + " states");
}

void discharge_post(const Workspace& ws, const std::string& rule, const std::string& what,
                    const std::vector<Binder>& fixes, const Domain& ret_dom, const PostPred& p, const PostPred& q,
                    std::vector<std::string>& sides) {
  if (p.ret == q.ret || !free_vars(q.body).count(p.ret)) {
    if (structurally_entails(p.body, rename(q.body, q.ret, p.ret))) {
      sides.push_back(what + ": by inclusion");
      return;
    }
  }
  Verdict v;
  try {
    v = entails_post(ws, fixes, ret_dom, p, q);
  } catch (const CheckError& e) {
    throw RuleError(rule + ": " + what + ": " + e.what());
  }
  if (!v.holds()) throw RuleError(rule + ": " + what + " does not hold\n" + v.to_string(), v);
  sides.push_back(what + ": checked over " + std::to_string(v.states) + " states");
}

// Posts that agree up to the name of the return binder.
std::optional<PostPred> unify_posts(const PostPred& a, const PostPred& b) {
  std::set<std::string> avoid = free_vars(a.body);
  collect_free_vars(b.body, avoid);
  const std::string r = fresh_name("ret", avoid);
  if (normalize(rename(a.body, a.ret, r)) == normalize(rename(b.body, b.ret, r))) return a;
  return std::nullopt;
}

// The shared side conditions of every bind rule. Returns the conclusion's
// fixes and records the discharged conditions.
std::vector<Binder> bind_sides(const Workspace& ws, const std::string& rule, const std::vector<Binder>& head_fixes,
                               const Comp& head_prog, const PostPred& head_post,
                               const std::vector<Binder>& cont_fixes, const Pred& cont_pre,
                               const PostPred& cont_post, const std::string& x, std::vector<std::string>& sides) {
  if (find_fix(head_fixes, x)) throw RuleError(rule + ": binder '" + x + "' is fixed in the first premise");
  std::vector<Binder> fixes = merge_fixes(rule, head_fixes, without(cont_fixes, x));
  Pred mid;
  std::vector<Binder> mid_fixes = fixes;
  if (x == "_") {
    if (head_post.ret != "_" && free_vars(head_post.body).count(head_post.ret))
      throw RuleError(rule + ": discarded result is used in the intermediate assertion");
    mid = head_post.body;
  } else {
    const Binder* xb = find_fix(cont_fixes, x);
    if (!xb) throw RuleError(rule + ": binder '" + x + "' is not fixed in the continuation");
    if (free_vars(cont_post).count(x))
      throw RuleError(rule + ": binder '" + x + "' occurs free in the postcondition");
    Domain produced = infer_comp(head_prog, ctx_of(fixes), *ws.schema, ws.programs);
    if (!xb->dom.covers(produced))
      throw RuleError(rule + ": binder '" + x + "' ranges over " + xb->dom.to_string() + " but the first step yields " +
                      produced.to_string());
    sides.push_back("result domain " + produced.to_string() + " within " + xb->dom.to_string());
    mid = rename(head_post.body, head_post.ret, x);
    mid_fixes.push_back(*xb);
  }
  discharge(ws, rule, "intermediate assertion", mid_fixes, mid, cont_pre, sides);
  return fixes;
}

Comp rename_binders(const Comp& c, const std::set<std::string>& avoid) {
  switch (c.op()) {
    case CompOp::Bind: {
      Comp first = rename_binders(c.kid(0), avoid);
      std::string x = c.name();
      Comp rest = c.kid(1);
      if (x != "_" && avoid.count(x)) {
        std::set<std::string> used = avoid;
        collect_free_vars(rest, used);
        collect_binders(rest, used);
        const std::string nx = fresh_name(x, used);
        rest = subst(rest, x, Expr::var(nx));
        x = nx;
      }
      return Comp::bind(x, first, rename_binders(rest, avoid));
    }
    case CompOp::If:
      return Comp::if_(c.expr(), rename_binders(c.kid(0), avoid), rename_binders(c.kid(1), avoid));
    default:
      return c;
  }
}

}  // namespace

// ---------------------------------------------------------------- Judgement

const Claim& Judgement::claim() const { return node_->claim; }
const std::string& Judgement::rule() const { return node_->rule; }
const std::vector<Judgement>& Judgement::premises() const { return node_->premises; }
const std::vector<std::string>& Judgement::side_conditions() const { return node_->sides; }

namespace {

template <class T>
const T& expect(const Judgement& j, const char* what) {
  if (const T* p = std::get_if<T>(&j.claim())) return *p;
  throw RuleError(std::string("expected a premise of kind ") + what + ", got " + claim_kind(j.claim()));
}

}  // namespace

const Triple& Judgement::triple() const { return expect<Triple>(*this, "triple"); }
const AnnTriple& Judgement::ann_triple() const { return expect<AnnTriple>(*this, "ann-triple"); }
const Ordering& Judgement::ordering() const { return expect<Ordering>(*this, "ordering"); }
const Annotator& Judgement::annotator() const { return expect<Annotator>(*this, "annotator"); }
const StrongAnnotator& Judgement::strong() const { return expect<StrongAnnotator>(*this, "strong-annotator"); }
const Refinement& Judgement::refinement() const { return expect<Refinement>(*this, "refinement"); }

std::string Judgement::to_string() const {
  std::string out;
  std::function<void(const Judgement&, int)> walk = [&](const Judgement& j, int depth) {
    const std::string pad(2 * depth, ' ');
    out += pad + j.rule() + ": " + claim_to_string(j.claim()) + "\n";
    for (const auto& s : j.side_conditions()) out += pad + "  | " + s + "\n";
    for (const auto& p : j.premises()) walk(p, depth + 1);
  };
  walk(*this, 0);
  return out;
}

Established establish(const Workspace& ws, const Claim& c) {
  Verdict v = check_claim(ws, c);
  if (!v.holds()) return {std::move(v), std::nullopt};
  Judgement j = make(c, "enumeration");
  return {std::move(v), std::move(j)};
}

Verdict audit(const Workspace& ws, const Judgement& root) {
  std::set<const Judgement::Node*> seen;
  std::function<std::optional<Verdict>(const Judgement&)> walk = [&](const Judgement& j) -> std::optional<Verdict> {
    if (!seen.insert(JudgementAccess::id(j)).second) return std::nullopt;
    for (const auto& p : j.premises())
      if (auto bad = walk(p)) return bad;
    Verdict v = check_claim(ws, j.claim());
    if (v.holds()) return std::nullopt;
    v.diagnostic += (v.diagnostic.empty() ? "" : "; ") + std::string("conclusion of ") + j.rule() + ": " +
                    claim_to_string(j.claim());
    return v;
  };
  if (auto bad = walk(root)) return *bad;
  return Verdict::hold(ws.schema->universe_size());
}

Verdict side_entails(const Workspace& ws, const std::vector<Binder>& fixes, const Pred& p, const Pred& q) {
  if (structurally_entails(p, q)) return Verdict::hold(ws.schema->universe_size());
  return entails(ws, fixes, p, q);
}

Comp inline_call(const Workspace& ws, const Comp& call, const std::set<std::string>& avoid) {
  if (call.op() != CompOp::Call) throw RuleError("inline_call: not a call: " + call.to_string());
  auto it = ws.programs.find(call.name());
  if (it == ws.programs.end()) throw RuleError("inline_call: unknown program '" + call.name() + "'");
  const ProgramDef& def = it->second;
  if (def.params.size() != call.args().size())
    throw RuleError("inline_call: arity mismatch in " + call.to_string());

  std::set<std::string> blocked = avoid;
  for (const auto& a : call.args()) collect_free_vars(a, blocked);
  for (const auto& p : def.params) blocked.insert(p.name);
  std::vector<std::string> fresh;
  for (const auto& p : def.params) {
    std::set<std::string> others = blocked;
    others.erase(p.name);
    for (const auto& q : def.params)
      if (q.name != p.name) others.insert(q.name);
    for (const auto& f : fresh) others.insert(f);
    fresh.push_back(fresh_name(p.name, others));
    blocked.insert(fresh.back());
  }
  // Rename through unused temporaries so the substitutions cannot interfere.
  Comp body = def.body;
  std::set<std::string> temp_avoid = blocked;
  collect_binders(body, temp_avoid);
  std::vector<std::string> temps;
  for (const auto& p : def.params) {
    temps.push_back(fresh_name(p.name + "_tmp", temp_avoid));
    temp_avoid.insert(temps.back());
    body = subst(body, p.name, Expr::var(temps.back()));
  }
  for (std::size_t i = 0; i < temps.size(); ++i) body = subst(body, temps[i], Expr::var(fresh[i]));

  std::set<std::string> outer = avoid;
  for (const auto& a : call.args()) collect_free_vars(a, outer);
  outer.insert(fresh.begin(), fresh.end());
  body = rename_binders(body, outer);

  std::vector<std::pair<std::string, Comp>> steps;
  for (std::size_t i = 0; i < fresh.size(); ++i) steps.emplace_back(fresh[i], Comp::ret(call.args()[i]));
  return Comp::seq(std::move(steps), body);
}

namespace rules {

Judgement wp_axiom(const Workspace& ws, const std::vector<Binder>& fixes, const Comp& c, const PostPred& q) {
  if (!is_atomic(c)) throw RuleError("wp_axiom: not an atomic program: " + c.to_string());
  Pred pre = wp_atomic(ws, c, q, ctx_of(fixes));
  return make(Triple{fixes, pre, c, q}, "wp_axiom");
}

Judgement pure_frame(const Workspace& ws, const std::vector<Binder>& fixes, const Comp& c, const Pred& r) {
  if (reads_state(r, ws.preds)) throw RuleError("pure_frame: predicate reads the state: " + r.to_string());
  std::set<std::string> avoid = free_vars(r);
  PostPred post{free_vars(r).count("_") ? fresh_name("r", avoid) : "_", r};
  return make(Triple{fixes, r, c, post}, "pure_frame");
}

Judgement instantiate(const Workspace& ws, const Judgement& j, const std::string& var, const Expr& e,
                      const std::vector<Binder>& extra) {
  const Triple& t = j.triple();
  const Binder* vb = find_fix(t.fixes, var);
  if (!vb) throw RuleError("instantiate: '" + var + "' is not fixed");
  if (reads_state(e)) throw RuleError("instantiate: expression reads the state: " + e.to_string());
  std::vector<Binder> fixes = merge_fixes("instantiate", without(t.fixes, var), extra);
  std::vector<std::string> sides;
  const auto evars = free_vars(e);
  std::vector<Binder> efixes;
  try {
    efixes = used_fixes(fixes, evars);
  } catch (const CheckError& err) {
    throw RuleError(std::string("instantiate: ") + err.what());
  }
  Domain de = infer_expr(e, ctx_of(fixes), *ws.schema);
  if (vb->dom.covers(de)) {
    sides.push_back("value domain " + de.to_string() + " within " + vb->dom.to_string());
  } else {
    Verdict v = scan_values(ws, efixes, [&](Env& env) {
      return vb->dom.contains(eval_expr(e, env, State())) ? Probe::pass() : Probe::fail("value outside domain");
    });
    if (!v.holds())
      throw RuleError("instantiate: " + e.to_string() + " leaves " + vb->dom.to_string() + "\n" + v.to_string(), v);
    sides.push_back("values of " + e.to_string() + " lie in " + vb->dom.to_string());
  }
  PostPred post = t.post;
  if (post.ret != var) {
    if (evars.count(post.ret)) {
      std::set<std::string> avoid = free_vars(post.body);
      avoid.insert(evars.begin(), evars.end());
      const std::string r = fresh_name(post.ret, avoid);
      post = {r, rename(post.body, post.ret, r)};
    }
    post.body = subst(post.body, var, e);
  }
  return make(Triple{fixes, subst(t.pre, var, e), subst(t.prog, var, e), post}, "instantiate", {j},
              std::move(sides));
}

Judgement extend_fixes(const Judgement& j, const std::vector<Binder>& extra) {
  Claim c = j.claim();
  std::visit([&](auto& x) { x.fixes = merge_fixes("extend_fixes", extra, x.fixes); }, c);
  return make(std::move(c), "extend_fixes", {j});
}

Judgement consequence(const Workspace& ws, const Judgement& j, const Pred& pre, const PostPred& post) {
  const Triple& t = j.triple();
  std::vector<std::string> sides;
  discharge(ws, "consequence", "precondition", t.fixes, pre, t.pre, sides);
  Domain rd = infer_comp(t.prog, ctx_of(t.fixes), *ws.schema, ws.programs);
  discharge_post(ws, "consequence", "postcondition", t.fixes, rd, t.post, post, sides);
  return make(Triple{t.fixes, pre, t.prog, post}, "consequence", {j}, std::move(sides));
}

Judgement conjunction(const Workspace&, const Judgement& a, const Judgement& b) {
  const Triple& x = a.triple();
  const Triple& y = b.triple();
  if (!(x.prog == y.prog)) throw RuleError("conjunction: premises are about different programs");
  std::vector<Binder> fixes = merge_fixes("conjunction", x.fixes, y.fixes);
  std::string r = x.post.ret;
  Pred qa = x.post.body;
  Pred qb = y.post.body;
  if (r != y.post.ret) {
    if (free_vars(qb).count(r)) {
      std::set<std::string> avoid = free_vars(qa);
      collect_free_vars(qb, avoid);
      r = fresh_name("ret", avoid);
      qa = rename(qa, x.post.ret, r);
    }
    qb = rename(qb, y.post.ret, r);
  }
  return make(Triple{fixes, conj(x.pre, y.pre), x.prog, PostPred{r, conj(qa, qb)}}, "conjunction", {a, b});
}

Judgement unfold_call(const Workspace& ws, const Judgement& j, const Comp& call) {
  const Triple& t = j.triple();
  Comp expected = inline_call(ws, call, names_of(t.fixes));
  if (!(t.prog == expected))
    throw RuleError("unfold_call: premise is not about the unfolding of " + call.to_string());
  return make(Triple{t.fixes, t.pre, call, t.post}, "unfold_call", {j});
}

Judgement wp_split(const Workspace& ws, const Judgement& cont, const Judgement& head, const std::string& x) {
  const Triple& g = cont.triple();
  const Triple& f = head.triple();
  std::vector<std::string> sides;
  auto fixes = bind_sides(ws, "wp_split", f.fixes, f.prog, f.post, g.fixes, g.pre, g.post, x, sides);
  return make(Triple{fixes, f.pre, Comp::bind(x, f.prog, g.prog), g.post}, "wp_split", {cont, head},
              std::move(sides));
}

Judgement annotate_step(const Judgement& j) {
  const Triple& t = j.triple();
  return make(Annotator{t.fixes, t.pre, t.prog, t.post, lift(t.pre, t.prog)}, "annotate_step", {j});
}

Judgement annotator_triple(const Judgement& j) {
  const Annotator& a = j.annotator();
  return make(Triple{a.fixes, a.pre, a.prog, a.post}, "annotator_triple", {j});
}

Judgement annotator_order(const Judgement& j) {
  const Annotator& a = j.annotator();
  return make(Ordering{a.fixes, a.pre, a.prog, a.ann}, "annotator_order", {j});
}

Judgement annotating_bind(const Workspace& ws, const Judgement& cont, const Judgement& head, const std::string& x) {
  const Annotator& g = cont.annotator();
  std::vector<Binder> hfixes;
  Pred hpre;
  Comp hprog;
  PostPred hpost;
  AnnComp hann;
  if (const auto* t = std::get_if<Triple>(&head.claim())) {
    hfixes = t->fixes, hpre = t->pre, hprog = t->prog, hpost = t->post, hann = lift(t->pre, t->prog);
  } else {
    const Annotator& a = head.annotator();
    hfixes = a.fixes, hpre = a.pre, hprog = a.prog, hpost = a.post, hann = a.ann;
  }
  std::vector<std::string> sides;
  auto fixes = bind_sides(ws, "annotating_bind", hfixes, hprog, hpost, g.fixes, g.pre, g.post, x, sides);
  return make(Annotator{fixes, hpre, Comp::bind(x, hprog, g.prog), g.post, AnnComp::bind(x, hann, g.ann)},
              "annotating_bind", {cont, head}, std::move(sides));
}

Judgement annotating_if(const Workspace& ws, const Judgement& then_j, const Judgement& else_j, const Expr& cond,
                        const Pred& pre) {
  const Annotator& t = then_j.annotator();
  const Annotator& e = else_j.annotator();
  auto fixes = merge_fixes("annotating_if", t.fixes, e.fixes);
  auto post = unify_posts(t.post, e.post);
  if (!post) throw RuleError("annotating_if: branches have different postconditions");
  std::vector<std::string> sides;
  const Pred c = Pred::atom(cond);
  discharge(ws, "annotating_if", "then precondition", fixes, conj(pre, c), t.pre, sides);
  discharge(ws, "annotating_if", "else precondition", fixes, conj(pre, Pred::not_(c)), e.pre, sides);
  return make(Annotator{fixes, pre, Comp::if_(cond, t.prog, e.prog), *post, AnnComp::if_(cond, t.ann, e.ann)},
              "annotating_if", {then_j, else_j}, std::move(sides));
}

Judgement strengthen_annotator(const Workspace& ws, const Judgement& j, const Pred& pre) {
  const Annotator& a = j.annotator();
  std::vector<std::string> sides;
  discharge(ws, "strengthen_annotator", "precondition", a.fixes, pre, a.pre, sides);
  return make(Annotator{a.fixes, pre, a.prog, a.post, a.ann}, "strengthen_annotator", {j}, std::move(sides));
}

Judgement assume_annotation(const Workspace& ws, const Judgement& j, const Pred& r, const Pred& p) {
  const Triple& t = j.triple();
  std::vector<std::string> sides;
  discharge(ws, "assume_annotation", "precondition", t.fixes, conj(r, p), t.pre, sides);
  return make(AnnTriple{t.fixes, r, AnnComp::step(p, t.prog), t.post}, "assume_annotation", {j}, std::move(sides));
}

Judgement use_annotation(const Workspace&, const Judgement& order, const Judgement& ann_triple) {
  const Ordering& o = order.ordering();
  const AnnTriple& a = ann_triple.ann_triple();
  if (!(o.ann == a.ann)) throw RuleError("use_annotation: premises are about different annotations");
  auto fixes = merge_fixes("use_annotation", o.fixes, a.fixes);
  return make(Triple{fixes, conj(o.pre, a.pre), o.prog, a.post}, "use_annotation", {order, ann_triple});
}

Judgement weaken_annotation(const Workspace& ws, const std::vector<Binder>& fixes, const AnnComp& f,
                            const AnnComp& g) {
  if (!same_skeleton(f, g)) throw RuleError("weaken_annotation: annotations differ in shape");
  const auto fs = ann_steps(ws, f, ctx_of(fixes));
  const auto gs = ann_steps(ws, g, ctx_of(fixes));
  std::vector<std::string> sides;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    std::vector<Binder> local;
    for (const auto& [n, d] : fs[k].ctx) local.push_back({n, d});
    discharge(ws, "weaken_annotation", "step " + std::to_string(k + 1), local, fs[k].pred, gs[k].pred, sides);
  }
  return make(Refinement{fixes, f, g}, "weaken_annotation", {}, std::move(sides));
}

Judgement merge_adherence(const Workspace&, const Judgement& a, const Judgement& b) {
  const Ordering& x = a.ordering();
  const Ordering& y = b.ordering();
  if (!(x.prog == y.prog)) throw RuleError("merge_adherence: premises are about different programs");
  AnnComp merged;
  try {
    merged = merge(x.ann, y.ann);
  } catch (const AnnError& e) {
    throw RuleError(std::string("merge_adherence: ") + e.what());
  }
  auto fixes = merge_fixes("merge_adherence", x.fixes, y.fixes);
  return make(Ordering{fixes, conj(x.pre, y.pre), x.prog, merged}, "merge_adherence", {a, b});
}

Judgement order_trans(const Workspace&, const Judgement& order, const Judgement& refinement) {
  const Ordering& o = order.ordering();
  const Refinement& r = refinement.refinement();
  if (!(o.ann == r.lhs)) throw RuleError("order_trans: refinement does not start at the ordered annotation");
  if (!(drop_ann(r.rhs) == o.prog)) throw RuleError("order_trans: refined annotation is about another program");
  auto fixes = merge_fixes("order_trans", o.fixes, r.fixes);
  return make(Ordering{fixes, o.pre, o.prog, r.rhs}, "order_trans", {order, refinement});
}

Judgement strong_split(const Workspace& ws, const Judgement& cont, const Judgement& head, const Pred& a,
                       const Pred& p, const std::string& x) {
  const AnnTriple& g = cont.ann_triple();
  const Triple& f = head.triple();
  std::vector<std::string> sides;
  discharge(ws, "strong_split", "first precondition", f.fixes, conj(a, p), f.pre, sides);
  auto fixes = bind_sides(ws, "strong_split", f.fixes, f.prog, f.post, g.fixes, g.pre, g.post, x, sides);
  return make(AnnTriple{fixes, a, AnnComp::bind(x, AnnComp::step(p, f.prog), g.ann), g.post}, "strong_split",
              {cont, head}, std::move(sides));
}

Judgement strong_step(const Workspace& ws, const Judgement& j, const Pred& p, const Pred& a) {
  const Triple& t = j.triple();
  std::vector<std::string> sides;
  discharge(ws, "strong_step", "requirement and annotation", t.fixes, conj(a, p), t.pre, sides);
  return make(StrongAnnotator{t.fixes, a, AnnComp::step(p, t.prog), t.post, AnnComp::step(t.pre, t.prog)},
              "strong_step", {j}, std::move(sides));
}

Judgement strong_bind(const Workspace& ws, const Judgement& cont, const Judgement& head, const std::string& x) {
  const StrongAnnotator& g = cont.strong();
  const StrongAnnotator& f = head.strong();
  std::vector<std::string> sides;
  auto fixes =
      bind_sides(ws, "strong_bind", f.fixes, drop_ann(f.ann_in), f.post, g.fixes, g.pre, g.post, x, sides);
  return make(StrongAnnotator{fixes, f.pre, AnnComp::bind(x, f.ann_in, g.ann_in), g.post,
                              AnnComp::bind(x, f.ann_out, g.ann_out)},
              "strong_bind", {cont, head}, std::move(sides));
}

Judgement strong_if(const Workspace& ws, const Judgement& then_j, const Judgement& else_j, const Expr& cond,
                    const Pred& pre) {
  const StrongAnnotator& t = then_j.strong();
  const StrongAnnotator& e = else_j.strong();
  auto fixes = merge_fixes("strong_if", t.fixes, e.fixes);
  auto post = unify_posts(t.post, e.post);
  if (!post) throw RuleError("strong_if: branches have different postconditions");
  std::vector<std::string> sides;
  const Pred c = Pred::atom(cond);
  discharge(ws, "strong_if", "then requirement", fixes, conj(pre, c), t.pre, sides);
  discharge(ws, "strong_if", "else requirement", fixes, conj(pre, Pred::not_(c)), e.pre, sides);
  return make(StrongAnnotator{fixes, pre, AnnComp::if_(cond, t.ann_in, e.ann_in), *post,
                              AnnComp::if_(cond, t.ann_out, e.ann_out)},
              "strong_if", {then_j, else_j}, std::move(sides));
}

Judgement strengthen_strong(const Workspace& ws, const Judgement& j, const Pred& pre) {
  const StrongAnnotator& a = j.strong();
  std::vector<std::string> sides;
  discharge(ws, "strengthen_strong", "requirement", a.fixes, pre, a.pre, sides);
  return make(StrongAnnotator{a.fixes, pre, a.ann_in, a.post, a.ann_out}, "strengthen_strong", {j},
              std::move(sides));
}

Judgement strong_ann_triple(const Judgement& j) {
  const StrongAnnotator& a = j.strong();
  return make(AnnTriple{a.fixes, a.pre, a.ann_in, a.post}, "strong_ann_triple", {j});
}

Judgement strong_adherence(const Workspace&, const Judgement& order, const Judgement& strong) {
  const Ordering& o = order.ordering();
  const StrongAnnotator& s = strong.strong();
  if (!(o.ann == s.ann_in)) throw RuleError("strong_adherence: premises are about different annotations");
  auto fixes = merge_fixes("strong_adherence", o.fixes, s.fixes);
  return make(Ordering{fixes, conj(o.pre, s.pre), o.prog, s.ann_out}, "strong_adherence", {order, strong});
}

}  // namespace rules

}  // namespace fannot

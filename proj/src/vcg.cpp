#include "fannot/vcg.hpp"

#include <algorithm>
#include <map>

namespace fannot {

void RuleDB::add(const std::string& name, const Judgement& j) {
  if (find(name)) throw VcgError("rule '" + name + "' registered twice");
  Judgement t = std::holds_alternative<Annotator>(j.claim()) ? rules::annotator_triple(j) : j;
  if (!std::holds_alternative<Triple>(t.claim()))
    throw VcgError("rule '" + name + "': expected a triple, got " + claim_kind(t.claim()));
  const Triple& tr = t.triple();
  if (tr.prog.op() != CompOp::Call) throw VcgError("rule '" + name + "': program is not a call");
  std::set<std::string> seen;
  for (const auto& a : tr.prog.args()) {
    if (a.op() != ExprOp::Var || !seen.insert(a.name()).second)
      throw VcgError("rule '" + name + "': call arguments must be distinct variables");
  }
  entries_.push_back({name, tr.prog.name(), t});
}

std::vector<const RuleEntry*> RuleDB::for_callee(const std::string& callee) const {
  std::vector<const RuleEntry*> out;
  for (const auto& e : entries_)
    if (e.callee == callee) out.push_back(&e);
  return out;
}

const RuleEntry* RuleDB::find(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

using Pos = std::vector<std::size_t>;
using Bindings = std::map<std::string, Expr>;

std::string pos_string(const Pos& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "." : "") + std::to_string(p[i]);
  return s;
}

Pos advance(Pos p, std::size_t n) {
  p.back() += n;
  return p;
}

Pos nested(Pos p) {
  p.push_back(1);
  return p;
}

std::size_t step_count(const Comp& c) {
  if (c.op() == CompOp::Bind || (c.op() == CompOp::If && !is_atomic(c)))
    return step_count(c.kid(0)) + step_count(c.kid(1));
  return 1;
}

std::size_t step_count(const AnnComp& f) {
  if (f.op() == AnnOp::Step) return 1;
  return step_count(f.kid(0)) + step_count(f.kid(1));
}

bool match(const Expr& pat, const Expr& e, const std::set<std::string>& vars, Bindings& b) {
  if (pat.op() == ExprOp::Var && vars.count(pat.name())) {
    auto it = b.find(pat.name());
    if (it != b.end()) return it->second == e;
    b.emplace(pat.name(), e);
    return true;
  }
  if (pat.op() != e.op() || pat.name() != e.name() || !(pat.value() == e.value()) ||
      pat.args().size() != e.args().size())
    return false;
  for (std::size_t i = 0; i < pat.args().size(); ++i)
    if (!match(pat.arg(i), e.arg(i), vars, b)) return false;
  return true;
}

bool match(const Pred& pat, const Pred& p, std::set<std::string> vars, Bindings& b) {
  if (pat.op() != p.op()) return false;
  switch (pat.op()) {
    case PredOp::True:
    case PredOp::False:
      return true;
    case PredOp::Atom:
      return match(pat.expr(), p.expr(), vars, b);
    case PredOp::Ref:
      if (pat.name() != p.name() || pat.ref_args().size() != p.ref_args().size()) return false;
      for (std::size_t i = 0; i < pat.ref_args().size(); ++i)
        if (!match(pat.ref_args()[i], p.ref_args()[i], vars, b)) return false;
      return true;
    case PredOp::Forall:
    case PredOp::Exists:
      if (pat.name() != p.name() || !(pat.domain() == p.domain())) return false;
      vars.erase(pat.name());
      return match(pat.body(), p.body(), vars, b);
    case PredOp::Let:
    case PredOp::WithField:
      if (pat.name() != p.name() || !match(pat.expr(), p.expr(), vars, b)) return false;
      if (pat.op() == PredOp::Let) vars.erase(pat.name());
      return match(pat.body(), p.body(), vars, b);
    default:
      if (pat.kids().size() != p.kids().size()) return false;
      for (std::size_t i = 0; i < pat.kids().size(); ++i)
        if (!match(pat.kid(i), p.kid(i), vars, b)) return false;
      return true;
  }
}

std::set<std::string> names_of(const std::vector<Binder>& fixes) {
  std::set<std::string> out;
  for (const auto& b : fixes) out.insert(b.name);
  return out;
}

class Prover {
 public:
  Prover(const Workspace& ws, const RuleDB& db) : ws_(ws), db_(db) {}

  // Annotator for c with the computed precondition.
  Judgement ann(const std::vector<Binder>& fixes, const Comp& c, const PostPred& q, const Pos& pos) {
    if (c.op() == CompOp::Bind) {
      const std::string& x = c.name();
      if (x != "_" && names_of(fixes).count(x))
        throw VcgError("binder '" + x + "' shadows a fixed variable in " + c.to_string());
      std::vector<Binder> inner = fixes;
      if (x != "_") inner.push_back({x, infer_comp(c.kid(0), ctx_of(fixes), *ws_.schema, ws_.programs)});
      Judgement g = ann(inner, c.kid(1), q, advance(pos, step_count(c.kid(0))));
      PostPred mid{x, g.annotator().pre};
      Judgement f = composite(c.kid(0)) ? ann(fixes, c.kid(0), mid, pos) : step(fixes, c.kid(0), mid, pos);
      return rules::annotating_bind(ws_, g, f, x);
    }
    if (c.op() == CompOp::If && !is_atomic(c)) {
      Judgement t = ann(fixes, c.kid(0), q, pos);
      Judgement e = ann(fixes, c.kid(1), q, advance(pos, step_count(c.kid(0))));
      const Pred b = Pred::atom(c.expr());
      Pred pre = normalize(Pred::and_({Pred::imp(b, t.annotator().pre), Pred::imp(Pred::not_(b), e.annotator().pre)}));
      return rules::annotating_if(ws_, t, e, c.expr(), pre);
    }
    return rules::annotate_step(step(fixes, c, q, pos));
  }

  // Triple for c with the computed precondition.
  Judgement step(const std::vector<Binder>& fixes, const Comp& c, const PostPred& q, const Pos& pos) {
    if (is_atomic(c)) {
      Judgement j = rules::wp_axiom(ws_, fixes, c, q);
      note(pos, c.to_string() + " requires " + j.triple().pre.to_string());
      return j;
    }
    if (c.op() == CompOp::Call) return call(fixes, c, q, pos);
    return rules::annotator_triple(ann(fixes, c, q, pos));
  }

  Judgement strong(const std::vector<Binder>& fixes, const AnnComp& f, const PostPred& q, const Pos& pos) {
    switch (f.op()) {
      case AnnOp::Step: {
        Judgement j = step(fixes, f.comp(), q, pos);
        Pred req = reduce(fixes, j.triple().pre, f.pred(), pos);
        note(pos, f.comp().to_string() + " annotated " + f.pred().to_string() + " needs " +
                      j.triple().pre.to_string() + ", requirement " + req.to_string());
        return rules::strong_step(ws_, j, f.pred(), req);
      }
      case AnnOp::Bind: {
        const std::string& x = f.name();
        if (x != "_" && names_of(fixes).count(x)) throw VcgError("binder '" + x + "' shadows a fixed variable");
        std::vector<Binder> inner = fixes;
        if (x != "_")
          inner.push_back({x, infer_comp(drop_ann(f.kid(0)), ctx_of(fixes), *ws_.schema, ws_.programs)});
        Judgement g = strong(inner, f.kid(1), q, advance(pos, step_count(f.kid(0))));
        Judgement h = strong(fixes, f.kid(0), PostPred{x, g.strong().pre}, pos);
        return rules::strong_bind(ws_, g, h, x);
      }
      case AnnOp::If: {
        Judgement t = strong(fixes, f.kid(0), q, pos);
        Judgement e = strong(fixes, f.kid(1), q, advance(pos, step_count(f.kid(0))));
        const Pred b = Pred::atom(f.cond());
        Pred pre = normalize(Pred::and_({Pred::imp(b, t.strong().pre), Pred::imp(Pred::not_(b), e.strong().pre)}));
        return rules::strong_if(ws_, t, e, f.cond(), pre);
      }
    }
    throw VcgError("unreachable");
  }

  std::vector<std::string> take_log() {
    std::stable_sort(log_.begin(), log_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> out;
    for (auto& [p, s] : log_) out.push_back("step " + pos_string(p) + ": " + s);
    return out;
  }

 private:
  static bool composite(const Comp& c) { return c.op() == CompOp::Bind || (c.op() == CompOp::If && !is_atomic(c)); }

  void note(const Pos& pos, std::string s) { log_.emplace_back(pos, std::move(s)); }

  Judgement call(const std::vector<Binder>& fixes, const Comp& c, const PostPred& q, const Pos& pos) {
    std::vector<Judgement> pieces;
    bool complete = true;
    for (const auto& part : conjuncts(normalize(q.body))) {
      if (!reads_state(part, ws_.preds) && !free_vars(part).count(q.ret)) {
        pieces.push_back(rules::pure_frame(ws_, fixes, c, part));
        note(pos, part.to_string() + " is unaffected");
        continue;
      }
      std::optional<Judgement> got;
      for (bool structural : {true, false}) {
        for (const RuleEntry* e : db_.for_callee(c.name())) {
          got = use_rule(fixes, *e, c, q.ret, part, structural);
          if (got) {
            note(pos, part.to_string() + " from rule " + e->name);
            break;
          }
        }
        if (got) break;
      }
      if (!got) {
        complete = false;
        break;
      }
      pieces.push_back(*got);
    }
    if (!complete) {
      note(pos, c.to_string() + " unfolded");
      Comp body = inline_call(ws_, c, names_of(fixes));
      Judgement j = step(fixes, body, q, nested(pos));
      return rules::unfold_call(ws_, j, c);
    }
    if (pieces.empty()) pieces.push_back(rules::pure_frame(ws_, fixes, c, Pred::true_()));
    Judgement j = pieces[0];
    for (std::size_t i = 1; i < pieces.size(); ++i) j = rules::conjunction(ws_, j, pieces[i]);
    j = rules::extend_fixes(j, fixes);
    j = rules::consequence(ws_, j, j.triple().pre, q);
    note(pos, c.to_string() + " requires " + j.triple().pre.to_string());
    return j;
  }

  // Instantiates a registered triple so that its postcondition provides
  // `part` for the call c with return binder r.
  std::optional<Judgement> use_rule(const std::vector<Binder>& fixes, const RuleEntry& e, const Comp& c,
                                    const std::string& r, const Pred& part, bool structural) {
    const Triple& rt = e.judgement.triple();
    if (rt.prog.args().size() != c.args().size()) return std::nullopt;
    std::set<std::string> avoid = names_of(fixes);
    for (const auto& b : rt.fixes) avoid.insert(b.name);
    collect_free_vars(part, avoid);
    collect_free_vars(rt.post.body, avoid);
    avoid.insert(r);
    avoid.insert(rt.post.ret);
    try {
      Judgement j = e.judgement;
      std::map<std::string, std::string> temp;
      std::set<std::string> temps;
      for (const auto& b : rt.fixes) {
        const std::string t = fresh_name(b.name, avoid);
        avoid.insert(t);
        temps.insert(t);
        temp[b.name] = t;
        j = rules::instantiate(ws_, j, b.name, Expr::var(t), {{t, b.dom}});
      }
      Bindings bind;
      for (std::size_t i = 0; i < c.args().size(); ++i) bind[temp.at(rt.prog.args()[i].name())] = c.args()[i];
      const Triple& cur = j.triple();
      const Pred body = rename(cur.post.body, cur.post.ret, r);
      if (structural) {
        bool ok = false;
        for (const auto& k : conjuncts(normalize(body))) {
          Bindings trial = bind;
          if (match(k, part, temps, trial) && trial.size() == temps.size()) {
            bind = std::move(trial);
            ok = true;
            break;
          }
        }
        if (!ok) return std::nullopt;
      } else if (bind.size() != temps.size()) {
        return std::nullopt;
      }
      for (const auto& [t, ex] : bind) {
        if (reads_state(ex)) return std::nullopt;
        j = rules::instantiate(ws_, j, t, ex, used_fixes(fixes, free_vars(ex)));
      }
      if (!(j.triple().prog == c)) return std::nullopt;
      if (!structural) {
        j = rules::extend_fixes(j, fixes);
        Domain rd = infer_comp(c, ctx_of(fixes), *ws_.schema, ws_.programs);
        if (!entails_post(ws_, fixes, rd, j.triple().post, PostPred{r, part}).holds()) return std::nullopt;
      }
      return j;
    } catch (const RuleError&) {
      return std::nullopt;
    } catch (const CheckError&) {
      return std::nullopt;
    }
  }

  // Drops each conjunct of pre that the annotation and the remaining
  // conjuncts already imply.
  Pred reduce(const std::vector<Binder>& fixes, const Pred& pre, const Pred& ann, const Pos& pos) {
    std::vector<Pred> kept = conjuncts(normalize(pre));
    if (normalize(ann).is_true()) return conj(kept);
    for (std::size_t i = 0; i < kept.size();) {
      std::vector<Pred> others;
      for (std::size_t k = 0; k < kept.size(); ++k)
        if (k != i) others.push_back(kept[k]);
      if (side_entails(ws_, fixes, conj(ann, conj(others)), kept[i]).holds()) {
        note(pos, kept[i].to_string() + " follows from the annotation");
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
    return conj(kept);
  }

  const Workspace& ws_;
  const RuleDB& db_;
  std::vector<std::pair<Pos, std::string>> log_;
};

}  // namespace

VcgResult vcg_prove(const Workspace& ws, const RuleDB& db, const Triple& goal) {
  Prover p(ws, db);
  Judgement j = p.ann(goal.fixes, goal.prog, goal.post, {1});
  j = rules::strengthen_annotator(ws, j, goal.pre);
  AnnComp a = j.annotator().ann;
  return {j, a, p.take_log()};
}

StrongResult vcg_strong(const Workspace& ws, const RuleDB& db, const std::vector<Binder>& fixes, const Pred& pre,
                        const AnnComp& ann, const PostPred& post) {
  Prover p(ws, db);
  Judgement j = p.strong(fixes, ann, post, {1});
  j = rules::strengthen_strong(ws, j, pre);
  Judgement t = rules::strong_ann_triple(j);
  AnnComp out = j.strong().ann_out;
  return {j, t, out, p.take_log()};
}

}  // namespace fannot

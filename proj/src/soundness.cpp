#include "fannot/soundness.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

namespace fannot {

namespace {

constexpr unsigned kStatePreds = 4;
constexpr unsigned kPosts = 16;
constexpr std::size_t kMaxExamples = 5;

struct Prog {
  Comp comp;
  int head = -1;
  int tail = -1;
  std::string x;
  unsigned depth = 1;
  unsigned leaves = 1;
  unsigned dom = 0;
};

enum Kind : unsigned {
  kTripleHead = 1,
  kTripleCont,
  kTripleJoint,
  kOrder,
  kAnnTriple,
  kAnnTripleCont,
  kAnnotatorCont,
  kConclusion,
};

// kind 4 | prog 16 | dom 4 | fam 10 | a 4 | b 4 | c 4 | rule/binder 4 bits
std::uint64_t key(unsigned kind, unsigned prog, unsigned dom = 0, unsigned fam = 0, unsigned a = 0, unsigned b = 0,
                  unsigned c = 0, unsigned extra = 0) {
  std::uint64_t k = kind;
  k = (k << 16) | prog;
  k = (k << 4) | dom;
  k = (k << 10) | fam;
  k = (k << 4) | a;
  k = (k << 4) | b;
  k = (k << 4) | c;
  k = (k << 4) | extra;
  return k;
}

Pred ret_is_true(const std::string& ret) {
  return Pred::atom(Expr::eq(Expr::var(ret), Expr::lit(Value::boolean(true))));
}

std::vector<Prog> generate(unsigned max_depth, const Workspace& ws, std::vector<Domain>& doms) {
  if (max_depth < 1 || max_depth > 3) throw std::invalid_argument("meta-suite depth must be 1, 2 or 3");
  std::vector<Prog> out;
  auto dom_index = [&](const Comp& c) {
    const Domain d = infer_comp(c, {}, *ws.schema, ws.programs);
    auto it = std::find(doms.begin(), doms.end(), d);
    if (it != doms.end()) return static_cast<unsigned>(it - doms.begin());
    doms.push_back(d);
    return static_cast<unsigned>(doms.size() - 1);
  };
  for (const auto& a : meta_atoms()) {
    Prog p;
    p.comp = a;
    p.dom = dom_index(a);
    out.push_back(std::move(p));
  }
  std::size_t prev_begin = 0;  // programs of the previous depth start here
  for (unsigned d = 2; d <= max_depth; ++d) {
    const std::size_t n = out.size();
    for (std::size_t f = 0; f < n; ++f)
      for (std::size_t g = 0; g < n; ++g) {
        if (f < prev_begin && g < prev_begin) continue;
        Prog p;
        p.x = "x" + std::to_string(d);
        p.comp = Comp::bind(p.x, out[f].comp, out[g].comp);
        p.head = static_cast<int>(f);
        p.tail = static_cast<int>(g);
        p.depth = d;
        p.leaves = out[f].leaves + out[g].leaves;
        p.dom = dom_index(p.comp);
        out.push_back(std::move(p));
      }
    prev_begin = n;
  }
  return out;
}

class Suite {
 public:
  explicit Suite(const MetaConfig& cfg) : cfg_(cfg), ws_(meta_workspace()) {
    if (cfg.full_annotation_steps > 4) throw std::invalid_argument("full annotation families are limited to 4 steps");
    progs_ = generate(cfg.max_depth, ws_, doms_);
    for (unsigned t = 0; t < kStatePreds; ++t) sp_.push_back(meta_state_pred(t));
    fam_.resize(progs_.size());
    for (std::size_t i = 0; i < progs_.size(); ++i) build_family(i);
  }

  MetaReport run() {
    MetaReport rep;
    rep.programs = progs_.size();
    const auto& names = cfg_.rules.empty() ? meta_rule_names() : cfg_.rules;
    for (const auto& name : names) {
      RuleReport r;
      r.rule = name;
      if (name == "wp_split") wp_split(r);
      else if (name == "assume_annotation") assume(r);
      else if (name == "use_annotation") use(r);
      else if (name == "weaken_annotation") weaken(r);
      else if (name == "merge_adherence") merge_adh(r);
      else if (name == "strong_split") strong_split(r);
      else if (name == "annotating_bind") annotating_bind(r);
      else throw std::invalid_argument("unknown meta-suite rule '" + name + "'");
      rep.rules.push_back(std::move(r));
    }
    return rep;
  }

 private:
  const PostPred& post(unsigned binder, unsigned t) {
    auto k = std::make_pair(binder, t);
    auto it = posts_.find(k);
    if (it != posts_.end()) return it->second;
    return posts_.emplace(k, meta_post(binder ? "x" + std::to_string(binder) : "r", t)).first->second;
  }

  void build_family(std::size_t i) {
    const unsigned leaves = progs_[i].leaves;
    const bool full = leaves <= cfg_.full_annotation_steps;
    unsigned count = 1;
    for (unsigned k = 0; k < leaves; ++k) count *= kStatePreds;
    if (!full) count = kStatePreds;
    for (unsigned code = 0; code < count; ++code) {
      std::vector<unsigned> digits(leaves);
      for (unsigned k = 0, c = code; k < leaves; ++k, c /= kStatePreds) digits[k] = full ? c % kStatePreds : code;
      std::size_t pos = 0;
      fam_[i].push_back(annotate(i, digits, pos));
    }
  }

  AnnComp annotate(std::size_t i, const std::vector<unsigned>& digits, std::size_t& pos) {
    const Prog& p = progs_[i];
    if (p.head < 0) return AnnComp::step(sp_[digits[pos++]], p.comp);
    AnnComp h = annotate(static_cast<std::size_t>(p.head), digits, pos);
    AnnComp t = annotate(static_cast<std::size_t>(p.tail), digits, pos);
    return AnnComp::bind(p.x, std::move(h), std::move(t));
  }

  std::vector<Binder> cont_fixes(const Prog& b) const { return {{b.x, doms_[progs_[b.head].dom]}}; }

  const std::optional<Judgement>& premise(std::uint64_t k, const std::function<Claim()>& build) {
    auto it = prem_.find(k);
    if (it != prem_.end()) return it->second;
    return prem_.emplace(k, establish(ws_, build()).judgement).first->second;
  }

  // Applies the rule and checks what it derived. False when the rule refused.
  bool conclude(RuleReport& r, const std::function<Judgement()>& apply) {
    std::optional<Judgement> j;
    try {
      j = apply();
    } catch (const RuleError&) {
      ++r.rejected;
      return false;
    }
    ++r.derived;
    const Verdict v = check_claim(ws_, j->claim());
    if (!v.holds()) {
      ++r.violations;
      if (r.examples.size() < kMaxExamples) r.examples.push_back(claim_to_string(j->claim()) + "\n" + v.to_string());
    }
    return true;
  }

  unsigned binder_of(const Prog& b) const { return b.depth; }

  // Bit B set when {A} f {B} holds, over B's 16 tables. `a` indexes a
  // state predicate, or a pair (A, P) with the precondition A ∧ P.
  std::uint16_t head_mask(unsigned f, unsigned binder, unsigned a, int p = -1) {
    const std::uint64_t mk = key(p < 0 ? kTripleHead : kTripleJoint, f, 0, 0, a, p < 0 ? 0 : p, 0, binder);
    auto it = masks_.find(mk);
    if (it != masks_.end()) return it->second;
    const Pred pre = p < 0 ? sp_[a] : conj(sp_[a], sp_[p]);
    std::uint16_t m = 0;
    for (unsigned b = 0; b < kPosts; ++b) {
      const auto& j = premise(key(p < 0 ? kTripleHead : kTripleJoint, f, 0, 0, a, p < 0 ? 0 : p, b, binder), [&] {
        return Claim(Triple{{}, pre, progs_[f].comp, post(binder, b)});
      });
      if (j) m |= static_cast<std::uint16_t>(1u << b);
    }
    masks_.emplace(mk, m);
    return m;
  }

  // Bit B set when the continuation premise with precondition B x holds.
  std::uint16_t cont_mask(Kind kind, const Prog& bind, unsigned fam, unsigned c) {
    const auto g = static_cast<unsigned>(bind.tail);
    const unsigned dx = progs_[bind.head].dom;
    const std::uint64_t mk = key(kind, g, dx, fam, 0, 0, c, binder_of(bind));
    auto it = masks_.find(mk);
    if (it != masks_.end()) return it->second;
    std::uint16_t m = 0;
    for (unsigned b = 0; b < kPosts; ++b) {
      const auto& j = premise(key(kind, g, dx, fam, b, 0, c, binder_of(bind)), [&] {
        return cont_claim(kind, bind, fam, b, c);
      });
      if (j) m |= static_cast<std::uint16_t>(1u << b);
    }
    masks_.emplace(mk, m);
    return m;
  }

  Claim cont_claim(Kind kind, const Prog& bind, unsigned fam, unsigned b, unsigned c) {
    const Pred pre = post(binder_of(bind), b).body;
    const Prog& g = progs_[bind.tail];
    switch (kind) {
      case kTripleCont: return Triple{cont_fixes(bind), pre, g.comp, post(0, c)};
      case kAnnTripleCont: return AnnTriple{cont_fixes(bind), pre, fam_[bind.tail][fam], post(0, c)};
      default: return Annotator{cont_fixes(bind), pre, g.comp, post(0, c), fam_[bind.tail][fam]};
    }
  }

  const std::optional<Judgement>& head_premise(unsigned f, unsigned binder, unsigned a, int p, unsigned b) {
    return premise(key(p < 0 ? kTripleHead : kTripleJoint, f, 0, 0, a, p < 0 ? 0 : p, b, binder),
                   [] { return Claim(Triple{}); });  // filled by head_mask
  }

  const std::optional<Judgement>& cont_premise(Kind kind, const Prog& bind, unsigned fam, unsigned b, unsigned c) {
    return premise(key(kind, static_cast<unsigned>(bind.tail), progs_[bind.head].dom, fam, b, 0, c, binder_of(bind)),
                   [] { return Claim(Triple{}); });  // filled by cont_mask
  }

  static unsigned lowest(std::uint16_t m) {
    unsigned b = 0;
    while (!(m & (1u << b))) ++b;
    return b;
  }

  // ∀x.{B x} g {C}, {A} f {B} ⊢ {A} do x <- f; g {C}
  void wp_split(RuleReport& r) {
    for (std::size_t i = 0; i < progs_.size(); ++i) {
      const Prog& bind = progs_[i];
      if (bind.head < 0) continue;
      for (unsigned c = 0; c < kPosts; ++c) {
        const std::uint16_t cm = cont_mask(kTripleCont, bind, 0, c);
        if (!cm) continue;
        for (unsigned a = 0; a < kStatePreds; ++a) {
          const auto both = static_cast<std::uint16_t>(cm & head_mask(bind.head, binder_of(bind), a));
          if (!both) continue;
          r.instances += static_cast<unsigned>(std::popcount(both));
          const unsigned b = lowest(both);
          conclude(r, [&] {
            return rules::wp_split(ws_, *cont_premise(kTripleCont, bind, 0, b, c),
                                   *head_premise(bind.head, binder_of(bind), a, -1, b), bind.x);
          });
        }
      }
    }
  }

  // {R ∧ P} f {Q} ⊢ ∥R∥ {P} f ∥Q∥
  void assume(RuleReport& r) {
    for (std::size_t i = 0; i < progs_.size(); ++i)
      for (unsigned ra = 0; ra < kStatePreds; ++ra)
        for (unsigned pa = 0; pa < kStatePreds; ++pa)
          for (unsigned q = 0; q < kPosts; ++q) {
            const auto& j = premise(key(kTripleJoint, i, 0, 0, ra, pa, q, 0), [&] {
              return Claim(Triple{{}, conj(sp_[ra], sp_[pa]), progs_[i].comp, post(0, q)});
            });
            if (!j) continue;
            ++r.instances;
            conclude(r, [&] { return rules::assume_annotation(ws_, *j, sp_[ra], sp_[pa]); });
          }
  }

  const std::optional<Judgement>& order(unsigned i, unsigned f, unsigned p) {
    return premise(key(kOrder, i, 0, f, p), [&] { return Claim(Ordering{{}, sp_[p], progs_[i].comp, fam_[i][f]}); });
  }

  // {P1} f ⊑ F, ∥P2∥ F ∥Q∥ ⊢ {P1 ∧ P2} f {Q}
  void use(RuleReport& r) {
    for (std::size_t i = 0; i < progs_.size(); ++i) {
      std::vector<bool> done(kStatePreds * kStatePreds * kPosts, false);
      for (unsigned f = 0; f < fam_[i].size(); ++f)
        for (unsigned p2 = 0; p2 < kStatePreds; ++p2)
          for (unsigned q = 0; q < kPosts; ++q) {
            const auto& at = premise(key(kAnnTriple, i, 0, f, p2, 0, q), [&] {
              return Claim(AnnTriple{{}, sp_[p2], fam_[i][f], post(0, q)});
            });
            if (!at) continue;
            for (unsigned p1 = 0; p1 < kStatePreds; ++p1) {
              const auto& o = order(i, f, p1);
              if (!o) continue;
              ++r.instances;
              const std::size_t slot = (p1 * kStatePreds + p2) * kPosts + q;
              if (done[slot]) continue;  // same conclusion from another annotation
              done[slot] = conclude(r, [&] { return rules::use_annotation(ws_, *o, *at); });
            }
          }
    }
  }

  // Pointwise step entailment ⊢ F ⊑ G. The premises are the rule's own
  // side conditions, so a refusal is not counted against it.
  void weaken(RuleReport& r) {
    for (std::size_t i = 0; i < progs_.size(); ++i)
      for (const auto& f : fam_[i])
        for (const auto& g : fam_[i]) {
          const std::uint64_t before = r.rejected;
          if (conclude(r, [&] { return rules::weaken_annotation(ws_, {}, f, g); })) ++r.instances;
          r.rejected = before;
        }
  }

  // {P} f ⊑ F, {Q} f ⊑ F' ⊢ {P ∧ Q} f ⊑ F ⋈ F'
  void merge_adh(RuleReport& r) {
    for (std::size_t i = 0; i < progs_.size(); ++i) {
      const auto n = static_cast<unsigned>(fam_[i].size());
      for (unsigned f = 0; f < n; ++f)
        for (unsigned g = f; g < n; ++g)
          for (unsigned p = 0; p < kStatePreds; ++p) {
            const auto& a = order(i, f, p);
            if (!a) continue;
            for (unsigned q = 0; q < kStatePreds; ++q) {
              const auto& b = order(i, g, q);
              if (!b) continue;
              ++r.instances;
              conclude(r, [&] { return rules::merge_adherence(ws_, *a, *b); });
            }
          }
    }
  }

  // ∀x.∥B x∥ G ∥C∥, {A ∧ P} f {B} ⊢ ∥A∥ doA x <- {P} f; G ∥C∥
  void strong_split(RuleReport& r) {
    for (std::size_t i = 0; i < progs_.size(); ++i) {
      const Prog& bind = progs_[i];
      if (bind.head < 0) continue;
      for (unsigned gf = 0; gf < fam_[bind.tail].size(); ++gf)
        for (unsigned c = 0; c < kPosts; ++c) {
          const std::uint16_t cm = cont_mask(kAnnTripleCont, bind, gf, c);
          if (!cm) continue;
          for (unsigned a = 0; a < kStatePreds; ++a)
            for (unsigned p = 0; p < kStatePreds; ++p) {
              const auto both =
                  static_cast<std::uint16_t>(cm & head_mask(bind.head, binder_of(bind), a, static_cast<int>(p)));
              if (!both) continue;
              r.instances += static_cast<unsigned>(std::popcount(both));
              const unsigned b = lowest(both);
              conclude(r, [&] {
                return rules::strong_split(
                    ws_, *cont_premise(kAnnTripleCont, bind, gf, b, c),
                    *head_premise(bind.head, binder_of(bind), a, static_cast<int>(p), b), sp_[a], sp_[p], bind.x);
              });
            }
        }
    }
  }

  // ∀x.{B x} g {C}⟨G⟩, {A} f {B} ⊢ {A} do x <- f; g {C} ⟨doA x <- {A} f; G⟩
  void annotating_bind(RuleReport& r) {
    for (std::size_t i = 0; i < progs_.size(); ++i) {
      const Prog& bind = progs_[i];
      if (bind.head < 0) continue;
      for (unsigned gf = 0; gf < fam_[bind.tail].size(); ++gf)
        for (unsigned c = 0; c < kPosts; ++c) {
          const std::uint16_t cm = cont_mask(kAnnotatorCont, bind, gf, c);
          if (!cm) continue;
          for (unsigned a = 0; a < kStatePreds; ++a) {
            const auto both = static_cast<std::uint16_t>(cm & head_mask(bind.head, binder_of(bind), a));
            if (!both) continue;
            r.instances += static_cast<unsigned>(std::popcount(both));
            const unsigned b = lowest(both);
            conclude(r, [&] {
              return rules::annotating_bind(ws_, *cont_premise(kAnnotatorCont, bind, gf, b, c),
                                            *head_premise(bind.head, binder_of(bind), a, -1, b), bind.x);
            });
          }
        }
    }
  }

  MetaConfig cfg_;
  Workspace ws_;
  std::vector<Domain> doms_;
  std::vector<Prog> progs_;
  std::vector<Pred> sp_;
  std::map<std::pair<unsigned, unsigned>, PostPred> posts_;
  std::vector<std::vector<AnnComp>> fam_;
  std::unordered_map<std::uint64_t, std::optional<Judgement>> prem_;
  std::unordered_map<std::uint64_t, std::uint16_t> masks_;
};

}  // namespace

bool MetaReport::ok() const { return violations() == 0; }

std::uint64_t MetaReport::violations() const {
  std::uint64_t n = 0;
  for (const auto& r : rules) n += r.violations;
  return n;
}

std::string MetaReport::to_string() const {
  std::ostringstream os;
  os << "programs " << programs << "\n";
  for (const auto& r : rules) {
    os << r.rule << ": instances " << r.instances << ", derived " << r.derived << ", rejected " << r.rejected
       << ", violations " << r.violations << "\n";
    for (const auto& e : r.examples) os << "  " << e << "\n";
  }
  return os.str();
}

const std::vector<std::string>& meta_rule_names() {
  static const std::vector<std::string> names = {"wp_split",        "assume_annotation", "use_annotation",
                                                 "weaken_annotation", "merge_adherence", "strong_split",
                                                 "annotating_bind"};
  return names;
}

MetaReport run_meta_suite(const MetaConfig& cfg) { return Suite(cfg).run(); }

Workspace meta_workspace() {
  Workspace ws;
  ws.schema = std::make_shared<const StateSchema>(
      std::vector<std::pair<std::string, Domain>>{{"b", Domain::boolean()}});
  return ws;
}

std::vector<Comp> meta_atoms() {
  const Value t = Value::boolean(true), f = Value::boolean(false);
  return {
      Comp::ret(Expr::lit(t)),
      Comp::ret(Expr::lit(f)),
      Comp::gets("b"),
      Comp::put("b", Expr::lit(t)),
      Comp::put("b", Expr::lit(f)),
      Comp::select(Expr::lit(Value::set({}))),
      Comp::select(Expr::lit(Value::set({f}))),
      Comp::select(Expr::lit(Value::set({t}))),
      Comp::select(Expr::lit(Value::set({f, t}))),
  };
}

std::vector<Comp> meta_programs(unsigned max_depth) {
  Workspace ws = meta_workspace();
  std::vector<Domain> doms;
  std::vector<Comp> out;
  for (auto& p : generate(max_depth, ws, doms)) out.push_back(p.comp);
  return out;
}

Pred meta_state_pred(unsigned table) {
  const Pred b = Pred::atom(Expr::field("b"));
  switch (table & 3) {
    case 0: return Pred::false_();
    case 1: return Pred::not_(b);
    case 2: return b;
    default: return Pred::true_();
  }
}

PostPred meta_post(const std::string& ret, unsigned table) {
  table &= 15;
  const unsigned lo = table & 3, hi = table >> 2;
  if (lo == hi) return {ret, meta_state_pred(lo)};  // ignores the return value
  const Pred rt = ret_is_true(ret);
  if ((lo == 0 || lo == 3) && (hi == 0 || hi == 3)) return {ret, hi == 3 ? rt : Pred::not_(rt)};
  std::vector<Pred> terms;
  for (unsigned k = 0; k < 4; ++k) {
    if (!(table & (1u << k))) continue;
    const Pred bl = meta_state_pred(k & 1 ? 2 : 1);
    terms.push_back(Pred::and_({k & 2 ? rt : Pred::not_(rt), bl}));
  }
  return {ret, Pred::or_(std::move(terms))};
}

}  // namespace fannot

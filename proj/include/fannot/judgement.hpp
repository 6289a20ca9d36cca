#pragma once

// Checked claims with provenance. A Judgement either records that its claim
// was verified by enumeration or that it was derived by a named rule from
// premise judgements. Rule applications check the premises' shapes and
// discharge side conditions; they never enumerate the conclusion itself.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fannot/annot.hpp"

namespace fannot {

using Claim = std::variant<Triple, AnnTriple, Ordering, Annotator, StrongAnnotator, Refinement>;

const char* claim_kind(const Claim& c);
std::string claim_to_string(const Claim& c);
const std::vector<Binder>& claim_fixes(const Claim& c);
Verdict check_claim(const Workspace& ws, const Claim& c);

class RuleError : public std::runtime_error {
 public:
  explicit RuleError(const std::string& msg, std::optional<Verdict> v = std::nullopt)
      : std::runtime_error(msg), verdict(std::move(v)) {}
  std::optional<Verdict> verdict;
};

class Judgement {
 public:
  const Claim& claim() const;
  // "enumeration" for judgements established by checking.
  const std::string& rule() const;
  bool by_rule() const { return rule() != "enumeration"; }
  const std::vector<Judgement>& premises() const;
  // Side conditions discharged while applying the rule, in order.
  const std::vector<std::string>& side_conditions() const;

  const Triple& triple() const;
  const AnnTriple& ann_triple() const;
  const Ordering& ordering() const;
  const Annotator& annotator() const;
  const StrongAnnotator& strong() const;
  const Refinement& refinement() const;

  // Derivation tree, one judgement per line.
  std::string to_string() const;

  struct Node;  // implementation detail

 private:
  friend struct JudgementAccess;
  explicit Judgement(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Established {
  Verdict verdict;
  std::optional<Judgement> judgement;
};

// Checks the claim by enumeration; a judgement only when it holds.
Established establish(const Workspace& ws, const Claim& c);

// Re-checks every claim in the derivation by enumeration, premises first.
// Returns the first verdict that does not hold, or Holds for the root.
Verdict audit(const Workspace& ws, const Judgement& j);

// Side-condition entailment. Accepts without enumeration when every
// conjunct of q is a conjunct of p; otherwise enumerates.
Verdict side_entails(const Workspace& ws, const std::vector<Binder>& fixes, const Pred& p, const Pred& q);

// The program a call unfolds to: argument binds followed by the callee's
// body, with names renamed away from `avoid`.
Comp inline_call(const Workspace& ws, const Comp& call, const std::set<std::string>& avoid);

namespace rules {

// ---- plain triples ----
// {wp c Q} c {Q} for atomic c.
Judgement wp_axiom(const Workspace& ws, const std::vector<Binder>& fixes, const Comp& c, const PostPred& q);
// {R} c {λ_. R} for state-independent R.
Judgement pure_frame(const Workspace& ws, const std::vector<Binder>& fixes, const Comp& c, const Pred& r);
// Replaces the fixed variable `var` by a state-independent expression whose
// values lie in var's domain. `extra` fixes the expression's variables.
Judgement instantiate(const Workspace& ws, const Judgement& j, const std::string& var, const Expr& e,
                      const std::vector<Binder>& extra);
// Adds unused fixed variables. The result lists `extra` first.
Judgement extend_fixes(const Judgement& j, const std::vector<Binder>& extra);
// Strengthens the precondition and weakens the postcondition.
Judgement consequence(const Workspace& ws, const Judgement& j, const Pred& pre, const PostPred& post);
// {P1 ∧ P2} c {Q1 ∧ Q2}
Judgement conjunction(const Workspace& ws, const Judgement& a, const Judgement& b);
// From a triple about inline_call(call), the same triple about the call.
Judgement unfold_call(const Workspace& ws, const Judgement& j, const Comp& call);
// From ∀x.{B x} g {C} and {A} f {B}: {A} do x <- f; g {C}.
Judgement wp_split(const Workspace& ws, const Judgement& cont, const Judgement& head, const std::string& x);

// ---- annotations ----
// {P} c {Q} ⊢ {P} c {Q} ⟨{P} c⟩
Judgement annotate_step(const Judgement& j);
Judgement annotator_triple(const Judgement& j);
Judgement annotator_order(const Judgement& j);
// From ∀x.{B x} g {C}⟨G⟩ and {A} f {B}: {A} do x <- f; g {C} ⟨doA x <- {A} f; G⟩.
// The head may also be an annotator {A} f {B}⟨F⟩, giving ⟨doA x <- F; G⟩.
Judgement annotating_bind(const Workspace& ws, const Judgement& cont, const Judgement& head, const std::string& x);
Judgement annotating_if(const Workspace& ws, const Judgement& then_j, const Judgement& else_j, const Expr& cond,
                        const Pred& pre);
Judgement strengthen_annotator(const Workspace& ws, const Judgement& j, const Pred& pre);
// {R ∧ P} f {Q} ⊢ ∥R∥ {P} f ∥Q∥
Judgement assume_annotation(const Workspace& ws, const Judgement& j, const Pred& r, const Pred& p);
// {P1} f ⊑ F, ∥P2∥ F ∥Q∥ ⊢ {P1 ∧ P2} f {Q}
Judgement use_annotation(const Workspace& ws, const Judgement& order, const Judgement& ann_triple);
// Pointwise step entailment: F ⊑ G.
Judgement weaken_annotation(const Workspace& ws, const std::vector<Binder>& fixes, const AnnComp& f,
                            const AnnComp& g);
// {P} f ⊑ F, {Q} f ⊑ F' ⊢ {P ∧ Q} f ⊑ F ⋈ F'
Judgement merge_adherence(const Workspace& ws, const Judgement& a, const Judgement& b);
// {P} f ⊑ F, F ⊑ G ⊢ {P} f ⊑ G
Judgement order_trans(const Workspace& ws, const Judgement& order, const Judgement& refinement);
// From ∀x.∥B x∥ G ∥C∥ and {A ∧ P} f {B}: ∥A∥ doA x <- {P} f; G ∥C∥.
Judgement strong_split(const Workspace& ws, const Judgement& cont, const Judgement& head, const Pred& a,
                       const Pred& p, const std::string& x);

// ---- strong annotators ----
// {pre} c {Q} with A ∧ P ⇒ pre: ∥A∥ {P} c ∥Q∥ ⟨{pre} c⟩
Judgement strong_step(const Workspace& ws, const Judgement& j, const Pred& p, const Pred& a);
Judgement strong_bind(const Workspace& ws, const Judgement& cont, const Judgement& head, const std::string& x);
Judgement strong_if(const Workspace& ws, const Judgement& then_j, const Judgement& else_j, const Expr& cond,
                    const Pred& pre);
Judgement strengthen_strong(const Workspace& ws, const Judgement& j, const Pred& pre);
Judgement strong_ann_triple(const Judgement& j);
// {P} f ⊑ F and ∥R∥ F ∥Q∥ ⟨G⟩ give {P ∧ R} f ⊑ G.
Judgement strong_adherence(const Workspace& ws, const Judgement& order, const Judgement& strong);

}  // namespace rules

}  // namespace fannot

#pragma once

// Annotated programs: a program with a predicate before each step. Running
// one yields the program's outcomes plus a failure flag that is set when a
// reachable step's predicate is false.

#include <optional>
#include <string>
#include <vector>

#include "fannot/hoare.hpp"

namespace fannot {

enum class AnnOp : std::uint8_t { Step, Bind, If };

class AnnComp {
 public:
  AnnComp();  // (ann true (return unit))

  // {p} c. The wrapped program may be composite.
  static AnnComp step(Pred p, Comp c);
  static AnnComp bind(std::string x, AnnComp first, AnnComp rest);
  static AnnComp if_(Expr cond, AnnComp then_a, AnnComp else_a);
  static AnnComp seq(std::vector<std::pair<std::string, AnnComp>> steps, AnnComp last);

  AnnOp op() const;
  const Pred& pred() const;  // Step
  const Comp& comp() const;  // Step
  const std::string& name() const;  // Bind binder
  const Expr& cond() const;  // If
  const std::vector<AnnComp>& kids() const;
  const AnnComp& kid(std::size_t i) const { return kids()[i]; }

  std::strong_ordering operator<=>(const AnnComp& other) const;
  bool operator==(const AnnComp& other) const { return (*this <=> other) == 0; }

  std::string to_string() const;

  struct Node;  // implementation detail

 private:
  explicit AnnComp(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

class AnnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The underlying program.
Comp drop_ann(const AnnComp& f);
AnnComp lift(const Pred& p, const Comp& c);
// Same skeleton as `c` with one step per bind-chain element, each `p`.
AnnComp annotate_uniform(const Comp& c, const Pred& p = Pred::true_());

struct AnnRun {
  std::vector<Outcome> outcomes;  // sorted, no repeats
  bool fails = false;
};

// Streams outcomes of the underlying program; returns the failure flag.
// A bind fails when its head fails or the continuation fails from any of
// the head's outcomes.
bool exec_ann(const AnnComp& f, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s,
              const OutcomeSink& sink);
AnnRun run_ann(const AnnComp& f, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s);
bool afails(const AnnComp& f, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s);

// Per-step predicate conjunction. Throws AnnError unless the skeletons match.
AnnComp merge(const AnnComp& f, const AnnComp& g);
bool same_skeleton(const AnnComp& f, const AnnComp& g);
// Each step {p} c becomes do assert p; c od.
Comp to_asserting_comp(const AnnComp& f);
// Normalizes every step predicate.
AnnComp normalize(const AnnComp& f);

// Steps in program order with the binder domains in scope at each.
struct AnnStepView {
  std::size_t index;
  Pred pred;
  Comp comp;
  DomainCtx ctx;
};
std::vector<AnnStepView> ann_steps(const Workspace& ws, const AnnComp& f, const DomainCtx& ctx);
AnnComp with_step_pred(const AnnComp& f, std::size_t index, const Pred& p);

// ∥pre∥ ann ∥post∥
struct AnnTriple {
  std::vector<Binder> fixes;
  Pred pre;
  AnnComp ann;
  PostPred post;

  bool operator==(const AnnTriple&) const = default;
  std::string to_string() const;
};

// {pre} prog ⊑ ann
struct Ordering {
  std::vector<Binder> fixes;
  Pred pre;
  Comp prog;
  AnnComp ann;

  bool operator==(const Ordering&) const = default;
  std::string to_string() const;
};

// {pre} prog {post} ⟨ann⟩
struct Annotator {
  std::vector<Binder> fixes;
  Pred pre;
  Comp prog;
  PostPred post;
  AnnComp ann;

  bool operator==(const Annotator&) const = default;
  std::string to_string() const;
};

// ∥pre∥ ann_in ∥post∥ ⟨ann_out⟩: the annotated triple, and from any pre
// state where ann_in does not fail, ann_out does not fail either.
struct StrongAnnotator {
  std::vector<Binder> fixes;
  Pred pre;
  AnnComp ann_in;
  PostPred post;
  AnnComp ann_out;

  bool operator==(const StrongAnnotator&) const = default;
  std::string to_string() const;
};

// lhs ⊑ rhs: where lhs does not fail both have the same outcomes, and
// wherever rhs fails lhs fails.
struct Refinement {
  std::vector<Binder> fixes;
  AnnComp lhs;
  AnnComp rhs;

  bool operator==(const Refinement&) const = default;
  std::string to_string() const;
};

Verdict check_order(const Workspace& ws, const Ordering& o);
Verdict check_ann_triple(const Workspace& ws, const AnnTriple& t);
Verdict check_annotator(const Workspace& ws, const Annotator& a);
Verdict check_strong_annotator(const Workspace& ws, const StrongAnnotator& a);
Verdict check_refinement(const Workspace& ws, const Refinement& r);

}  // namespace fannot

#pragma once

// Backward annotation generation over bind chains. Atomic steps get their
// weakest preconditions; calls are discharged from registered triples about
// the callee, or unfolded when no registered triple fits.

#include <string>
#include <vector>

#include "fannot/judgement.hpp"

namespace fannot {

class VcgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A registered triple {pre} f x1 .. xn {post} about a call whose arguments
// are distinct fixed variables. Other fixed variables are ghosts, matched
// against the requested postcondition when the triple is used.
struct RuleEntry {
  std::string name;
  std::string callee;
  Judgement judgement;
};

class RuleDB {
 public:
  // Accepts a triple or an annotator. Throws VcgError for other shapes.
  void add(const std::string& name, const Judgement& j);
  const std::vector<RuleEntry>& entries() const { return entries_; }
  std::vector<const RuleEntry*> for_callee(const std::string& callee) const;
  const RuleEntry* find(const std::string& name) const;

 private:
  std::vector<RuleEntry> entries_;
};

struct VcgResult {
  Judgement judgement;  // the goal as an annotator
  AnnComp annotation;
  std::vector<std::string> log;
};

// Proves {pre} prog {post} and returns the collected annotation.
VcgResult vcg_prove(const Workspace& ws, const RuleDB& db, const Triple& goal);

struct StrongResult {
  Judgement judgement;  // strong annotator ∥pre∥ ann ∥post∥ ⟨out⟩
  Judgement ann_triple;
  AnnComp annotation;  // the produced annotation
  std::vector<std::string> log;
};

// Proves ∥pre∥ ann ∥post∥. At each step the step's own annotation is
// assumed, so only the part of the step's precondition it does not imply
// is required from earlier steps.
StrongResult vcg_strong(const Workspace& ws, const RuleDB& db, const std::vector<Binder>& fixes, const Pred& pre,
                        const AnnComp& ann, const PostPred& post);

}  // namespace fannot

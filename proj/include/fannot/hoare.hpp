#pragma once

// Hoare triples over the state monad: the exhaustive checker, atomic
// weakest preconditions, and the plain bind decomposition.

#include <string>
#include <utility>
#include <vector>

#include "fannot/check.hpp"

namespace fannot {

// {pre} prog {post}, universally quantified over `fixes`.
struct Triple {
  std::vector<Binder> fixes;
  Pred pre;
  Comp prog;
  PostPred post;

  bool operator==(const Triple&) const = default;
  std::string to_string() const;
};

// ∀ fixes, s. pre s → ∀(r, s') ∈ prog s. post r s'
Verdict check_triple(const Workspace& ws, const Triple& t);

// Weakest precondition of an atomic program (Return, Gets, Put, Select,
// Assert, If of atomics). `ctx` gives domains for free variables of the
// program so Select can quantify over its element domain.
Pred wp_atomic(const Workspace& ws, const Comp& c, const PostPred& q, const DomainCtx& ctx);

// post[e/ret] that stays correct when e reads the state.
Pred subst_ret(const PostPred& q, const Expr& e);

// Splits a goal over `do x <- f; g` at the midpoint `mid` into
//   ({mid x} g {post}) for all x, and ({pre} f {mid}).
std::pair<Triple, Triple> split(const Workspace& ws, const Triple& goal, const PostPred& mid);

// {p} prog {post} given entails(p, t.pre); throws CheckError with the
// counterexample otherwise.
Triple weaken(const Workspace& ws, const Triple& t, const Pred& p);

}  // namespace fannot

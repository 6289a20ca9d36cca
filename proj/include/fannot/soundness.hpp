#pragma once

// Exhaustive rule soundness over a toy universe: one boolean state field,
// programs built from atomic steps by bind up to a depth bound, and every
// predicate over (return value, state). Each rule is applied to every
// premise combination that holds by enumeration, and its conclusion is
// checked by enumeration too.

#include <cstdint>
#include <string>
#include <vector>

#include "fannot/judgement.hpp"

namespace fannot {

struct MetaConfig {
  unsigned max_depth = 3;
  // Annotations assign every state predicate to every step for programs with
  // at most this many atomic steps; longer ones get the uniform annotations.
  unsigned full_annotation_steps = 2;
  // Rule names to run; empty runs all of meta_rule_names().
  std::vector<std::string> rules;
};

struct RuleReport {
  std::string rule;
  std::uint64_t instances = 0;   // premise combinations that hold
  std::uint64_t derived = 0;     // distinct conclusions the rule produced
  std::uint64_t rejected = 0;    // rule refused premises that hold
  std::uint64_t violations = 0;  // derived conclusions refuted by enumeration
  std::vector<std::string> examples;  // first few violations
};

struct MetaReport {
  std::uint64_t programs = 0;
  std::vector<RuleReport> rules;

  bool ok() const;
  std::uint64_t violations() const;
  std::string to_string() const;
};

const std::vector<std::string>& meta_rule_names();
MetaReport run_meta_suite(const MetaConfig& cfg);

// Building blocks, exposed for tests.
Workspace meta_workspace();  // single field b : bool
std::vector<Comp> meta_atoms();
// Atoms, then binds of programs of depth below, in generation order.
std::vector<Comp> meta_programs(unsigned max_depth);
// Bit 0: holds when b is false, bit 1: when b is true.
Pred meta_state_pred(unsigned table);
// Table bit (2*[ret = true] + [b]); a non-boolean return counts as not true.
PostPred meta_post(const std::string& ret, unsigned table);

}  // namespace fannot

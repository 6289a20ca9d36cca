#pragma once

// Project files: schema, predicate and program definitions, registered
// rules, goals, and annotations stored per (program, property).

#include <string>
#include <string_view>
#include <vector>

#include "fannot/sexpr.hpp"
#include "fannot/vcg.hpp"

namespace fannot {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StoredRule {
  std::string name;
  Claim claim;  // triple or annotator

  bool operator==(const StoredRule&) const = default;
};

// {pre} body {post} with the program's parameters fixed.
struct Goal {
  std::string program;
  std::string property;
  Pred pre;
  PostPred post;

  std::string key() const { return program + ":" + property; }
  bool operator==(const Goal&) const = default;
};

// An annotation of a program's body; the parameters are its fixed variables.
struct StoredAnnotation {
  std::string program;
  std::string property;
  AnnComp ann;

  std::string key() const { return program + ":" + property; }
  bool operator==(const StoredAnnotation&) const = default;
};

struct Project {
  StateSchema schema;
  PredDefs preds;
  ProgramTable programs;
  std::vector<StoredRule> rules;
  std::vector<Goal> goals;
  std::vector<StoredAnnotation> annotations;

  bool operator==(const Project&) const = default;

  const Goal* goal(std::string_view key) const;
  const StoredAnnotation* annotation(std::string_view key) const;
  // Stores the normalized annotation, replacing one with the same key.
  void put_annotation(const std::string& program, const std::string& property, const AnnComp& ann);
};

std::string save_string(const Project& p);
// Throws ParseError for syntax errors and StoreError listing every
// unresolved reference or mismatched annotation.
Project load_string(std::string_view text);
void save(const Project& p, const std::string& path);
Project load(const std::string& path);

// Problems with cross references, one per line; empty when consistent.
std::vector<std::string> validate_project(const Project& p);

Workspace workspace_of(const Project& p, unsigned workers = 1);
// The program's parameters as fixed variables.
std::vector<Binder> program_fixes(const Project& p, const std::string& program);
// With `as_call` the program is the call `f params`; otherwise its body.
Triple goal_triple(const Project& p, const Goal& g, bool as_call);
// Checks every registered rule by enumeration before registering it.
RuleDB build_rule_db(const Workspace& ws, const Project& p);

// Per-step differences of normalized step predicates, one line per change.
// Throws StoreError when the skeletons differ.
std::vector<std::string> diff_annotations(const AnnComp& f, const AnnComp& g);

}  // namespace fannot

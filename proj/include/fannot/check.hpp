#pragma once

// Exhaustive checking: verdicts, counterexamples, and the ordered scan over
// (fixed-variable assignment, state) pairs that every checker is built on.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fannot/comp.hpp"
#include "fannot/typing.hpp"

namespace fannot {

// Everything a check needs besides the claim itself.
struct Workspace {
  std::shared_ptr<const StateSchema> schema = std::make_shared<const StateSchema>();
  PredDefs preds;
  ProgramTable programs;
  unsigned workers = 1;

  // Definitions resolve, programs are well formed, fields exist.
  void validate() const;
};

enum class VerdictKind : std::uint8_t { Holds, Violated, Fault };

struct Counterexample {
  std::vector<std::pair<std::string, Value>> bindings;
  std::uint64_t state_index = 0;  // position in the full universe enumeration
  State state;
  std::optional<Outcome> outcome;

  std::string to_string() const;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Holds;
  std::optional<Counterexample> cex;
  std::string diagnostic;
  std::uint64_t states = 0;  // universe size

  bool holds() const { return kind == VerdictKind::Holds; }
  std::string to_string() const;

  static Verdict hold(std::uint64_t states) { return {VerdictKind::Holds, std::nullopt, {}, states}; }
};

const char* kind_name(VerdictKind k);

// Result of testing one (assignment, state) pair.
struct Probe {
  bool ok = true;
  std::optional<Outcome> outcome;
  std::string note;

  static Probe pass() { return {}; }
  static Probe fail(std::string note = {}, std::optional<Outcome> o = std::nullopt) {
    return {false, std::move(o), std::move(note)};
  }
};

// Called with the fixed variables bound in `env`. May push and pop but must
// leave env as it found it. EvalFault escaping it becomes a Fault verdict.
using StateTest = std::function<Probe(Env& env, const State& s)>;

// Tests every assignment of `fixes` (outer, first variable most significant)
// against every state (inner, canonical order), restricted to the listed
// fields; other fields stay at their first value, which preserves the
// position of the first failure. Returns the first failure.
Verdict scan(const Workspace& ws, const std::vector<Binder>& fixes, const std::set<std::string>& fields,
             const StateTest& test);

// Tests every assignment of `fixes` with no state involved.
Verdict scan_values(const Workspace& ws, const std::vector<Binder>& fixes,
                    const std::function<Probe(Env& env)>& test);

// The fixes whose names occur in `vars`, in order. Throws CheckError for a
// variable with no fix.
std::vector<Binder> used_fixes(const std::vector<Binder>& fixes, const std::set<std::string>& vars);

DomainCtx ctx_of(const std::vector<Binder>& fixes);
std::string fixes_to_string(const std::vector<Binder>& fixes);

class CheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ∀ fixes, s. p s → q s
Verdict entails(const Workspace& ws, const std::vector<Binder>& fixes, const Pred& p, const Pred& q);
// ∀ fixes, s. p s ↔ q s
Verdict equivalent(const Workspace& ws, const std::vector<Binder>& fixes, const Pred& p, const Pred& q);
// ∀ fixes, r ∈ ret_dom, s. p r s → q r s, with both return binders identified.
Verdict entails_post(const Workspace& ws, const std::vector<Binder>& fixes, const Domain& ret_dom, const PostPred& p,
                     const PostPred& q);

}  // namespace fannot

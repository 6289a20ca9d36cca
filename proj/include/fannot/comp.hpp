#pragma once

// Nondeterministic state-monad programs and their set-of-outcomes semantics.

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fannot/pred.hpp"

namespace fannot {

enum class CompOp : std::uint8_t { Return, Gets, Put, Select, Bind, If, Call, Assert };

class Comp {
 public:
  Comp();  // return unit

  static Comp ret(Expr e);
  static Comp gets(std::string field);
  static Comp put(std::string field, Expr e);
  static Comp select(Expr set);
  // do x <- first; rest. Binder "_" discards the result.
  static Comp bind(std::string x, Comp first, Comp rest);
  static Comp if_(Expr cond, Comp then_c, Comp else_c);
  static Comp call(std::string name, std::vector<Expr> args = {});
  static Comp assert_(Pred p);
  // Right-nested binds; the last step's result is the block's result.
  static Comp seq(std::vector<std::pair<std::string, Comp>> steps, Comp last);

  CompOp op() const;
  // Field (Gets/Put), binder (Bind), or callee (Call).
  const std::string& name() const;
  // Return value, Put value, Select set, If condition.
  const Expr& expr() const;
  const std::vector<Expr>& args() const;
  // Bind: {first, rest}; If: {then, else}.
  const std::vector<Comp>& kids() const;
  const Comp& kid(std::size_t i) const { return kids()[i]; }
  const Pred& pred() const;

  std::strong_ordering operator<=>(const Comp& other) const;
  bool operator==(const Comp& other) const { return (*this <=> other) == 0; }

  std::string to_string() const;

  struct Node;  // implementation detail

 private:
  explicit Comp(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Binder {
  std::string name;
  Domain dom;

  std::strong_ordering operator<=>(const Binder&) const = default;
  bool operator==(const Binder&) const = default;
};

struct ProgramDef {
  std::vector<Binder> params;
  Comp body;

  bool operator==(const ProgramDef&) const = default;
};

using ProgramTable = std::map<std::string, ProgramDef>;

struct Outcome {
  Value ret;
  State state;

  std::strong_ordering operator<=>(const Outcome& o) const {
    if (auto c = ret <=> o.ret; c != 0) return c;
    return state <=> o.state;
  }
  bool operator==(const Outcome& o) const { return ret == o.ret && state == o.state; }
  std::string to_string() const { return "(" + ret.to_string() + ", " + state.to_string() + ")"; }
};

class CompError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using OutcomeSink = std::function<void(const Value& ret, const State& s)>;

// Streams every outcome of c from s, possibly with repeats. Throws EvalFault
// for a failed assertion or a faulting expression.
void exec(const Comp& c, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s,
          const OutcomeSink& sink);

// The outcome set, sorted and without repeats.
std::vector<Outcome> run(const Comp& c, const ProgramTable& progs, const PredDefs& defs, Env& env, const State& s);

// Return, Gets, Put, Select, Assert, and If over atomic branches.
bool is_atomic(const Comp& c);

void collect_free_vars(const Comp& c, std::set<std::string>& out);
std::set<std::string> free_vars(const Comp& c);
// Fields read / written, following calls.
void collect_fields_read(const Comp& c, const ProgramTable& progs, const PredDefs& defs, std::set<std::string>& out);
void collect_fields_written(const Comp& c, const ProgramTable& progs, std::set<std::string>& out);
bool reads_state(const Comp& c, const ProgramTable& progs, const PredDefs& defs);
// Every binder name introduced by Bind nodes (not following calls).
void collect_binders(const Comp& c, std::set<std::string>& out);

// Capture-avoiding substitution into the program's expressions.
Comp subst(const Comp& c, const std::string& var, const Expr& e);

// Checks calls resolve with the right arity, the call graph is acyclic, and
// every variable is bound. Throws CompError.
void validate_programs(const ProgramTable& progs, const PredDefs& defs);
void validate_comp(const Comp& c, const std::set<std::string>& bound, const ProgramTable& progs,
                   const PredDefs& defs);

}  // namespace fannot

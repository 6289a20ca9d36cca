#pragma once

// Predicates over a state and bound variables, named predicate definitions,
// and postconditions that additionally bind a return value.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fannot/expr.hpp"

namespace fannot {

enum class PredOp : std::uint8_t {
  True,
  False,
  Atom,       // boolean expression
  And,
  Or,
  Not,
  Imp,
  Iff,
  Forall,     // bounded by a domain
  Exists,
  Ref,        // named definition applied to argument expressions
  Let,        // binds a variable to an expression evaluated at the current state
  WithField,  // evaluates the body in the state with one field replaced
};

class Pred {
 public:
  Pred();  // true

  static Pred true_();
  static Pred false_();
  static Pred atom(Expr e);
  static Pred and_(std::vector<Pred> ps);
  static Pred or_(std::vector<Pred> ps);
  static Pred not_(Pred p);
  static Pred imp(Pred a, Pred b);
  static Pred iff(Pred a, Pred b);
  static Pred forall(std::string var, Domain d, Pred body);
  static Pred exists(std::string var, Domain d, Pred body);
  static Pred ref(std::string name, std::vector<Expr> args = {});
  static Pred let(std::string var, Expr e, Pred body);
  static Pred with_field(std::string field, Expr e, Pred body);

  PredOp op() const;
  // Binder, definition name, or replaced field, depending on op.
  const std::string& name() const;
  const Domain& domain() const;
  // Atom expression, or the bound expression of Let / WithField.
  const Expr& expr() const;
  const std::vector<Expr>& ref_args() const;
  const std::vector<Pred>& kids() const;
  const Pred& kid(std::size_t i) const { return kids()[i]; }
  // Body of a binder node (Forall/Exists/Let/WithField).
  const Pred& body() const { return kids()[0]; }

  bool is_true() const { return op() == PredOp::True; }
  bool is_false() const { return op() == PredOp::False; }

  std::strong_ordering operator<=>(const Pred& other) const;
  bool operator==(const Pred& other) const { return (*this <=> other) == 0; }

  std::string to_string() const;

  struct Node;  // implementation detail

 private:
  explicit Pred(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// λret. body
struct PostPred {
  std::string ret = "_";
  Pred body;

  std::strong_ordering operator<=>(const PostPred&) const = default;
  bool operator==(const PostPred&) const = default;
  std::string to_string() const;
};

struct PredDef {
  std::vector<std::string> params;
  Pred body;

  bool operator==(const PredDef&) const = default;
};

using PredDefs = std::map<std::string, PredDef>;

// Raised for structurally invalid predicates and definition tables.
class PredError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool eval_pred(const Pred& p, const PredDefs& defs, Env& env, const State& s);
bool eval_post(const PostPred& q, const PredDefs& defs, Env& env, const Value& ret, const State& s);

void collect_free_vars(const Pred& p, std::set<std::string>& out);
std::set<std::string> free_vars(const Pred& p);
std::set<std::string> free_vars(const PostPred& q);
// State fields the predicate may read, following definitions.
void collect_fields(const Pred& p, const PredDefs& defs, std::set<std::string>& out);
bool reads_state(const Pred& p, const PredDefs& defs);
// Definitions reachable from p.
void collect_refs(const Pred& p, const PredDefs& defs, std::set<std::string>& out);

// Capture-avoiding substitution of an expression for a variable.
Pred subst(const Pred& p, const std::string& var, const Expr& e);
// Renames free occurrences of a variable.
Pred rename(const Pred& p, const std::string& from, const std::string& to);

// Flattens conjunctions, drops true, collapses false, removes duplicate
// conjuncts and sorts them. Applied recursively.
Pred normalize(const Pred& p);
// Conjuncts of the normalized predicate (empty for true).
std::vector<Pred> conjuncts(const Pred& p);
Pred conj(std::vector<Pred> ps);  // normalized conjunction
Pred conj(const Pred& a, const Pred& b);

// Name not in `avoid`, derived from `base`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Checks every reference resolves with the right arity and the reference
// graph is acyclic. Throws PredError.
void validate_defs(const PredDefs& defs);
void validate_refs(const Pred& p, const PredDefs& defs);

}  // namespace fannot

#pragma once

// Pure expressions over a state and a binding environment.

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fannot/state.hpp"
#include "fannot/value.hpp"

namespace fannot {

// Raised when evaluation cannot produce a value: `the` applied to a map
// miss, a failed assertion, an ill-typed operand. Checkers report it as a
// Fault verdict, never as a violation.
class EvalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lexically scoped variable bindings. A frame hides every binding made
// before it; named definitions are evaluated in a fresh frame.
class Env {
 public:
  Env() = default;
  Env(std::initializer_list<std::pair<std::string, Value>> init);

  void push(std::string name, Value v) { slots_.emplace_back(std::move(name), std::move(v)); }
  void pop(std::size_t n = 1) { slots_.resize(slots_.size() - n); }
  const Value* find(std::string_view name) const {
    for (std::size_t i = slots_.size(); i-- > frame_;)
      if (slots_[i].first == name) return &slots_[i].second;
    return nullptr;
  }
  std::size_t size() const { return slots_.size(); }

  std::size_t begin_frame() {
    std::size_t saved = frame_;
    frame_ = slots_.size();
    return saved;
  }
  void end_frame(std::size_t saved) {
    slots_.resize(frame_);
    frame_ = saved;
  }

  // Visible bindings, innermost last.
  std::vector<std::pair<std::string, Value>> visible() const {
    return {slots_.begin() + static_cast<std::ptrdiff_t>(frame_), slots_.end()};
  }

 private:
  std::vector<std::pair<std::string, Value>> slots_;
  std::size_t frame_ = 0;
};

enum class ExprOp : std::uint8_t {
  Lit,       // literal value
  Var,       // bound variable
  Field,     // state field read
  Get,       // record projection
  RecUpd,    // record field update
  MapUpd,    // partial map update m(k -> v)
  Lookup,    // partial map lookup, Absent on miss
  The,       // asserts a lookup result present
  Dom,       // key set of a map
  SetMinus,  // set difference
  SetOf,     // set literal from element expressions
  Cons,      // prepend to a sequence
  Apply,     // total map application
  Assign,    // total map assignment m(k := v)
  In,        // membership in a set, sequence, or map domain
  NotIn,
  Eq,
  Not,
  And,
  Or,
  Add,
  Mod,
  Lt,
  Le,
};

// Head symbol used in the text form.
const char* expr_op_symbol(ExprOp op);

class Expr {
 public:
  Expr();  // unit literal

  static Expr lit(Value v);
  static Expr var(std::string name);
  static Expr field(std::string name);
  static Expr get(Expr rec, std::string field);
  static Expr rec_upd(Expr rec, std::string field, Expr v);
  static Expr map_upd(Expr m, Expr k, Expr v);
  static Expr lookup(Expr m, Expr k);
  static Expr the(Expr e);
  static Expr dom(Expr m);
  static Expr set_minus(Expr a, Expr b);
  static Expr set_of(std::vector<Expr> elems);
  static Expr cons(Expr x, Expr q);
  static Expr apply(Expr m, Expr k);
  static Expr assign(Expr m, Expr k, Expr v);
  static Expr in(Expr x, Expr c);
  static Expr not_in(Expr x, Expr c);
  static Expr eq(Expr a, Expr b);
  static Expr not_(Expr a);
  static Expr and_(std::vector<Expr> args);
  static Expr or_(std::vector<Expr> args);
  static Expr add(Expr a, Expr b);
  static Expr mod(Expr a, Expr b);
  static Expr lt(Expr a, Expr b);
  static Expr le(Expr a, Expr b);

  // Generic constructor used by the parser and by substitution.
  static Expr make(ExprOp op, std::string name, std::vector<Expr> args, Value lit = {});

  ExprOp op() const;
  const Value& value() const;
  const std::string& name() const;
  const std::vector<Expr>& args() const;
  const Expr& arg(std::size_t i) const { return args()[i]; }

  std::strong_ordering operator<=>(const Expr& other) const;
  bool operator==(const Expr& other) const { return (*this <=> other) == 0; }

  std::string to_string() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Value eval_expr(const Expr& e, Env& env, const State& s);
bool eval_bool(const Expr& e, Env& env, const State& s);

void collect_free_vars(const Expr& e, std::set<std::string>& out);
std::set<std::string> free_vars(const Expr& e);
void collect_fields(const Expr& e, std::set<std::string>& out);
bool reads_state(const Expr& e);
Expr subst(const Expr& e, const std::string& var, const Expr& replacement);

}  // namespace fannot

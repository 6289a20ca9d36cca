#pragma once

// Parenthesized prefix syntax for every term the library prints. Readers
// accept exactly what the to_string methods produce, plus ';' comments and
// bare expressions in predicate position.

#include <string>
#include <string_view>
#include <vector>

#include "fannot/judgement.hpp"

namespace fannot {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line(line), col(col) {}
  int line;
  int col;
};

struct SExpr {
  bool list = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 0;
  int col = 0;

  bool is_atom() const { return !list; }
  bool is_atom(std::string_view a) const { return !list && atom == a; }
  // Head symbol of a list whose first item is an atom, else "".
  std::string head() const;
  std::size_t size() const { return items.size(); }
  const SExpr& operator[](std::size_t i) const { return items[i]; }
  std::string to_string() const;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }
};

std::vector<SExpr> parse_sexprs(std::string_view text);
// Exactly one term.
SExpr parse_sexpr(std::string_view text);

Value read_value(const SExpr& s);
Domain read_domain(const SExpr& s);
Expr read_expr(const SExpr& s);
Pred read_pred(const SExpr& s);
PostPred read_post(const SExpr& s);  // (post r P)
Comp read_comp(const SExpr& s);
AnnComp read_ann(const SExpr& s);
std::vector<Binder> read_fixes(const SExpr& s);  // (fixes (x D) ...)
Claim read_claim(const SExpr& s);

// Convenience: parse text holding a single term of the given kind.
Pred parse_pred(std::string_view text);
Comp parse_comp(std::string_view text);
AnnComp parse_ann(std::string_view text);
Expr parse_expr(std::string_view text);
Domain parse_domain(std::string_view text);
Value parse_value(std::string_view text);

}  // namespace fannot

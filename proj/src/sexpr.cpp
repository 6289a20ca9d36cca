#include "fannot/sexpr.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>

namespace fannot {

std::string SExpr::head() const {
  if (!list || items.empty() || items[0].list) return {};
  return items[0].atom;
}

std::string SExpr::to_string() const {
  if (!list) return atom;
  std::string s = "(";
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? " " : "") + items[i].to_string();
  return s + ")";
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::vector<SExpr> top;
  std::vector<SExpr> stack;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto emit = [&](SExpr e) {
    if (stack.empty())
      top.push_back(std::move(e));
    else
      stack.back().items.push_back(std::move(e));
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance();
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
    } else if (c == '(') {
      SExpr e;
      e.list = true;
      e.line = line;
      e.col = col;
      stack.push_back(std::move(e));
      advance();
    } else if (c == ')') {
      if (stack.empty()) throw ParseError("unbalanced ')'", line, col);
      SExpr e = std::move(stack.back());
      stack.pop_back();
      advance();
      emit(std::move(e));
    } else {
      SExpr e;
      e.line = line;
      e.col = col;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
             text[i] != ')' && text[i] != ';') {
        e.atom += text[i];
        advance();
      }
      emit(std::move(e));
    }
  }
  if (!stack.empty()) throw ParseError("unclosed '('", stack.back().line, stack.back().col);
  return top;
}

SExpr parse_sexpr(std::string_view text) {
  auto all = parse_sexprs(text);
  if (all.size() != 1) throw ParseError("expected exactly one term, found " + std::to_string(all.size()), 1, 1);
  return std::move(all[0]);
}

namespace {

void arity(const SExpr& s, std::size_t n) {
  if (!s.list || s.size() != n)
    s.fail("'" + s.head() + "' expects " + std::to_string(n - 1) + " operand(s): " + s.to_string());
}

void min_arity(const SExpr& s, std::size_t n) {
  if (!s.list || s.size() < n) s.fail("'" + s.head() + "' expects at least " + std::to_string(n - 1) + " operand(s)");
}

const std::string& name_of(const SExpr& s) {
  if (s.list || s.atom.empty()) s.fail("expected a name, got " + s.to_string());
  return s.atom;
}

std::optional<std::int64_t> as_int(const std::string& a) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
  if (ec != std::errc() || p != a.data() + a.size()) return std::nullopt;
  return v;
}

std::int64_t int_of(const SExpr& s) {
  if (s.list) s.fail("expected a number, got " + s.to_string());
  auto v = as_int(s.atom);
  if (!v) s.fail("expected a number, got " + s.atom);
  return *v;
}

std::optional<Value> scalar(const std::string& a) {
  if (a == "unit") return Value::unit();
  if (a == "true") return Value::boolean(true);
  if (a == "false") return Value::boolean(false);
  if (a == "absent") return Value::absent();
  if (a.size() > 1 && a[0] == '@') {
    auto v = as_int(a.substr(1));
    if (v && *v >= 0) return Value::id(static_cast<std::uint32_t>(*v));
  }
  if (auto v = as_int(a)) return Value::nat(*v);
  return std::nullopt;
}

template <class F>
auto guarded(const SExpr& s, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    s.fail(e.what());
  }
}

const std::map<std::string, ExprOp>& expr_ops() {
  static const std::map<std::string, ExprOp> table = [] {
    std::map<std::string, ExprOp> t;
    for (int k = static_cast<int>(ExprOp::Get); k <= static_cast<int>(ExprOp::Le); ++k)
      t[expr_op_symbol(static_cast<ExprOp>(k))] = static_cast<ExprOp>(k);
    return t;
  }();
  return table;
}

int expr_arity(ExprOp op) {
  switch (op) {
    case ExprOp::The:
    case ExprOp::Dom:
    case ExprOp::Not:
      return 1;
    case ExprOp::MapUpd:
    case ExprOp::Assign:
      return 3;
    case ExprOp::SetOf:
    case ExprOp::And:
    case ExprOp::Or:
      return -1;
    default:
      return 2;
  }
}

// Items of a (do ...) or (do-a ...) chain: (<- x t) or t, then the last term.
template <class T, class Read, class Bind>
T read_chain(const SExpr& s, Read read, Bind bind) {
  min_arity(s, 2);
  T out = read(s[s.size() - 1]);
  for (std::size_t i = s.size() - 1; i-- > 1;) {
    const SExpr& item = s[i];
    if (item.head() == "<-") {
      arity(item, 3);
      out = bind(name_of(item[1]), read(item[2]), out);
    } else {
      out = bind("_", read(item), out);
    }
  }
  return out;
}

const SExpr& section(const SExpr& s, std::size_t i, const char* key, std::size_t n) {
  if (i >= s.size() || s[i].head() != key) s.fail(std::string("expected (") + key + " ...) in " + s.head());
  arity(s[i], n);
  return s[i];
}

}  // namespace

Value read_value(const SExpr& s) {
  if (!s.list) {
    if (auto v = scalar(s.atom)) return *v;
    s.fail("not a value: " + s.atom);
  }
  const std::string h = s.head();
  return guarded(s, [&]() -> Value {
    if (h == "record") {
      std::vector<std::pair<std::string, Value>> fields;
      for (std::size_t i = 1; i < s.size(); ++i) {
        arity(s[i], 2);
        fields.emplace_back(name_of(s[i][0]), read_value(s[i][1]));
      }
      return Value::record(std::move(fields));
    }
    if (h == "set" || h == "seq") {
      std::vector<Value> elems;
      for (std::size_t i = 1; i < s.size(); ++i) elems.push_back(read_value(s[i]));
      return h == "set" ? Value::set(std::move(elems)) : Value::seq(std::move(elems));
    }
    if (h == "map") {
      std::vector<std::pair<Value, Value>> entries;
      for (std::size_t i = 1; i < s.size(); ++i) {
        arity(s[i], 2);
        entries.emplace_back(read_value(s[i][0]), read_value(s[i][1]));
      }
      return Value::map(std::move(entries));
    }
    s.fail("not a value: " + s.to_string());
  });
}

Domain read_domain(const SExpr& s) {
  if (s.is_atom("unit")) return Domain::unit();
  if (s.is_atom("bool")) return Domain::boolean();
  const std::string h = s.head();
  return guarded(s, [&]() -> Domain {
    if (h == "nat") {
      arity(s, 3);
      return Domain::nat_range(int_of(s[1]), int_of(s[2]));
    }
    if (h == "id") {
      arity(s, 2);
      return Domain::ids(static_cast<std::uint32_t>(int_of(s[1])));
    }
    if (h == "set") {
      arity(s, 2);
      return Domain::set_of(read_domain(s[1]));
    }
    if (h == "map") {
      arity(s, 4);
      if (!s[3].is_atom("absent") && !s[3].is_atom("total")) s[3].fail("expected 'absent' or 'total'");
      return Domain::map_of(read_domain(s[1]), read_domain(s[2]), s[3].is_atom("absent"));
    }
    if (h == "seq") {
      arity(s, 3);
      return Domain::seq_of(read_domain(s[1]), static_cast<std::size_t>(int_of(s[2])));
    }
    if (h == "record") {
      std::vector<std::pair<std::string, Domain>> fields;
      for (std::size_t i = 1; i < s.size(); ++i) {
        arity(s[i], 2);
        fields.emplace_back(name_of(s[i][0]), read_domain(s[i][1]));
      }
      return Domain::record(std::move(fields));
    }
    s.fail("not a domain: " + s.to_string());
  });
}

Expr read_expr(const SExpr& s) {
  if (!s.list) {
    if (auto v = scalar(s.atom)) return Expr::lit(*v);
    return Expr::var(name_of(s));
  }
  const std::string h = s.head();
  if (h.empty()) s.fail("expected an operator: " + s.to_string());
  if (h == "lit") {
    arity(s, 2);
    return Expr::lit(read_value(s[1]));
  }
  if (h == "field") {
    arity(s, 2);
    return Expr::field(name_of(s[1]));
  }
  if (h == "get") {
    arity(s, 3);
    return Expr::get(read_expr(s[1]), name_of(s[2]));
  }
  if (h == "rec-upd") {
    arity(s, 4);
    return Expr::rec_upd(read_expr(s[1]), name_of(s[2]), read_expr(s[3]));
  }
  auto it = expr_ops().find(h);
  if (it == expr_ops().end()) s.fail("unknown operator '" + h + "'");
  const int n = expr_arity(it->second);
  if (n >= 0) arity(s, static_cast<std::size_t>(n) + 1);
  std::vector<Expr> args;
  for (std::size_t i = 1; i < s.size(); ++i) args.push_back(read_expr(s[i]));
  return Expr::make(it->second, {}, std::move(args));
}

Pred read_pred(const SExpr& s) {
  if (s.is_atom("true")) return Pred::true_();
  if (s.is_atom("false")) return Pred::false_();
  if (!s.list) return Pred::atom(read_expr(s));
  const std::string h = s.head();
  auto kids = [&](std::size_t from) {
    std::vector<Pred> out;
    for (std::size_t i = from; i < s.size(); ++i) out.push_back(read_pred(s[i]));
    return out;
  };
  if (h == "and") return Pred::and_(kids(1));
  if (h == "or") return Pred::or_(kids(1));
  if (h == "not") {
    arity(s, 2);
    return Pred::not_(read_pred(s[1]));
  }
  if (h == "imp" || h == "iff") {
    arity(s, 3);
    return h == "imp" ? Pred::imp(read_pred(s[1]), read_pred(s[2])) : Pred::iff(read_pred(s[1]), read_pred(s[2]));
  }
  if (h == "forall" || h == "exists") {
    arity(s, 4);
    Domain d = read_domain(s[2]);
    return h == "forall" ? Pred::forall(name_of(s[1]), d, read_pred(s[3]))
                         : Pred::exists(name_of(s[1]), d, read_pred(s[3]));
  }
  if (h == "pred") {
    min_arity(s, 2);
    std::vector<Expr> args;
    for (std::size_t i = 2; i < s.size(); ++i) args.push_back(read_expr(s[i]));
    return Pred::ref(name_of(s[1]), std::move(args));
  }
  if (h == "let" || h == "with-field") {
    arity(s, 4);
    return h == "let" ? Pred::let(name_of(s[1]), read_expr(s[2]), read_pred(s[3]))
                      : Pred::with_field(name_of(s[1]), read_expr(s[2]), read_pred(s[3]));
  }
  if (h == "atom") {
    arity(s, 2);
    return Pred::atom(read_expr(s[1]));
  }
  return Pred::atom(read_expr(s));
}

PostPred read_post(const SExpr& s) {
  if (s.head() != "post") s.fail("expected (post r P), got " + s.to_string());
  arity(s, 3);
  return {name_of(s[1]), read_pred(s[2])};
}

Comp read_comp(const SExpr& s) {
  const std::string h = s.head();
  if (h == "return") {
    arity(s, 2);
    return Comp::ret(read_expr(s[1]));
  }
  if (h == "gets") {
    arity(s, 2);
    return Comp::gets(name_of(s[1]));
  }
  if (h == "put") {
    arity(s, 3);
    return Comp::put(name_of(s[1]), read_expr(s[2]));
  }
  if (h == "select") {
    arity(s, 2);
    return Comp::select(read_expr(s[1]));
  }
  if (h == "if") {
    arity(s, 4);
    return Comp::if_(read_expr(s[1]), read_comp(s[2]), read_comp(s[3]));
  }
  if (h == "call") {
    min_arity(s, 2);
    std::vector<Expr> args;
    for (std::size_t i = 2; i < s.size(); ++i) args.push_back(read_expr(s[i]));
    return Comp::call(name_of(s[1]), std::move(args));
  }
  if (h == "assert") {
    arity(s, 2);
    return Comp::assert_(read_pred(s[1]));
  }
  if (h == "do")
    return read_chain<Comp>(s, read_comp, [](std::string x, Comp a, Comp b) {
      return Comp::bind(std::move(x), std::move(a), std::move(b));
    });
  s.fail("not a program: " + s.to_string());
}

AnnComp read_ann(const SExpr& s) {
  const std::string h = s.head();
  if (h == "ann") {
    arity(s, 3);
    return AnnComp::step(read_pred(s[1]), read_comp(s[2]));
  }
  if (h == "if-a") {
    arity(s, 4);
    return AnnComp::if_(read_expr(s[1]), read_ann(s[2]), read_ann(s[3]));
  }
  if (h == "do-a")
    return read_chain<AnnComp>(s, read_ann, [](std::string x, AnnComp a, AnnComp b) {
      return AnnComp::bind(std::move(x), std::move(a), std::move(b));
    });
  s.fail("not an annotated program: " + s.to_string());
}

std::vector<Binder> read_fixes(const SExpr& s) {
  if (s.head() != "fixes") s.fail("expected (fixes ...), got " + s.to_string());
  std::vector<Binder> out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    arity(s[i], 2);
    out.push_back({name_of(s[i][0]), read_domain(s[i][1])});
  }
  return out;
}

Claim read_claim(const SExpr& s) {
  const std::string h = s.head();
  auto fixes = [&] {
    if (s.size() < 2) s.fail("missing (fixes ...)");
    return read_fixes(s[1]);
  };
  auto pre = [&](std::size_t i) { return read_pred(section(s, i, "pre", 2)[1]); };
  auto post = [&](std::size_t i) {
    if (i >= s.size()) s.fail("missing (post ...)");
    return read_post(s[i]);
  };
  if (h == "triple") {
    arity(s, 5);
    return Triple{fixes(), pre(2), read_comp(section(s, 3, "prog", 2)[1]), post(4)};
  }
  if (h == "ann-triple") {
    arity(s, 5);
    return AnnTriple{fixes(), pre(2), read_ann(section(s, 3, "ann", 2)[1]), post(4)};
  }
  if (h == "ordering") {
    arity(s, 5);
    return Ordering{fixes(), pre(2), read_comp(section(s, 3, "prog", 2)[1]), read_ann(section(s, 4, "ann", 2)[1])};
  }
  if (h == "annotator") {
    arity(s, 6);
    return Annotator{fixes(), pre(2), read_comp(section(s, 3, "prog", 2)[1]), post(4),
                     read_ann(section(s, 5, "ann", 2)[1])};
  }
  if (h == "strong-annotator") {
    arity(s, 6);
    return StrongAnnotator{fixes(), pre(2), read_ann(section(s, 3, "ann", 2)[1]), post(4),
                           read_ann(section(s, 5, "out", 2)[1])};
  }
  if (h == "refinement") {
    arity(s, 4);
    return Refinement{fixes(), read_ann(section(s, 2, "lhs", 2)[1]), read_ann(section(s, 3, "rhs", 2)[1])};
  }
  s.fail("not a claim: " + s.head());
}

Pred parse_pred(std::string_view text) { return read_pred(parse_sexpr(text)); }
Comp parse_comp(std::string_view text) { return read_comp(parse_sexpr(text)); }
AnnComp parse_ann(std::string_view text) { return read_ann(parse_sexpr(text)); }
Expr parse_expr(std::string_view text) { return read_expr(parse_sexpr(text)); }
Domain parse_domain(std::string_view text) { return read_domain(parse_sexpr(text)); }
Value parse_value(std::string_view text) { return read_value(parse_sexpr(text)); }

}  // namespace fannot

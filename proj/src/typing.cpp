#include "fannot/typing.hpp"

#include <algorithm>

namespace fannot {

Domain domain_of_value(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Unit:
    case Value::Kind::Absent:
      return Domain::unit();
    case Value::Kind::Bool: return Domain::boolean();
    case Value::Kind::Nat: return Domain::nat_range(v.as_nat(), v.as_nat());
    case Value::Kind::Id: return Domain::ids(v.as_id() + 1);
    case Value::Kind::Record: {
      std::vector<std::pair<std::string, Domain>> fs;
      for (std::size_t i = 0; i < v.record_size(); ++i)
        fs.emplace_back(v.record_name(i), domain_of_value(v.record_value(i)));
      return Domain::record(std::move(fs));
    }
    case Value::Kind::Set: {
      Domain base;
      for (const auto& x : v.elems()) base = join(base, domain_of_value(x));
      return Domain::set_of(base);
    }
    case Value::Kind::Seq: {
      Domain base;
      for (const auto& x : v.elems()) base = join(base, domain_of_value(x));
      return Domain::seq_of(base, v.elems().size());
    }
    case Value::Kind::Map: {
      Domain k, d;
      for (std::size_t i = 0; i < v.map_size(); ++i) {
        k = join(k, domain_of_value(v.map_key(i)));
        d = join(d, domain_of_value(v.map_val(i)));
      }
      return Domain::map_of(k, d, true);
    }
  }
  return Domain::unit();
}

namespace {

[[noreturn]] void type_error(const std::string& msg, const Expr& e) {
  throw TypeError(msg + " in " + e.to_string());
}

const Domain& expect(const Domain& d, Domain::Kind k, const char* what, const Expr& e) {
  if (d.kind() != k) type_error(std::string(what) + " expected, found " + d.to_string(), e);
  return d;
}

}  // namespace

Domain infer_expr(const Expr& e, const DomainCtx& ctx, const StateSchema& schema) {
  auto sub = [&](std::size_t i) { return infer_expr(e.arg(i), ctx, schema); };
  switch (e.op()) {
    case ExprOp::Lit: return domain_of_value(e.value());
    case ExprOp::Var: {
      auto it = ctx.find(e.name());
      if (it == ctx.end()) type_error("unbound variable '" + e.name() + "'", e);
      return it->second;
    }
    case ExprOp::Field:
      if (!schema.has(e.name())) type_error("unknown state field '" + e.name() + "'", e);
      return schema.domain_of(e.name());
    case ExprOp::Get: {
      Domain r = sub(0);
      expect(r, Domain::Kind::Record, "record", e);
      for (const auto& [n, d] : r.fields())
        if (n == e.name()) return d;
      type_error("no record field '" + e.name() + "'", e);
    }
    case ExprOp::RecUpd: {
      Domain r = sub(0);
      expect(r, Domain::Kind::Record, "record", e);
      auto fs = r.fields();
      bool found = false;
      for (auto& [n, d] : fs)
        if (n == e.name()) {
          d = sub(1);
          found = true;
        }
      if (!found) type_error("no record field '" + e.name() + "'", e);
      return Domain::record(std::move(fs));
    }
    case ExprOp::MapUpd:
    case ExprOp::Assign: {
      Domain m = sub(0);
      expect(m, Domain::Kind::Map, "map", e);
      return Domain::map_of(join(m.key(), sub(1)), join(m.val(), sub(2)), m.allow_absent());
    }
    case ExprOp::Lookup:
    case ExprOp::Apply: {
      Domain m = sub(0);
      return expect(m, Domain::Kind::Map, "map", e).val();
    }
    case ExprOp::The: return sub(0);
    case ExprOp::Dom: {
      Domain m = sub(0);
      return Domain::set_of(expect(m, Domain::Kind::Map, "map", e).key());
    }
    case ExprOp::SetMinus: {
      Domain a = sub(0);
      return expect(a, Domain::Kind::Set, "set", e);
    }
    case ExprOp::SetOf: {
      Domain base;
      for (std::size_t i = 0; i < e.args().size(); ++i) base = join(base, sub(i));
      return Domain::set_of(base);
    }
    case ExprOp::Cons: {
      Domain q = sub(1);
      expect(q, Domain::Kind::Seq, "sequence", e);
      return Domain::seq_of(join(q.base(), sub(0)), q.max_len() + 1);
    }
    case ExprOp::In:
    case ExprOp::NotIn:
    case ExprOp::Eq:
    case ExprOp::Not:
    case ExprOp::And:
    case ExprOp::Or:
    case ExprOp::Lt:
    case ExprOp::Le:
      return Domain::boolean();
    case ExprOp::Add: {
      Domain a = sub(0), b = sub(1);
      expect(a, Domain::Kind::NatRange, "number", e);
      expect(b, Domain::Kind::NatRange, "number", e);
      return Domain::nat_range(a.lo() + b.lo(), a.hi() + b.hi());
    }
    case ExprOp::Mod: {
      Domain a = sub(0), b = sub(1);
      expect(a, Domain::Kind::NatRange, "number", e);
      expect(b, Domain::Kind::NatRange, "number", e);
      if (b.lo() > 0) return Domain::nat_range(0, std::min(a.hi(), b.hi() - 1));
      return Domain::nat_range(0, std::max<Nat>(a.hi(), 0));
    }
  }
  type_error("unknown operator", e);
}

Domain infer_comp(const Comp& c, const DomainCtx& ctx, const StateSchema& schema, const ProgramTable& progs) {
  switch (c.op()) {
    case CompOp::Return: return infer_expr(c.expr(), ctx, schema);
    case CompOp::Gets:
      if (!schema.has(c.name())) throw TypeError("unknown state field '" + c.name() + "'");
      return schema.domain_of(c.name());
    case CompOp::Put:
    case CompOp::Assert:
      return Domain::unit();
    case CompOp::Select: {
      Domain s = infer_expr(c.expr(), ctx, schema);
      if (s.kind() != Domain::Kind::Set) throw TypeError("select over non-set " + c.expr().to_string());
      return s.base();
    }
    case CompOp::Bind: {
      Domain first = infer_comp(c.kid(0), ctx, schema, progs);
      if (c.name() == "_") return infer_comp(c.kid(1), ctx, schema, progs);
      DomainCtx inner = ctx;
      inner[c.name()] = first;
      return infer_comp(c.kid(1), inner, schema, progs);
    }
    case CompOp::If: return join(infer_comp(c.kid(0), ctx, schema, progs), infer_comp(c.kid(1), ctx, schema, progs));
    case CompOp::Call: {
      auto it = progs.find(c.name());
      if (it == progs.end()) throw TypeError("undefined program '" + c.name() + "'");
      DomainCtx inner;
      for (const auto& p : it->second.params) inner[p.name] = p.dom;
      return infer_comp(it->second.body, inner, schema, progs);
    }
  }
  return Domain::unit();
}

namespace {

void fields_in_expr(const Expr& e, const StateSchema& schema) {
  std::set<std::string> fs;
  collect_fields(e, fs);
  for (const auto& f : fs)
    if (!schema.has(f)) throw TypeError("unknown state field '" + f + "' in " + e.to_string());
}

}  // namespace

void check_fields(const Pred& p, const StateSchema& schema, const PredDefs& defs) {
  std::set<std::string> fs;
  collect_fields(p, defs, fs);
  for (const auto& f : fs)
    if (!schema.has(f)) throw TypeError("unknown state field '" + f + "' in " + p.to_string());
  if (p.op() == PredOp::WithField && !schema.has(p.name()))
    throw TypeError("unknown state field '" + p.name() + "'");
  for (const auto& k : p.kids()) check_fields(k, schema, defs);
}

void check_fields(const Comp& c, const StateSchema& schema, const ProgramTable& progs) {
  switch (c.op()) {
    case CompOp::Gets:
      if (!schema.has(c.name())) throw TypeError("unknown state field '" + c.name() + "'");
      return;
    case CompOp::Put:
      if (!schema.has(c.name())) throw TypeError("unknown state field '" + c.name() + "'");
      fields_in_expr(c.expr(), schema);
      return;
    case CompOp::Return:
    case CompOp::Select:
    case CompOp::If:
      fields_in_expr(c.expr(), schema);
      break;
    case CompOp::Call:
      for (const auto& a : c.args()) fields_in_expr(a, schema);
      if (auto it = progs.find(c.name()); it != progs.end()) check_fields(it->second.body, schema, progs);
      return;
    default:
      break;
  }
  for (const auto& k : c.kids()) check_fields(k, schema, progs);
}

}  // namespace fannot

#pragma once

// Domain inference: a finite domain covering every value an expression or
// program result can take, used to bound quantifiers over bound variables.

#include <map>
#include <string>

#include "fannot/comp.hpp"

namespace fannot {

using DomainCtx = std::map<std::string, Domain>;

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Smallest domain holding exactly this value where one exists; identifiers
// get the id domain up to and including the value.
Domain domain_of_value(const Value& v);

Domain infer_expr(const Expr& e, const DomainCtx& ctx, const StateSchema& schema);
Domain infer_comp(const Comp& c, const DomainCtx& ctx, const StateSchema& schema, const ProgramTable& progs);

// Gets/Put name existing fields, in programs and in their callees.
void check_fields(const Comp& c, const StateSchema& schema, const ProgramTable& progs);
void check_fields(const Pred& p, const StateSchema& schema, const PredDefs& defs);

}  // namespace fannot

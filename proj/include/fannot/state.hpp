#pragma once

// Program states over a fixed schema and the enumerable state universe.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fannot/value.hpp"

namespace fannot {

class StateSchema {
 public:
  StateSchema() = default;
  explicit StateSchema(std::vector<std::pair<std::string, Domain>> fields);

  const std::vector<std::pair<std::string, Domain>>& fields() const { return fields_; }
  std::size_t size() const { return fields_.size(); }
  // Index of a field, or npos.
  std::size_t index_of(std::string_view name) const;
  bool has(std::string_view name) const { return index_of(name) != npos; }
  const Domain& domain_of(std::string_view name) const;
  // Product of the field-domain sizes (saturating).
  std::uint64_t universe_size() const;

  bool operator==(const StateSchema& other) const { return fields_ == other.fields_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::pair<std::string, Domain>> fields_;
};

// A total assignment of the schema's fields. The schema must outlive the
// state; states only hold a pointer to it.
class State {
 public:
  State() = default;
  State(const StateSchema* schema, std::vector<Value> values);

  const StateSchema& schema() const { return *schema_; }
  const Value& get(std::string_view field) const;
  const Value& at(std::size_t index) const { return values_[index]; }
  State with(std::string_view field, Value v) const;
  const std::vector<Value>& values() const { return values_; }

  std::strong_ordering operator<=>(const State& other) const { return values_ <=> other.values_; }
  bool operator==(const State& other) const { return values_ == other.values_; }

  std::string to_string() const;

 private:
  const StateSchema* schema_ = nullptr;
  std::vector<Value> values_;
};

// Random access into the canonical enumeration of a schema's universe:
// cartesian product of field domains, lexicographic in schema field order
// (first field most significant).
//
// A projection restricts enumeration to a subset of fields; the others stay
// fixed at the first member of their domain. Since the first field is the
// most significant digit, the order of the projected states is the order of
// their full-universe counterparts.
class StateSpace {
 public:
  explicit StateSpace(std::shared_ptr<const StateSchema> schema);
  StateSpace(std::shared_ptr<const StateSchema> schema, const std::vector<bool>& relevant);

  std::uint64_t size() const { return size_; }
  State at(std::uint64_t index) const;
  // Position of at(index) in the unprojected enumeration.
  std::uint64_t full_index(std::uint64_t index) const;
  const StateSchema& schema() const { return *schema_; }
  const std::shared_ptr<const StateSchema>& schema_ptr() const { return schema_; }

 private:
  std::shared_ptr<const StateSchema> schema_;
  std::vector<const std::vector<Value>*> columns_;
  std::vector<bool> relevant_;
  std::uint64_t size_ = 1;
};

// All states of the schema in canonical order.
std::vector<State> enumerate_states(const StateSchema& schema);

}  // namespace fannot

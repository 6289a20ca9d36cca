#pragma once

// Finite values and finite value domains.
//
// Every value the interpreter manipulates (state field contents, return
// values, bound variables) is a Value. A Domain describes a finite set of
// values together with a canonical enumeration order; quantifiers and the
// state universe are decided by walking domains.

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fannot {

using Nat = std::int64_t;

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Value {
 public:
  enum class Kind : std::uint8_t { Unit, Bool, Nat, Id, Absent, Record, Set, Map, Seq };

  Value() = default;  // unit

  static Value unit() { return Value(); }
  static Value boolean(bool b);
  static Value nat(Nat n);
  static Value id(std::uint32_t index);
  static Value absent();
  // Field order is preserved; names must be distinct.
  static Value record(std::vector<std::pair<std::string, Value>> fields);
  // Sorts and removes duplicates.
  static Value set(std::vector<Value> elems);
  // Sorts by key; duplicate keys are rejected.
  static Value map(std::vector<std::pair<Value, Value>> entries);
  static Value seq(std::vector<Value> elems);

  Kind kind() const { return kind_; }
  bool is(Kind k) const { return kind_ == k; }

  bool as_bool() const;
  Nat as_nat() const;
  std::uint32_t as_id() const;

  // Set and Seq elements.
  std::span<const Value> elems() const;
  bool set_contains(const Value& v) const;
  bool seq_contains(const Value& v) const;

  // Map access. Entries are stored sorted by key.
  std::size_t map_size() const;
  const Value& map_key(std::size_t i) const { return items_[2 * i]; }
  const Value& map_val(std::size_t i) const { return items_[2 * i + 1]; }
  const Value* map_find(const Value& key) const;
  Value map_assign(const Value& key, Value val) const;

  // Record access.
  std::size_t record_size() const { return items_.size(); }
  const std::string& record_name(std::size_t i) const { return (*names_)[i]; }
  const Value& record_value(std::size_t i) const { return items_[i]; }
  const Value* record_field(std::string_view name) const;
  Value record_update(std::string_view name, Value v) const;

  std::strong_ordering operator<=>(const Value& other) const;
  bool operator==(const Value& other) const { return (*this <=> other) == 0; }

  std::string to_string() const;

 private:
  Kind kind_ = Kind::Unit;
  std::int64_t scalar_ = 0;
  std::vector<Value> items_;
  std::shared_ptr<const std::vector<std::string>> names_;
};

// A finite set of values with a canonical enumeration order:
//   Bool       false, true
//   NatRange   ascending
//   Id         ascending
//   Set        by ascending cardinality, then lexicographic over base order
//   Map        lexicographic over key order (first key most significant);
//              Absent precedes every value when absence is allowed
//   Seq        by ascending length, then lexicographic
//   Record     lexicographic over fields in declaration order
class Domain {
 public:
  enum class Kind : std::uint8_t { Unit, Bool, NatRange, Id, Set, Map, Seq, Record };

  // Default-constructed domain is the unit domain.
  Domain();

  static Domain unit();
  static Domain boolean();
  static Domain nat_range(Nat lo, Nat hi);
  static Domain ids(std::uint32_t count);
  static Domain set_of(Domain base);
  static Domain map_of(Domain key, Domain val, bool allow_absent);
  static Domain seq_of(Domain base, std::size_t max_len);
  static Domain record(std::vector<std::pair<std::string, Domain>> fields);

  Kind kind() const;
  Nat lo() const;
  Nat hi() const;
  std::uint32_t count() const;
  const Domain& base() const;
  const Domain& key() const;
  const Domain& val() const;
  bool allow_absent() const;
  std::size_t max_len() const;
  const std::vector<std::pair<std::string, Domain>>& fields() const;

  // Number of members; saturates at UINT64_MAX.
  std::uint64_t size() const;
  // Members in canonical order. Computed once and cached; thread-safe.
  const std::vector<Value>& values() const;
  bool contains(const Value& v) const;
  // True when every member of `inner` is a member of this domain.
  bool covers(const Domain& inner) const;

  std::strong_ordering operator<=>(const Domain& other) const;
  bool operator==(const Domain& other) const { return (*this <=> other) == 0; }

  std::string to_string() const;

 private:
  struct Node;
  explicit Domain(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Largest domain that values() will materialize.
inline constexpr std::uint64_t kMaxEnumeration = 20'000'000;

const std::vector<Value>& enumerate_domain(const Domain& d);

// Smallest domain containing both (same-kind domains only; otherwise `a`).
// Unit acts as the identity.
Domain join(const Domain& a, const Domain& b);

}  // namespace fannot

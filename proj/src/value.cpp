#include "fannot/value.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <sstream>

namespace fannot {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

std::uint64_t sat_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = sat_mul(r, base);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Value
// ---------------------------------------------------------------------------

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.scalar_ = b ? 1 : 0;
  return v;
}

Value Value::nat(Nat n) {
  Value v;
  v.kind_ = Kind::Nat;
  v.scalar_ = n;
  return v;
}

Value Value::id(std::uint32_t index) {
  Value v;
  v.kind_ = Kind::Id;
  v.scalar_ = index;
  return v;
}

Value Value::absent() {
  Value v;
  v.kind_ = Kind::Absent;
  return v;
}

Value Value::record(std::vector<std::pair<std::string, Value>> fields) {
  Value v;
  v.kind_ = Kind::Record;
  auto names = std::make_shared<std::vector<std::string>>();
  names->reserve(fields.size());
  v.items_.reserve(fields.size());
  for (auto& [name, val] : fields) {
    if (std::find(names->begin(), names->end(), name) != names->end())
      throw DomainError("duplicate record field '" + name + "'");
    names->push_back(name);
    v.items_.push_back(std::move(val));
  }
  v.names_ = std::move(names);
  return v;
}

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  Value v;
  v.kind_ = Kind::Set;
  v.items_ = std::move(elems);
  return v;
}

Value Value::map(std::vector<std::pair<Value, Value>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Value v;
  v.kind_ = Kind::Map;
  v.items_.reserve(entries.size() * 2);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].first == entries[i - 1].first)
      throw DomainError("duplicate map key " + entries[i].first.to_string());
    v.items_.push_back(std::move(entries[i].first));
    v.items_.push_back(std::move(entries[i].second));
  }
  return v;
}

Value Value::seq(std::vector<Value> elems) {
  Value v;
  v.kind_ = Kind::Seq;
  v.items_ = std::move(elems);
  return v;
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) throw std::invalid_argument("expected a boolean, got " + to_string());
  return scalar_ != 0;
}

Nat Value::as_nat() const {
  if (kind_ != Kind::Nat) throw std::invalid_argument("expected a number, got " + to_string());
  return scalar_;
}

std::uint32_t Value::as_id() const {
  if (kind_ != Kind::Id) throw std::invalid_argument("expected an identifier, got " + to_string());
  return static_cast<std::uint32_t>(scalar_);
}

std::span<const Value> Value::elems() const {
  if (kind_ != Kind::Set && kind_ != Kind::Seq)
    throw std::invalid_argument("expected a set or sequence, got " + to_string());
  return items_;
}

bool Value::set_contains(const Value& v) const {
  return std::binary_search(items_.begin(), items_.end(), v);
}

bool Value::seq_contains(const Value& v) const {
  return std::find(items_.begin(), items_.end(), v) != items_.end();
}

std::size_t Value::map_size() const { return items_.size() / 2; }

const Value* Value::map_find(const Value& key) const {
  std::size_t lo = 0, hi = map_size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    auto c = items_[2 * mid] <=> key;
    if (c == 0) return &items_[2 * mid + 1];
    if (c < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return nullptr;
}

Value Value::map_assign(const Value& key, Value val) const {
  Value out;
  out.kind_ = Kind::Map;
  out.items_.reserve(items_.size() + 2);
  bool placed = false;
  for (std::size_t i = 0; i < map_size(); ++i) {
    const Value& k = items_[2 * i];
    if (!placed) {
      auto c = k <=> key;
      if (c == 0) {
        out.items_.push_back(k);
        out.items_.push_back(std::move(val));
        placed = true;
        continue;
      }
      if (c > 0) {
        out.items_.push_back(key);
        out.items_.push_back(std::move(val));
        placed = true;
      }
    }
    out.items_.push_back(k);
    out.items_.push_back(items_[2 * i + 1]);
  }
  if (!placed) {
    out.items_.push_back(key);
    out.items_.push_back(std::move(val));
  }
  return out;
}

const Value* Value::record_field(std::string_view name) const {
  if (kind_ != Kind::Record) return nullptr;
  for (std::size_t i = 0; i < items_.size(); ++i)
    if ((*names_)[i] == name) return &items_[i];
  return nullptr;
}

Value Value::record_update(std::string_view name, Value v) const {
  if (kind_ != Kind::Record) throw std::invalid_argument("record update on " + to_string());
  Value out = *this;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if ((*names_)[i] == name) {
      out.items_[i] = std::move(v);
      return out;
    }
  }
  throw std::invalid_argument("record has no field '" + std::string(name) + "'");
}

std::strong_ordering Value::operator<=>(const Value& other) const {
  if (auto c = kind_ <=> other.kind_; c != 0) return c;
  if (auto c = scalar_ <=> other.scalar_; c != 0) return c;
  if (kind_ == Kind::Record && names_ != other.names_) {
    if (auto c = *names_ <=> *other.names_; c != 0) return c;
  }
  const std::size_t n = std::min(items_.size(), other.items_.size());
  for (std::size_t i = 0; i < n; ++i)
    if (auto c = items_[i] <=> other.items_[i]; c != 0) return c;
  return items_.size() <=> other.items_.size();
}

std::string Value::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Unit: os << "unit"; break;
    case Kind::Bool: os << (scalar_ ? "true" : "false"); break;
    case Kind::Nat: os << scalar_; break;
    case Kind::Id: os << '@' << scalar_; break;
    case Kind::Absent: os << "absent"; break;
    case Kind::Record:
      os << "(record";
      for (std::size_t i = 0; i < items_.size(); ++i)
        os << " (" << (*names_)[i] << ' ' << items_[i].to_string() << ')';
      os << ')';
      break;
    case Kind::Set:
    case Kind::Seq:
      os << (kind_ == Kind::Set ? "(set" : "(seq");
      for (const auto& e : items_) os << ' ' << e.to_string();
      os << ')';
      break;
    case Kind::Map:
      os << "(map";
      for (std::size_t i = 0; i < map_size(); ++i)
        os << " (" << map_key(i).to_string() << ' ' << map_val(i).to_string() << ')';
      os << ')';
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

struct Domain::Node {
  Kind kind = Kind::Unit;
  Nat lo = 0;
  Nat hi = 0;
  std::uint32_t count = 0;
  std::vector<Domain> parts;  // base | key,val
  bool allow_absent = false;
  std::size_t max_len = 0;
  std::vector<std::pair<std::string, Domain>> fields;

  mutable std::once_flag once;
  mutable std::vector<Value> cache;
};

Domain::Domain() : Domain(unit()) {}

Domain Domain::unit() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Unit;
    return std::shared_ptr<const Node>(n);
  }();
  return Domain(node);
}

Domain Domain::boolean() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Bool;
    return std::shared_ptr<const Node>(n);
  }();
  return Domain(node);
}

Domain Domain::nat_range(Nat lo, Nat hi) {
  if (hi < lo)
    throw DomainError("malformed nat range: hi " + std::to_string(hi) + " < lo " +
                      std::to_string(lo));
  auto n = std::make_shared<Node>();
  n->kind = Kind::NatRange;
  n->lo = lo;
  n->hi = hi;
  return Domain(std::move(n));
}

Domain Domain::ids(std::uint32_t count) {
  if (count == 0) throw DomainError("malformed identifier domain: count is 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Id;
  n->count = count;
  return Domain(std::move(n));
}

Domain Domain::set_of(Domain base) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Set;
  n->parts = {std::move(base)};
  return Domain(std::move(n));
}

Domain Domain::map_of(Domain key, Domain val, bool allow_absent) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Map;
  n->parts = {std::move(key), std::move(val)};
  n->allow_absent = allow_absent;
  return Domain(std::move(n));
}

Domain Domain::seq_of(Domain base, std::size_t max_len) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Seq;
  n->parts = {std::move(base)};
  n->max_len = max_len;
  return Domain(std::move(n));
}

Domain Domain::record(std::vector<std::pair<std::string, Domain>> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (fields[i].first == fields[j].first)
        throw DomainError("duplicate record field '" + fields[i].first + "'");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Record;
  n->fields = std::move(fields);
  return Domain(std::move(n));
}

Domain::Kind Domain::kind() const { return node_->kind; }
Nat Domain::lo() const { return node_->lo; }
Nat Domain::hi() const { return node_->hi; }
std::uint32_t Domain::count() const { return node_->count; }
const Domain& Domain::base() const { return node_->parts.at(0); }
const Domain& Domain::key() const { return node_->parts.at(0); }
const Domain& Domain::val() const { return node_->parts.at(1); }
bool Domain::allow_absent() const { return node_->allow_absent; }
std::size_t Domain::max_len() const { return node_->max_len; }
const std::vector<std::pair<std::string, Domain>>& Domain::fields() const {
  return node_->fields;
}

std::uint64_t Domain::size() const {
  switch (kind()) {
    case Kind::Unit: return 1;
    case Kind::Bool: return 2;
    case Kind::NatRange: return static_cast<std::uint64_t>(hi() - lo()) + 1;
    case Kind::Id: return count();
    case Kind::Set: {
      std::uint64_t b = base().size();
      return b >= 64 ? kSaturated : sat_pow(2, b);
    }
    case Kind::Map:
      return sat_pow(sat_add(val().size(), allow_absent() ? 1 : 0), key().size());
    case Kind::Seq: {
      std::uint64_t total = 0;
      for (std::size_t k = 0; k <= max_len(); ++k)
        total = sat_add(total, sat_pow(base().size(), k));
      return total;
    }
    case Kind::Record: {
      std::uint64_t total = 1;
      for (const auto& f : fields()) total = sat_mul(total, f.second.size());
      return total;
    }
  }
  return 0;
}

namespace {

// Calls `emit` with each tuple of indices in [0, radix)^len, first position
// most significant.
template <typename F>
void for_each_tuple(std::size_t len, std::size_t radix, F&& emit) {
  std::vector<std::size_t> digits(len, 0);
  if (len == 0) {
    emit(digits);
    return;
  }
  if (radix == 0) return;
  while (true) {
    emit(digits);
    std::size_t pos = len;
    while (true) {
      --pos;
      if (++digits[pos] < radix) break;
      digits[pos] = 0;
      if (pos == 0) return;
    }
  }
}

std::vector<Value> materialize(const Domain& d) {
  using K = Domain::Kind;
  if (d.size() > kMaxEnumeration)
    throw DomainError("domain " + d.to_string() + " is too large to enumerate");
  std::vector<Value> out;
  out.reserve(static_cast<std::size_t>(d.size()));
  switch (d.kind()) {
    case K::Unit: out.push_back(Value::unit()); break;
    case K::Bool:
      out.push_back(Value::boolean(false));
      out.push_back(Value::boolean(true));
      break;
    case K::NatRange:
      for (Nat n = d.lo(); n <= d.hi(); ++n) out.push_back(Value::nat(n));
      break;
    case K::Id:
      for (std::uint32_t i = 0; i < d.count(); ++i) out.push_back(Value::id(i));
      break;
    case K::Set: {
      const auto& base = d.base().values();
      const std::size_t n = base.size();
      for (std::size_t k = 0; k <= n; ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
          std::vector<Value> elems;
          elems.reserve(k);
          for (auto i : idx) elems.push_back(base[i]);
          out.push_back(Value::set(std::move(elems)));
          // next combination in lexicographic order
          std::size_t pos = k;
          while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
          if (pos == 0) break;
          ++idx[pos - 1];
          for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
      }
      break;
    }
    case K::Map: {
      const auto& keys = d.key().values();
      const auto& vals = d.val().values();
      const std::size_t offset = d.allow_absent() ? 1 : 0;
      for_each_tuple(keys.size(), vals.size() + offset, [&](const std::vector<std::size_t>& t) {
        std::vector<std::pair<Value, Value>> entries;
        for (std::size_t i = 0; i < t.size(); ++i)
          if (t[i] >= offset) entries.emplace_back(keys[i], vals[t[i] - offset]);
        out.push_back(Value::map(std::move(entries)));
      });
      break;
    }
    case K::Seq: {
      const auto& base = d.base().values();
      for (std::size_t len = 0; len <= d.max_len(); ++len) {
        for_each_tuple(len, base.size(), [&](const std::vector<std::size_t>& t) {
          std::vector<Value> elems;
          elems.reserve(t.size());
          for (auto i : t) elems.push_back(base[i]);
          out.push_back(Value::seq(std::move(elems)));
        });
      }
      break;
    }
    case K::Record: {
      const auto& fs = d.fields();
      std::vector<const std::vector<Value>*> columns;
      for (const auto& f : fs) columns.push_back(&f.second.values());
      std::vector<std::size_t> digits(fs.size(), 0);
      for (const auto* c : columns)
        if (c->empty()) return out;
      while (true) {
        std::vector<std::pair<std::string, Value>> fields;
        for (std::size_t i = 0; i < fs.size(); ++i)
          fields.emplace_back(fs[i].first, (*columns[i])[digits[i]]);
        out.push_back(Value::record(std::move(fields)));
        std::size_t pos = fs.size();
        bool done = true;
        while (pos > 0) {
          --pos;
          if (++digits[pos] < columns[pos]->size()) {
            done = false;
            break;
          }
          digits[pos] = 0;
        }
        if (done) break;
      }
      break;
    }
  }
  return out;
}

}  // namespace

const std::vector<Value>& Domain::values() const {
  std::call_once(node_->once, [this] { node_->cache = materialize(*this); });
  return node_->cache;
}

bool Domain::contains(const Value& v) const {
  using VK = Value::Kind;
  switch (kind()) {
    case Kind::Unit: return v.is(VK::Unit);
    case Kind::Bool: return v.is(VK::Bool);
    case Kind::NatRange: return v.is(VK::Nat) && v.as_nat() >= lo() && v.as_nat() <= hi();
    case Kind::Id: return v.is(VK::Id) && v.as_id() < count();
    case Kind::Set: {
      if (!v.is(VK::Set)) return false;
      for (const auto& e : v.elems())
        if (!base().contains(e)) return false;
      return true;
    }
    case Kind::Map: {
      if (!v.is(VK::Map)) return false;
      for (std::size_t i = 0; i < v.map_size(); ++i)
        if (!key().contains(v.map_key(i)) || !val().contains(v.map_val(i))) return false;
      if (!allow_absent() && v.map_size() != key().size()) return false;
      return true;
    }
    case Kind::Seq: {
      if (!v.is(VK::Seq) || v.elems().size() > max_len()) return false;
      for (const auto& e : v.elems())
        if (!base().contains(e)) return false;
      return true;
    }
    case Kind::Record: {
      if (!v.is(VK::Record) || v.record_size() != fields().size()) return false;
      for (std::size_t i = 0; i < fields().size(); ++i)
        if (v.record_name(i) != fields()[i].first ||
            !fields()[i].second.contains(v.record_value(i)))
          return false;
      return true;
    }
  }
  return false;
}

bool Domain::covers(const Domain& inner) const {
  if (kind() != inner.kind()) return false;
  switch (kind()) {
    case Kind::Unit:
    case Kind::Bool: return true;
    case Kind::NatRange: return lo() <= inner.lo() && inner.hi() <= hi();
    case Kind::Id: return count() >= inner.count();
    case Kind::Set: return base().covers(inner.base());
    case Kind::Map:
      if (!allow_absent())
        return !inner.allow_absent() && key() == inner.key() && val().covers(inner.val());
      return key().covers(inner.key()) && val().covers(inner.val());
    case Kind::Seq: return max_len() >= inner.max_len() && base().covers(inner.base());
    case Kind::Record: {
      if (fields().size() != inner.fields().size()) return false;
      for (std::size_t i = 0; i < fields().size(); ++i)
        if (fields()[i].first != inner.fields()[i].first ||
            !fields()[i].second.covers(inner.fields()[i].second))
          return false;
      return true;
    }
  }
  return false;
}

std::strong_ordering Domain::operator<=>(const Domain& other) const {
  if (node_ == other.node_) return std::strong_ordering::equal;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.lo <=> b.lo; c != 0) return c;
  if (auto c = a.hi <=> b.hi; c != 0) return c;
  if (auto c = a.count <=> b.count; c != 0) return c;
  if (auto c = a.allow_absent <=> b.allow_absent; c != 0) return c;
  if (auto c = a.max_len <=> b.max_len; c != 0) return c;
  if (auto c = a.parts <=> b.parts; c != 0) return c;
  return a.fields <=> b.fields;
}

std::string Domain::to_string() const {
  switch (kind()) {
    case Kind::Unit: return "unit";
    case Kind::Bool: return "bool";
    case Kind::NatRange: return "(nat " + std::to_string(lo()) + " " + std::to_string(hi()) + ")";
    case Kind::Id: return "(id " + std::to_string(count()) + ")";
    case Kind::Set: return "(set " + base().to_string() + ")";
    case Kind::Map:
      return "(map " + key().to_string() + " " + val().to_string() +
             (allow_absent() ? " absent)" : " total)");
    case Kind::Seq: return "(seq " + base().to_string() + " " + std::to_string(max_len()) + ")";
    case Kind::Record: {
      std::string s = "(record";
      for (const auto& [name, d] : fields()) s += " (" + name + " " + d.to_string() + ")";
      return s + ")";
    }
  }
  return "?";
}

const std::vector<Value>& enumerate_domain(const Domain& d) { return d.values(); }

Domain join(const Domain& a, const Domain& b) {
  using K = Domain::Kind;
  // Unit doubles as "nothing known yet", e.g. the element domain of {}.
  if (a.kind() == K::Unit) return b;
  if (b.kind() == K::Unit) return a;
  if (a.kind() != b.kind()) return a;
  switch (a.kind()) {
    case K::Unit:
    case K::Bool: return a;
    case K::NatRange: return Domain::nat_range(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
    case K::Id: return Domain::ids(std::max(a.count(), b.count()));
    case K::Set: return Domain::set_of(join(a.base(), b.base()));
    case K::Map:
      return Domain::map_of(join(a.key(), b.key()), join(a.val(), b.val()),
                            a.allow_absent() || b.allow_absent());
    case K::Seq: return Domain::seq_of(join(a.base(), b.base()), std::max(a.max_len(), b.max_len()));
    case K::Record: {
      if (a.fields().size() != b.fields().size()) return a;
      std::vector<std::pair<std::string, Domain>> fs;
      for (std::size_t i = 0; i < a.fields().size(); ++i) {
        if (a.fields()[i].first != b.fields()[i].first) return a;
        fs.emplace_back(a.fields()[i].first, join(a.fields()[i].second, b.fields()[i].second));
      }
      return Domain::record(std::move(fs));
    }
  }
  return a;
}

}  // namespace fannot

#include "fannot/state.hpp"

#include <stdexcept>

namespace fannot {

StateSchema::StateSchema(std::vector<std::pair<std::string, Domain>> fields)
    : fields_(std::move(fields)) {
  for (std::size_t i = 0; i < fields_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (fields_[i].first == fields_[j].first)
        throw DomainError("duplicate state field '" + fields_[i].first + "'");
}

std::size_t StateSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i)
    if (fields_[i].first == name) return i;
  return npos;
}

const Domain& StateSchema::domain_of(std::string_view name) const {
  auto i = index_of(name);
  if (i == npos) throw std::out_of_range("no state field '" + std::string(name) + "'");
  return fields_[i].second;
}

std::uint64_t StateSchema::universe_size() const {
  std::uint64_t n = 1;
  for (const auto& f : fields_) {
    std::uint64_t s = f.second.size();
    if (s != 0 && n > UINT64_MAX / s) return UINT64_MAX;
    n *= s;
  }
  return n;
}

State::State(const StateSchema* schema, std::vector<Value> values)
    : schema_(schema), values_(std::move(values)) {}

const Value& State::get(std::string_view field) const {
  auto i = schema_->index_of(field);
  if (i == StateSchema::npos)
    throw std::out_of_range("no state field '" + std::string(field) + "'");
  return values_[i];
}

State State::with(std::string_view field, Value v) const {
  auto i = schema_->index_of(field);
  if (i == StateSchema::npos)
    throw std::out_of_range("no state field '" + std::string(field) + "'");
  State out = *this;
  out.values_[i] = std::move(v);
  return out;
}

std::string State::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) s += ", ";
    s += schema_->fields()[i].first + " = " + values_[i].to_string();
  }
  return s + "}";
}

StateSpace::StateSpace(std::shared_ptr<const StateSchema> schema)
    : StateSpace(schema, std::vector<bool>(schema->size(), true)) {}

StateSpace::StateSpace(std::shared_ptr<const StateSchema> schema, const std::vector<bool>& relevant)
    : schema_(std::move(schema)), relevant_(relevant) {
  relevant_.resize(schema_->size(), true);
  for (std::size_t i = 0; i < schema_->size(); ++i) {
    const auto& vals = schema_->fields()[i].second.values();
    columns_.push_back(&vals);
    if (!relevant_[i]) continue;
    if (vals.empty()) {
      size_ = 0;
    } else if (size_ > UINT64_MAX / vals.size()) {
      throw DomainError("state universe too large to enumerate");
    } else {
      size_ *= vals.size();
    }
  }
}

State StateSpace::at(std::uint64_t index) const {
  std::vector<Value> values(columns_.size());
  for (std::size_t i = columns_.size(); i-- > 0;) {
    const auto& col = *columns_[i];
    if (!relevant_[i]) {
      values[i] = col.front();
      continue;
    }
    values[i] = col[index % col.size()];
    index /= col.size();
  }
  return State(schema_.get(), std::move(values));
}

std::uint64_t StateSpace::full_index(std::uint64_t index) const {
  std::uint64_t full = 0;
  std::uint64_t stride = 1;
  for (std::size_t i = columns_.size(); i-- > 0;) {
    const auto n = columns_[i]->size();
    if (relevant_[i]) {
      full += (index % n) * stride;
      index /= n;
    }
    stride *= n;
  }
  return full;
}

std::vector<State> enumerate_states(const StateSchema& schema) {
  // Non-owning alias; the caller's schema outlives the returned states.
  std::shared_ptr<const StateSchema> alias(std::shared_ptr<const StateSchema>(), &schema);
  StateSpace space(alias);
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(space.size()));
  for (std::uint64_t i = 0; i < space.size(); ++i) out.push_back(space.at(i));
  return out;
}

}  // namespace fannot

#pragma once

// Reference models written directly against the problem statement, sharing
// no code with the library beyond reading its data types.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "fannot/annot.hpp"

namespace oracle {

// ---- one boolean field b ----
// Return codes: 0 unit, 1 false, 2 true.
using BOut = std::pair<int, bool>;

inline int ret_code(const fannot::Value& v) {
  if (v.is(fannot::Value::Kind::Unit)) return 0;
  return v.as_bool() ? 2 : 1;
}

// Outcomes of a program built from the meta atoms and binds. Binders are
// ignored by the atoms, so the environment never matters.
inline std::set<BOut> bool_run(const fannot::Comp& c, bool b) {
  using fannot::CompOp;
  switch (c.op()) {
    case CompOp::Return: return {{ret_code(c.expr().value()), b}};
    case CompOp::Gets: return {{b ? 2 : 1, b}};
    case CompOp::Put: return {{0, c.expr().value().as_bool()}};
    case CompOp::Select: {
      std::set<BOut> out;
      for (const auto& v : c.expr().value().elems()) out.insert({ret_code(v), b});
      return out;
    }
    case CompOp::Bind: {
      std::set<BOut> out;
      for (const auto& [r, s] : bool_run(c.kid(0), b))
        for (const auto& o : bool_run(c.kid(1), s)) out.insert(o);
      return out;
    }
    default: throw std::logic_error("bool_run: unsupported program");
  }
}

// Table predicates: state table bit [b]; post table bit 2*[ret true] + [b].
inline bool state_holds(unsigned table, bool b) { return (table >> (b ? 1 : 0)) & 1; }
inline bool post_holds(unsigned table, int ret, bool b) { return (table >> ((ret == 2 ? 2 : 0) + (b ? 1 : 0))) & 1; }

inline bool bool_triple(unsigned pre, const fannot::Comp& c, unsigned post) {
  for (bool b : {false, true}) {
    if (!state_holds(pre, b)) continue;
    for (const auto& [r, s] : bool_run(c, b))
      if (!post_holds(post, r, s)) return false;
  }
  return true;
}

// ---- the allocator example as plain data ----
struct Tcbs {
  unsigned n_ids = 0, n_prios = 0;
  std::vector<bool> free;                   // ids
  std::vector<std::optional<int>> prio;     // tcbs
  std::vector<std::vector<unsigned>> q;     // queues, head first

  bool operator<(const Tcbs& o) const { return std::tie(free, prio, q) < std::tie(o.free, o.prio, o.q); }
  bool operator==(const Tcbs& o) const { return free == o.free && prio == o.prio && q == o.q; }
};

inline Tcbs from_state(const fannot::State& s, unsigned n_ids, unsigned n_prios) {
  Tcbs t;
  t.n_ids = n_ids;
  t.n_prios = n_prios;
  t.free.assign(n_ids, false);
  t.prio.assign(n_ids, std::nullopt);
  t.q.assign(n_prios, {});
  for (const auto& v : s.get("ids").elems()) t.free[v.as_id()] = true;
  const auto& m = s.get("tcbs");
  for (std::size_t k = 0; k < m.map_size(); ++k)
    if (!m.map_val(k).is(fannot::Value::Kind::Absent))
      t.prio[m.map_key(k).as_id()] = static_cast<int>(m.map_val(k).record_field("priority")->as_nat());
  const auto& qs = s.get("queues");
  for (std::size_t k = 0; k < qs.map_size(); ++k)
    for (const auto& v : qs.map_val(k).elems()) t.q[static_cast<std::size_t>(qs.map_key(k).as_nat())].push_back(v.as_id());
  return t;
}

inline bool valid_free(const Tcbs& t) {
  for (unsigned i = 0; i < t.n_ids; ++i)
    if (t.free[i] == t.prio[i].has_value()) return false;
  return true;
}

inline bool valid_queues(const Tcbs& t) {
  for (unsigned p = 0; p < t.n_prios; ++p)
    for (unsigned i : t.q[p])
      if (!t.prio[i] || *t.prio[i] != static_cast<int>(p)) return false;
  return true;
}

// Outcomes (returned id, state) of new_tcb p. A queue may outgrow the
// universe's length bound; outcomes are not required to be in the universe.
inline std::vector<std::pair<unsigned, Tcbs>> new_tcb(const Tcbs& s, unsigned p) {
  std::vector<std::pair<unsigned, Tcbs>> out;
  for (unsigned i = 0; i < s.n_ids; ++i) {
    if (!s.free[i]) continue;
    Tcbs t = s;
    t.free[i] = false;
    t.prio[i] = static_cast<int>(p);
    t.q[p].insert(t.q[p].begin(), i);
    out.emplace_back(i, std::move(t));
  }
  return out;
}

// 2^n · (1+m)^n · (Σ_{k≤n} n^k)^m
inline std::uint64_t corpus_universe(unsigned n, unsigned m) {
  std::uint64_t seqs = 0, pw = 1;
  for (unsigned k = 0; k <= n; ++k, pw *= n) seqs += pw;
  std::uint64_t r = 1;
  for (unsigned k = 0; k < n; ++k) r *= 2 * (1 + m);
  for (unsigned k = 0; k < m; ++k) r *= seqs;
  return r;
}

}  // namespace oracle

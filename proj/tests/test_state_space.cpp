#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fannot/corpus.hpp"
#include "oracles.hpp"

using namespace fannot;

namespace {

std::vector<std::string> strings(const std::vector<Value>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs) out.push_back(v.to_string());
  return out;
}

// Member count computed from the domain's shape alone.
std::uint64_t naive_size(const Domain& d) {
  auto pow = [](std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e--) r *= b;
    return r;
  };
  switch (d.kind()) {
    case Domain::Kind::Unit: return 1;
    case Domain::Kind::Bool: return 2;
    case Domain::Kind::NatRange: return static_cast<std::uint64_t>(d.hi() - d.lo() + 1);
    case Domain::Kind::Id: return d.count();
    case Domain::Kind::Set: return pow(2, naive_size(d.base()));
    case Domain::Kind::Map: return pow(naive_size(d.val()) + (d.allow_absent() ? 1 : 0), naive_size(d.key()));
    case Domain::Kind::Seq: {
      std::uint64_t s = 0;
      for (std::size_t k = 0; k <= d.max_len(); ++k) s += pow(naive_size(d.base()), k);
      return s;
    }
    case Domain::Kind::Record: {
      std::uint64_t r = 1;
      for (const auto& [n, f] : d.fields()) r *= naive_size(f);
      return r;
    }
  }
  return 0;
}

Domain random_domain(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 2);
  switch (pick(rng)) {
    case 0: return Domain::boolean();
    case 1: return Domain::nat_range(1, 1 + rng() % 3);
    case 2: return Domain::ids(1 + rng() % 2);
    case 3: return Domain::set_of(Domain::ids(1 + rng() % 3));
    case 4: return Domain::map_of(Domain::ids(1 + rng() % 2), random_domain(rng, 0), rng() % 2 == 0);
    case 5: return Domain::seq_of(Domain::ids(1 + rng() % 2), rng() % 3);
    default: return Domain::record({{"a", random_domain(rng, 0)}, {"b", random_domain(rng, 0)}});
  }
}

}  // namespace

TEST(Domains, BoolOrder) { EXPECT_EQ(strings(Domain::boolean().values()), (std::vector<std::string>{"false", "true"})); }

TEST(Domains, SeqOfTwoIdsUpToTwo) {
  const auto vs = Domain::seq_of(Domain::ids(2), 2).values();
  ASSERT_EQ(vs.size(), 7u);
  const std::vector<std::vector<std::uint32_t>> expect = {{}, {0}, {1}, {0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (std::size_t k = 0; k < vs.size(); ++k) {
    std::vector<std::uint32_t> got;
    for (const auto& e : vs[k].elems()) got.push_back(e.as_id());
    EXPECT_EQ(got, expect[k]) << k;
  }
}

TEST(Domains, SingletonRange) {
  const auto vs = Domain::nat_range(3, 3).values();
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].as_nat(), 3);
}

TEST(Domains, SetsByCardinalityThenLex) {
  const auto vs = Domain::set_of(Domain::ids(3)).values();
  std::vector<std::vector<std::uint32_t>> got;
  for (const auto& v : vs) {
    got.emplace_back();
    for (const auto& e : v.elems()) got.back().push_back(e.as_id());
  }
  const std::vector<std::vector<std::uint32_t>> expect = {{}, {0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
  EXPECT_EQ(got, expect);
}

TEST(Domains, MapAbsentFirstAndFirstKeyMostSignificant) {
  const auto vs = Domain::map_of(Domain::ids(2), Domain::boolean(), true).values();
  ASSERT_EQ(vs.size(), 9u);
  auto at = [&](std::size_t k, std::uint32_t key) { return vs[k].map_find(Value::id(key)); };
  // first value: both keys absent
  for (std::uint32_t key : {0u, 1u}) {
    const Value* v = at(0, key);
    EXPECT_TRUE(v == nullptr || v->is(Value::Kind::Absent));
  }
  // the second key changes fastest
  const Value* k1 = at(1, 1);
  ASSERT_NE(k1, nullptr);
  EXPECT_EQ(*k1, Value::boolean(false));
}

TEST(Domains, MembershipAndCover) {
  const Domain d = Domain::set_of(Domain::ids(2));
  EXPECT_TRUE(d.contains(Value::set({Value::id(1)})));
  EXPECT_FALSE(d.contains(Value::set({Value::id(2)})));
  EXPECT_TRUE(Domain::nat_range(0, 3).covers(Domain::nat_range(1, 2)));
  EXPECT_FALSE(Domain::nat_range(0, 3).covers(Domain::nat_range(1, 4)));
}

TEST(Domains, EnumerationHasNoDuplicatesAndMatchesCount) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Domain d = random_domain(rng, 1);
    const auto& vs = d.values();
    const std::set<Value> uniq(vs.begin(), vs.end());
    EXPECT_EQ(uniq.size(), vs.size()) << d.to_string();
    EXPECT_EQ(vs.size(), naive_size(d)) << d.to_string();
    EXPECT_EQ(d.size(), naive_size(d)) << d.to_string();
    for (const auto& v : vs) EXPECT_TRUE(d.contains(v));
  }
}

TEST(Values, SetsAreCanonical) {
  EXPECT_EQ(Value::set({Value::id(1), Value::id(0), Value::id(1)}), Value::set({Value::id(0), Value::id(1)}));
  EXPECT_ANY_THROW(Value::map({{Value::id(0), Value::boolean(true)}, {Value::id(0), Value::boolean(false)}}));
}

TEST(Schemas, SmallUniverses) {
  EXPECT_EQ(StateSchema({{"flag", Domain::boolean()}}).universe_size(), 2u);
  EXPECT_EQ(enumerate_states(StateSchema({{"flag", Domain::boolean()}})).size(), 2u);
  const StateSchema empty;
  EXPECT_EQ(empty.universe_size(), 1u);
  EXPECT_EQ(enumerate_states(empty).size(), 1u);
  EXPECT_ANY_THROW(StateSchema({{"a", Domain::boolean()}, {"a", Domain::boolean()}}));
}

TEST(Schemas, CorpusUniverseMatchesFormulaAndRawEnumeration) {
  for (auto [n, m] : {std::pair{1u, 1u}, {2u, 1u}, {2u, 2u}, {3u, 1u}}) {
    const StateSchema s = corpus_schema({n, m});
    EXPECT_EQ(s.universe_size(), oracle::corpus_universe(n, m)) << n << "," << m;
    const auto states = enumerate_states(s);
    EXPECT_EQ(states.size(), oracle::corpus_universe(n, m));
    const std::set<State> uniq(states.begin(), states.end());
    EXPECT_EQ(uniq.size(), states.size());
  }
  EXPECT_EQ(oracle::corpus_universe(2, 1), 112u);
  EXPECT_EQ(oracle::corpus_universe(2, 2), 1764u);
  EXPECT_EQ(oracle::corpus_universe(3, 2), 345600u);
  EXPECT_EQ(corpus_schema({3, 2}).universe_size(), 345600u);
}

TEST(Schemas, RandomSchemasMatchProductOfSizes) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::pair<std::string, Domain>> fields;
    std::uint64_t product = 1;
    const int n = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < n; ++k) {
      fields.emplace_back("f" + std::to_string(k), random_domain(rng, 1));
      product *= naive_size(fields.back().second);
    }
    if (product > 200000) continue;
    const StateSchema s(fields);
    const auto states = enumerate_states(s);
    EXPECT_EQ(states.size(), product);
    for (const auto& st : states)
      for (const auto& [name, d] : s.fields()) EXPECT_TRUE(d.contains(st.get(name)));
  }
}

TEST(Schemas, EnumerationIsStable) {
  auto first = [] {
    auto schema = std::make_shared<const StateSchema>(corpus_schema({2, 2}));
    StateSpace space(schema);
    std::string out;
    for (std::uint64_t i = 0; i < 100; ++i) out += space.at(i).to_string() + "\n";
    return out;
  };
  EXPECT_EQ(first(), first());
  const auto all = enumerate_states(corpus_schema({2, 2}));
  auto schema = std::make_shared<const StateSchema>(corpus_schema({2, 2}));
  StateSpace space(schema);
  for (std::uint64_t i = 0; i < all.size(); i += 97) EXPECT_EQ(space.at(i), all[i]);
}

TEST(Schemas, FirstFieldIsMostSignificant) {
  auto schema = std::make_shared<const StateSchema>(
      StateSchema({{"a", Domain::boolean()}, {"b", Domain::nat_range(0, 2)}}));
  StateSpace space(schema);
  ASSERT_EQ(space.size(), 6u);
  EXPECT_EQ(space.at(0).get("a"), Value::boolean(false));
  EXPECT_EQ(space.at(2).get("b"), Value::nat(2));
  EXPECT_EQ(space.at(3).get("a"), Value::boolean(true));
  EXPECT_EQ(space.at(3).get("b"), Value::nat(0));
}

TEST(Schemas, ProjectionKeepsFullOrder) {
  auto schema = std::make_shared<const StateSchema>(corpus_schema({2, 1}));
  StateSpace full(schema);
  StateSpace proj(schema, {false, true, false});
  EXPECT_EQ(proj.size(), 4u);  // (1 + n_prios)^n_ids
  std::uint64_t last = 0;
  for (std::uint64_t i = 0; i < proj.size(); ++i) {
    const std::uint64_t fi = proj.full_index(i);
    EXPECT_EQ(full.at(fi), proj.at(i));
    if (i) EXPECT_GT(fi, last);
    last = fi;
    EXPECT_EQ(proj.at(i).get("ids"), full.at(0).get("ids"));
  }
}

TEST(States, WithReplacesOneField) {
  const StateSchema schema({{"a", Domain::boolean()}, {"b", Domain::nat_range(0, 2)}});
  const State s(&schema, {Value::boolean(false), Value::nat(1)});
  const State t = s.with("b", Value::nat(2));
  EXPECT_EQ(t.get("a"), Value::boolean(false));
  EXPECT_EQ(t.get("b"), Value::nat(2));
  EXPECT_EQ(s.get("b"), Value::nat(1));
  EXPECT_ANY_THROW(s.get("c"));
}

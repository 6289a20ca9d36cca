#include <gtest/gtest.h>

#include <random>

#include "fannot/corpus.hpp"
#include "oracles.hpp"

using namespace fannot;

namespace {

Workspace corpus_ws(unsigned n, unsigned m) {
  Workspace ws;
  ws.schema = std::make_shared<const StateSchema>(corpus_schema({n, m}));
  ws.preds = corpus_preds({n, m});
  ws.programs = corpus_programs({n, m});
  return ws;
}

bool holds(const Workspace& ws, const std::string& p, const State& s, Env env = {}) {
  return eval_pred(parse_pred(p), ws.preds, env, s);
}

State st(const Workspace& ws, const std::string& ids, const std::string& tcbs, const std::string& queues) {
  return State(ws.schema.get(), {parse_value(ids), parse_value(tcbs), parse_value(queues)});
}

}  // namespace

TEST(Predicates, CorpusExamples) {
  const Workspace ws = corpus_ws(2, 1);
  EXPECT_TRUE(holds(ws, "(pred valid_free)", st(ws, "(set @0 @1)", "(map)", "(map (0 (seq)))")));
  EXPECT_FALSE(holds(ws, "(pred valid_free)", st(ws, "(set @0)", "(map (@0 (record (priority 0))))", "(map (0 (seq)))")));
  EXPECT_TRUE(holds(ws, "true", st(ws, "(set)", "(map)", "(map (0 (seq)))")));
  Env env{{"i", Value::id(0)}};
  EXPECT_TRUE(holds(ws, "(pred valid_free_except i)", st(ws, "(set @1)", "(map)", "(map (0 (seq)))"), env));
  const Workspace ws2 = corpus_ws(2, 2);
  EXPECT_FALSE(holds(ws2, "(pred valid_queues)",
                     st(ws2, "(set @1)", "(map (@0 (record (priority 0))))", "(map (0 (seq)) (1 (seq @0)))")));
  EXPECT_TRUE(holds(ws2, "(pred valid_queues)",
                    st(ws2, "(set @1)", "(map (@0 (record (priority 1))))", "(map (0 (seq)) (1 (seq @0)))")));
}

TEST(Predicates, DefinitionsAgreeWithPlainModel) {
  const Workspace ws = corpus_ws(2, 2);
  const Pred vf = parse_pred("(pred valid_free)"), vq = parse_pred("(pred valid_queues)");
  for (const auto& s : enumerate_states(*ws.schema)) {
    const auto t = oracle::from_state(s, 2, 2);
    Env env;
    ASSERT_EQ(eval_pred(vf, ws.preds, env, s), oracle::valid_free(t)) << s.to_string();
    ASSERT_EQ(eval_pred(vq, ws.preds, env, s), oracle::valid_queues(t)) << s.to_string();
  }
}

TEST(Entailment, Examples) {
  const Workspace ws = corpus_ws(2, 2);
  const std::vector<Binder> fixes = {{"i", Domain::ids(2)}};
  EXPECT_TRUE(entails(ws, fixes, parse_pred("(and (pred valid_queues) (pred valid_free_except i))"),
                      parse_pred("(pred not_queued i)"))
                  .holds());
  EXPECT_TRUE(entails(ws, {}, Pred::false_(), parse_pred("(pred valid_queues)")).holds());
  const Verdict v = entails(ws, {}, Pred::true_(), parse_pred("(pred valid_free)"));
  ASSERT_EQ(v.kind, VerdictKind::Violated);
  ASSERT_TRUE(v.cex);
  // first state of the plain enumeration that breaks valid_free
  const auto all = enumerate_states(*ws.schema);
  std::uint64_t first = 0;
  while (oracle::valid_free(oracle::from_state(all[first], 2, 2))) ++first;
  EXPECT_EQ(v.cex->state_index, first);
  EXPECT_EQ(v.cex->state, all[first]);
  EXPECT_EQ(v.states, 1764u);
}

TEST(Entailment, ReflexiveAndTransitive) {
  const Workspace ws = corpus_ws(2, 1);
  const std::vector<Pred> ps = {
      parse_pred("(pred valid_free)"),
      parse_pred("(pred valid_queues)"),
      parse_pred("(pred not_queued @0)"),
      parse_pred("(in @0 (field ids))"),
      parse_pred("(pred valid_free_except @1)"),
      parse_pred("(and (pred valid_free) (pred valid_queues))"),
      Pred::true_(),
      Pred::false_(),
  };
  std::mt19937 rng(3);
  for (const auto& p : ps) EXPECT_TRUE(entails(ws, {}, p, p).holds());
  for (int k = 0; k < 150; ++k) {
    const Pred& a = ps[rng() % ps.size()];
    const Pred& b = ps[rng() % ps.size()];
    const Pred& c = ps[rng() % ps.size()];
    if (entails(ws, {}, a, b).holds() && entails(ws, {}, b, c).holds()) {
      EXPECT_TRUE(entails(ws, {}, a, c).holds()) << a.to_string() << " " << b.to_string() << " " << c.to_string();
    }
  }
}

TEST(Normalize, Examples) {
  const Pred vf = parse_pred("(pred valid_free)");
  EXPECT_EQ(normalize(Pred::and_({Pred::true_(), vf})), vf);
  EXPECT_EQ(normalize(Pred::and_({vf, vf})), vf);
  const Pred a = parse_pred("(in @0 (field ids))"), b = parse_pred("(pred valid_queues)");
  EXPECT_EQ(normalize(Pred::and_({Pred::and_({a, b}), a})), normalize(Pred::and_({b, a})));
  EXPECT_EQ(normalize(Pred::and_({a, Pred::false_()})), Pred::false_());
  EXPECT_EQ(conjuncts(Pred::true_()).size(), 0u);
  EXPECT_EQ(conjuncts(Pred::and_({a, Pred::and_({b, a})})).size(), 2u);
}

TEST(Normalize, PreservesMeaning) {
  const StateSchema schema({{"a", Domain::boolean()}, {"n", Domain::nat_range(0, 2)}});
  const std::vector<Pred> leaves = {
      Pred::true_(), Pred::false_(), parse_pred("(field a)"), parse_pred("(= (field n) 1)"),
      parse_pred("(< (field n) 2)"), parse_pred("(exists k (nat 0 2) (= k (field n)))")};
  std::mt19937 rng(5);
  std::function<Pred(int)> gen = [&](int d) -> Pred {
    if (d == 0) return leaves[rng() % leaves.size()];
    switch (rng() % 5) {
      case 0: return Pred::and_({gen(d - 1), gen(d - 1), gen(d - 1)});
      case 1: return Pred::or_({gen(d - 1), gen(d - 1)});
      case 2: return Pred::not_(gen(d - 1));
      case 3: return Pred::imp(gen(d - 1), gen(d - 1));
      default: return Pred::and_({gen(d - 1), Pred::and_({gen(d - 1), Pred::true_()})});
    }
  };
  const auto states = enumerate_states(schema);
  for (int k = 0; k < 300; ++k) {
    const Pred p = gen(3);
    const Pred q = normalize(p);
    for (const auto& s : states) {
      Env env;
      ASSERT_EQ(eval_pred(p, {}, env, s), eval_pred(q, {}, env, s)) << p.to_string();
    }
    EXPECT_EQ(normalize(q), q);
  }
}

TEST(Substitution, CaptureAvoiding) {
  const Pred p = parse_pred("(forall y (id 2) (imp (= y x) (in y (field ids))))");
  const Pred q = subst(p, "x", Expr::var("y"));
  EXPECT_EQ(free_vars(q), std::set<std::string>{"y"});
  const Workspace ws = corpus_ws(2, 1);
  for (const auto& s : enumerate_states(*ws.schema))
    for (std::uint32_t v : {0u, 1u}) {
      Env e1{{"x", Value::id(v)}}, e2{{"y", Value::id(v)}};
      ASSERT_EQ(eval_pred(p, {}, e1, s), eval_pred(q, {}, e2, s));
    }
  EXPECT_EQ(rename(parse_pred("(= x z)"), "x", "w"), parse_pred("(= w z)"));
}

TEST(Binders, LetAndWithField) {
  const Workspace ws = corpus_ws(2, 1);
  const State s = st(ws, "(set @0)", "(map)", "(map (0 (seq)))");
  EXPECT_TRUE(holds(ws, "(let k (field ids) (in @0 k))", s));
  EXPECT_TRUE(holds(ws, "(with-field ids (lit (set @1)) (in @1 (field ids)))", s));
  EXPECT_FALSE(holds(ws, "(with-field ids (lit (set @1)) (in @0 (field ids)))", s));
}

TEST(Definitions, Validation) {
  PredDefs d;
  d["p"] = {{}, parse_pred("(pred q)")};
  d["q"] = {{}, parse_pred("(pred p)")};
  EXPECT_THROW(validate_defs(d), PredError);
  PredDefs e;
  e["p"] = {{"x"}, parse_pred("(= x 1)")};
  EXPECT_THROW(validate_refs(parse_pred("(pred p)"), e), PredError);
  EXPECT_THROW(validate_refs(parse_pred("(pred r 1)"), e), PredError);
  EXPECT_NO_THROW(validate_defs(corpus_preds({3, 2})));
  std::set<std::string> refs;
  collect_refs(parse_pred("(pred valid_free)"), corpus_preds({2, 1}), refs);
  EXPECT_EQ(refs, (std::set<std::string>{"valid_free", "valid_id"}));
}

TEST(Definitions, StateReads) {
  const PredDefs defs = corpus_preds({2, 1});
  EXPECT_TRUE(reads_state(parse_pred("(pred valid_free)"), defs));
  EXPECT_FALSE(reads_state(parse_pred("(= (get t priority) p)"), defs));
  std::set<std::string> fields;
  collect_fields(parse_pred("(pred valid_queues)"), defs, fields);
  EXPECT_EQ(fields, (std::set<std::string>{"queues", "tcbs"}));
}

TEST(Text, PrintParseRoundTrip) {
  const PredDefs defs = corpus_preds({3, 2});
  for (const auto& [name, d] : defs) EXPECT_EQ(parse_pred(d.body.to_string()), d.body) << name;
}

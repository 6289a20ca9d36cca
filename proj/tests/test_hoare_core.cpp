#include <gtest/gtest.h>

#include <random>

#include "fannot/corpus.hpp"
#include "fannot/soundness.hpp"
#include "oracles.hpp"

using namespace fannot;

namespace {

Workspace corpus_ws(unsigned n, unsigned m) { return workspace_of(corpus_project({n, m})); }

Triple triple(const std::string& text) { return std::get<Triple>(read_claim(parse_sexpr(text))); }

// Direct loop over assignments, states and outcomes, without the scanner.
bool naive_holds(const Workspace& ws, const Triple& t) {
  std::vector<std::vector<Value>> cols;
  for (const auto& f : t.fixes) cols.push_back(f.dom.values());
  std::vector<std::size_t> pos(cols.size(), 0);
  const auto states = enumerate_states(*ws.schema);
  while (true) {
    Env env;
    for (std::size_t k = 0; k < cols.size(); ++k) env.push(t.fixes[k].name, cols[k][pos[k]]);
    for (const auto& s : states) {
      if (!eval_pred(t.pre, ws.preds, env, s)) continue;
      for (const auto& o : run(t.prog, ws.programs, ws.preds, env, s))
        if (!eval_post(t.post, ws.preds, env, o.ret, o.state)) return false;
    }
    std::size_t k = cols.size();
    while (k > 0 && ++pos[k - 1] == cols[k - 1].size()) pos[--k] = 0;
    if (k == 0) return true;
  }
}

}  // namespace

TEST(Triples, AgreeWithBooleanModel) {
  const Workspace ws = meta_workspace();
  for (const auto& c : meta_programs(2))
    for (unsigned pre = 0; pre < 4; ++pre)
      for (unsigned post = 0; post < 16; ++post) {
        const Triple t{{}, meta_state_pred(pre), c, meta_post("r", post)};
        ASSERT_EQ(check_triple(ws, t).holds(), oracle::bool_triple(pre, c, post)) << t.to_string();
      }
}

TEST(Triples, AgreeWithNaiveLoopOnCorpus) {
  const Project p = corpus_project({2, 2});
  const Workspace ws = workspace_of(p);
  std::size_t checked = 0;
  for (const auto& r : p.rules) {
    const Triple& t = std::get<Triple>(r.claim);
    EXPECT_EQ(check_triple(ws, t).holds(), naive_holds(ws, t)) << r.name;
    ++checked;
  }
  for (const auto& g : p.goals) {
    const Triple t = goal_triple(p, g, false);
    EXPECT_EQ(check_triple(ws, t).holds(), naive_holds(ws, t)) << g.key();
    ++checked;
  }
  EXPECT_EQ(checked, 13u);
}

TEST(Triples, Examples) {
  const Workspace ws = corpus_ws(2, 2);
  EXPECT_TRUE(check_triple(ws, triple("(triple (fixes (p (nat 0 1))) (pre (pred valid_free)) (prog (call new_tcb p))"
                                      " (post _ (pred valid_free)))"))
                  .holds());
  EXPECT_TRUE(check_triple(ws, triple("(triple (fixes) (pre false) (prog (call new_tcb 0)) (post _ false))")).holds());
  EXPECT_TRUE(check_triple(ws, triple("(triple (fixes) (pre true) (prog (select (lit (set)))) (post _ false))")).holds());

  const Verdict v =
      check_triple(ws, triple("(triple (fixes) (pre true) (prog (call new_tcb 0)) (post _ (pred valid_queues)))"));
  ASSERT_EQ(v.kind, VerdictKind::Violated);
  ASSERT_TRUE(v.cex && v.cex->outcome);
  // the plain model finds the same first failing state
  const auto all = enumerate_states(*ws.schema);
  std::size_t first = 0;
  for (;; ++first) {
    bool bad = false;
    for (const auto& [i, t] : oracle::new_tcb(oracle::from_state(all[first], 2, 2), 0)) bad |= !oracle::valid_queues(t);
    if (bad) break;
  }
  EXPECT_EQ(v.cex->state_index, first);
  EXPECT_FALSE(oracle::valid_queues(oracle::from_state(v.cex->outcome->state, 2, 2)));
}

TEST(Triples, FaultIsNotViolation) {
  const Workspace ws = corpus_ws(2, 1);
  const Verdict v =
      check_triple(ws, triple("(triple (fixes) (pre true) (prog (return (the (lookup (field tcbs) @0)))) (post _ true))"));
  EXPECT_EQ(v.kind, VerdictKind::Fault);
  const Verdict w = check_triple(ws, triple("(triple (fixes) (pre true) (prog (assert (pred valid_free))) (post _ true))"));
  EXPECT_EQ(w.kind, VerdictKind::Fault);
}

TEST(Triples, WorkersDoNotChangeTheVerdict) {
  Workspace ws = corpus_ws(2, 2);
  const Triple t = triple("(triple (fixes (p (nat 0 1))) (pre (pred valid_queues)) (prog (call new_tcb p))"
                          " (post _ (pred valid_queues)))");
  const Verdict one = check_triple(ws, t);
  ws.workers = 3;
  const Verdict three = check_triple(ws, t);
  EXPECT_EQ(one.to_string(), three.to_string());
}

TEST(Wp, Examples) {
  const Workspace ws = corpus_ws(2, 1);
  const DomainCtx ctx = {{"x", Domain::ids(2)}, {"i", Domain::ids(2)}};
  const Pred w = wp_atomic(ws, parse_comp("(return x)"), {"r", parse_pred("(= r x)")}, ctx);
  EXPECT_TRUE(equivalent(ws, {{"x", Domain::ids(2)}}, w, Pred::true_()).holds());

  const Comp put = parse_comp("(put ids (set-minus (field ids) (set-of i)))");
  const PostPred q{"_", parse_pred("(pred valid_free_except i)")};
  const Pred wput = wp_atomic(ws, put, q, ctx);
  EXPECT_TRUE(check_triple(ws, Triple{{{"i", Domain::ids(2)}}, wput, put, q}).holds());

  const Comp sel = parse_comp("(select (field ids))");
  const PostPred qs{"i", parse_pred("(pred valid_free_except i)")};
  const Pred wsel = wp_atomic(ws, sel, qs, ctx);
  const Pred expect = parse_pred("(forall i (id 2) (imp (in i (field ids)) (pred valid_free_except i)))");
  EXPECT_TRUE(equivalent(ws, {}, wsel, expect).holds());
}

// Every atomic form on a boolean + NatRange(0,2) schema: wp holds at a state
// exactly when every outcome from it satisfies the postcondition.
TEST(Wp, SoundAndWeakestOnEveryAtomicForm) {
  Workspace ws;
  ws.schema = std::make_shared<const StateSchema>(
      StateSchema({{"a", Domain::boolean()}, {"n", Domain::nat_range(0, 2)}}));
  std::vector<Comp> atoms = {
      parse_comp("(return true)"),  parse_comp("(return 1)"),           parse_comp("(return (field n))"),
      parse_comp("(return x)"),     parse_comp("(gets a)"),             parse_comp("(gets n)"),
      parse_comp("(put a true)"),   parse_comp("(put a (not (field a)))"), parse_comp("(put n (mod (+ (field n) 1) 3))"),
      parse_comp("(put n x)"),      parse_comp("(assert (field a))"),   parse_comp("(assert (< (field n) 2))"),
      parse_comp("(if (field a) (put n 0) (return 2))"),
      parse_comp("(select (set-of (field n) 2))"),
      parse_comp("(select (set-of x (field n)))"),
  };
  const Domain nat3 = Domain::nat_range(0, 2), subsets = Domain::set_of(nat3);
  for (const auto& sub : subsets.values()) atoms.push_back(Comp::select(Expr::lit(sub)));
  const std::vector<Pred> leaves = {
      parse_pred("(= r 1)"), parse_pred("(= r true)"), parse_pred("(field a)"), parse_pred("(= (field n) 2)"),
      parse_pred("(= r (field n))"), parse_pred("(= r x)"), parse_pred("(= (field n) x)"), Pred::false_()};
  std::mt19937 rng(17);
  std::vector<PostPred> posts;
  for (const auto& l : leaves) posts.push_back({"r", l});
  for (int k = 0; k < 40; ++k) {
    const Pred a = leaves[rng() % leaves.size()], b = leaves[rng() % leaves.size()], c = leaves[rng() % leaves.size()];
    switch (k % 3) {
      case 0: posts.push_back({"r", Pred::or_({a, Pred::not_(b)})}); break;
      case 1: posts.push_back({"r", Pred::and_({Pred::imp(a, b), c})}); break;
      default: posts.push_back({"r", Pred::iff(a, Pred::or_({b, c}))}); break;
    }
  }
  const DomainCtx ctx = {{"x", Domain::nat_range(0, 2)}};
  const auto states = enumerate_states(*ws.schema);
  std::size_t checks = 0;
  for (const auto& c : atoms)
    for (const auto& q : posts) {
      const Pred w = wp_atomic(ws, c, q, ctx);
      for (const auto& xv : nat3.values())
        for (const auto& s : states) {
          Env env{{"x", xv}};
          bool all = true, fault = false;
          try {
            for (const auto& o : run(c, {}, {}, env, s)) all = all && eval_post(q, {}, env, o.ret, o.state);
          } catch (const EvalFault&) {
            fault = true;
          }
          bool wv = false;
          try {
            wv = eval_pred(w, {}, env, s);
          } catch (const EvalFault&) {
            ADD_FAILURE() << "wp faults: " << w.to_string();
          }
          if (fault) {
            EXPECT_FALSE(wv) << c.to_string() << " " << q.to_string() << " " << s.to_string();
          } else {
            ASSERT_EQ(wv, all) << c.to_string() << " | " << q.to_string() << " | " << s.to_string() << " x=" << xv.to_string();
          }
          ++checks;
        }
    }
  EXPECT_GT(checks, 10000u);
}

TEST(Split, CorpusCollectionRows) {
  const Workspace ws = corpus_ws(2, 2);
  const Comp body = ws.programs.at("new_tcb").body;
  const Triple goal{{{"p", Domain::nat_range(0, 1)}}, parse_pred("(pred valid_free)"), body,
                    {"_", parse_pred("(pred valid_free)")}};
  const auto [cont, head] = split(ws, goal, {"i", parse_pred("(pred valid_free_except i)")});
  EXPECT_EQ(head.prog, parse_comp("(call alloc)"));
  EXPECT_EQ(head.pre, goal.pre);
  EXPECT_EQ(cont.pre, parse_pred("(pred valid_free_except i)"));
  EXPECT_TRUE(check_triple(ws, head).holds());
  EXPECT_TRUE(check_triple(ws, cont).holds());
  EXPECT_TRUE(check_triple(ws, goal).holds());
}

TEST(Split, ExhaustiveSoundnessAtDepthTwo) {
  const Workspace ws = meta_workspace();
  std::size_t composites = 0;
  for (const auto& c : meta_programs(2)) {
    if (c.op() != CompOp::Bind) continue;
    for (unsigned a = 0; a < 4; ++a)
      for (unsigned q = 0; q < 16; ++q) {
        const Triple goal{{}, meta_state_pred(a), c, meta_post("r", q)};
        const bool expect = oracle::bool_triple(a, c, q);
        for (unsigned b = 0; b < 16; ++b) {
          const auto [cont, head] = split(ws, goal, meta_post(c.name(), b));
          if (check_triple(ws, cont).holds() && check_triple(ws, head).holds()) {
            ASSERT_TRUE(expect) << goal.to_string() << " mid " << b;
            ++composites;
          }
        }
      }
  }
  EXPECT_GT(composites, 1000u);
}

TEST(Weaken, Examples) {
  const Workspace ws = corpus_ws(2, 2);
  const Triple init = triple(
      "(triple (fixes (tcb (record (priority (nat 0 1)))) (i (id 2))) (pre (and (pred not_queued i) (pred valid_queues)))"
      " (prog (call init_tcb tcb i)) (post _ (pred valid_queues)))");
  ASSERT_TRUE(check_triple(ws, init).holds());
  const Triple w = weaken(ws, init, parse_pred("(and (pred valid_queues) (pred valid_free_except i))"));
  EXPECT_EQ(w.pre, parse_pred("(and (pred valid_queues) (pred valid_free_except i))"));
  EXPECT_TRUE(check_triple(ws, w).holds());
  EXPECT_EQ(weaken(ws, init, init.pre), init);
  EXPECT_NO_THROW(weaken(ws, init, Pred::false_()));
  EXPECT_THROW(weaken(ws, init, Pred::true_()), CheckError);
}

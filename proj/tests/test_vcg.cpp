#include <gtest/gtest.h>

#include "fannot/corpus.hpp"

using namespace fannot;

namespace {

struct Corpus {
  Project project;
  Workspace ws;
  RuleDB db;
  explicit Corpus(unsigned n = 2, unsigned m = 2)
      : project(corpus_project({n, m})), ws(workspace_of(project)), db(build_rule_db(ws, project)) {}
  Triple goal(const std::string& key) const { return goal_triple(project, *project.goal(key), false); }
};

// Each step predicate of `a` is equivalent to the matching one of `b`.
void expect_stepwise_equivalent(const Workspace& ws, const std::vector<Binder>& fixes, const AnnComp& a,
                                const AnnComp& b) {
  DomainCtx ctx;
  for (const auto& f : fixes) ctx.emplace(f.name, f.dom);
  const auto sa = ann_steps(ws, a, ctx), sb = ann_steps(ws, b, ctx);
  ASSERT_EQ(sa.size(), sb.size());
  for (std::size_t k = 0; k < sa.size(); ++k) {
    ASSERT_EQ(sa[k].comp, sb[k].comp);
    std::vector<Binder> scope;
    for (const auto& [n, d] : sa[k].ctx) scope.push_back({n, d});
    EXPECT_TRUE(equivalent(ws, scope, sa[k].pred, sb[k].pred).holds())
        << "step " << k << ": " << sa[k].pred.to_string() << " vs " << sb[k].pred.to_string();
  }
}

}  // namespace

TEST(Prove, FreeIdGoalGivesTheExpectedAnnotation) {
  const Corpus c;
  const Triple g = c.goal("new_tcb:valid_free");
  const VcgResult r = vcg_prove(c.ws, c.db, g);
  EXPECT_EQ(normalize(r.annotation), normalize(corpus_free_ids_annotation()));
  const Annotator& a = r.judgement.annotator();
  EXPECT_EQ(a.prog, g.prog);
  EXPECT_EQ(a.pre, g.pre);
  EXPECT_TRUE(check_annotator(c.ws, a).holds());
  EXPECT_TRUE(audit(c.ws, r.judgement).holds());
  EXPECT_FALSE(r.log.empty());
}

TEST(Prove, IsDeterministic) {
  const Corpus c;
  const Triple g = c.goal("new_tcb:valid_free");
  const VcgResult a = vcg_prove(c.ws, c.db, g), b = vcg_prove(c.ws, c.db, g);
  EXPECT_EQ(a.annotation, b.annotation);
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(a.judgement.to_string(), b.judgement.to_string());
}

TEST(Prove, DoubleIncrement) {
  Workspace ws;
  ws.schema = std::make_shared<const StateSchema>(StateSchema({{"i", Domain::nat_range(0, 3)}}));
  const Comp inc = parse_comp("(put i (mod (+ (field i) 1) 4))");
  const Comp prog = Comp::bind("_", inc, inc);
  const Pred even = parse_pred("(= (mod (field i) 2) 0)"), odd = parse_pred("(= (mod (field i) 2) 1)");
  const VcgResult r = vcg_prove(ws, RuleDB{}, Triple{{}, even, prog, {"_", even}});
  const AnnComp expect = AnnComp::bind("_", AnnComp::step(even, inc), AnnComp::step(odd, inc));
  expect_stepwise_equivalent(ws, {}, r.annotation, expect);
  EXPECT_TRUE(check_annotator(ws, r.judgement.annotator()).holds());
}

TEST(Prove, ReturnZero) {
  Workspace ws;
  ws.schema = std::make_shared<const StateSchema>(StateSchema{});
  const VcgResult r = vcg_prove(ws, RuleDB{}, Triple{{}, Pred::true_(), parse_comp("(return 0)"), {"r", parse_pred("(= r 0)")}});
  const auto steps = ann_steps(ws, r.annotation, {});
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_TRUE(equivalent(ws, {}, steps[0].pred, Pred::true_()).holds());
}

TEST(Prove, UnfoldingAgreesWithTheRegisteredRule) {
  const Corpus c(2, 1);
  const Triple g{{}, parse_pred("(pred valid_free)"), parse_comp("(call alloc)"),
                 {"i", parse_pred("(pred valid_free_except i)")}};
  const VcgResult with_rule = vcg_prove(c.ws, c.db, g);
  const VcgResult unfolded = vcg_prove(c.ws, RuleDB{}, g);
  EXPECT_TRUE(check_annotator(c.ws, with_rule.judgement.annotator()).holds());
  EXPECT_TRUE(check_annotator(c.ws, unfolded.judgement.annotator()).holds());
  const auto a = ann_steps(c.ws, with_rule.annotation, {});
  const auto b = ann_steps(c.ws, unfolded.annotation, {});
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  // the rule's precondition is at least as strong as the computed one
  EXPECT_TRUE(entails(c.ws, {}, a[0].pred, b[0].pred).holds());
  EXPECT_TRUE(entails(c.ws, {}, g.pre, b[0].pred).holds());
}

TEST(Prove, UnprovableGoalIsReported) {
  const Corpus c;
  EXPECT_THROW(vcg_prove(c.ws, c.db, c.goal("new_tcb:valid_queues_alone")), VcgError);
}

TEST(Strong, QueueGoalReusesTheFreeIdAnnotation) {
  const Corpus c;
  const Goal& g = *c.project.goal("new_tcb:valid_queues");
  const auto fixes = program_fixes(c.project, "new_tcb");
  const StrongResult r = vcg_strong(c.ws, c.db, fixes, g.pre, corpus_free_ids_annotation(), g.post);
  EXPECT_EQ(normalize(r.annotation), normalize(corpus_queues_annotation()));
  EXPECT_TRUE(check_claim(c.ws, r.judgement.claim()).holds());
  EXPECT_TRUE(check_ann_triple(c.ws, r.ann_triple.ann_triple()).holds());
  EXPECT_TRUE(audit(c.ws, r.judgement).holds());
  // not_queued is discharged at init_tcb and never required earlier
  bool discharged = false;
  for (const auto& line : r.log) {
    if (line.rfind("step 1:", 0) == 0 || line.rfind("step 2:", 0) == 0)
      EXPECT_EQ(line.find("not_queued"), std::string::npos) << line;
    if (line.rfind("step 3:", 0) == 0 && line.find("not_queued") != std::string::npos &&
        line.find("follows from the annotation") != std::string::npos)
      discharged = true;
  }
  EXPECT_TRUE(discharged);
}

TEST(Strong, TrivialAnnotationDegeneratesToProve) {
  const Corpus c;
  const Triple g = c.goal("new_tcb:valid_free");
  const VcgResult plain = vcg_prove(c.ws, c.db, g);
  const StrongResult strong = vcg_strong(c.ws, c.db, g.fixes, g.pre, annotate_uniform(g.prog), g.post);
  EXPECT_EQ(normalize(strong.annotation), normalize(plain.annotation));
}

TEST(Strong, CollectingAgainAddsNothing) {
  const Corpus c;
  const Triple g = c.goal("new_tcb:valid_free");
  const AnnComp free_ann = corpus_free_ids_annotation();
  const StrongResult r = vcg_strong(c.ws, c.db, g.fixes, g.pre, free_ann, g.post);
  EXPECT_EQ(normalize(merge(free_ann, r.annotation)), normalize(free_ann));
  EXPECT_TRUE(diff_annotations(free_ann, merge(free_ann, r.annotation)).empty());
}

TEST(RuleDb, RejectsRulesThatDoNotHold) {
  Project p = corpus_project({2, 1});
  p.rules.push_back({"bogus", Triple{{}, Pred::true_(), parse_comp("(call alloc)"), {"_", parse_pred("(pred valid_free)")}}});
  const Workspace ws = workspace_of(p);
  try {
    build_rule_db(ws, p);
    FAIL() << "accepted a violated rule";
  } catch (const StoreError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(RuleDb, AcceptsOnlyTriplesAndAnnotators) {
  const Corpus c(2, 1);
  EXPECT_EQ(c.db.entries().size(), c.project.rules.size());
  EXPECT_EQ(c.db.for_callee("alloc").size(), 2u);
  ASSERT_NE(c.db.find("alloc_valid_free"), nullptr);
  const Comp body = c.ws.programs.at("new_tcb").body;
  const Established e = establish(
      c.ws, Ordering{{{"p", Domain::nat_range(0, 0)}}, Pred::false_(), body, corpus_free_ids_annotation()});
  ASSERT_TRUE(e.judgement);
  RuleDB db;
  EXPECT_THROW(db.add("order", *e.judgement), VcgError);
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "fannot/corpus.hpp"

using namespace fannot;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kEmpty = "(fannot-project 1)\n(schema)\n(preds)\n(programs)\n(rules)\n(goals)\n(annotations)\n";

}  // namespace

TEST(RoundTrip, CorpusProject) {
  for (const CorpusParams cp : {CorpusParams{2, 1}, CorpusParams{3, 2}}) {
    const Project p = corpus_project(cp);
    const std::string text = save_string(p);
    const Project q = load_string(text);
    EXPECT_EQ(q, p);
    EXPECT_EQ(save_string(q), text);
    EXPECT_TRUE(validate_project(q).empty());
  }
}

TEST(RoundTrip, BundledFileMatchesTheCorpus) {
  const std::string text = slurp(std::string(FANNOT_DATA) + "/corpus.fannot");
  EXPECT_EQ(text, save_string(corpus_project({3, 2})));
}

// Small projects assembled from random choices over fixed catalogs.
TEST(RoundTrip, GeneratedProjects) {
  const std::vector<std::pair<std::string, Domain>> fields = {
      {"flag", Domain::boolean()},
      {"count", Domain::nat_range(0, 3)},
      {"owner", Domain::ids(2)},
      {"pool", Domain::set_of(Domain::ids(2))},
      {"log", Domain::seq_of(Domain::nat_range(0, 1), 2)},
  };
  const std::vector<std::string> bodies = {
      "(field flag)", "(< (field count) 2)", "(in @0 (field pool))", "(= (field owner) @1)",
      "(not (field flag))", "(forall k (nat 0 3) (imp (= k (field count)) (< k 3)))"};
  const std::vector<std::string> comps = {
      "(put flag true)", "(put count (mod (+ (field count) 1) 4))", "(select (field pool))",
      "(do (<- x (gets count)) (put count x))", "(return @0)", "(put pool (set-minus (field pool) (set-of @0)))"};
  std::mt19937 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    Project p;
    std::vector<std::pair<std::string, Domain>> chosen;
    for (const auto& f : fields)
      if (rng() % 3 != 0) chosen.push_back(f);
    if (chosen.empty()) chosen.push_back(fields[0]);
    p.schema = StateSchema(chosen);
    std::set<std::string> have;
    for (const auto& [n, d] : chosen) have.insert(n);
    auto usable = [&](const std::string& text) {
      for (const auto& [n, d] : fields)
        if (text.find("(field " + n + ")") != std::string::npos && !have.count(n)) return false;
      for (const auto& [n, d] : fields)
        if ((text.find("(put " + n + " ") != std::string::npos || text.find("(gets " + n + ")") != std::string::npos) &&
            !have.count(n))
          return false;
      return true;
    };
    std::vector<std::string> preds;
    for (std::size_t k = 0; k < bodies.size(); ++k)
      if (usable(bodies[k]) && rng() % 2 == 0) {
        const std::string name = "p" + std::to_string(k);
        p.preds[name] = {{}, parse_pred(bodies[k])};
        preds.push_back(name);
      }
    std::vector<std::string> progs;
    for (std::size_t k = 0; k < comps.size(); ++k)
      if (usable(comps[k]) && rng() % 2 == 0) {
        const std::string name = "f" + std::to_string(k);
        p.programs[name] = {{}, parse_comp(comps[k])};
        progs.push_back(name);
      }
    auto some_pred = [&] {
      return preds.empty() ? Pred::true_() : parse_pred("(pred " + preds[rng() % preds.size()] + ")");
    };
    for (const auto& f : progs) {
      const Comp call = Comp::call(f, {});
      if (rng() % 2) p.rules.push_back({"r_" + f, Triple{{}, some_pred(), call, {"_", some_pred()}}});
      if (rng() % 2) p.goals.push_back({f, "g", some_pred(), {"_", some_pred()}});
      if (rng() % 2) p.put_annotation(f, "a", annotate_uniform(p.programs.at(f).body, some_pred()));
    }
    ASSERT_TRUE(validate_project(p).empty()) << save_string(p);
    const std::string text = save_string(p);
    const Project q = load_string(text);
    ASSERT_EQ(q, p) << text;
    ASSERT_EQ(save_string(q), text);
  }
}

TEST(RoundTrip, EveryClaimKind) {
  const Comp body = corpus_programs({2, 1}).at("new_tcb").body;
  const AnnComp free_ann = corpus_free_ids_annotation();
  const std::vector<Binder> fixes = {{"p", Domain::nat_range(0, 1)}};
  const Pred vf = parse_pred("(pred valid_free)");
  const PostPred post{"_", vf};
  const std::vector<Claim> claims = {
      Triple{fixes, vf, body, post},
      AnnTriple{fixes, Pred::true_(), free_ann, post},
      Ordering{fixes, vf, body, free_ann},
      Annotator{fixes, vf, body, post, free_ann},
      StrongAnnotator{fixes, vf, free_ann, {"r", parse_pred("(in r (dom (field tcbs)))")}, corpus_queues_annotation()},
      Refinement{fixes, corpus_combined_annotation(), free_ann},
  };
  for (const auto& c : claims) {
    const std::string text = claim_to_string(c);
    EXPECT_EQ(read_claim(parse_sexpr(text)), c) << text;
  }
}

TEST(RoundTrip, FileOnDisk) {
  const auto path = std::filesystem::temp_directory_path() / "fannot_store_test.fannot";
  const Project p = corpus_project({2, 2});
  save(p, path.string());
  EXPECT_EQ(load(path.string()), p);
  std::filesystem::remove(path);
  EXPECT_THROW(load(path.string()), StoreError);
}

TEST(Load, EmptyProjectIsValid) {
  const Project p = load_string(kEmpty);
  EXPECT_TRUE(validate_project(p).empty());
  EXPECT_TRUE(p.rules.empty());
  EXPECT_TRUE(p.annotations.empty());
  EXPECT_EQ(p.schema.universe_size(), 1u);
  EXPECT_EQ(save_string(p), kEmpty);
  EXPECT_THROW(load_string("(fannot-project 1)\n"), ParseError);
}

TEST(Load, CommentsAreIgnored) {
  const Project p = load_string(
      "; a project\n(fannot-project 1) ; header\n(schema (flag bool)) ; one field\n"
      "(preds) (programs) (rules) (goals) (annotations)\n");
  EXPECT_EQ(p.schema.universe_size(), 2u);
}

TEST(Load, SyntaxErrorsCarryPositions) {
  try {
    load_string("(fannot-project 1)\n(schema\n  (ids (set (id 3)))\n  (tcbs (map (id 3) bogus absent)))\n");
    FAIL() << "accepted a bad domain";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 4);
    EXPECT_GT(e.col, 1);
  }
  try {
    load_string("(fannot-project 1)\n(schema (flag bool)\n");
    FAIL() << "accepted an unclosed list";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2);
  }
  EXPECT_THROW(load_string("(fannot-project 7)\n"), ParseError);
}

TEST(Load, UndefinedPredicateIsNamed) {
  const std::string text =
      "(fannot-project 1)\n(schema (flag bool))\n(preds)\n"
      "(programs (program set_flag () (put flag true)))\n(rules)\n"
      "(goals (goal set_flag ok (pre true) (post _ (pred flag_is_set))))\n(annotations)\n";
  try {
    load_string(text);
    FAIL() << "accepted an undefined predicate";
  } catch (const StoreError& e) {
    EXPECT_NE(std::string(e.what()).find("flag_is_set"), std::string::npos) << e.what();
  }
}

TEST(Load, AnnotationMustMatchItsProgram) {
  Project p = corpus_project({2, 1});
  p.annotations.push_back({"alloc", "wrong", corpus_free_ids_annotation()});
  EXPECT_FALSE(validate_project(p).empty());
  EXPECT_THROW(load_string(save_string(p)), StoreError);
}

TEST(Annotations, PutReplacesByKeyAndNormalizes) {
  Project p = corpus_project({2, 1});
  const std::size_t before = p.annotations.size();
  const AnnComp doubled = merge(corpus_free_ids_annotation(), corpus_free_ids_annotation());
  p.put_annotation("new_tcb", "valid_free", doubled);
  EXPECT_EQ(p.annotations.size(), before);
  EXPECT_EQ(p.annotation("new_tcb:valid_free")->ann, normalize(corpus_free_ids_annotation()));
  p.put_annotation("new_tcb", "extra", doubled);
  EXPECT_EQ(p.annotations.size(), before + 1);
  EXPECT_EQ(p.annotation("new_tcb:missing"), nullptr);
}

TEST(Diff, SelfDiffIsEmpty) {
  for (const auto& a : {corpus_free_ids_annotation(), corpus_queues_annotation(), corpus_combined_annotation()})
    EXPECT_TRUE(diff_annotations(a, a).empty());
}

TEST(Diff, CombinedAddsQueueConjuncts) {
  const auto lines = diff_annotations(corpus_free_ids_annotation(), corpus_combined_annotation());
  std::size_t steps = 0, added = 0, removed = 0;
  for (const auto& l : lines) {
    if (l.rfind("step ", 0) == 0) ++steps;
    if (l.rfind("  + ", 0) == 0) ++added;
    if (l.rfind("  - ", 0) == 0) ++removed;
  }
  EXPECT_EQ(steps, 5u);
  EXPECT_EQ(removed, 0u);
  // valid_queues everywhere, plus the priority, not_queued and tcb_at_prio facts
  EXPECT_EQ(added, 8u);
  const std::string all = [&] {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
  }();
  EXPECT_NE(all.find("+ (pred not_queued i)"), std::string::npos);
  EXPECT_NE(all.find("+ (pred valid_queues)"), std::string::npos);
}

TEST(Diff, ManualEditShowsOnlyThatStep) {
  const AnnComp free_ann = corpus_free_ids_annotation();
  const AnnComp edited = with_step_pred(free_ann, 3, parse_pred("(and (pred valid_free) (in @0 (field ids)))"));
  const auto lines = diff_annotations(free_ann, edited);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "step 4 (call enqueue_tcb i p)");
  EXPECT_EQ(lines[1], "  + (in @0 (field ids))");
}

TEST(Diff, DifferentShapesAreAnError) {
  EXPECT_THROW(diff_annotations(corpus_free_ids_annotation(), lift(Pred::true_(), parse_comp("(return 1)"))),
               StoreError);
}

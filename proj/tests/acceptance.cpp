// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "fannot/corpus.hpp"
#include "fannot/soundness.hpp"

using namespace fannot;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Result {
  bool pass = false;
  std::string detail;
};

struct Corpus {
  Project project;
  Workspace ws;
  RuleDB db;
  explicit Corpus(CorpusParams cp) : project(corpus_project(cp)), ws(workspace_of(project)), db(build_rule_db(ws, project)) {}
  const Goal& goal(const std::string& key) const { return *project.goal(key); }
};

const Corpus& full() {
  static const Corpus c({3, 2});
  return c;
}

// First line of a verdict report.
std::string brief(const Verdict& v) {
  const std::string s = v.to_string();
  return s.substr(0, s.find('\n'));
}

std::string fmt(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << " s";
  return os.str();
}

Result free_ids_triple() {
  const Corpus& c = full();
  const auto t0 = Clock::now();
  const Verdict v = check_triple(c.ws, goal_triple(c.project, c.goal("new_tcb:valid_free"), true));
  const double dt = seconds_since(t0);
  return {v.holds() && dt < 60.0, brief(v) + ", p in {0,1}, " + fmt(dt) + " (bound 60 s)"};
}

Result component_triples() {
  const Corpus& c = full();
  const std::vector<std::string> names = {"alloc_valid_free",   "create_keeps_free_except", "init_valid_free",
                                          "enqueue_valid_free", "enqueue_valid_queues",     "init_valid_queues"};
  std::size_t ok = 0;
  std::string failed;
  for (const auto& n : names) {
    for (const auto& r : c.project.rules) {
      if (r.name != n) continue;
      if (check_claim(c.ws, r.claim).holds())
        ++ok;
      else
        failed += " " + n;
    }
  }
  return {ok == names.size(), std::to_string(ok) + "/6 hold on 345600 states" + (failed.empty() ? "" : ", failed:" + failed)};
}

struct Collected {
  std::optional<VcgResult> prove;
  std::optional<StrongResult> strong;
  std::string error;
};

Collected& collected() {
  static Collected col = [] {
    Collected k;
    const Corpus& c = full();
    try {
      k.prove = vcg_prove(c.ws, c.db, goal_triple(c.project, c.goal("new_tcb:valid_free"), false));
      const Goal& g = c.goal("new_tcb:valid_queues");
      k.strong = vcg_strong(c.ws, c.db, program_fixes(c.project, "new_tcb"), g.pre, k.prove->annotation, g.post);
    } catch (const std::exception& e) {
      k.error = e.what();
    }
    return k;
  }();
  return col;
}

Result collection() {
  const Collected& k = collected();
  if (!k.prove) return {false, "vcg_prove failed: " + k.error};
  const bool same = normalize(k.prove->annotation) == normalize(corpus_free_ids_annotation());
  const Verdict v = check_annotator(full().ws, k.prove->judgement.annotator());
  return {same && v.holds(),
          std::string(same ? "equals" : "differs from") + " the free-id fixture; annotator " + brief(v)};
}

Result reuse() {
  const Collected& k = collected();
  if (!k.strong) return {false, "vcg_strong failed: " + k.error};
  bool leaked = false, discharged = false;
  for (const auto& line : k.strong->log) {
    const bool early = line.rfind("step 1:", 0) == 0 || line.rfind("step 2:", 0) == 0;
    if (early && line.find("not_queued") != std::string::npos) leaked = true;
    if (line.rfind("step 3:", 0) == 0 && line.find("not_queued") != std::string::npos &&
        line.find("follows from the annotation") != std::string::npos)
      discharged = true;
  }
  const bool same = normalize(k.strong->annotation) == normalize(corpus_queues_annotation());
  const Verdict v = check_ann_triple(full().ws, k.strong->ann_triple.ann_triple());
  std::string d = std::string(same ? "equals" : "differs from") + " the queue fixture; not_queued " +
                  (discharged ? "discharged at init_tcb by the step annotation" : "NOT discharged by the annotation") +
                  (leaked ? ", but required before init_tcb" : ", never required before init_tcb") +
                  "; annotated triple " + brief(v);
  return {same && discharged && !leaked && v.holds(), d};
}

Result merge_fixtures() {
  const Corpus& c = full();
  const AnnComp m = merge(corpus_free_ids_annotation(), corpus_queues_annotation());
  const bool same = normalize(m) == normalize(corpus_combined_annotation());
  const auto fixes = program_fixes(c.project, "new_tcb");
  const Pred pre = parse_pred("(and (pred valid_free) (pred valid_queues))");
  const Verdict direct = check_order(c.ws, Ordering{fixes, pre, c.project.programs.at("new_tcb").body, m});
  std::string rule = "not derived";
  bool audited = false;
  const Collected& k = collected();
  if (k.prove && k.strong) {
    try {
      const Judgement o1 = rules::annotator_order(k.prove->judgement);
      const Judgement o2 = rules::strong_adherence(c.ws, o1, k.strong->judgement);
      const Judgement merged = rules::merge_adherence(c.ws, o1, o2);
      const Verdict a = audit(c.ws, merged);
      audited = a.holds() && normalize(merged.ordering().ann) == normalize(m);
      rule = "merge_adherence derivation audit " + brief(a);
    } catch (const std::exception& e) {
      rule = std::string("merge_adherence failed: ") + e.what();
    }
  }
  return {same && direct.holds() && audited,
          std::string(same ? "merge equals" : "merge differs from") + " the combined fixture; ordering " +
              brief(direct) + "; " + rule};
}

Result necessity() {
  const Corpus c({2, 2});
  const Triple t{{}, parse_pred("(pred valid_queues)"), parse_comp("(call new_tcb 0)"),
                 {"_", parse_pred("(pred valid_queues)")}};
  const Verdict v = check_triple(c.ws, t), again = check_triple(c.ws, t);
  if (v.kind != VerdictKind::Violated || !v.cex) return {false, "expected Violated, got " + brief(v)};
  const State& s = v.cex->state;
  const Value& ids = s.get("ids");
  std::string witness;
  for (const auto& i : ids.elems()) {
    const Value* t = s.get("tcbs").map_find(i);
    if (t && !t->is(Value::Kind::Absent)) witness = i.to_string();
  }
  const bool det = v.to_string() == again.to_string();
  return {!witness.empty() && det,
          "Violated at state #" + std::to_string(v.cex->state_index) + " of 1764, " +
              (witness.empty() ? "no id in ids and dom tcbs" : witness + " in ids and dom tcbs") +
              (det ? ", deterministic" : ", NOT deterministic")};
}

Result meta_suite() {
  const auto t0 = Clock::now();
  const MetaReport r = run_meta_suite(MetaConfig{});
  const double dt = seconds_since(t0);
  std::uint64_t derived = 0;
  for (const auto& rr : r.rules) derived += rr.derived;
  return {r.ok() && dt < 300.0, std::to_string(r.programs) + " programs, " + std::to_string(r.rules.size()) +
                                    " rules, " + std::to_string(derived) + " conclusions, " +
                                    std::to_string(r.violations()) + " violations, " + fmt(dt) + " (bound 300 s)"};
}

Result semantic_laws() {
  const Corpus c({2, 1});
  const Workspace& ws = c.ws;
  const Comp body = c.project.programs.at("new_tcb").body;
  const std::vector<AnnComp> anns = {corpus_free_ids_annotation(), corpus_queues_annotation(),
                                     corpus_combined_annotation(), annotate_uniform(body),
                                     annotate_uniform(body, parse_pred("(pred valid_free)"))};
  const std::vector<Pred> preds = {Pred::true_(), Pred::false_(), parse_pred("(pred valid_free)"),
                                   parse_pred("(pred valid_queues)"),
                                   parse_pred("(and (pred valid_free) (pred valid_queues))")};
  const std::vector<Comp> progs = {body, parse_comp("(call alloc)"), parse_comp("(call create_tcb p)")};
  std::uint64_t checks = 0;
  std::string bad;
  auto expect = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok && bad.empty()) bad = what;
  };
  const auto states = enumerate_states(*ws.schema);
  const Value p0 = Value::nat(0);
  for (const auto& s : states) {
    Env env{{"p", p0}};
    for (const auto& f : anns) {
      const AnnRun r = run_ann(f, ws.programs, ws.preds, env, s);
      expect(r.outcomes == run(drop_ann(f), ws.programs, ws.preds, env, s), "outcome preservation");
      const Comp asserting = to_asserting_comp(f);
      if (r.fails) {
        bool faulted = false;
        try {
          run(asserting, ws.programs, ws.preds, env, s);
        } catch (const EvalFault&) {
          faulted = true;
        }
        expect(faulted, "asserting program faults where the annotation fails");
      } else {
        expect(run(asserting, ws.programs, ws.preds, env, s) == r.outcomes, "asserting program outcomes");
      }
      for (const auto& g : anns) {
        const bool fg = afails(merge(f, g), ws.programs, ws.preds, env, s);
        expect(fg == (r.fails || afails(g, ws.programs, ws.preds, env, s)), "merge failure disjunction");
      }
    }
    for (const auto& c0 : progs)
      for (const auto& p : preds) {
        const AnnRun r = run_ann(lift(p, c0), ws.programs, ws.preds, env, s);
        expect(r.fails == !eval_pred(p, ws.preds, env, s), "lift failure");
        expect(r.outcomes == run(c0, ws.programs, ws.preds, env, s), "lift outcomes");
      }
  }
  const std::vector<Binder> fixes = {{"p", Domain::nat_range(0, 0)}};
  for (const auto& c0 : progs)
    for (const auto& p : preds)
      for (const auto& q : preds)
        expect(check_order(ws, Ordering{fixes, p, c0, lift(q, c0)}).holds() == entails(ws, fixes, p, q).holds(),
               "ordering iff entailment");
  return {bad.empty(), std::to_string(checks) + " checks on 112 states" + (bad.empty() ? "" : ", first failure: " + bad)};
}

Result wp_atomic_laws() {
  Workspace ws;
  ws.schema = std::make_shared<const StateSchema>(
      StateSchema({{"a", Domain::boolean()}, {"n", Domain::nat_range(0, 2)}}));
  const Domain nat3 = Domain::nat_range(0, 2), subsets = Domain::set_of(nat3);
  std::vector<Comp> atoms;
  for (const char* text : {"(return true)", "(return 1)", "(return (field n))", "(return x)", "(gets a)", "(gets n)",
                           "(put a true)", "(put a (not (field a)))", "(put n (mod (+ (field n) 1) 3))", "(put n x)",
                           "(assert (field a))", "(assert (< (field n) 2))", "(if (field a) (put n 0) (return 2))",
                           "(select (set-of (field n) 2))", "(select (set-of x (field n)))"})
    atoms.push_back(parse_comp(text));
  for (const auto& sub : subsets.values()) atoms.push_back(Comp::select(Expr::lit(sub)));
  std::vector<Pred> leaves;
  for (const char* text : {"(= r 1)", "(= r true)", "(field a)", "(= (field n) 2)", "(= r (field n))", "(= r x)",
                           "(= (field n) x)", "false"})
    leaves.push_back(parse_pred(text));
  std::vector<PostPred> posts;
  for (const auto& l : leaves) posts.push_back({"r", l});
  std::mt19937 rng(17);
  for (int k = 0; k < 40; ++k) {
    const Pred a = leaves[rng() % leaves.size()], b = leaves[rng() % leaves.size()], c = leaves[rng() % leaves.size()];
    posts.push_back({"r", k % 2 ? Pred::or_({a, Pred::not_(b)}) : Pred::and_({Pred::imp(a, b), c})});
  }
  const DomainCtx ctx = {{"x", nat3}};
  const auto states = enumerate_states(*ws.schema);
  std::uint64_t checks = 0, wrong = 0;
  for (const auto& c : atoms)
    for (const auto& q : posts) {
      const Pred w = wp_atomic(ws, c, q, ctx);
      for (const auto& xv : nat3.values())
        for (const auto& s : states) {
          Env env{{"x", xv}};
          bool all = true;
          try {
            for (const auto& o : run(c, {}, {}, env, s)) all = all && eval_post(q, {}, env, o.ret, o.state);
          } catch (const EvalFault&) {
            all = false;
          }
          bool wv = false;
          try {
            wv = eval_pred(w, {}, env, s);
          } catch (const EvalFault&) {
            ++wrong;
          }
          if (wv != all) ++wrong;
          ++checks;
        }
    }
  return {wrong == 0, std::to_string(atoms.size()) + " atomic forms, " + std::to_string(posts.size()) + " posts, " +
                          std::to_string(checks) + " (state, x) checks, " + std::to_string(wrong) + " mismatches"};
}

Result persistence() {
  const Project& p = full().project;
  const std::string text = save_string(p);
  const bool round = load_string(text) == p && save_string(load_string(text)) == text;
  bool self_diff = true;
  for (const auto& a : p.annotations) self_diff = self_diff && diff_annotations(a.ann, a.ann).empty();
  // the same report twice, and with more workers
  auto report = [](unsigned workers) {
    const Corpus c({2, 2});
    Workspace ws = c.ws;
    ws.workers = workers;
    std::string out;
    for (const auto& g : c.project.goals) out += check_triple(ws, goal_triple(c.project, g, true)).to_string() + "\n";
    const VcgResult r = vcg_prove(ws, c.db, goal_triple(c.project, c.goal("new_tcb:valid_free"), false));
    for (const auto& l : r.log) out += l + "\n";
    return out + r.judgement.to_string();
  };
  const std::string a = report(1), b = report(1), w = report(2);
  const bool det = a == b && a == w;
  return {round && self_diff && det, std::string("round trip ") + (round ? "identical" : "DIFFERS") +
                                         ", self diffs " + (self_diff ? "empty" : "NOT empty") + ", reports " +
                                         (det ? "byte-identical" : "DIFFER") + " across runs and worker counts"};
}

}  // namespace

// With arguments, runs only the listed criteria.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  struct Criterion {
    int id;
    const char* name;
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "free-id triple on the full universe", free_ids_triple},
      {2, "component triples", component_triples},
      {3, "annotation collection", collection},
      {4, "annotation reuse", reuse},
      {5, "merge and adherence", merge_fixtures},
      {6, "valid_free is necessary", necessity},
      {7, "rule soundness suite", meta_suite},
      {8, "semantic laws", semantic_laws},
      {9, "atomic weakest preconditions", wp_atomic_laws},
      {10, "persistence and determinism", persistence},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failures;
    std::cout << "criterion " << c.id << " " << (r.pass ? "PASS" : "FAIL") << " " << c.name << ": " << r.detail
              << std::endl;
  }
  std::cout << "criterion 11 NOT REPRODUCIBLE proof-script line counts and the invoke_untyped case study: "
               "they need the original machine-checked proofs, which are not part of this repository; "
               "criteria 3 to 5 stand in for the reuse claim"
            << std::endl;
  std::cout << (failures ? "FAILED " + std::to_string(failures) + " criteria" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}

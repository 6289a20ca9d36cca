// Command-line front end. Exit codes: 0 holds, 1 violated, 2 fault or
// failed derivation, 3 usage or parse error.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "fannot/corpus.hpp"
#include "fannot/soundness.hpp"
#include "fannot/store.hpp"

using namespace fannot;

namespace {

enum Exit : int { kHolds = 0, kViolated = 1, kFault = 2, kUsage = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string project = "corpus";
  std::string params;
  unsigned workers = 1;
  bool audit = false;
  std::string format = "text";
};

struct Session {
  Project project;
  Workspace ws;
  bool corpus = false;
  std::string path;
  bool compact = false;
};

CorpusParams parse_params(const std::string& text) {
  CorpusParams cp;
  unsigned a = 0, b = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> a >> comma >> b) || comma != ',' || !in.eof())
    throw UsageError("--params expects <n_ids>,<n_prios>, got '" + text + "'");
  cp.n_ids = a;
  cp.n_prios = b;
  return cp;
}

Session open(const Common& c) {
  Session s;
  s.compact = c.format == "compact";
  if (c.project == "corpus") {
    s.corpus = true;
    s.project = corpus_project(c.params.empty() ? CorpusParams{} : parse_params(c.params));
  } else {
    if (!c.params.empty()) throw UsageError("--params only applies to the bundled corpus");
    s.path = c.project;
    s.project = load(c.project);
  }
  s.ws = workspace_of(s.project, c.workers);
  return s;
}

// Splits "program:property".
std::pair<std::string, std::string> split_key(const std::string& key) {
  const auto at = key.find(':');
  if (at == std::string::npos || at == 0 || at + 1 == key.size())
    throw UsageError("expected <program>:<property>, got '" + key + "'");
  return {key.substr(0, at), key.substr(at + 1)};
}

const Goal& need_goal(const Session& s, const std::string& key) {
  const Goal* g = s.project.goal(key);
  if (!g) throw UsageError("no goal '" + key + "' in the project");
  return *g;
}

const StoredAnnotation& need_annotation(const Session& s, const std::string& key) {
  const StoredAnnotation* a = s.project.annotation(key);
  if (!a) throw UsageError("no annotation '" + key + "' in the project");
  return *a;
}

int exit_of(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Holds: return kHolds;
    case VerdictKind::Violated: return kViolated;
    default: return kFault;
  }
}

// Keeps the worst exit code seen.
struct Outcome {
  int code = kHolds;
  void note(int c) { code = std::max(code, c); }
};

void report(const Session& s, const std::string& what, const Verdict& v, Outcome& out) {
  if (s.compact) {
    std::cout << what << " " << kind_name(v.kind) << " " << v.states << "\n";
  } else {
    std::cout << what << "\n" << v.to_string();
    if (!v.diagnostic.empty() && v.to_string().find(v.diagnostic) == std::string::npos)
      std::cout << "  " << v.diagnostic << "\n";
  }
  out.note(exit_of(v));
}

void report_audit(const Session& s, const Judgement& j, Outcome& out) {
  report(s, "audit", audit(s.ws, j), out);
}

// `program` is taken by value: callers pass names owned by the annotation table.
void store(Session& s, std::string program, const std::string& name, const AnnComp& ann) {
  s.project.put_annotation(program, name, ann);
  if (s.corpus) {
    std::cout << "not stored: the bundled corpus is read-only; use --project <file>\n";
    return;
  }
  save(s.project, s.path);
  std::cout << "stored " << program << ":" << name << " in " << s.path << "\n";
}

void print_lines(const std::vector<std::string>& lines) {
  for (const auto& l : lines) std::cout << l << "\n";
}

int cmd_check(Session& s, const std::vector<std::string>& triples, const std::vector<std::string>& annotators,
              bool rules) {
  Outcome out;
  if (triples.empty() && annotators.empty() && !rules) throw UsageError("nothing to check");
  for (const auto& k : triples) {
    const Goal& g = need_goal(s, k);
    report(s, "triple " + k, check_triple(s.ws, goal_triple(s.project, g, false)), out);
  }
  for (const auto& k : annotators) {
    const auto [prog, prop] = split_key(k);
    const Goal& g = need_goal(s, k);
    const StoredAnnotation& a = need_annotation(s, k);
    const Triple t = goal_triple(s.project, g, false);
    report(s, "annotator " + k, check_annotator(s.ws, Annotator{t.fixes, t.pre, t.prog, t.post, a.ann}), out);
  }
  if (rules)
    for (const auto& r : s.project.rules) report(s, "rule " + r.name, check_claim(s.ws, r.claim), out);
  return out.code;
}

int cmd_annotate(Session& s, const std::string& goal, const std::string& out_name, bool do_audit) {
  const Goal& g = need_goal(s, goal);
  const RuleDB db = build_rule_db(s.ws, s.project);
  const VcgResult r = vcg_prove(s.ws, db, goal_triple(s.project, g, false));
  Outcome out;
  if (!s.compact) {
    print_lines(r.log);
    std::cout << "annotation " << normalize(r.annotation).to_string() << "\n";
  }
  const Annotator& a = r.judgement.annotator();
  report(s, "annotator " + goal, check_annotator(s.ws, a), out);
  if (do_audit) report_audit(s, r.judgement, out);
  if (!out_name.empty() && out.code == kHolds) store(s, g.program, out_name, r.annotation);
  return out.code;
}

int cmd_reuse(Session& s, const std::string& goal, const std::string& with, const std::string& out_name,
              bool do_audit) {
  const Goal& g = need_goal(s, goal);
  const StoredAnnotation& base = need_annotation(s, with);
  if (base.program != g.program) throw UsageError("annotation '" + with + "' is about another program");
  const RuleDB db = build_rule_db(s.ws, s.project);
  const auto fixes = program_fixes(s.project, g.program);
  const StrongResult r = vcg_strong(s.ws, db, fixes, g.pre, base.ann, g.post);
  Outcome out;
  if (!s.compact) {
    print_lines(r.log);
    std::cout << "annotation " << normalize(r.annotation).to_string() << "\n";
  }
  report(s, "annotated triple " + goal, check_ann_triple(s.ws, r.ann_triple.ann_triple()), out);
  if (do_audit) report_audit(s, r.judgement, out);
  if (!out_name.empty() && out.code == kHolds) store(s, g.program, out_name, r.annotation);
  return out.code;
}

int cmd_merge(Session& s, const std::string& left, const std::string& right, const std::string& out_name) {
  const StoredAnnotation& a = need_annotation(s, left);
  const StoredAnnotation& b = need_annotation(s, right);
  if (a.program != b.program) throw UsageError("annotations are about different programs");
  AnnComp m;
  try {
    m = merge(a.ann, b.ann);
  } catch (const AnnError& e) {
    throw UsageError(e.what());
  }
  std::cout << "annotation " << normalize(m).to_string() << "\n";
  if (!out_name.empty()) store(s, a.program, out_name, m);
  return kHolds;
}

int cmd_diff(Session& s, const std::string& left, const std::string& right) {
  const auto lines = diff_annotations(need_annotation(s, left).ann, need_annotation(s, right).ann);
  print_lines(lines);
  return lines.empty() ? kHolds : kViolated;
}

int cmd_soundness(const Common& c, unsigned depth, unsigned full_steps, const std::vector<std::string>& rules) {
  MetaConfig cfg;
  cfg.max_depth = depth;
  cfg.full_annotation_steps = full_steps;
  cfg.rules = rules;
  for (const auto& r : rules)
    if (std::find(meta_rule_names().begin(), meta_rule_names().end(), r) == meta_rule_names().end())
      throw UsageError("unknown rule '" + r + "'");
  const MetaReport rep = run_meta_suite(cfg);
  if (c.format == "compact") {
    for (const auto& r : rep.rules) std::cout << r.rule << " " << r.violations << "\n";
  } else {
    std::cout << rep.to_string();
  }
  return rep.ok() ? kHolds : kViolated;
}

// Expected verdicts for the bundled example.
int cmd_corpus_verify(Session& s) {
  Outcome out;
  for (const auto& r : s.project.rules) report(s, "rule " + r.name, check_claim(s.ws, r.claim), out);
  for (const auto& g : s.project.goals) {
    const Verdict v = check_triple(s.ws, goal_triple(s.project, g, false));
    const bool expect_hold = g.property != "valid_queues_alone";
    if (s.compact) {
      std::cout << "triple " << g.key() << " " << kind_name(v.kind) << " " << v.states << "\n";
    } else {
      std::cout << "triple " << g.key() << " (expected " << (expect_hold ? "Holds" : "Violated") << ")\n"
                << v.to_string();
    }
    if (v.kind == VerdictKind::Fault) out.note(kFault);
    else if (v.holds() != expect_hold) out.note(kViolated);
  }
  const Goal& vf = need_goal(s, "new_tcb:valid_free");
  const Goal& vq = need_goal(s, "new_tcb:valid_queues");
  const Triple tf = goal_triple(s.project, vf, false);
  const Triple tq = goal_triple(s.project, vq, false);
  const AnnComp& free_ann = need_annotation(s, "new_tcb:valid_free").ann;
  report(s, "annotator new_tcb:valid_free",
         check_annotator(s.ws, Annotator{tf.fixes, tf.pre, tf.prog, tf.post, free_ann}), out);
  report(s, "annotated triple new_tcb:valid_queues",
         check_ann_triple(s.ws, AnnTriple{tq.fixes, tq.pre, need_annotation(s, "new_tcb:valid_queues").ann, tq.post}),
         out);
  report(s, "ordering new_tcb:combined",
         check_order(s.ws, Ordering{tq.fixes, tq.pre, tq.prog, need_annotation(s, "new_tcb:combined").ann}), out);
  return out.code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exhaustive checker for annotated state-monad programs"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool project) {
    if (project) {
      sub->add_option("--project", common.project, "project file, or 'corpus' for the bundled example");
      sub->add_option("--params", common.params, "corpus size <n_ids>,<n_prios>");
    }
    sub->add_option("--workers", common.workers, "enumeration threads")->check(CLI::Range(1u, 256u));
    sub->add_option("--format", common.format, "text or compact")->check(CLI::IsMember({"text", "compact"}));
  };

  std::vector<std::string> triples, annotators;
  bool rules = false;
  auto* check = app.add_subcommand("check", "check stored goals, annotations or rules by enumeration");
  add_common(check, true);
  check->add_option("--triple", triples, "goal <program>:<property>");
  check->add_option("--annotator", annotators, "goal with its stored annotation");
  check->add_flag("--rules", rules, "every registered rule");

  std::string goal, with, out_name, left, right;
  auto* annotate = app.add_subcommand("annotate", "prove a goal from the registered rules and collect an annotation");
  add_common(annotate, true);
  annotate->add_option("--goal", goal, "<program>:<property>")->required();
  annotate->add_option("--out", out_name, "store the annotation under this property name");
  annotate->add_flag("--audit", common.audit, "re-check every derived judgement by enumeration");

  auto* reuse = app.add_subcommand("reuse", "prove a goal assuming a stored annotation");
  add_common(reuse, true);
  reuse->add_option("--goal", goal, "<program>:<property>")->required();
  reuse->add_option("--with", with, "stored annotation <program>:<property>")->required();
  reuse->add_option("--out", out_name, "store the produced annotation under this property name");
  reuse->add_flag("--audit", common.audit, "re-check every derived judgement by enumeration");

  auto* merge_cmd = app.add_subcommand("merge", "stepwise conjunction of two stored annotations");
  add_common(merge_cmd, true);
  merge_cmd->add_option("left", left)->required();
  merge_cmd->add_option("right", right)->required();
  merge_cmd->add_option("--out", out_name, "store the merge under this property name");

  auto* diff = app.add_subcommand("diff", "per-step differences of two stored annotations");
  add_common(diff, true);
  diff->add_option("left", left)->required();
  diff->add_option("right", right)->required();

  unsigned depth = 3, full_steps = 2;
  std::vector<std::string> meta_rules;
  auto* soundness = app.add_subcommand("soundness", "exhaustive rule soundness on a one-boolean universe");
  add_common(soundness, false);
  soundness->add_option("--depth", depth, "program depth bound")->check(CLI::Range(1u, 3u));
  soundness->add_option("--full-steps", full_steps, "annotate every step assignment up to this many steps")
      ->check(CLI::Range(0u, 4u));
  soundness->add_option("--rule", meta_rules, "restrict to these rules");

  std::string emit_path;
  auto* corpus = app.add_subcommand("corpus", "the bundled example");
  corpus->require_subcommand(1);
  auto* emit = corpus->add_subcommand("emit", "write the example as a project file");
  emit->add_option("--params", common.params, "corpus size <n_ids>,<n_prios>");
  emit->add_option("path", emit_path, "output file; standard output when omitted");
  auto* verify = corpus->add_subcommand("verify", "check the example's rules, goals and stored annotations (or a copy of its file)");
  add_common(verify, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kHolds : kUsage;
  }

  try {
    if (soundness->parsed()) return cmd_soundness(common, depth, full_steps, meta_rules);
    if (emit->parsed()) {
      const Project p = corpus_project(common.params.empty() ? CorpusParams{} : parse_params(common.params));
      if (emit_path.empty()) std::cout << save_string(p);
      else save(p, emit_path);
      return kHolds;
    }
    Session s = open(common);
    if (check->parsed()) return cmd_check(s, triples, annotators, rules);
    if (annotate->parsed()) return cmd_annotate(s, goal, out_name, common.audit);
    if (reuse->parsed()) return cmd_reuse(s, goal, with, out_name, common.audit);
    if (merge_cmd->parsed()) return cmd_merge(s, left, right, out_name);
    if (diff->parsed()) return cmd_diff(s, left, right);
    if (verify->parsed()) return cmd_corpus_verify(s);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const StoreError& e) {
    std::cerr << "project error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "fault: " << e.what() << "\n";
    return kFault;
  }
}

#include "fannot/store.hpp"

#include <fstream>
#include <sstream>

namespace fannot {

namespace {

constexpr int kVersion = 1;

void walk_steps(const AnnComp& f, std::vector<const AnnComp*>& out) {
  if (f.op() == AnnOp::Step) {
    out.push_back(&f);
    return;
  }
  for (const auto& k : f.kids()) walk_steps(k, out);
}

std::string params_to_string(const std::vector<Binder>& params) {
  std::string s = "(";
  for (std::size_t i = 0; i < params.size(); ++i)
    s += (i ? " (" : "(") + params[i].name + " " + params[i].dom.to_string() + ")";
  return s + ")";
}

const SExpr& expect_section(const std::vector<SExpr>& top, std::size_t i, const char* name) {
  if (i >= top.size()) throw ParseError(std::string("missing section '") + name + "'", 1, 1);
  if (top[i].head() != name) top[i].fail(std::string("expected section '") + name + "'");
  return top[i];
}

const std::string& atom_of(const SExpr& s) {
  if (s.list) s.fail("expected a name");
  return s.atom;
}

void need(const SExpr& s, std::size_t n) {
  if (s.size() != n) s.fail("malformed entry: " + s.to_string());
}

}  // namespace

const Goal* Project::goal(std::string_view key) const {
  for (const auto& g : goals)
    if (g.key() == key) return &g;
  return nullptr;
}

const StoredAnnotation* Project::annotation(std::string_view key) const {
  for (const auto& a : annotations)
    if (a.key() == key) return &a;
  return nullptr;
}

void Project::put_annotation(const std::string& program, const std::string& property, const AnnComp& ann) {
  StoredAnnotation a{program, property, normalize(ann)};
  for (auto& x : annotations)
    if (x.key() == a.key()) {
      x = a;
      return;
    }
  annotations.push_back(a);
}

std::string save_string(const Project& p) {
  std::ostringstream os;
  os << "(fannot-project " << kVersion << ")\n";
  os << "(schema";
  for (const auto& [name, d] : p.schema.fields()) os << "\n  (" << name << " " << d.to_string() << ")";
  os << ")\n(preds";
  for (const auto& [name, d] : p.preds) {
    os << "\n  (define " << name << " (";
    for (std::size_t i = 0; i < d.params.size(); ++i) os << (i ? " " : "") << d.params[i];
    os << ") " << d.body.to_string() << ")";
  }
  os << ")\n(programs";
  for (const auto& [name, d] : p.programs)
    os << "\n  (program " << name << " " << params_to_string(d.params) << " " << d.body.to_string() << ")";
  os << ")\n(rules";
  for (const auto& r : p.rules) os << "\n  (rule " << r.name << " " << claim_to_string(r.claim) << ")";
  os << ")\n(goals";
  for (const auto& g : p.goals)
    os << "\n  (goal " << g.program << " " << g.property << " (pre " << g.pre.to_string() << ") "
       << g.post.to_string() << ")";
  os << ")\n(annotations";
  for (const auto& a : p.annotations)
    os << "\n  (annotation " << a.program << " " << a.property << " " << normalize(a.ann).to_string() << ")";
  os << ")\n";
  return os.str();
}

Project load_string(std::string_view text) {
  const auto top = parse_sexprs(text);
  if (top.empty() || top[0].head() != "fannot-project" || top[0].size() != 2)
    throw ParseError("missing header (fannot-project " + std::to_string(kVersion) + ")", 1, 1);
  if (!top[0][1].is_atom(std::to_string(kVersion))) top[0][1].fail("unsupported project version " + top[0][1].atom);
  if (top.size() > 7) top[7].fail("unexpected trailing term");
  Project p;

  const SExpr& schema = expect_section(top, 1, "schema");
  std::vector<std::pair<std::string, Domain>> fields;
  for (std::size_t i = 1; i < schema.size(); ++i) {
    need(schema[i], 2);
    fields.emplace_back(atom_of(schema[i][0]), read_domain(schema[i][1]));
  }
  try {
    p.schema = StateSchema(std::move(fields));
  } catch (const std::exception& e) {
    schema.fail(e.what());
  }

  const SExpr& preds = expect_section(top, 2, "preds");
  for (std::size_t i = 1; i < preds.size(); ++i) {
    const SExpr& d = preds[i];
    if (d.head() != "define") d.fail("expected (define name (params) body)");
    need(d, 4);
    PredDef def;
    if (!d[2].list) d[2].fail("expected a parameter list");
    for (const auto& x : d[2].items) def.params.push_back(atom_of(x));
    def.body = read_pred(d[3]);
    if (!p.preds.emplace(atom_of(d[1]), def).second) d.fail("predicate '" + d[1].atom + "' defined twice");
  }

  const SExpr& progs = expect_section(top, 3, "programs");
  for (std::size_t i = 1; i < progs.size(); ++i) {
    const SExpr& d = progs[i];
    if (d.head() != "program") d.fail("expected (program name (params) body)");
    need(d, 4);
    ProgramDef def;
    if (!d[2].list) d[2].fail("expected a parameter list");
    for (const auto& x : d[2].items) {
      need(x, 2);
      def.params.push_back({atom_of(x[0]), read_domain(x[1])});
    }
    def.body = read_comp(d[3]);
    if (!p.programs.emplace(atom_of(d[1]), def).second) d.fail("program '" + d[1].atom + "' defined twice");
  }

  const SExpr& rules = expect_section(top, 4, "rules");
  for (std::size_t i = 1; i < rules.size(); ++i) {
    const SExpr& r = rules[i];
    if (r.head() != "rule") r.fail("expected (rule name claim)");
    need(r, 3);
    p.rules.push_back({atom_of(r[1]), read_claim(r[2])});
  }

  const SExpr& goals = expect_section(top, 5, "goals");
  for (std::size_t i = 1; i < goals.size(); ++i) {
    const SExpr& g = goals[i];
    if (g.head() != "goal") g.fail("expected (goal program property (pre P) (post r Q))");
    need(g, 5);
    if (g[3].head() != "pre" || g[3].size() != 2) g[3].fail("expected (pre P)");
    p.goals.push_back({atom_of(g[1]), atom_of(g[2]), read_pred(g[3][1]), read_post(g[4])});
  }

  const SExpr& anns = expect_section(top, 6, "annotations");
  for (std::size_t i = 1; i < anns.size(); ++i) {
    const SExpr& a = anns[i];
    if (a.head() != "annotation") a.fail("expected (annotation program property ann)");
    need(a, 4);
    p.annotations.push_back({atom_of(a[1]), atom_of(a[2]), read_ann(a[3])});
  }

  auto problems = validate_project(p);
  if (!problems.empty()) {
    std::string msg = "project is inconsistent:";
    for (const auto& s : problems) msg += "\n  " + s;
    throw StoreError(msg);
  }
  return p;
}

void save(const Project& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StoreError("cannot write " + path);
  out << save_string(p);
  if (!out) throw StoreError("failed writing " + path);
}

Project load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_string(ss.str());
}

std::vector<std::string> validate_project(const Project& p) {
  std::vector<std::string> out;
  auto guard = [&](const std::string& where, auto f) {
    try {
      f();
    } catch (const std::exception& e) {
      out.push_back(where + ": " + e.what());
    }
  };
  guard("predicates", [&] { validate_defs(p.preds); });
  guard("programs", [&] { validate_programs(p.programs, p.preds); });
  for (const auto& [name, d] : p.preds) guard("predicate " + name, [&] { check_fields(d.body, p.schema, p.preds); });
  for (const auto& [name, d] : p.programs)
    guard("program " + name, [&] { check_fields(d.body, p.schema, p.programs); });
  for (const auto& r : p.rules) {
    guard("rule " + r.name, [&] {
      if (!std::holds_alternative<Triple>(r.claim) && !std::holds_alternative<Annotator>(r.claim))
        throw StoreError("rules must be triples or annotators");
      const auto& fixes = claim_fixes(r.claim);
      std::set<std::string> bound;
      for (const auto& b : fixes) bound.insert(b.name);
      const Comp& prog = std::holds_alternative<Triple>(r.claim) ? std::get<Triple>(r.claim).prog
                                                                 : std::get<Annotator>(r.claim).prog;
      const Pred& pre = std::holds_alternative<Triple>(r.claim) ? std::get<Triple>(r.claim).pre
                                                                : std::get<Annotator>(r.claim).pre;
      const PostPred& post = std::holds_alternative<Triple>(r.claim) ? std::get<Triple>(r.claim).post
                                                                     : std::get<Annotator>(r.claim).post;
      validate_refs(pre, p.preds);
      validate_refs(post.body, p.preds);
      validate_comp(prog, bound, p.programs, p.preds);
    });
  }
  for (const auto& g : p.goals) {
    guard("goal " + g.key(), [&] {
      if (!p.programs.count(g.program)) throw StoreError("unknown program '" + g.program + "'");
      validate_refs(g.pre, p.preds);
      validate_refs(g.post.body, p.preds);
    });
  }
  for (const auto& a : p.annotations) {
    guard("annotation " + a.key(), [&] {
      auto it = p.programs.find(a.program);
      if (it == p.programs.end()) throw StoreError("unknown program '" + a.program + "'");
      if (!(drop_ann(a.ann) == it->second.body)) throw StoreError("annotation does not match the program's steps");
      std::vector<const AnnComp*> steps;
      walk_steps(a.ann, steps);
      for (const auto* s : steps) validate_refs(s->pred(), p.preds);
    });
  }
  return out;
}

Workspace workspace_of(const Project& p, unsigned workers) {
  Workspace ws;
  ws.schema = std::make_shared<const StateSchema>(p.schema);
  ws.preds = p.preds;
  ws.programs = p.programs;
  ws.workers = workers;
  return ws;
}

std::vector<Binder> program_fixes(const Project& p, const std::string& program) {
  auto it = p.programs.find(program);
  if (it == p.programs.end()) throw StoreError("unknown program '" + program + "'");
  return it->second.params;
}

Triple goal_triple(const Project& p, const Goal& g, bool as_call) {
  auto fixes = program_fixes(p, g.program);
  Comp prog = p.programs.at(g.program).body;
  if (as_call) {
    std::vector<Expr> args;
    for (const auto& b : fixes) args.push_back(Expr::var(b.name));
    prog = Comp::call(g.program, std::move(args));
  }
  return {fixes, g.pre, prog, g.post};
}

RuleDB build_rule_db(const Workspace& ws, const Project& p) {
  RuleDB db;
  for (const auto& r : p.rules) {
    Established e = establish(ws, r.claim);
    if (!e.judgement) throw StoreError("rule " + r.name + " does not hold\n" + e.verdict.to_string());
    db.add(r.name, *e.judgement);
  }
  return db;
}

std::vector<std::string> diff_annotations(const AnnComp& f, const AnnComp& g) {
  if (!same_skeleton(f, g)) throw StoreError("annotations differ in shape");
  std::vector<const AnnComp*> fs, gs;
  walk_steps(f, fs);
  walk_steps(g, gs);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const auto a = conjuncts(normalize(fs[k]->pred()));
    const auto b = conjuncts(normalize(gs[k]->pred()));
    const std::set<Pred> as(a.begin(), a.end()), bs(b.begin(), b.end());
    std::vector<std::string> lines;
    for (const auto& c : a)
      if (!bs.count(c)) lines.push_back("  - " + c.to_string());
    for (const auto& c : b)
      if (!as.count(c)) lines.push_back("  + " + c.to_string());
    if (lines.empty()) continue;
    out.push_back("step " + std::to_string(k + 1) + " " + fs[k]->comp().to_string());
    out.insert(out.end(), lines.begin(), lines.end());
  }
  return out;
}

}  // namespace fannot

#include "fannot/check.hpp"

#include <atomic>
#include <mutex>
#include <thread>

namespace fannot {

void Workspace::validate() const {
  validate_defs(preds);
  validate_programs(programs, preds);
  for (const auto& [name, d] : preds) check_fields(d.body, *schema, preds);
  for (const auto& [name, p] : programs) check_fields(p.body, *schema, programs);
}

const char* kind_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Holds: return "Holds";
    case VerdictKind::Violated: return "Violated";
    case VerdictKind::Fault: return "Fault";
  }
  return "?";
}

std::string Counterexample::to_string() const {
  std::string s;
  if (!bindings.empty()) {
    s += "  at";
    for (std::size_t i = 0; i < bindings.size(); ++i)
      s += (i ? ", " : " ") + bindings[i].first + " = " + bindings[i].second.to_string();
    s += "\n";
  }
  s += "  state #" + std::to_string(state_index) + ": " + state.to_string() + "\n";
  if (outcome) s += "  outcome: " + outcome->to_string() + "\n";
  return s;
}

std::string Verdict::to_string() const {
  std::string s = std::string(kind_name(kind)) + " (" + std::to_string(states) + " states)\n";
  if (cex) s += cex->to_string();
  if (!diagnostic.empty()) s += std::string(kind == VerdictKind::Fault ? "  fault: " : "  note: ") + diagnostic + "\n";
  return s;
}

std::vector<Binder> used_fixes(const std::vector<Binder>& fixes, const std::set<std::string>& vars) {
  std::vector<Binder> out;
  std::set<std::string> seen;
  for (const auto& f : fixes)
    if (vars.count(f.name) && seen.insert(f.name).second) out.push_back(f);
  for (const auto& v : vars)
    if (!seen.count(v)) throw CheckError("variable '" + v + "' is not fixed");
  return out;
}

DomainCtx ctx_of(const std::vector<Binder>& fixes) {
  DomainCtx ctx;
  for (const auto& f : fixes) ctx[f.name] = f.dom;
  return ctx;
}

std::string fixes_to_string(const std::vector<Binder>& fixes) {
  std::string s = "(fixes";
  for (const auto& f : fixes) s += " (" + f.name + " " + f.dom.to_string() + ")";
  return s + ")";
}

namespace {

struct Failure {
  std::uint64_t index = UINT64_MAX;
  VerdictKind kind = VerdictKind::Holds;
  Probe probe;
  State state;
  std::uint64_t state_pos = 0;
  std::vector<std::pair<std::string, Value>> bindings;
};

}  // namespace

Verdict scan(const Workspace& ws, const std::vector<Binder>& fixes, const std::set<std::string>& fields,
             const StateTest& test) {
  const StateSchema& schema = *ws.schema;
  std::vector<bool> relevant(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) relevant[i] = fields.count(schema.fields()[i].first) > 0;
  StateSpace space(ws.schema, relevant);

  std::vector<const std::vector<Value>*> cols;
  std::uint64_t combos = 1;
  for (const auto& f : fixes) {
    cols.push_back(&f.dom.values());
    const auto n = cols.back()->size();
    if (n != 0 && combos > UINT64_MAX / n) throw CheckError("too many variable assignments to enumerate");
    combos *= n;
  }
  const std::uint64_t per = space.size();
  if (per != 0 && combos > UINT64_MAX / per) throw CheckError("search space too large");
  const std::uint64_t total = combos * per;

  std::atomic<std::uint64_t> best{UINT64_MAX};
  std::mutex mu;
  Failure found;

  auto bind_combo = [&](Env& env, std::uint64_t combo, std::vector<std::pair<std::string, Value>>* out) {
    env = Env();
    std::vector<Value> vals(fixes.size());
    for (std::size_t i = fixes.size(); i-- > 0;) {
      const auto& col = *cols[i];
      vals[i] = col[combo % col.size()];
      combo /= col.size();
    }
    for (std::size_t i = 0; i < fixes.size(); ++i) {
      env.push(fixes[i].name, vals[i]);
      if (out) out->emplace_back(fixes[i].name, vals[i]);
    }
  };

  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    Env env;
    std::uint64_t current = UINT64_MAX;
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      if (idx >= best.load(std::memory_order_relaxed)) return;
      const std::uint64_t combo = idx / per;
      if (combo != current) {
        bind_combo(env, combo, nullptr);
        current = combo;
      }
      const std::uint64_t pos = idx % per;
      State s = space.at(pos);
      Failure f;
      try {
        Probe p = test(env, s);
        if (p.ok) continue;
        f.kind = VerdictKind::Violated;
        f.probe = std::move(p);
      } catch (const std::exception& e) {
        f.kind = VerdictKind::Fault;
        f.probe = Probe::fail(e.what());
      }
      f.index = idx;
      f.state = std::move(s);
      f.state_pos = pos;
      std::lock_guard lock(mu);
      if (idx < found.index) {
        found = std::move(f);
        best.store(idx);
      }
      return;
    }
  };

  const unsigned workers = ws.workers == 0 ? 1 : ws.workers;
  if (workers == 1 || total < 4096) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = std::min<std::uint64_t>(total, w * chunk);
      const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
      pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  Verdict v = Verdict::hold(schema.universe_size());
  if (found.index == UINT64_MAX) return v;
  v.kind = found.kind;
  Counterexample cex;
  Env scratch;
  bind_combo(scratch, found.index / per, &cex.bindings);
  cex.state_index = space.full_index(found.state_pos);
  cex.state = std::move(found.state);
  cex.outcome = std::move(found.probe.outcome);
  v.cex = std::move(cex);
  v.diagnostic = std::move(found.probe.note);
  return v;
}

Verdict scan_values(const Workspace& ws, const std::vector<Binder>& fixes,
                    const std::function<Probe(Env& env)>& test) {
  return scan(ws, fixes, {}, [&](Env& env, const State&) { return test(env); });
}

Verdict entails(const Workspace& ws, const std::vector<Binder>& fixes, const Pred& p, const Pred& q) {
  std::set<std::string> vars = free_vars(p);
  collect_free_vars(q, vars);
  std::set<std::string> fields;
  collect_fields(p, ws.preds, fields);
  collect_fields(q, ws.preds, fields);
  return scan(ws, used_fixes(fixes, vars), fields, [&](Env& env, const State& s) {
    if (eval_pred(p, ws.preds, env, s) && !eval_pred(q, ws.preds, env, s)) return Probe::fail();
    return Probe::pass();
  });
}

Verdict equivalent(const Workspace& ws, const std::vector<Binder>& fixes, const Pred& p, const Pred& q) {
  std::set<std::string> vars = free_vars(p);
  collect_free_vars(q, vars);
  std::set<std::string> fields;
  collect_fields(p, ws.preds, fields);
  collect_fields(q, ws.preds, fields);
  return scan(ws, used_fixes(fixes, vars), fields, [&](Env& env, const State& s) {
    if (eval_pred(p, ws.preds, env, s) != eval_pred(q, ws.preds, env, s)) return Probe::fail();
    return Probe::pass();
  });
}

Verdict entails_post(const Workspace& ws, const std::vector<Binder>& fixes, const Domain& ret_dom, const PostPred& p,
                     const PostPred& q) {
  std::set<std::string> avoid = free_vars(p);
  collect_free_vars(q.body, avoid);
  for (const auto& f : fixes) avoid.insert(f.name);
  const std::string r = fresh_name("ret", avoid);
  Pred pb = rename(p.body, p.ret, r);
  Pred qb = rename(q.body, q.ret, r);
  std::vector<Binder> all = fixes;
  all.push_back({r, ret_dom});
  return entails(ws, all, pb, qb);
}

}  // namespace fannot

#include "fannot/corpus.hpp"

namespace fannot {

namespace {

void check_params(const CorpusParams& cp) {
  if (cp.n_ids < 1 || cp.n_prios < 1) throw StoreError("corpus parameters must be at least 1");
}

std::string ids_dom(const CorpusParams& cp) { return "(id " + std::to_string(cp.n_ids) + ")"; }
std::string prio_dom(const CorpusParams& cp) { return "(nat 0 " + std::to_string(cp.n_prios - 1) + ")"; }
std::string tcb_dom(const CorpusParams& cp) { return "(record (priority " + prio_dom(cp) + "))"; }

Triple triple(const std::string& text) { return std::get<Triple>(read_claim(parse_sexpr(text))); }

// Replaces the size placeholders in a term template.
std::string sized(std::string text, const CorpusParams& cp) {
  auto sub = [&](const std::string& key, const std::string& val) {
    for (std::size_t at = text.find(key); at != std::string::npos; at = text.find(key, at + val.size()))
      text.replace(at, key.size(), val);
  };
  sub("$ID", ids_dom(cp));
  sub("$PRIO", prio_dom(cp));
  sub("$TCB", tcb_dom(cp));
  return text;
}

constexpr const char* kFreeIds =
    "(do-a (<- i (ann (pred valid_free) (call alloc)))"
    " (<- tcb (ann (pred valid_free_except i) (call create_tcb p)))"
    " (ann (pred valid_free_except i) (call init_tcb tcb i))"
    " (ann (pred valid_free) (call enqueue_tcb i p))"
    " (ann (pred valid_free) (return i)))";

constexpr const char* kQueues =
    "(do-a (<- i (ann (pred valid_queues) (call alloc)))"
    " (<- tcb (ann (pred valid_queues) (call create_tcb p)))"
    " (ann (and (pred valid_queues) (pred not_queued i) (= (get tcb priority) p)) (call init_tcb tcb i))"
    " (ann (and (pred valid_queues) (pred tcb_at_prio i p)) (call enqueue_tcb i p))"
    " (ann (pred valid_queues) (return i)))";

}  // namespace

StateSchema corpus_schema(const CorpusParams& cp) {
  check_params(cp);
  return StateSchema({
      {"ids", parse_domain(sized("(set $ID)", cp))},
      {"tcbs", parse_domain(sized("(map $ID $TCB absent)", cp))},
      {"queues", parse_domain(sized("(map $PRIO (seq $ID " + std::to_string(cp.n_ids) + ") total)", cp))},
  });
}

PredDefs corpus_preds(const CorpusParams& cp) {
  check_params(cp);
  PredDefs d;
  d["valid_id"] = {{"i"}, parse_pred("(iff (in i (field ids)) (not-in i (dom (field tcbs))))")};
  d["valid_free"] = {{}, parse_pred(sized("(forall id $ID (pred valid_id id))", cp))};
  d["valid_free_except"] = {
      {"i"}, parse_pred(sized("(and (forall id $ID (imp (not (= id i)) (pred valid_id id)))"
                              " (not-in i (dom (field tcbs))) (not-in i (field ids)))",
                              cp))};
  d["tcb_at_prio"] = {{"i", "p"},
                      parse_pred("(and (in i (dom (field tcbs))) (= (get (the (lookup (field tcbs) i)) priority) p))")};
  d["valid_queues"] = {
      {}, parse_pred(sized("(forall p $PRIO (forall i $ID (imp (in i (apply (field queues) p)) (pred tcb_at_prio i p))))",
                           cp))};
  d["not_queued"] = {{"i"}, parse_pred(sized("(forall p $PRIO (not-in i (apply (field queues) p)))", cp))};
  return d;
}

ProgramTable corpus_programs(const CorpusParams& cp) {
  check_params(cp);
  const Domain id = parse_domain(ids_dom(cp));
  const Domain prio = parse_domain(prio_dom(cp));
  const Domain tcb = parse_domain(tcb_dom(cp));
  ProgramTable t;
  t["alloc"] = {{}, parse_comp("(do (<- ids (gets ids)) (<- i (select ids))"
                               " (put ids (set-minus ids (set-of i))) (return i))")};
  t["create_tcb"] = {{{"p", prio}}, parse_comp("(return (rec-upd (lit (record (priority 0))) priority p))")};
  t["init_tcb"] = {{{"tcb", tcb}, {"i", id}},
                   parse_comp("(do (<- tcbs (gets tcbs)) (put tcbs (map-upd tcbs i tcb)))")};
  t["enqueue_tcb"] = {{{"i", id}, {"p", prio}},
                      parse_comp("(do (<- qs (gets queues)) (<- q (return (apply qs p)))"
                                 " (put queues (assign qs p (cons i q))))")};
  t["new_tcb"] = {{{"p", prio}},
                  parse_comp("(do (<- i (call alloc)) (<- tcb (call create_tcb p)) (call init_tcb tcb i)"
                             " (call enqueue_tcb i p) (return i))")};
  return t;
}

AnnComp corpus_free_ids_annotation() { return normalize(parse_ann(kFreeIds)); }
AnnComp corpus_queues_annotation() { return normalize(parse_ann(kQueues)); }
AnnComp corpus_combined_annotation() { return merge(corpus_free_ids_annotation(), corpus_queues_annotation()); }

Project corpus_project(const CorpusParams& cp) {
  Project p;
  p.schema = corpus_schema(cp);
  p.preds = corpus_preds(cp);
  p.programs = corpus_programs(cp);

  auto rule = [&](const std::string& name, const std::string& text) {
    p.rules.push_back({name, triple(sized(text, cp))});
  };
  // Component triples of the allocator.
  rule("alloc_valid_free",
       "(triple (fixes) (pre (pred valid_free)) (prog (call alloc)) (post i (pred valid_free_except i)))");
  rule("create_keeps_free_except",
       "(triple (fixes (p $PRIO) (i $ID)) (pre (pred valid_free_except i)) (prog (call create_tcb p))"
       " (post _ (pred valid_free_except i)))");
  rule("init_valid_free",
       "(triple (fixes (tcb $TCB) (i $ID)) (pre (pred valid_free_except i)) (prog (call init_tcb tcb i))"
       " (post _ (pred valid_free)))");
  rule("enqueue_valid_free",
       "(triple (fixes (i $ID) (p $PRIO)) (pre (pred valid_free)) (prog (call enqueue_tcb i p))"
       " (post _ (pred valid_free)))");
  rule("enqueue_valid_queues",
       "(triple (fixes (i $ID) (p $PRIO)) (pre (and (pred tcb_at_prio i p) (pred valid_queues)))"
       " (prog (call enqueue_tcb i p)) (post _ (pred valid_queues)))");
  rule("init_valid_queues",
       "(triple (fixes (tcb $TCB) (i $ID)) (pre (and (pred not_queued i) (pred valid_queues)))"
       " (prog (call init_tcb tcb i)) (post _ (pred valid_queues)))");
  // Frame facts the queue proof also needs.
  rule("alloc_valid_queues",
       "(triple (fixes) (pre (pred valid_queues)) (prog (call alloc)) (post _ (pred valid_queues)))");
  rule("create_valid_queues",
       "(triple (fixes (p $PRIO)) (pre (pred valid_queues)) (prog (call create_tcb p)) (post _ (pred valid_queues)))");
  rule("create_priority",
       "(triple (fixes (p $PRIO)) (pre true) (prog (call create_tcb p)) (post t (= (get t priority) p)))");
  rule("init_tcb_at_prio",
       "(triple (fixes (tcb $TCB) (i $ID) (p $PRIO)) (pre (= (get tcb priority) p)) (prog (call init_tcb tcb i))"
       " (post _ (pred tcb_at_prio i p)))");

  p.goals.push_back({"new_tcb", "valid_free", parse_pred("(pred valid_free)"), {"_", parse_pred("(pred valid_free)")}});
  p.goals.push_back({"new_tcb", "valid_queues", parse_pred("(and (pred valid_free) (pred valid_queues))"),
                     {"_", parse_pred("(pred valid_queues)")}});
  p.goals.push_back({"new_tcb", "valid_queues_alone", parse_pred("(pred valid_queues)"),
                     {"_", parse_pred("(pred valid_queues)")}});

  p.put_annotation("new_tcb", "valid_free", corpus_free_ids_annotation());
  p.put_annotation("new_tcb", "valid_queues", corpus_queues_annotation());
  p.put_annotation("new_tcb", "combined", corpus_combined_annotation());
  return p;
}

}  // namespace fannot

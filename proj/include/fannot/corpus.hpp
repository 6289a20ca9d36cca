#pragma once

// The bundled example: a thread-control-block allocator with a free-id
// invariant and per-priority scheduler queues, over a finite universe.

#include "fannot/store.hpp"

namespace fannot {

struct CorpusParams {
  unsigned n_ids = 3;
  unsigned n_prios = 2;  // queue length bound is n_ids
};

StateSchema corpus_schema(const CorpusParams& cp);
PredDefs corpus_preds(const CorpusParams& cp);
ProgramTable corpus_programs(const CorpusParams& cp);

// Expected annotations of new_tcb's body.
AnnComp corpus_free_ids_annotation();  // valid_free proof
AnnComp corpus_queues_annotation();    // valid_queues proof reusing the above
AnnComp corpus_combined_annotation();  // stepwise conjunction of the two

// Schema, definitions, the component triples as rules, the new_tcb goals
// and the three annotations above.
Project corpus_project(const CorpusParams& cp);

}  // namespace fannot

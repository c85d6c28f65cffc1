#ifndef OFEE_SYNTHETIC_H_
#define OFEE_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ofee/codec.h"
#include "ofee/event_model.h"
#include "ofee/generation.h"

namespace ofee::synthetic {

// Template-generated contexts over three event types (Life_Die,
// Movement_Transport, Conflict_Attack) with zero, one or two events each.
// Doc ids are "<prefix>-<index>".
std::vector<ContextInstance> MakeCorpus(int n_contexts, uint64_t seed,
                                        const std::string &prefix);

// Exact generator: every gold trigger at score 0 (one beam per event), the
// empty token for negative contexts, a few distractors far down the beam,
// and the gold argument target for every gold trigger word.
Script OracleScript(const std::vector<ContextInstance> &instances,
                    const CodecConfig &codec = {});

// Noisy generator: the gold triggers always sit inside the top 10, but beam
// scores for gold and distractor hypotheses come from the same distribution,
// so the best beam is often wrong.
Script NoisyScript(const std::vector<ContextInstance> &instances,
                   uint64_t seed, const CodecConfig &codec = {});

struct BundleSizes {
  int train = 50;
  int dev = 50;
  int test = 50;
};

// Writes {train,dev,test}.jsonl, oracle_script.jsonl, noisy_script.jsonl and
// the run configs oracle.json / noisy.json into `dir`.
void WriteBundle(const std::string &dir, const BundleSizes &sizes,
                 uint64_t seed);

}  // namespace ofee::synthetic

#endif  // OFEE_SYNTHETIC_H_

#ifndef OFEE_METRICS_H_
#define OFEE_METRICS_H_

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ofee/event_model.h"

namespace ofee {

// Matching keys:
//   Trig-I  (trigger word)
//   Trig-C  (trigger word, event type)
//   Arg-I   (entity, event type)
//   Arg-C   (entity, role, event type)
enum class Subtask { kTrigI = 0, kTrigC = 1, kArgI = 2, kArgC = 3 };

inline constexpr std::array<Subtask, 4> kAllSubtasks = {
    Subtask::kTrigI, Subtask::kTrigC, Subtask::kArgI, Subtask::kArgC};

std::string SubtaskName(Subtask subtask);       // "Trig-I", ...
std::string SubtaskKeyName(Subtask subtask);    // "trig_i", ...
Subtask SubtaskFromName(const std::string &name);  // accepts either form

struct MatchCounts {
  long n_correct = 0;
  long n_pred = 0;
  long n_gold = 0;

  MatchCounts &operator+=(const MatchCounts &o) {
    n_correct += o.n_correct;
    n_pred += o.n_pred;
    n_gold += o.n_gold;
    return *this;
  }
  friend bool operator==(const MatchCounts &, const MatchCounts &) = default;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct SubtaskScore {
  MatchCounts counts;
  PRF prf;
};

struct EvalReport {
  std::array<SubtaskScore, 4> scores;

  const SubtaskScore &operator[](Subtask s) const {
    return scores[static_cast<size_t>(s)];
  }
  SubtaskScore &operator[](Subtask s) { return scores[static_cast<size_t>(s)]; }

  nlohmann::json ToJson() const;
};

// Multiset matching within one context: correct = sum over keys of
// min(pred count, gold count).
MatchCounts MatchCountsFor(const std::vector<EventFrame> &pred,
                           const std::vector<EventFrame> &gold,
                           Subtask subtask);

// P = c/p, R = c/g, F1 = 2PR/(P+R), each 0 when undefined. Throws
// Error(kInvalidArgument) on negative counts or c > min(p, g).
PRF F1FromCounts(long n_correct, long n_pred, long n_gold);

using Prediction = std::pair<std::string, std::vector<EventFrame>>;

// Micro-averaged over the corpus. Gold documents without a prediction count
// as empty predictions; an unknown or repeated doc_id throws Error(kData).
EvalReport EvaluateCorpus(const std::vector<Prediction> &predictions,
                          const std::vector<ContextInstance> &gold);

}  // namespace ofee

#endif  // OFEE_METRICS_H_

#ifndef OFEE_SELECTOR_H_
#define OFEE_SELECTOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ofee/codec.h"
#include "ofee/event_model.h"
#include "ofee/generation.h"

namespace ofee {

struct SelectorTrainConfig {
  double margin = 0.5;  // in [-1, 1]
  int negatives_k = 5;
  double learning_rate = 0.005;
  int epochs = 10;
  uint64_t seed = 13;

  void Validate() const;
};

// Fused-score selection: keep a candidate iff
//   alpha * softmax(rank)_i + (1 - alpha) * softmax(beam)_i > theta.
struct SelectionConfig {
  double alpha = 0.4;
  double theta = 0.2;

  void Validate() const;
};

// One context with its positive (gold) and negative candidate texts.
struct RankingExample {
  std::string context;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

// Scores a (context, candidate text) pair. TrainStep applies one subgradient
// update of the margin hinge objective over the batch and returns the batch
// loss measured before the update.
class RankScorer {
 public:
  virtual ~RankScorer() = default;

  virtual double Score(std::string_view context,
                       std::string_view candidate_text) const = 0;
  virtual double TrainStep(std::span<const RankingExample> batch,
                           double margin, double learning_rate) = 0;
};

using SparseVector = std::vector<std::pair<uint32_t, double>>;

// Linear model over hashed word unigram/bigram features of the concatenated
// "context <sep> candidate" token sequence plus character trigrams of the
// candidate. Feature vectors are L2-normalized.
class HashedNgramScorer : public RankScorer {
 public:
  static constexpr uint32_t kDefaultDim = 1u << 18;
  static constexpr const char *kFormat = "ofee-hashed-ngram-scorer";
  static constexpr int kVersion = 1;

  explicit HashedNgramScorer(uint32_t dim = kDefaultDim);

  double Score(std::string_view context,
               std::string_view candidate_text) const override;
  double TrainStep(std::span<const RankingExample> batch, double margin,
                   double learning_rate) override;

  SparseVector Features(std::string_view context,
                        std::string_view candidate_text) const;

  // Hinge objective over the batch and its subgradient w.r.t. the weights
  // (zero at kinks). Gradient entries are sorted by index.
  double Loss(std::span<const RankingExample> batch, double margin) const;
  std::pair<double, SparseVector> LossAndGradient(
      std::span<const RankingExample> batch, double margin) const;

  uint32_t dim() const { return static_cast<uint32_t>(weights_.size()); }
  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }

  nlohmann::json ToJson() const;
  static HashedNgramScorer FromJson(const nlohmann::json &j);

 private:
  double Dot(const SparseVector &features) const;

  std::vector<double> weights_;
};

// Sum over all (positive, negative) pairs of max(0, margin - pos + neg).
// Throws Error(kInvalidArgument) if either list is empty.
double HingeLoss(std::span<const double> pos_scores,
                 std::span<const double> neg_scores, double margin);

// Canonical text the scorer sees for a candidate ("w [T] [and] ..." or the
// empty token).
std::string CandidateText(const TriggerCandidate &candidate,
                          const CodecConfig &codec = {});

// Candidate texts whose triggers share nothing with `gold`, sampled
// uniformly without replacement (all of them when at most k qualify). For a
// gold list without events the empty candidate counts as correct.
std::vector<std::string> SampleNegatives(const CandidateList &candidates,
                                         const std::vector<Trigger> &gold,
                                         int k, uint64_t seed,
                                         const CodecConfig &codec = {});

struct SelectorExample {
  std::string context;
  std::vector<Trigger> gold;
  CandidateList candidates;
};

struct SelectorTrainReport {
  std::vector<double> loss_trace;  // summed loss per epoch
  size_t trained_instances = 0;
  size_t skipped_instances = 0;    // no negative available
};

// Contrastive training: positives are the gold triggers encoded via the
// codec (the empty token for contexts without events), negatives come from
// SampleNegatives. Throws Error(kData, "untrainable dataset") when no
// instance yields a negative.
SelectorTrainReport TrainSelector(RankScorer &scorer,
                                  const std::vector<SelectorExample> &data,
                                  const SelectorTrainConfig &cfg = {},
                                  const CodecConfig &codec = {});

std::vector<double> Softmax(std::span<const double> scores);

// alpha * softmax(rank) + (1 - alpha) * softmax(beam), elementwise.
std::vector<double> FuseScores(std::span<const double> rank_scores,
                               std::span<const double> beam_scores,
                               double alpha);

struct Selection {
  std::vector<Trigger> triggers;  // union over selected candidates, deduped
  std::vector<size_t> selected;   // candidate indices
  std::vector<double> fused;
  // Every candidate tied at exactly theta, so nothing passed the strict test.
  bool tie_at_threshold = false;
};

// Sets rank_score on every candidate.
void ScoreCandidates(CandidateList &list, const RankScorer &scorer,
                     const CodecConfig &codec = {});

// Selection over candidates that already carry rank scores. Throws
// Error(kInvalidArgument) if any rank score is missing.
Selection SelectScored(const CandidateList &list, const SelectionConfig &cfg);

// Scores, fuses and thresholds; rank_score and fused_score are written back
// into `list`. An empty list yields an empty selection.
Selection FuseAndSelect(CandidateList &list, const RankScorer &scorer,
                        const SelectionConfig &cfg,
                        const CodecConfig &codec = {});

}  // namespace ofee

#endif  // OFEE_SELECTOR_H_

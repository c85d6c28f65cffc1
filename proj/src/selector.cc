#include "ofee/selector.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "ofee/common.h"

namespace ofee {

using nlohmann::json;

namespace {

constexpr const char *kSeparator = "<sep>";

std::vector<std::string> Tokens(std::string_view text) {
  std::string lowered = NormalizeWhitespace(text);
  for (auto &c : lowered) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (lowered.empty()) return {};
  return SplitOn(lowered, " ");
}

// Feature bookkeeping for one batch: every distinct text is featurized once.
struct ScoredExample {
  std::vector<SparseVector> pos;
  std::vector<SparseVector> neg;
  std::vector<double> pos_scores;
  std::vector<double> neg_scores;
};

void AddScaled(std::map<uint32_t, double> &acc, const SparseVector &v,
               double scale) {
  for (const auto &[i, x] : v) acc[i] += scale * x;
}

uint64_t MixSeed(uint64_t seed, uint64_t a, uint64_t b) {
  std::string key = std::to_string(seed) + ":" + std::to_string(a) + ":" +
                    std::to_string(b);
  return Fingerprint(key);
}

}  // namespace

void SelectorTrainConfig::Validate() const {
  if (!(margin >= -1.0 && margin <= 1.0)) {
    throw Error(ErrorKind::kConfig, "margin must lie in [-1, 1]");
  }
  if (negatives_k < 1) throw Error(ErrorKind::kConfig, "negatives_k must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorKind::kConfig, "learning_rate must be positive");
  }
  if (epochs < 1) throw Error(ErrorKind::kConfig, "epochs must be >= 1");
}

void SelectionConfig::Validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::kConfig, "alpha and theta must lie in [0, 1]");
  }
}

HashedNgramScorer::HashedNgramScorer(uint32_t dim) {
  if (dim == 0) throw Error(ErrorKind::kConfig, "feature dimension must be > 0");
  weights_.assign(dim, 0.0);
}

SparseVector HashedNgramScorer::Features(
    std::string_view context, std::string_view candidate_text) const {
  std::vector<std::string> seq = Tokens(context);
  seq.push_back(kSeparator);
  for (auto &t : Tokens(candidate_text)) seq.push_back(std::move(t));

  std::map<uint32_t, double> counts;
  auto add = [&](const std::string &feature) {
    counts[static_cast<uint32_t>(Fingerprint(feature) % weights_.size())] +=
        1.0;
  };
  for (size_t i = 0; i < seq.size(); ++i) {
    add("u:" + seq[i]);
    if (i + 1 < seq.size()) add("b:" + seq[i] + "|" + seq[i + 1]);
  }
  std::string padded = "^" + NormalizeWhitespace(candidate_text) + "$";
  for (size_t i = 0; i + 3 <= padded.size(); ++i) {
    add("c:" + padded.substr(i, 3));
  }

  double norm = 0.0;
  for (const auto &[i, x] : counts) norm += x * x;
  norm = std::sqrt(norm);
  SparseVector features(counts.begin(), counts.end());
  for (auto &[i, x] : features) x /= norm;
  return features;
}

double HashedNgramScorer::Dot(const SparseVector &features) const {
  double s = 0.0;
  for (const auto &[i, x] : features) s += weights_[i] * x;
  return s;
}

double HashedNgramScorer::Score(std::string_view context,
                                std::string_view candidate_text) const {
  return Dot(Features(context, candidate_text));
}

std::pair<double, SparseVector> HashedNgramScorer::LossAndGradient(
    std::span<const RankingExample> batch, double margin) const {
  double loss = 0.0;
  std::map<uint32_t, double> grad;
  for (const auto &ex : batch) {
    ScoredExample se;
    for (const auto &p : ex.positives) {
      se.pos.push_back(Features(ex.context, p));
      se.pos_scores.push_back(Dot(se.pos.back()));
    }
    for (const auto &n : ex.negatives) {
      se.neg.push_back(Features(ex.context, n));
      se.neg_scores.push_back(Dot(se.neg.back()));
    }
    for (size_t i = 0; i < se.pos.size(); ++i) {
      for (size_t j = 0; j < se.neg.size(); ++j) {
        double term = margin - se.pos_scores[i] + se.neg_scores[j];
        if (term <= 0.0) continue;
        loss += term;
        AddScaled(grad, se.pos[i], -1.0);
        AddScaled(grad, se.neg[j], 1.0);
      }
    }
  }
  return {loss, SparseVector(grad.begin(), grad.end())};
}

double HashedNgramScorer::Loss(std::span<const RankingExample> batch,
                               double margin) const {
  double loss = 0.0;
  for (const auto &ex : batch) {
    if (ex.positives.empty() || ex.negatives.empty()) continue;
    std::vector<double> pos, neg;
    for (const auto &p : ex.positives) pos.push_back(Score(ex.context, p));
    for (const auto &n : ex.negatives) neg.push_back(Score(ex.context, n));
    loss += HingeLoss(pos, neg, margin);
  }
  return loss;
}

double HashedNgramScorer::TrainStep(std::span<const RankingExample> batch,
                                    double margin, double learning_rate) {
  auto [loss, grad] = LossAndGradient(batch, margin);
  for (const auto &[i, g] : grad) weights_[i] -= learning_rate * g;
  return loss;
}

json HashedNgramScorer::ToJson() const {
  json weights = json::array();
  for (uint32_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0.0) weights.push_back({i, weights_[i]});
  }
  return {{"format", kFormat},
          {"version", kVersion},
          {"dim", weights_.size()},
          {"weights", std::move(weights)}};
}

HashedNgramScorer HashedNgramScorer::FromJson(const json &j) {
  try {
    if (j.at("format").get<std::string>() != kFormat) {
      throw Error(ErrorKind::kData, "unknown scorer format");
    }
    if (j.at("version").get<int>() != kVersion) {
      throw Error(ErrorKind::kData, "unsupported scorer version");
    }
    HashedNgramScorer scorer(j.at("dim").get<uint32_t>());
    for (const auto &entry : j.at("weights")) {
      uint32_t i = entry.at(0).get<uint32_t>();
      if (i >= scorer.weights_.size()) {
        throw Error(ErrorKind::kData, "weight index out of range");
      }
      scorer.weights_[i] = entry.at(1).get<double>();
    }
    return scorer;
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kData, std::string("bad scorer blob: ") + e.what());
  }
}

double HingeLoss(std::span<const double> pos_scores,
                 std::span<const double> neg_scores, double margin) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "hinge loss needs positive and negative scores");
  }
  double loss = 0.0;
  for (double p : pos_scores) {
    for (double n : neg_scores) loss += std::max(0.0, margin - p + n);
  }
  return loss;
}

std::string CandidateText(const TriggerCandidate &candidate,
                          const CodecConfig &codec) {
  return EncodeTriggers(candidate.triggers, codec);
}

std::vector<std::string> SampleNegatives(const CandidateList &candidates,
                                         const std::vector<Trigger> &gold,
                                         int k, uint64_t seed,
                                         const CodecConfig &codec) {
  std::vector<size_t> eligible;
  for (size_t i = 0; i < candidates.candidates.size(); ++i) {
    const auto &c = candidates.candidates[i];
    bool correct = c.triggers.empty() && gold.empty();
    for (const auto &t : c.triggers) {
      if (std::find(gold.begin(), gold.end(), t) != gold.end()) correct = true;
    }
    if (!correct) eligible.push_back(i);
  }
  if (k > 0 && eligible.size() > static_cast<size_t>(k)) {
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates.
    for (size_t i = 0; i < static_cast<size_t>(k); ++i) {
      std::uniform_int_distribution<size_t> pick(i, eligible.size() - 1);
      std::swap(eligible[i], eligible[pick(rng)]);
    }
    eligible.resize(k);
  }
  std::vector<std::string> texts;
  texts.reserve(eligible.size());
  for (size_t i : eligible) {
    texts.push_back(CandidateText(candidates.candidates[i], codec));
  }
  return texts;
}

SelectorTrainReport TrainSelector(RankScorer &scorer,
                                  const std::vector<SelectorExample> &data,
                                  const SelectorTrainConfig &cfg,
                                  const CodecConfig &codec) {
  cfg.Validate();
  if (data.empty()) throw Error(ErrorKind::kData, "untrainable dataset");

  std::vector<std::vector<std::string>> positives(data.size());
  SelectorTrainReport report;
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i].gold.empty()) {
      positives[i].push_back(codec.empty_token);
    } else {
      for (const auto &t : data[i].gold) positives[i].push_back(EncodeTrigger(t));
    }
    bool has_negative =
        !SampleNegatives(data[i].candidates, data[i].gold, 1, 0, codec).empty();
    if (has_negative) {
      ++report.trained_instances;
    } else {
      ++report.skipped_instances;
    }
  }
  if (report.trained_instances == 0) {
    throw Error(ErrorKind::kData, "untrainable dataset");
  }

  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::mt19937_64 rng(MixSeed(cfg.seed, epoch, 0));
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (size_t idx : order) {
      const auto &ex = data[idx];
      RankingExample batch{ex.context, positives[idx],
                           SampleNegatives(ex.candidates, ex.gold,
                                           cfg.negatives_k,
                                           MixSeed(cfg.seed, epoch, idx + 1),
                                           codec)};
      if (batch.negatives.empty()) continue;
      epoch_loss += scorer.TrainStep(std::span(&batch, 1), cfg.margin,
                                     cfg.learning_rate);
    }
    report.loss_trace.push_back(epoch_loss);
  }
  return report;
}

std::vector<double> Softmax(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  double max = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - max);
    total += out[i];
  }
  for (auto &x : out) x /= total;
  return out;
}

std::vector<double> FuseScores(std::span<const double> rank_scores,
                               std::span<const double> beam_scores,
                               double alpha) {
  if (rank_scores.size() != beam_scores.size()) {
    throw Error(ErrorKind::kInvalidArgument, "score lists differ in length");
  }
  std::vector<double> p = Softmax(rank_scores);
  std::vector<double> q = Softmax(beam_scores);
  std::vector<double> fused(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    fused[i] = alpha * p[i] + (1.0 - alpha) * q[i];
  }
  return fused;
}

void ScoreCandidates(CandidateList &list, const RankScorer &scorer,
                     const CodecConfig &codec) {
  for (auto &c : list.candidates) {
    c.rank_score = scorer.Score(list.context, CandidateText(c, codec));
  }
}

Selection SelectScored(const CandidateList &list, const SelectionConfig &cfg) {
  Selection selection;
  if (list.candidates.empty()) return selection;
  std::vector<double> rank, beam;
  for (const auto &c : list.candidates) {
    if (!c.rank_score) {
      throw Error(ErrorKind::kInvalidArgument,
                  "candidate of " + list.doc_id + " lacks a rank score");
    }
    rank.push_back(*c.rank_score);
    beam.push_back(c.beam_score);
  }
  selection.fused = FuseScores(rank, beam, cfg.alpha);
  for (size_t i = 0; i < selection.fused.size(); ++i) {
    if (selection.fused[i] <= cfg.theta) continue;
    selection.selected.push_back(i);
    for (const auto &t : list.candidates[i].triggers) {
      if (std::find(selection.triggers.begin(), selection.triggers.end(), t) ==
          selection.triggers.end()) {
        selection.triggers.push_back(t);
      }
    }
  }
  if (selection.selected.empty()) {
    const double first = selection.fused.front();
    selection.tie_at_threshold =
        std::all_of(selection.fused.begin(), selection.fused.end(),
                    [&](double f) { return f == first; }) &&
        std::abs(first - cfg.theta) < 1e-12;
  }
  return selection;
}

Selection FuseAndSelect(CandidateList &list, const RankScorer &scorer,
                        const SelectionConfig &cfg, const CodecConfig &codec) {
  ScoreCandidates(list, scorer, codec);
  Selection selection = SelectScored(list, cfg);
  for (size_t i = 0; i < list.candidates.size(); ++i) {
    list.candidates[i].fused_score = selection.fused[i];
  }
  return selection;
}

}  // namespace ofee

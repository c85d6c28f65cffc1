// Independent reference implementations and random generators shared by the
// unit and acceptance tests. Nothing here calls into the code path it checks.

#ifndef OFEE_TESTS_ORACLES_H_
#define OFEE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ofee/event_model.h"
#include "ofee/metrics.h"
#include "ofee/selector.h"

namespace ofee::testing {

using Rng = std::mt19937_64;

inline int UniformInt(Rng &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double UniformReal(Rng &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Words drawn from an alphabet that cannot form reserved tokens.
inline std::string RandomWord(Rng &rng, int max_len = 6) {
  static const std::string kAlphabet = "abcdefghijklmnopqrstuvwxyzABCXYZ-.,'0123";
  std::string w;
  int len = UniformInt(rng, 1, max_len);
  for (int i = 0; i < len; ++i) {
    w.push_back(kAlphabet[UniformInt(rng, 0, int(kAlphabet.size()) - 1)]);
  }
  return w;
}

inline std::string RandomPhrase(Rng &rng, int max_words = 3) {
  std::string p = RandomWord(rng);
  int n = UniformInt(rng, 1, max_words);
  for (int i = 1; i < n; ++i) p += " " + RandomWord(rng);
  return p;
}

inline std::string RandomType(Rng &rng) {
  static const std::vector<std::string> kTypes = {
      "Life_Die", "Movement_Transport", "Conflict_Attack", "Justice_Sue",
      "Contact_Meet"};
  return kTypes[UniformInt(rng, 0, int(kTypes.size()) - 1)];
}

inline std::string RandomRole(Rng &rng) {
  static const std::vector<std::string> kRoles = {"Agent", "Place", "Victim",
                                                  "Destination", "Target"};
  return kRoles[UniformInt(rng, 0, int(kRoles.size()) - 1)];
}

// Small-vocabulary frames, so random predictions and gold collide often.
inline EventFrame RandomSmallFrame(Rng &rng) {
  static const std::vector<std::string> kWords = {"went", "killed", "hit",
                                                  "met"};
  static const std::vector<std::string> kTypes = {"Movement_Transport",
                                                  "Life_Die", "Conflict_Attack"};
  static const std::vector<std::string> kRoles = {"Agent", "Place", "Victim"};
  static const std::vector<std::string> kEntities = {"home", "him", "Bob",
                                                     "the city"};
  EventFrame f;
  f.trigger = {kWords[UniformInt(rng, 0, 3)], kTypes[UniformInt(rng, 0, 2)]};
  int n_args = UniformInt(rng, 0, 3);
  for (int i = 0; i < n_args; ++i) {
    f.arguments.push_back(
        {kRoles[UniformInt(rng, 0, 2)], kEntities[UniformInt(rng, 0, 3)]});
  }
  return f;
}

inline std::vector<EventFrame> RandomSmallFrames(Rng &rng, int max_frames = 3) {
  std::vector<EventFrame> frames;
  int n = UniformInt(rng, 0, max_frames);
  for (int i = 0; i < n; ++i) frames.push_back(RandomSmallFrame(rng));
  return frames;
}

using OracleKey = std::tuple<std::string, std::string, std::string>;

inline std::vector<OracleKey> OracleKeys(const std::vector<EventFrame> &frames,
                                         Subtask subtask) {
  std::vector<OracleKey> keys;
  for (const auto &f : frames) {
    if (subtask == Subtask::kTrigI) keys.emplace_back(f.trigger.word, "", "");
    if (subtask == Subtask::kTrigC) {
      keys.emplace_back(f.trigger.word, f.trigger.event_type, "");
    }
    for (const auto &a : f.arguments) {
      if (subtask == Subtask::kArgI) {
        keys.emplace_back(a.entity, f.trigger.event_type, "");
      }
      if (subtask == Subtask::kArgC) {
        keys.emplace_back(a.entity, a.role, f.trigger.event_type);
      }
    }
  }
  return keys;
}

// Greedy one-to-one matching of equal keys. Equality is transitive, so
// greedy matching is a maximum matching and equals the min-count rule.
inline MatchCounts BruteForceMatch(const std::vector<EventFrame> &pred,
                                   const std::vector<EventFrame> &gold,
                                   Subtask subtask) {
  auto pk = OracleKeys(pred, subtask);
  auto gk = OracleKeys(gold, subtask);
  std::vector<bool> used(gk.size(), false);
  MatchCounts c;
  c.n_pred = static_cast<long>(pk.size());
  c.n_gold = static_cast<long>(gk.size());
  for (const auto &k : pk) {
    for (size_t j = 0; j < gk.size(); ++j) {
      if (!used[j] && gk[j] == k) {
        used[j] = true;
        ++c.n_correct;
        break;
      }
    }
  }
  return c;
}

// Plain exp/normalize softmax, no max shift. Callers keep |scores| small.
inline std::vector<double> OracleSoftmax(const std::vector<double> &scores) {
  double z = 0.0;
  for (double s : scores) z += std::exp(s);
  std::vector<double> out;
  for (double s : scores) out.push_back(std::exp(s) / z);
  return out;
}

inline std::vector<size_t> OracleSelect(const std::vector<double> &rank,
                                        const std::vector<double> &beam,
                                        double alpha, double theta) {
  auto p = OracleSoftmax(rank);
  auto q = OracleSoftmax(beam);
  std::vector<size_t> selected;
  for (size_t i = 0; i < rank.size(); ++i) {
    if (alpha * p[i] + (1.0 - alpha) * q[i] > theta) selected.push_back(i);
  }
  return selected;
}

// A random ranking batch for a randomly weighted scorer, rejected if any
// hinge term lies within `kink_gap` of zero.
inline bool RandomNonKinkPoint(Rng &rng, HashedNgramScorer &scorer,
                               RankingExample &ex, double margin,
                               double kink_gap = 1e-3) {
  for (auto &w : scorer.mutable_weights()) w = UniformReal(rng, -1.0, 1.0);
  ex.context = RandomPhrase(rng, 8);
  ex.positives.clear();
  ex.negatives.clear();
  int n_pos = UniformInt(rng, 1, 2), n_neg = UniformInt(rng, 1, 5);
  for (int i = 0; i < n_pos; ++i) ex.positives.push_back(RandomPhrase(rng));
  for (int i = 0; i < n_neg; ++i) ex.negatives.push_back(RandomPhrase(rng));
  for (const auto &p : ex.positives) {
    for (const auto &n : ex.negatives) {
      double term = margin - scorer.Score(ex.context, p) +
                    scorer.Score(ex.context, n);
      if (std::abs(term) < kink_gap) return false;
    }
  }
  return true;
}

// Relative error between the analytic subgradient and central differences
// of Loss() over every weight coordinate.
inline double GradientRelativeError(HashedNgramScorer &scorer,
                                    const RankingExample &ex, double margin,
                                    double h = 1e-5) {
  std::span<const RankingExample> batch(&ex, 1);
  auto [loss, sparse] = scorer.LossAndGradient(batch, margin);
  std::vector<double> analytic(scorer.dim(), 0.0);
  for (const auto &[i, g] : sparse) analytic[i] = g;

  auto w = scorer.mutable_weights();
  double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    double saved = w[i];
    w[i] = saved + h;
    double up = scorer.Loss(batch, margin);
    w[i] = saved - h;
    double down = scorer.Loss(batch, margin);
    w[i] = saved;
    double numeric = (up - down) / (2.0 * h);
    diff2 += (numeric - analytic[i]) * (numeric - analytic[i]);
    a2 += analytic[i] * analytic[i];
    n2 += numeric * numeric;
  }
  double scale = std::max(std::sqrt(a2), std::sqrt(n2));
  return scale == 0.0 ? 0.0 : std::sqrt(diff2) / scale;
}

}  // namespace ofee::testing

#endif  // OFEE_TESTS_ORACLES_H_

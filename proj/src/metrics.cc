#include "ofee/metrics.h"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

#include "ofee/common.h"

namespace ofee {

using nlohmann::json;

namespace {

using Key = std::tuple<std::string, std::string, std::string>;

std::vector<Key> Keys(const std::vector<EventFrame> &frames, Subtask subtask) {
  std::vector<Key> keys;
  for (const auto &f : frames) {
    switch (subtask) {
      case Subtask::kTrigI:
        keys.emplace_back(f.trigger.word, "", "");
        break;
      case Subtask::kTrigC:
        keys.emplace_back(f.trigger.word, f.trigger.event_type, "");
        break;
      case Subtask::kArgI:
        for (const auto &a : f.arguments) {
          keys.emplace_back(a.entity, f.trigger.event_type, "");
        }
        break;
      case Subtask::kArgC:
        for (const auto &a : f.arguments) {
          keys.emplace_back(a.entity, a.role, f.trigger.event_type);
        }
        break;
    }
  }
  return keys;
}

}  // namespace

std::string SubtaskName(Subtask subtask) {
  static const char *kNames[] = {"Trig-I", "Trig-C", "Arg-I", "Arg-C"};
  return kNames[static_cast<int>(subtask)];
}

std::string SubtaskKeyName(Subtask subtask) {
  static const char *kNames[] = {"trig_i", "trig_c", "arg_i", "arg_c"};
  return kNames[static_cast<int>(subtask)];
}

Subtask SubtaskFromName(const std::string &name) {
  for (Subtask s : kAllSubtasks) {
    if (name == SubtaskName(s) || name == SubtaskKeyName(s)) return s;
  }
  throw Error(ErrorKind::kConfig, "unknown metric '" + name + "'");
}

json EvalReport::ToJson() const {
  json j = json::object();
  for (Subtask s : kAllSubtasks) {
    const auto &sc = (*this)[s];
    j[SubtaskName(s)] = {{"n_gold", sc.counts.n_gold},
                         {"n_pred", sc.counts.n_pred},
                         {"n_correct", sc.counts.n_correct},
                         {"precision", sc.prf.precision},
                         {"recall", sc.prf.recall},
                         {"f1", sc.prf.f1}};
  }
  return j;
}

MatchCounts MatchCountsFor(const std::vector<EventFrame> &pred,
                           const std::vector<EventFrame> &gold,
                           Subtask subtask) {
  std::map<Key, long> pred_counts, gold_counts;
  MatchCounts counts;
  for (auto &k : Keys(pred, subtask)) {
    ++pred_counts[k];
    ++counts.n_pred;
  }
  for (auto &k : Keys(gold, subtask)) {
    ++gold_counts[k];
    ++counts.n_gold;
  }
  for (const auto &[k, n] : pred_counts) {
    auto it = gold_counts.find(k);
    if (it != gold_counts.end()) counts.n_correct += std::min(n, it->second);
  }
  return counts;
}

PRF F1FromCounts(long n_correct, long n_pred, long n_gold) {
  if (n_correct < 0 || n_pred < 0 || n_gold < 0 ||
      n_correct > std::min(n_pred, n_gold)) {
    throw Error(ErrorKind::kInvalidArgument, "inconsistent match counts");
  }
  PRF prf;
  prf.precision = n_pred == 0 ? 0.0 : static_cast<double>(n_correct) / n_pred;
  prf.recall = n_gold == 0 ? 0.0 : static_cast<double>(n_correct) / n_gold;
  double denom = prf.precision + prf.recall;
  prf.f1 = denom == 0.0 ? 0.0 : 2.0 * prf.precision * prf.recall / denom;
  return prf;
}

EvalReport EvaluateCorpus(const std::vector<Prediction> &predictions,
                          const std::vector<ContextInstance> &gold) {
  std::unordered_map<std::string, const std::vector<EventFrame> *> by_doc;
  for (const auto &inst : gold) by_doc.emplace(inst.doc_id, nullptr);
  for (const auto &[doc_id, frames] : predictions) {
    auto it = by_doc.find(doc_id);
    if (it == by_doc.end()) {
      throw Error(ErrorKind::kData, "prediction for unknown doc_id " + doc_id);
    }
    if (it->second != nullptr) {
      throw Error(ErrorKind::kData, "duplicate prediction for " + doc_id);
    }
    it->second = &frames;
  }

  static const std::vector<EventFrame> kNone;
  EvalReport report;
  for (const auto &inst : gold) {
    const auto *pred = by_doc.at(inst.doc_id);
    for (Subtask s : kAllSubtasks) {
      report[s].counts +=
          MatchCountsFor(pred ? *pred : kNone, inst.gold_frames, s);
    }
  }
  for (Subtask s : kAllSubtasks) {
    const auto &c = report[s].counts;
    report[s].prf = F1FromCounts(c.n_correct, c.n_pred, c.n_gold);
  }
  return report;
}

}  // namespace ofee

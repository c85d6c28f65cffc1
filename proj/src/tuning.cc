#include "ofee/tuning.h"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "ofee/common.h"

namespace ofee {

std::vector<double> DefaultAlphaGrid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<double> DefaultThetaGrid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
  return grid;
}

std::vector<EventFrame> AssembleFrames(const CandidateList &list,
                                       const Selection &selection) {
  std::vector<EventFrame> frames;
  for (const auto &t : selection.triggers) {
    std::vector<ArgumentPair> args;
    auto it = list.arguments_by_word.find(t.word);
    if (it != list.arguments_by_word.end()) args = it->second;
    frames.push_back(EventFrame::Make(t, std::move(args)));
  }
  return frames;
}

std::vector<Prediction> PredictScored(const std::vector<ScoredItem> &items,
                                      const SelectionConfig &cfg) {
  std::vector<Prediction> predictions;
  predictions.reserve(items.size());
  for (const auto &item : items) {
    Selection selection = SelectScored(item.candidates, cfg);
    predictions.emplace_back(item.instance.doc_id,
                             AssembleFrames(item.candidates, selection));
  }
  return predictions;
}

EvalReport EvaluateScored(const std::vector<ScoredItem> &items,
                          const SelectionConfig &cfg) {
  std::vector<ContextInstance> gold;
  gold.reserve(items.size());
  for (const auto &item : items) gold.push_back(item.instance);
  return EvaluateCorpus(PredictScored(items, cfg), gold);
}

double MetricValue(const EvalReport &report, Subtask metric) {
  return report[metric].prf.f1;
}

GridResult GridSearch(const std::vector<ScoredItem> &dev,
                      const std::vector<double> &alpha_grid,
                      const std::vector<double> &theta_grid, Subtask metric) {
  if (dev.empty()) throw Error(ErrorKind::kData, "empty dev set");
  if (alpha_grid.empty() || theta_grid.empty()) {
    throw Error(ErrorKind::kConfig, "empty tuning grid");
  }
  for (const auto &item : dev) {
    if (!item.candidates.HasRankScores()) {
      throw Error(ErrorKind::kData,
                  "dev candidates of " + item.instance.doc_id +
                      " carry no rank scores");
    }
  }
  for (double v : alpha_grid) SelectionConfig{v, 0.0}.Validate();
  for (double v : theta_grid) SelectionConfig{0.0, v}.Validate();

  // Cells are independent; evaluate them concurrently and assemble in grid
  // order.
  std::vector<GridCell> cells;
  for (double alpha : alpha_grid) {
    for (double theta : theta_grid) cells.push_back({alpha, theta, {}});
  }
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) {
      cells[i].report = EvaluateScored(dev, {cells[i].alpha, cells[i].theta});
    }
  };
  size_t n_threads = std::clamp<size_t>(std::thread::hardware_concurrency(),
                                        1, cells.size());
  std::vector<std::thread> threads;
  for (size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto &t : threads) t.join();

  GridResult result;
  bool first = true;
  for (auto &cell : cells) {
    double value = MetricValue(cell.report, metric);
    bool better = first || value > result.best ||
                  (value == result.best &&
                   (cell.theta < result.theta ||
                    (cell.theta == result.theta && cell.alpha < result.alpha)));
    if (better) {
      result.alpha = cell.alpha;
      result.theta = cell.theta;
      result.best = value;
      first = false;
    }
    result.table.push_back(std::move(cell));
  }
  return result;
}

std::string ScoreTableCsv(const std::vector<GridCell> &table) {
  std::ostringstream out;
  out << "alpha,theta,trig_i_f1,trig_c_f1,arg_i_f1,arg_c_f1\n";
  for (const auto &cell : table) {
    out << FormatDouble(cell.alpha) << "," << FormatDouble(cell.theta);
    for (Subtask s : kAllSubtasks) out << "," << FormatDouble(cell.report[s].prf.f1);
    out << "\n";
  }
  return out.str();
}

}  // namespace ofee

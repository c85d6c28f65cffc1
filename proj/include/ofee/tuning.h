#ifndef OFEE_TUNING_H_
#define OFEE_TUNING_H_

#include <string>
#include <vector>

#include "ofee/generation.h"
#include "ofee/metrics.h"
#include "ofee/selector.h"

namespace ofee {

// A dev context with its cached, rank-scored candidate list.
struct ScoredItem {
  ContextInstance instance;
  CandidateList candidates;
};

struct GridCell {
  double alpha = 0.0;
  double theta = 0.0;
  EvalReport report;
};

struct GridResult {
  double alpha = 0.0;
  double theta = 0.0;
  double best = 0.0;  // value of the chosen metric at (alpha, theta)
  std::vector<GridCell> table;  // alpha-major, grid order
};

// {0.0, 0.1, ..., 1.0}
std::vector<double> DefaultAlphaGrid();
// {0.05, 0.10, ..., 0.95}
std::vector<double> DefaultThetaGrid();

// Final frames for one context: the selected triggers, each paired with the
// cached greedy arguments of its word.
std::vector<EventFrame> AssembleFrames(const CandidateList &list,
                                       const Selection &selection);

std::vector<Prediction> PredictScored(const std::vector<ScoredItem> &items,
                                      const SelectionConfig &cfg);

EvalReport EvaluateScored(const std::vector<ScoredItem> &items,
                          const SelectionConfig &cfg);

double MetricValue(const EvalReport &report, Subtask metric);

// Exhaustive search over alpha_grid x theta_grid using cached scores only.
// Ties go to the smaller theta, then the smaller alpha.
GridResult GridSearch(const std::vector<ScoredItem> &dev,
                      const std::vector<double> &alpha_grid,
                      const std::vector<double> &theta_grid,
                      Subtask metric = Subtask::kTrigC);

// "alpha,theta,trig_i_f1,trig_c_f1,arg_i_f1,arg_c_f1" rows.
std::string ScoreTableCsv(const std::vector<GridCell> &table);

}  // namespace ofee

#endif  // OFEE_TUNING_H_

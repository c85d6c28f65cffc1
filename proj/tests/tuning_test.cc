#include <algorithm>

#include "doctest.h"
#include "ofee/common.h"
#include "ofee/tuning.h"

using namespace ofee;

namespace {

ScoredItem Planted() {
  ScoredItem item;
  item.instance = {"d1", "a b", {{{"a", "X"}, {{"R", "b"}}}}};
  item.candidates.doc_id = "d1";
  item.candidates.context = "a b";
  item.candidates.candidates = {
      {"b [X]", {{"b", "X"}}, 0.0, 0.0, std::nullopt},
      {"a [X]", {{"a", "X"}}, -2.0, 1.0, std::nullopt},
  };
  item.candidates.arguments_by_word["a"] = {{"R", "b"}};
  return item;
}

}  // namespace

TEST_CASE("default grids") {
  auto alpha = DefaultAlphaGrid();
  auto theta = DefaultThetaGrid();
  CHECK(alpha.size() == 11);
  CHECK(theta.size() == 19);
  CHECK(alpha.front() == 0.0);
  CHECK(alpha.back() == 1.0);
  CHECK(theta.front() == 0.05);
  CHECK(theta.back() == 0.95);
  CHECK(std::find(alpha.begin(), alpha.end(), 0.4) != alpha.end());
  CHECK(std::find(theta.begin(), theta.end(), 0.2) != theta.end());
}

TEST_CASE("planted optimum") {
  std::vector<ScoredItem> dev = {Planted()};
  auto result = GridSearch(dev, {0.0, 1.0}, {0.3, 0.9});
  CHECK(result.alpha == 1.0);
  CHECK(result.theta == 0.3);
  CHECK(result.best == 1.0);
  REQUIRE(result.table.size() == 4);
  int perfect = 0;
  for (const auto &cell : result.table) {
    perfect += MetricValue(cell.report, Subtask::kTrigC) == 1.0;
  }
  CHECK(perfect == 1);

  auto report = EvaluateScored(dev, {1.0, 0.3});
  CHECK(report[Subtask::kArgC].prf.f1 == 1.0);
}

TEST_CASE("ties fall to the smallest theta, then alpha") {
  std::vector<ScoredItem> dev = {Planted()};
  dev[0].instance.gold_frames.clear();
  dev[0].candidates.candidates = {{"[none]", {}, 0.0, 0.0, std::nullopt}};
  auto result = GridSearch(dev, {0.7, 0.2, 0.5}, {0.6, 0.1, 0.3});
  CHECK(result.alpha == 0.2);
  CHECK(result.theta == 0.1);
}

TEST_CASE("returned optimum matches the table") {
  std::vector<ScoredItem> dev = {Planted(), Planted()};
  dev[1].instance.doc_id = "d2";
  dev[1].candidates.doc_id = "d2";
  dev[1].candidates.candidates[0].rank_score = 0.4;
  auto result = GridSearch(dev, DefaultAlphaGrid(), DefaultThetaGrid());
  double best = 0.0;
  for (const auto &cell : result.table) {
    best = std::max(best, MetricValue(cell.report, Subtask::kTrigC));
  }
  CHECK(result.best == best);
  auto again = GridSearch(dev, DefaultAlphaGrid(), DefaultThetaGrid());
  CHECK(ScoreTableCsv(again.table) == ScoreTableCsv(result.table));
}

TEST_CASE("errors and csv") {
  CHECK_THROWS_AS(GridSearch({}, {0.1}, {0.1}), Error);
  std::vector<ScoredItem> dev = {Planted()};
  CHECK_THROWS_AS(GridSearch(dev, {}, {0.1}), Error);
  CHECK_THROWS_AS(GridSearch(dev, {1.5}, {0.1}), Error);
  dev[0].candidates.candidates[0].rank_score.reset();
  CHECK_THROWS_AS(GridSearch(dev, {0.1}, {0.1}), Error);

  auto csv = ScoreTableCsv(GridSearch({Planted()}, {0.5}, {0.25}).table);
  CHECK(csv.starts_with("alpha,theta,trig_i_f1,trig_c_f1,arg_i_f1,arg_c_f1\n0.5,0.25,"));
}

#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "oracles.h"
#include "ofee/common.h"
#include "ofee/selector.h"

using namespace ofee;
using doctest::Approx;

namespace {

CandidateList MakeList(const std::vector<double> &rank,
                       const std::vector<double> &beam) {
  CandidateList list;
  list.doc_id = "d";
  list.context = "ctx";
  for (size_t i = 0; i < rank.size(); ++i) {
    TriggerCandidate c;
    c.triggers = {{"w" + std::to_string(i), "T"}};
    c.raw_text = EncodeTriggers(c.triggers);
    c.beam_score = beam[i];
    c.rank_score = rank[i];
    list.candidates.push_back(c);
  }
  return list;
}

CandidateList TextList(const std::vector<std::string> &texts) {
  CandidateList list;
  list.context = "ctx";
  double score = 0.0;
  for (const auto &t : texts) {
    TriggerCandidate c;
    c.raw_text = t;
    c.triggers = DecodeTriggerCandidate(t).items;
    c.beam_score = score;
    score -= 1.0;
    list.candidates.push_back(c);
  }
  return list;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(SelectorTrainConfig{}.Validate());
  SelectorTrainConfig cfg;
  cfg.margin = 1.5;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg = {};
  cfg.negatives_k = 0;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  CHECK(SelectionConfig{}.alpha == 0.4);
  CHECK(SelectionConfig{}.theta == 0.2);
  CHECK_THROWS_AS((SelectionConfig{1.2, 0.2}.Validate()), Error);
  CHECK_THROWS_AS((SelectionConfig{0.4, -0.1}.Validate()), Error);
}

TEST_CASE("hinge loss") {
  std::vector<double> pos = {0.8}, neg = {0.3, 0.9};
  double expected = std::max(0.0, 0.5 - 0.8 + 0.3) + std::max(0.0, 0.5 - 0.8 + 0.9);
  CHECK(HingeLoss(pos, neg, 0.5) == expected);
  CHECK(HingeLoss(pos, neg, 0.5) == Approx(0.6).epsilon(1e-15));
  CHECK(HingeLoss(std::vector{0.37}, std::vector{0.37}, 0.0) == 0.0);
  CHECK(HingeLoss(std::vector{1.0, 1.0}, std::vector{0.0}, 0.5) == 0.0);
  CHECK_THROWS_AS(HingeLoss({}, neg, 0.5), Error);
  CHECK_THROWS_AS(HingeLoss(pos, {}, 0.5), Error);

  testing::Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> p(testing::UniformInt(rng, 1, 4)), n(testing::UniformInt(rng, 1, 6));
    for (auto &x : p) x = testing::UniformReal(rng, -3, 3);
    for (auto &x : n) x = testing::UniformReal(rng, -3, 3);
    double c = testing::UniformReal(rng, -10, 10);
    auto ps = p, ns = n;
    for (auto &x : ps) x += c;
    for (auto &x : ns) x += c;
    double margin = testing::UniformReal(rng, -1, 1);
    CHECK(HingeLoss(ps, ns, margin) == Approx(HingeLoss(p, n, margin)).epsilon(1e-9));
    CHECK(HingeLoss(p, n, margin) >= 0.0);
  }
}

TEST_CASE("scorer features and gradient") {
  HashedNgramScorer scorer(97);
  auto f = scorer.Features("He went home .", "went [Movement_Transport]");
  double norm = 0.0;
  for (const auto &[i, x] : f) norm += x * x;
  CHECK(norm == Approx(1.0));
  CHECK(std::is_sorted(f.begin(), f.end()));

  testing::Rng rng(21);
  int checked = 0;
  while (checked < 20) {
    RankingExample ex;
    double margin = testing::UniformReal(rng, -1, 1);
    if (!testing::RandomNonKinkPoint(rng, scorer, ex, margin)) continue;
    CHECK(testing::GradientRelativeError(scorer, ex, margin) < 1e-4);
    ++checked;
  }
}

TEST_CASE("zero-initialized scorer at margin zero has zero loss") {
  HashedNgramScorer scorer(64);
  RankingExample ex{"ctx", {"a [X]"}, {"b [Y]", "c [Z]"}};
  CHECK(scorer.TrainStep(std::span(&ex, 1), 0.0, 0.1) == 0.0);
  CHECK(scorer.TrainStep(std::span(&ex, 1), 0.5, 0.1) == Approx(1.0));
}

TEST_CASE("scorer serialization") {
  HashedNgramScorer scorer(128);
  RankingExample ex{"He went home .", {"went [Movement_Transport]"}, {"home [Life_Die]"}};
  scorer.TrainStep(std::span(&ex, 1), 0.5, 0.1);
  auto back = HashedNgramScorer::FromJson(scorer.ToJson());
  CHECK(back.dim() == 128);
  CHECK(std::equal(back.weights().begin(), back.weights().end(),
                   scorer.weights().begin()));
  auto j = scorer.ToJson();
  j["format"] = "something-else";
  CHECK_THROWS_AS(HashedNgramScorer::FromJson(j), Error);
}

TEST_CASE("negative sampling") {
  std::vector<Trigger> gold = {{"went", "Movement_Transport"}};
  SUBCASE("exhaustion") {
    auto list = TextList({"went [Movement_Transport]", "went [Movement_Transport] [and] a [X]",
                          "b [X]", "c [X]", "went [Life_Die]", "[none]"});
    auto negs = SampleNegatives(list, gold, 5, 1);
    CHECK(negs.size() == 4);
    CHECK(std::find(negs.begin(), negs.end(), "[none]") != negs.end());
  }
  SUBCASE("all correct") {
    auto list = TextList({"went [Movement_Transport]"});
    CHECK(SampleNegatives(list, gold, 5, 1).empty());
    CHECK(SampleNegatives(TextList({"[none]"}), {}, 5, 1).empty());
  }
  SUBCASE("determinism and subset") {
    auto list = TextList({"a [X]", "b [X]", "c [X]", "d [X]", "e [X]", "f [X]",
                          "g [X]", "h [X]"});
    auto first = SampleNegatives(list, gold, 5, 99);
    CHECK(first.size() == 5);
    CHECK(SampleNegatives(list, gold, 5, 99) == first);
    auto sorted = first;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());
  }
}

TEST_CASE("training") {
  // Positives carry the marker word; negatives never do.
  std::vector<SelectorExample> data;
  testing::Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    std::string ctx = testing::RandomPhrase(rng, 6) + " struck";
    SelectorExample ex{ctx, {{"struck", "Conflict_Attack"}}, TextList({})};
    ex.candidates = TextList({"struck [Conflict_Attack]",
                              testing::RandomWord(rng) + " [Life_Die]",
                              testing::RandomWord(rng) + " [Movement_Transport]"});
    data.push_back(ex);
  }
  HashedNgramScorer scorer(1 << 12);
  SelectorTrainConfig cfg;
  cfg.epochs = 5;
  cfg.learning_rate = 0.05;
  auto report = TrainSelector(scorer, data, cfg);
  REQUIRE(report.loss_trace.size() == 5);
  CHECK(report.loss_trace.back() < report.loss_trace.front());
  CHECK(report.trained_instances == 20);

  HashedNgramScorer again(1 << 12);
  CHECK(TrainSelector(again, data, cfg).loss_trace == report.loss_trace);

  std::vector<SelectorExample> all_gold = {
      {"ctx", {{"a", "X"}}, TextList({"a [X]"})}};
  CHECK_THROWS_WITH_AS(TrainSelector(scorer, all_gold, cfg),
                       "untrainable dataset", Error);
}

TEST_CASE("fusion worked example") {
  auto fused = FuseScores(std::vector{2.0, 0.0}, std::vector{0.0, 0.0}, 0.4);
  CHECK(std::abs(fused[0] - 0.6523) < 5e-4);
  CHECK(std::abs(fused[1] - 0.3477) < 5e-4);

  auto list = MakeList({2.0, 0.0}, {0.0, 0.0});
  CHECK(SelectScored(list, {0.4, 0.2}).selected == std::vector<size_t>{0, 1});
  CHECK(SelectScored(list, {0.4, 0.35}).selected == std::vector<size_t>{0});

  auto single = MakeList({-3.0}, {-9.0});
  CHECK(SelectScored(single, {0.4, 0.999}).selected.size() == 1);
}

TEST_CASE("selection properties") {
  testing::Rng rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    int n = testing::UniformInt(rng, 1, 10);
    std::vector<double> rank(n), beam(n);
    for (auto &x : rank) x = testing::UniformReal(rng, -5, 5);
    for (auto &x : beam) x = testing::UniformReal(rng, -5, 0);
    double alpha = testing::UniformReal(rng, 0, 1);
    double theta = testing::UniformReal(rng, 0, 1);

    auto fused = FuseScores(rank, beam, alpha);
    CHECK(std::accumulate(fused.begin(), fused.end(), 0.0) == Approx(1.0).epsilon(1e-12));
    for (double f : fused) CHECK((f >= 0.0 && f <= 1.0));

    auto list = MakeList(rank, beam);
    CHECK(SelectScored(list, {alpha, theta}).selected ==
          testing::OracleSelect(rank, beam, alpha, theta));
    CHECK(SelectScored(list, {alpha, 0.0}).selected.size() == size_t(n));
    CHECK(SelectScored(list, {alpha, 1.0}).selected.empty());

    // Monotonicity in one candidate's rank score.
    size_t k = testing::UniformInt(rng, 0, n - 1);
    auto raised = rank;
    raised[k] += testing::UniformReal(rng, 0, 3);
    auto fused2 = FuseScores(raised, beam, alpha);
    for (int i = 0; i < n; ++i) {
      if (size_t(i) == k) {
        CHECK(fused2[i] >= fused[i] - 1e-15);
      } else {
        CHECK(fused2[i] <= fused[i] + 1e-15);
      }
    }

    // Permutation equivariance.
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pr(n), pb(n);
    for (int i = 0; i < n; ++i) {
      pr[i] = rank[perm[i]];
      pb[i] = beam[perm[i]];
    }
    auto pf = FuseScores(pr, pb, alpha);
    for (int i = 0; i < n; ++i) CHECK(pf[i] == Approx(fused[perm[i]]).epsilon(1e-12));

    // alpha = 0 ignores rank scores.
    auto flat = rank;
    for (auto &x : flat) x = 0.0;
    CHECK(FuseScores(rank, beam, 0.0) == FuseScores(flat, beam, 0.0));
  }
}

TEST_CASE("selection union and ties") {
  auto list = TextList({"a [X] [and] b [Y]", "a [X]", "[none]"});
  for (auto &c : list.candidates) c.rank_score = 0.0;
  auto sel = SelectScored(list, {0.5, 0.0});
  CHECK(sel.triggers == std::vector<Trigger>{{"a", "X"}, {"b", "Y"}});

  auto tie = MakeList({0.0, 0.0}, {0.0, 0.0});
  auto s = SelectScored(tie, {0.4, 0.5});
  CHECK(s.selected.empty());
  CHECK(s.tie_at_threshold);

  CandidateList unscored = TextList({"a [X]"});
  CHECK_THROWS_AS(SelectScored(unscored, {}), Error);
  CHECK(SelectScored(CandidateList{}, {}).triggers.empty());
}

TEST_CASE("fuse_and_select writes scores back") {
  HashedNgramScorer scorer(64);
  auto list = TextList({"a [X]", "b [Y]"});
  auto sel = FuseAndSelect(list, scorer, {0.4, 0.2});
  for (const auto &c : list.candidates) {
    CHECK(c.rank_score.has_value());
    CHECK(c.fused_score.has_value());
  }
  CHECK(*list.candidates[0].fused_score == sel.fused[0]);
}

#include <doctest.h>

#include <stdexcept>

#include <vector>

#include "riskprune/loss.hpp"
#include "riskprune/rng.hpp"

using namespace riskprune;

TEST_CASE("misclassification is the 0-1 loss") {
  CHECK(loss_misclassify(3, 3) == 0);
  CHECK(loss_misclassify(3, 5) == 1);

  // batch mean equals 1 - accuracy
  std::vector<int> truth = {0, 1, 2, 3, 4, 5};
  std::vector<int> pred = {0, 1, 9, 3, 9, 5};
  int errors = 0, hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    errors += loss_misclassify(truth[i], pred[i]);
    hits += truth[i] == pred[i];
  }
  double acc = hits / 6.0;
  CHECK(errors / 6.0 == doctest::Approx(1.0 - acc));
}

TEST_CASE("relaxed loss counts only new errors") {
  CHECK(loss_relaxed(1, 2, 1) == 1);  // pruned wrong, full right
  CHECK(loss_relaxed(1, 2, 3) == 0);  // both wrong
  CHECK(loss_relaxed(1, 1, 1) == 0);
  CHECK(loss_relaxed(1, 1, 2) == 0);  // pruned fixed an error

  SplitMix64 g(17);
  for (int t = 0; t < 200; ++t) {
    int y = static_cast<int>(g.below(10));
    int yp = static_cast<int>(g.below(10));
    int yf = static_cast<int>(g.below(10));
    CHECK(loss_relaxed(y, yp, yf) <= loss_misclassify(y, yp));
    int v = loss_relaxed(y, yp, yf);
    CHECK((v == 0 || v == 1));
  }
}

TEST_CASE("disagreement needs no labels") {
  CHECK(loss_disagree(7, 7) == 0);
  CHECK(loss_disagree(7, 1) == 1);
}

TEST_CASE("empirical risk averages the defined entries") {
  std::vector<LossSample> ls = {{1.0, true}, {0.0, true}, {0.0, true}, {1.0, true}};
  auto est = empirical_risk(ls);
  CHECK(est.defined);
  CHECK(est.rhat == 0.5);
  CHECK(est.n_defined == 4);

  ls[1].defined = false;
  est = empirical_risk(ls);
  CHECK(est.n_defined == 3);
  CHECK(est.rhat == doctest::Approx(2.0 / 3.0));

  std::vector<LossSample> none = {{0.3, false}, {0.9, false}};
  est = empirical_risk(none);
  CHECK_FALSE(est.defined);
  CHECK(est.n_defined == 0);
}

TEST_CASE("empirical risk extremes") {
  std::vector<LossSample> zeros(5, LossSample{0.0, true});
  CHECK(empirical_risk(zeros).rhat == 0.0);
  std::vector<LossSample> ones(5, LossSample{1.0, true});
  CHECK(empirical_risk(ones).rhat == 1.0);
}

TEST_CASE("selective risk keeps strictly-confident samples") {
  std::vector<ConfidenceOutcome> xs = {
      {0.9, true}, {0.8, false}, {0.6, false}, {0.95, true}};
  auto sr = selective_risk(xs, 0.7);
  CHECK(sr.defined);
  CHECK(sr.n_kept == 3);
  CHECK(sr.risk == doctest::Approx(1.0 / 3.0));

  // threshold 0 keeps everything (confidences are positive)
  sr = selective_risk(xs, 0.0);
  CHECK(sr.n_kept == 4);
  CHECK(sr.risk == doctest::Approx(0.5));

  // threshold at or above max confidence abstains on everything
  sr = selective_risk(xs, 0.95);
  CHECK_FALSE(sr.defined);
  CHECK(sr.n_kept == 0);

  // strict comparison: a sample exactly at the threshold is abstained
  sr = selective_risk(xs, 0.8);
  CHECK(sr.n_kept == 2);
  CHECK(sr.risk == 0.0);
}

TEST_CASE("abstention fraction") {
  CHECK(abstention_fraction(4, 4) == 0.0);
  CHECK(abstention_fraction(4, 0) == 1.0);
  CHECK(abstention_fraction(4, 3) == 0.25);
}

TEST_CASE("mask thresholding is inclusive at 1 - beta") {
  std::vector<double> scores = {0.0, 0.5, 0.49999, 1.0};
  auto mask = mask_from_scores(scores, 2, 2, 0.5);
  CHECK(mask.pixels == std::vector<std::uint8_t>{0, 1, 0, 1});
  CHECK(mask.count() == 2);

  std::vector<double> zeros(4, 0.0);
  CHECK(mask_from_scores(zeros, 2, 2, 0.3).count() == 0);
  std::vector<double> ones(4, 1.0);
  CHECK(mask_from_scores(ones, 2, 2, 0.3).count() == 4);

  CHECK_THROWS_AS(mask_from_scores(scores, 2, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mask_from_scores(scores, 3, 2, 0.5), std::invalid_argument);
}

TEST_CASE("mask thresholding matches an exhaustive scan") {
  SplitMix64 g(23);
  std::vector<double> scores(16);
  for (double& s : scores) s = g.uniform();
  auto mask = mask_from_scores(scores, 4, 4, 0.5);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(static_cast<bool>(mask.pixels[i]) == (scores[i] >= 0.5));
}

TEST_CASE("iou handles overlap and degenerate cases") {
  BinaryMask a(2, 2), b(2, 2);
  a.pixels = {1, 1, 0, 0};  // {(0,0),(0,1)}
  b.pixels = {0, 1, 0, 1};  // {(0,1),(1,1)}
  CHECK(iou(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(iou(b, a) == doctest::Approx(1.0 / 3.0));
  CHECK(loss_iou(a, b) == doctest::Approx(2.0 / 3.0));

  CHECK(iou(a, a) == 1.0);
  CHECK(loss_iou(a, a) == 0.0);

  BinaryMask e1(2, 2), e2(2, 2);
  CHECK(iou(e1, e2) == 1.0);

  BinaryMask d(2, 2);
  d.pixels = {0, 0, 1, 0};
  CHECK(iou(a, d) == 0.0);
  CHECK(loss_iou(a, d) == 1.0);

  BinaryMask wrong(3, 2);
  CHECK_THROWS_AS(iou(a, wrong), std::invalid_argument);
}

TEST_CASE("loss names round-trip") {
  for (LossKind k : {LossKind::Misclassify, LossKind::Relaxed, LossKind::Disagree,
                     LossKind::Iou})
    CHECK(loss_from_name(loss_name(k)) == k);
  CHECK_THROWS_AS(loss_from_name("nope"), std::invalid_argument);
  CHECK(loss_is_binary(LossKind::Misclassify));
  CHECK(loss_is_binary(LossKind::Disagree));
  CHECK_FALSE(loss_is_binary(LossKind::Iou));
  CHECK(loss_needs_labels(LossKind::Misclassify));
  CHECK(loss_needs_labels(LossKind::Relaxed));
  CHECK_FALSE(loss_needs_labels(LossKind::Disagree));
  CHECK_FALSE(loss_needs_labels(LossKind::Iou));
}

#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskprune/fwer.hpp"
#include "riskprune/loss.hpp"
#include "riskprune/network.hpp"
#include "riskprune/prune.hpp"
#include "riskprune/pvalue.hpp"

namespace riskprune {

struct ScoreMapSet;

// {j / Q : j = 0 .. Q-1}
std::vector<double> build_grid(int Q);

struct RiskCurvePoint {
  double lambda = 0.0;
  double rhat = 0.0;
  long n_defined = 0;
  bool defined = true;
};

// empirical risk per grid ratio, each pruned one-shot from the same base net
std::vector<RiskCurvePoint> risk_curve(const DenseNetwork& net,
                                       std::span<const LabeledSample> data, LossKind loss,
                                       std::span<const double> grid);

// risk curve for the thresholded-mask overlap loss of a score-map bundle
std::vector<RiskCurvePoint> segmentation_curve(const ScoreMapSet& maps, double beta);

struct CalibrationConfig {
  double alpha = 0.1;
  double delta = 0.1;
  int Q = 100;
  LossKind loss = LossKind::Misclassify;
  PValueKind pvalue = PValueKind::Binomial;
  PValueNMode n_mode = PValueNMode::Kept;
  bool naive = false;  // heuristic scan instead of the certified procedure
};

struct GridPoint {
  double lambda = 0.0;
  double rhat = 0.0;
  long n_defined = 0;
  bool defined = true;
  double p = 1.0;
  bool rejected = false;
};

struct CalibrationResult {
  CalibrationConfig config;
  std::vector<GridPoint> points;
  std::optional<double> lambda_hat;  // empty when nothing is certified
  std::vector<std::string> notes;
};

// p-values plus fixed-sequence selection on an existing curve
CalibrationResult calibrate_curve(std::span<const RiskCurvePoint> curve,
                                  const CalibrationConfig& cfg);

// end to end: grid, prune, risk curve, p-values, fixed sequence
CalibrationResult calibrate_1d(const DenseNetwork& net,
                               std::span<const LabeledSample> data,
                               const CalibrationConfig& cfg);

// index of the last leading grid point with rhat <= alpha, -1 when even the
// first exceeds it; no statistical guarantee attaches to this choice
int naive_scan(std::span<const RiskCurvePoint> curve, double alpha);

enum class SelectionPolicy { MaxSparsityMinAbstention };

std::string selection_policy_name(SelectionPolicy p);

struct SelectiveConfig {
  double alpha = 0.1;
  double delta = 0.1;
  std::vector<double> thresholds;  // confidence cutoffs, ascending, in [0, 1)
  int T = 80;                      // last pruning column, lambda2 = j/Q for j = 0..T
  int Q = 100;
  PValueNMode n_mode = PValueNMode::Kept;
  SelectionPolicy policy = SelectionPolicy::MaxSparsityMinAbstention;
};

struct SelectiveCell {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double rhat = 0.0;
  bool defined = false;
  long n_kept = 0;
  double abstention = 0.0;
  double p = 1.0;
  double budget = 0.0;  // budget the cell was tested against
  bool rejected = false;
};

struct SelectiveResult {
  SelectiveConfig config;
  std::vector<std::vector<SelectiveCell>> cells;  // [row][col]
  std::vector<std::pair<std::size_t, std::size_t>> rejected;
  std::optional<std::pair<double, double>> selected;  // (lambda1, lambda2)
  std::vector<std::string> notes;
};

// joint selectivity / sparsity calibration with the fallback procedure; the
// binomial p-value applies since the conditional loss is binary
SelectiveResult calibrate_selective(const DenseNetwork& net,
                                    std::span<const LabeledSample> data,
                                    const SelectiveConfig& cfg);

// pick the operating pair from the rejected cells: largest lambda2 first,
// smallest lambda1 to break ties
std::optional<std::pair<double, double>> select_pair(
    const SelectiveResult& result, SelectionPolicy policy);

}  // namespace riskprune

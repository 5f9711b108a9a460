#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "riskprune/calibrate.hpp"
#include "riskprune/loss.hpp"
#include "riskprune/network.hpp"
#include "riskprune/pvalue.hpp"

namespace riskprune {

struct BootstrapReport {
  double lambda = 0.0;
  LossKind loss = LossKind::Misclassify;
  long B = 0;
  long m = 0;  // resample size, equals the validation size
  std::uint64_t seed = 0;
  double point_risk = 0.0;
  std::vector<double> risks;  // one mean per resample
};

// B resamples of size m = |data| drawn with replacement from the per-sample
// losses of the net pruned at lambda
BootstrapReport bootstrap_risk(const DenseNetwork& net, double lambda,
                               std::span<const LabeledSample> data, LossKind loss,
                               long B, std::uint64_t seed);

struct SuperuniformReport {
  PValueKind pvalue = PValueKind::Binomial;
  long n = 0;
  double alpha = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> u;    // probed levels
  std::vector<double> cdf;  // empirical P(p <= u) at the boundary null
};

// iid Bernoulli(alpha) losses per trial; super-uniformity means every
// empirical cdf value stays at or below its level (up to MC noise)
SuperuniformReport simulate_superuniformity(PValueKind kind, long n, double alpha,
                                            long trials, std::uint64_t seed,
                                            std::span<const double> u_levels);

struct SimReport {
  long trials = 0;
  long n = 0;
  double alpha = 0.0;
  double delta = 0.0;
  PValueKind pvalue = PValueKind::Binomial;
  std::string procedure;
  double violation_rate = 0.0;
  std::vector<double> lambda_hat;    // NaN when nothing was certified
  std::vector<std::uint8_t> violated;
};

// Monte-Carlo family-wise error of the fixed-sequence procedure.  true_risk
// gives the real risk at each grid ratio; per trial one uniform draw per
// sample is shared across the grid, so losses are coupled and monotone
// whenever the curve is.  A violation is any certified ratio whose true
// risk exceeds alpha.
SimReport simulate_fwer(std::span<const double> grid, std::span<const double> true_risk,
                        long n, double alpha, double delta, PValueKind kind,
                        long trials, std::uint64_t seed);

// same experiment for the fallback procedure on a J x (T+1) risk surface;
// lambda_hat holds the largest rejected column over the column count, NaN
// when nothing was rejected
SimReport simulate_fwer_fallback(const Matrix& true_risk, long n, double alpha,
                                 double delta, PValueKind kind, long trials,
                                 std::uint64_t seed);

}  // namespace riskprune

#include "riskprune/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "riskprune/parallel.hpp"
#include "riskprune/prune.hpp"
#include "riskprune/rng.hpp"

namespace riskprune {

namespace {

void check_levels(double alpha, double delta) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
}

// per-sample losses of the pruned model, all defined for these loss kinds
std::vector<double> sample_losses(const DenseNetwork& net, double lambda,
                                  std::span<const LabeledSample> data, LossKind loss) {
  if (data.empty()) throw std::invalid_argument("empty validation data");
  if (loss == LossKind::Iou)
    throw std::invalid_argument("iou risk comes from score maps, not a classifier");
  if (loss_needs_labels(loss))
    for (const LabeledSample& s : data)
      if (s.label < 0)
        throw std::invalid_argument("loss " + loss_name(loss) + " needs labeled data");

  std::vector<int> full_labels;
  if (loss != LossKind::Misclassify) {
    auto preds = batch_predict(net, data);
    full_labels.resize(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) full_labels[i] = preds[i].label;
  }
  auto pn = prune(net, lambda);
  auto preds = batch_predict(pn.network, data);

  std::vector<double> losses(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    int v = 0;
    switch (loss) {
      case LossKind::Misclassify:
        v = loss_misclassify(data[i].label, preds[i].label);
        break;
      case LossKind::Relaxed:
        v = loss_relaxed(data[i].label, preds[i].label, full_labels[i]);
        break;
      case LossKind::Disagree:
        v = loss_disagree(full_labels[i], preds[i].label);
        break;
      case LossKind::Iou:
        break;
    }
    losses[i] = static_cast<double>(v);
  }
  return losses;
}

}  // namespace

BootstrapReport bootstrap_risk(const DenseNetwork& net, double lambda,
                               std::span<const LabeledSample> data, LossKind loss,
                               long B, std::uint64_t seed) {
  if (B < 1) throw std::invalid_argument("need at least one bootstrap resample");
  auto losses = sample_losses(net, lambda, data, loss);
  std::size_t m = losses.size();

  BootstrapReport rep;
  rep.lambda = lambda;
  rep.loss = loss;
  rep.B = B;
  rep.m = static_cast<long>(m);
  rep.seed = seed;
  double sum = 0.0;
  for (double v : losses) sum += v;
  rep.point_risk = sum / static_cast<double>(m);

  rep.risks.resize(static_cast<std::size_t>(B));
  parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
    SplitMix64 g = SplitMix64::stream(seed, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += losses[g.below(m)];
    rep.risks[b] = acc / static_cast<double>(m);
  });
  return rep;
}

SuperuniformReport simulate_superuniformity(PValueKind kind, long n, double alpha,
                                            long trials, std::uint64_t seed,
                                            std::span<const double> u_levels) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  for (double u : u_levels)
    if (!(u >= 0.0 && u <= 1.0))
      throw std::invalid_argument("cdf levels must lie in [0, 1]");

  std::vector<double> pvals(static_cast<std::size_t>(trials));
  parallel_for(pvals.size(), [&](std::size_t t) {
    SplitMix64 g = SplitMix64::stream(seed, t);
    long hits = 0;
    for (long i = 0; i < n; ++i)
      if (g.uniform() < alpha) ++hits;
    double rhat = static_cast<double>(hits) / static_cast<double>(n);
    pvals[t] = p_value(kind, {n, rhat, alpha});
  });

  SuperuniformReport rep;
  rep.pvalue = kind;
  rep.n = n;
  rep.alpha = alpha;
  rep.trials = trials;
  rep.seed = seed;
  rep.u.assign(u_levels.begin(), u_levels.end());
  rep.cdf.resize(rep.u.size());
  for (std::size_t j = 0; j < rep.u.size(); ++j) {
    long c = 0;
    for (double p : pvals)
      if (p <= rep.u[j]) ++c;
    rep.cdf[j] = static_cast<double>(c) / static_cast<double>(trials);
  }
  return rep;
}

SimReport simulate_fwer(std::span<const double> grid, std::span<const double> true_risk,
                        long n, double alpha, double delta, PValueKind kind,
                        long trials, std::uint64_t seed) {
  if (grid.size() != true_risk.size() || grid.empty())
    throw std::invalid_argument("grid and risk curve sizes must match and be nonempty");
  for (double r : true_risk)
    if (!(r >= 0.0 && r <= 1.0))
      throw std::invalid_argument("true risks must lie in [0, 1]");
  if (n < 1 || trials < 1) throw std::invalid_argument("need n >= 1 and trials >= 1");
  check_levels(alpha, delta);

  SimReport rep;
  rep.trials = trials;
  rep.n = n;
  rep.alpha = alpha;
  rep.delta = delta;
  rep.pvalue = kind;
  rep.procedure = "fixed-sequence";
  rep.lambda_hat.assign(static_cast<std::size_t>(trials),
                        std::numeric_limits<double>::quiet_NaN());
  rep.violated.assign(static_cast<std::size_t>(trials), 0);

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    SplitMix64 g = SplitMix64::stream(seed, t);
    // one uniform per sample, shared across the grid, couples the losses the
    // way reusing one calibration set does
    std::vector<double> u(static_cast<std::size_t>(n));
    for (double& v : u) v = g.uniform();
    std::sort(u.begin(), u.end());

    std::vector<double> pvals(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      auto below = std::lower_bound(u.begin(), u.end(), true_risk[j]) - u.begin();
      double rhat = static_cast<double>(below) / static_cast<double>(n);
      pvals[j] = p_value(kind, {n, rhat, alpha});
    }
    auto rejected = fixed_sequence(pvals, delta);
    if (rejected.empty()) return;
    rep.lambda_hat[t] = grid[rejected.back()];
    for (std::size_t j : rejected)
      if (true_risk[j] > alpha) {
        rep.violated[t] = 1;
        break;
      }
  });

  long bad = 0;
  for (std::uint8_t v : rep.violated) bad += v;
  rep.violation_rate = static_cast<double>(bad) / static_cast<double>(trials);
  return rep;
}

SimReport simulate_fwer_fallback(const Matrix& true_risk, long n, double alpha,
                                 double delta, PValueKind kind, long trials,
                                 std::uint64_t seed) {
  if (true_risk.rows == 0 || true_risk.cols == 0)
    throw std::invalid_argument("empty risk surface");
  for (double r : true_risk.data)
    if (!(r >= 0.0 && r <= 1.0))
      throw std::invalid_argument("true risks must lie in [0, 1]");
  if (n < 1 || trials < 1) throw std::invalid_argument("need n >= 1 and trials >= 1");
  check_levels(alpha, delta);

  SimReport rep;
  rep.trials = trials;
  rep.n = n;
  rep.alpha = alpha;
  rep.delta = delta;
  rep.pvalue = kind;
  rep.procedure = "fallback";
  rep.lambda_hat.assign(static_cast<std::size_t>(trials),
                        std::numeric_limits<double>::quiet_NaN());
  rep.violated.assign(static_cast<std::size_t>(trials), 0);

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    SplitMix64 g = SplitMix64::stream(seed, t);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (double& v : u) v = g.uniform();
    std::sort(u.begin(), u.end());

    Matrix pvals(true_risk.rows, true_risk.cols);
    for (std::size_t k = 0; k < true_risk.rows; ++k)
      for (std::size_t j = 0; j < true_risk.cols; ++j) {
        auto below =
            std::lower_bound(u.begin(), u.end(), true_risk(k, j)) - u.begin();
        double rhat = static_cast<double>(below) / static_cast<double>(n);
        pvals(k, j) = p_value(kind, {n, rhat, alpha});
      }
    auto res = fallback_graph(pvals, delta);
    if (res.rejected.empty()) return;
    std::size_t max_col = 0;
    for (auto [k, j] : res.rejected) {
      max_col = std::max(max_col, j);
      if (true_risk(k, j) > alpha) rep.violated[t] = 1;
    }
    rep.lambda_hat[t] =
        static_cast<double>(max_col) / static_cast<double>(true_risk.cols);
  });

  long bad = 0;
  for (std::uint8_t v : rep.violated) bad += v;
  rep.violation_rate = static_cast<double>(bad) / static_cast<double>(trials);
  return rep;
}

}  // namespace riskprune

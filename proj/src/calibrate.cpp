#include "riskprune/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "riskprune/io/scoremap.hpp"

namespace riskprune {

namespace {

void check_levels(double alpha, double delta) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
}

void check_pairing(LossKind loss, PValueKind pvalue) {
  if (!loss_is_binary(loss) && !pvalue_accepts_bounded(pvalue)) {
    throw std::invalid_argument("loss " + loss_name(loss) +
                                " is bounded, not binary; use a prw or hb p-value");
  }
}

void check_labels(std::span<const LabeledSample> data, LossKind loss) {
  if (!loss_needs_labels(loss)) return;
  for (const LabeledSample& s : data)
    if (s.label < 0)
      throw std::invalid_argument("loss " + loss_name(loss) + " needs labeled data");
}

std::string guarantee_note(double alpha, double delta, const std::string& loss,
                           const std::string& pvalue) {
  std::ostringstream os;
  os << "guarantee: with probability at least " << (1.0 - delta)
     << " over the calibration draw, the " << loss
     << " risk at every certified ratio is at most " << alpha << " (" << pvalue
     << " p-values)";
  return os.str();
}

}  // namespace

std::vector<double> build_grid(int Q) {
  if (Q < 1) throw std::invalid_argument("Q must be at least 1");
  std::vector<double> grid(static_cast<std::size_t>(Q));
  for (int j = 0; j < Q; ++j)
    grid[static_cast<std::size_t>(j)] = static_cast<double>(j) / static_cast<double>(Q);
  return grid;
}

std::vector<RiskCurvePoint> risk_curve(const DenseNetwork& net,
                                       std::span<const LabeledSample> data, LossKind loss,
                                       std::span<const double> grid) {
  if (data.empty()) throw std::invalid_argument("empty calibration data");
  if (loss == LossKind::Iou)
    throw std::invalid_argument("iou risk comes from score maps, not a classifier");
  check_labels(data, loss);
  validate_network(net);

  std::vector<int> full_labels;
  if (loss != LossKind::Misclassify) {
    auto preds = batch_predict(net, data);
    full_labels.resize(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) full_labels[i] = preds[i].label;
  }

  MagnitudeRanking ranking(net);
  std::vector<RiskCurvePoint> curve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto pn = ranking.apply(net, grid[g]);
    auto preds = batch_predict(pn.network, data);
    std::vector<LossSample> losses(data.size());
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
      losses[i] = {static_cast<double>(v), true};
    }
    auto est = empirical_risk(losses);
    curve[g] = {grid[g], est.rhat, est.n_defined, est.defined};
  }
  return curve;
}

std::vector<RiskCurvePoint> segmentation_curve(const ScoreMapSet& maps, double beta) {
  if (maps.pruned.empty()) throw std::invalid_argument("no pruned score maps");
  std::size_t rows = maps.full.rows;
  std::size_t cols = maps.full.cols;

  std::vector<BinaryMask> reference(maps.full.count);
  for (std::size_t i = 0; i < maps.full.count; ++i)
    reference[i] = mask_from_scores(maps.full.image(i), rows, cols, beta);

  std::vector<RiskCurvePoint> curve(maps.pruned.size());
  for (std::size_t g = 0; g < maps.pruned.size(); ++g) {
    const ScoreMaps& sm = maps.pruned[g];
    std::vector<LossSample> losses(sm.count);
    for (std::size_t i = 0; i < sm.count; ++i) {
      auto cand = mask_from_scores(sm.image(i), rows, cols, beta);
      losses[i] = {loss_iou(reference[i], cand), true};
    }
    auto est = empirical_risk(losses);
    curve[g] = {sm.lambda, est.rhat, est.n_defined, est.defined};
  }
  return curve;
}

CalibrationResult calibrate_curve(std::span<const RiskCurvePoint> curve,
                                  const CalibrationConfig& cfg) {
  check_levels(cfg.alpha, cfg.delta);
  check_pairing(cfg.loss, cfg.pvalue);
  if (curve.empty()) throw std::invalid_argument("empty risk curve");

  CalibrationResult res;
  res.config = cfg;
  res.points.resize(curve.size());
  std::vector<double> pvals(curve.size());
  for (std::size_t j = 0; j < curve.size(); ++j) {
    const RiskCurvePoint& pt = curve[j];
    GridPoint& gp = res.points[j];
    gp.lambda = pt.lambda;
    gp.rhat = pt.rhat;
    gp.n_defined = pt.n_defined;
    gp.defined = pt.defined;
    gp.p = pt.defined ? p_value(cfg.pvalue, {pt.n_defined, pt.rhat, cfg.alpha}) : 1.0;
    pvals[j] = gp.p;
  }

  if (cfg.naive) {
    int idx = naive_scan(curve, cfg.alpha);
    if (idx >= 0) res.lambda_hat = curve[static_cast<std::size_t>(idx)].lambda;
    res.notes.push_back("naive scan: stopped at the first empirical exceedance; "
                        "no statistical guarantee attaches to this choice");
    if (!res.lambda_hat) res.notes.push_back("no pruning certified");
    return res;
  }

  auto rejected = fixed_sequence(pvals, cfg.delta);
  for (std::size_t j : rejected) res.points[j].rejected = true;
  if (!rejected.empty())
    res.lambda_hat = res.points[rejected.back()].lambda;
  res.notes.push_back(guarantee_note(cfg.alpha, cfg.delta, loss_name(cfg.loss),
                                     pvalue_name(cfg.pvalue)));
  if (!res.lambda_hat) res.notes.push_back("no pruning certified");
  return res;
}

CalibrationResult calibrate_1d(const DenseNetwork& net,
                               std::span<const LabeledSample> data,
                               const CalibrationConfig& cfg) {
  check_levels(cfg.alpha, cfg.delta);
  check_pairing(cfg.loss, cfg.pvalue);
  auto grid = build_grid(cfg.Q);
  auto curve = risk_curve(net, data, cfg.loss, grid);
  return calibrate_curve(curve, cfg);
}

int naive_scan(std::span<const RiskCurvePoint> curve, double alpha) {
  int last = -1;
  for (std::size_t j = 0; j < curve.size(); ++j) {
    if (!curve[j].defined || curve[j].rhat > alpha) break;
    last = static_cast<int>(j);
  }
  return last;
}

std::string selection_policy_name(SelectionPolicy p) {
  switch (p) {
    case SelectionPolicy::MaxSparsityMinAbstention: return "max-sparsity-min-abstention";
  }
  throw std::invalid_argument("unknown selection policy");
}

SelectiveResult calibrate_selective(const DenseNetwork& net,
                                    std::span<const LabeledSample> data,
                                    const SelectiveConfig& cfg) {
  check_levels(cfg.alpha, cfg.delta);
  if (cfg.thresholds.empty()) throw std::invalid_argument("no confidence thresholds");
  if (!std::is_sorted(cfg.thresholds.begin(), cfg.thresholds.end()))
    throw std::invalid_argument("thresholds must be ascending");
  for (double t : cfg.thresholds)
    if (!(t >= 0.0 && t < 1.0))
      throw std::invalid_argument("thresholds must lie in [0, 1)");
  if (cfg.T < 0 || cfg.T >= cfg.Q)
    throw std::invalid_argument("need 0 <= T < Q");
  if (data.empty()) throw std::invalid_argument("empty calibration data");
  for (const LabeledSample& s : data)
    if (s.label < 0)
      throw std::invalid_argument("selective calibration needs labeled data");
  validate_network(net);

  std::size_t j_rows = cfg.thresholds.size();
  std::size_t t_cols = static_cast<std::size_t>(cfg.T) + 1;
  long n_total = static_cast<long>(data.size());

  SelectiveResult res;
  res.config = cfg;
  res.cells.assign(j_rows, std::vector<SelectiveCell>(t_cols));

  // one prune + forward sweep per column, shared by every threshold row
  MagnitudeRanking ranking(net);
  Matrix pvals(j_rows, t_cols);
  for (std::size_t j = 0; j < t_cols; ++j) {
    double lambda2 = static_cast<double>(j) / static_cast<double>(cfg.Q);
    auto pn = ranking.apply(net, lambda2);
    auto preds = batch_predict(pn.network, data);
    std::vector<ConfidenceOutcome> outcomes(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      outcomes[i] = {preds[i].confidence, preds[i].label == data[i].label};

    for (std::size_t k = 0; k < j_rows; ++k) {
      SelectiveCell& cell = res.cells[k][j];
      cell.lambda1 = cfg.thresholds[k];
      cell.lambda2 = lambda2;
      auto sr = selective_risk(outcomes, cell.lambda1);
      cell.defined = sr.defined;
      cell.n_kept = sr.n_kept;
      cell.rhat = sr.defined ? sr.risk : 0.0;
      cell.abstention = abstention_fraction(n_total, sr.n_kept);
      if (sr.defined) {
        long n_for_p = cfg.n_mode == PValueNMode::Kept ? sr.n_kept : n_total;
        cell.p = p_binomial({n_for_p, sr.risk, cfg.alpha});
      } else {
        cell.p = 1.0;  // degenerate cell: tested, never rejected
      }
      pvals(k, j) = cell.p;
    }
  }

  auto fb = fallback_graph(pvals, cfg.delta);
  res.rejected = fb.rejected;
  for (auto [k, j] : fb.rejected) res.cells[k][j].rejected = true;
  for (std::size_t k = 0; k < j_rows; ++k)
    for (std::size_t j = 0; j < t_cols; ++j)
      res.cells[k][j].budget = fb.tested_budgets(k, j);

  res.selected = select_pair(res, cfg.policy);
  res.notes.push_back(guarantee_note(cfg.alpha, cfg.delta,
                                     "conditional misclassification",
                                     pvalue_name(PValueKind::Binomial)));
  res.notes.push_back("selection policy: " + selection_policy_name(cfg.policy));
  res.notes.push_back(cfg.n_mode == PValueNMode::Kept
                          ? "p-value n: kept samples per cell"
                          : "p-value n: full calibration count");
  if (!res.selected) res.notes.push_back("no pruning certified");
  return res;
}

std::optional<std::pair<double, double>> select_pair(const SelectiveResult& result,
                                                     SelectionPolicy policy) {
  if (policy != SelectionPolicy::MaxSparsityMinAbstention)
    throw std::invalid_argument("unknown selection policy");
  std::optional<std::pair<double, double>> best;
  for (auto [k, j] : result.rejected) {
    const SelectiveCell& cell = result.cells[k][j];
    if (!best) {
      best = {cell.lambda1, cell.lambda2};
      continue;
    }
    if (cell.lambda2 > best->second ||
        (cell.lambda2 == best->second && cell.lambda1 < best->first))
      best = {cell.lambda1, cell.lambda2};
  }
  return best;
}

}  // namespace riskprune

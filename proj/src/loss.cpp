#include "riskprune/loss.hpp"

#include <algorithm>
#include <stdexcept>

namespace riskprune {

std::string loss_name(LossKind k) {
  switch (k) {
    case LossKind::Misclassify: return "misclassify";
    case LossKind::Relaxed: return "relaxed";
    case LossKind::Disagree: return "disagree";
    case LossKind::Iou: return "iou";
  }
  throw std::invalid_argument("unknown loss kind");
}

LossKind loss_from_name(const std::string& name) {
  if (name == "misclassify") return LossKind::Misclassify;
  if (name == "relaxed") return LossKind::Relaxed;
  if (name == "disagree") return LossKind::Disagree;
  if (name == "iou") return LossKind::Iou;
  throw std::invalid_argument("unknown loss name: " + name);
}

bool loss_is_binary(LossKind k) { return k != LossKind::Iou; }

bool loss_needs_labels(LossKind k) {
  return k == LossKind::Misclassify || k == LossKind::Relaxed;
}

int loss_misclassify(int y, int yhat) { return y != yhat ? 1 : 0; }

int loss_relaxed(int y, int yhat_pruned, int yhat_full) {
  int diff = loss_misclassify(y, yhat_pruned) - loss_misclassify(y, yhat_full);
  return diff > 0 ? diff : 0;
}

int loss_disagree(int yhat_full, int yhat_pruned) {
  return yhat_full != yhat_pruned ? 1 : 0;
}

RiskEstimate empirical_risk(std::span<const LossSample> losses) {
  RiskEstimate est;
  double sum = 0.0;
  for (const LossSample& s : losses) {
    if (!s.defined) continue;
    sum += s.value;
    ++est.n_defined;
  }
  if (est.n_defined == 0) return est;
  est.rhat = sum / static_cast<double>(est.n_defined);
  est.defined = true;
  return est;
}

SelectiveRisk selective_risk(std::span<const ConfidenceOutcome> outcomes,
                             double threshold) {
  SelectiveRisk sr;
  long wrong = 0;
  for (const ConfidenceOutcome& o : outcomes) {
    if (!(o.confidence > threshold)) continue;
    ++sr.n_kept;
    if (!o.correct) ++wrong;
  }
  if (sr.n_kept == 0) return sr;
  sr.risk = static_cast<double>(wrong) / static_cast<double>(sr.n_kept);
  sr.defined = true;
  return sr;
}

double abstention_fraction(long n, long n_kept) {
  if (n <= 0) return 0.0;
  return static_cast<double>(n - n_kept) / static_cast<double>(n);
}

std::size_t BinaryMask::count() const {
  std::size_t c = 0;
  for (std::uint8_t p : pixels)
    if (p) ++c;
  return c;
}

BinaryMask mask_from_scores(std::span<const double> scores, std::size_t rows,
                            std::size_t cols, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("beta must lie in (0, 1)");
  if (scores.size() != rows * cols)
    throw std::invalid_argument("score count does not match mask dims");
  BinaryMask mask(rows, cols);
  double cut = 1.0 - beta;
  for (std::size_t i = 0; i < scores.size(); ++i)
    mask.pixels[i] = scores[i] >= cut ? 1 : 0;
  return mask;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("mask dims differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    bool pa = a.pixels[i] != 0;
    bool pb = b.pixels[i] != 0;
    if (pa && pb) ++inter;
    if (pa || pb) ++uni;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double loss_iou(const BinaryMask& reference, const BinaryMask& candidate) {
  return 1.0 - iou(reference, candidate);
}

}  // namespace riskprune

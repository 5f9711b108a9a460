#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace riskprune {

enum class LossKind { Misclassify, Relaxed, Disagree, Iou };

std::string loss_name(LossKind k);
LossKind loss_from_name(const std::string& name);
bool loss_is_binary(LossKind k);
bool loss_needs_labels(LossKind k);

// 1{y != yhat}
int loss_misclassify(int y, int yhat);

// (1{y != yhat_pruned} - 1{y != yhat_full})_+  : only errors the dense model
// did not already make count
int loss_relaxed(int y, int yhat_pruned, int yhat_full);

// 1{yhat_full != yhat_pruned}, label-free
int loss_disagree(int yhat_full, int yhat_pruned);

struct LossSample {
  double value = 0.0;
  bool defined = true;
};

struct RiskEstimate {
  double rhat = 0.0;
  long n_defined = 0;
  bool defined = false;
};

// mean over the defined entries; defined=false when there are none
RiskEstimate empirical_risk(std::span<const LossSample> losses);

struct ConfidenceOutcome {
  double confidence = 0.0;
  bool correct = false;
};

struct SelectiveRisk {
  double risk = 0.0;
  long n_kept = 0;
  bool defined = false;
};

// error rate among samples the model keeps (confidence strictly above the
// threshold); undefined when everything is abstained
SelectiveRisk selective_risk(std::span<const ConfidenceOutcome> outcomes, double threshold);

double abstention_fraction(long n, long n_kept);

struct BinaryMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 0 or 1

  BinaryMask() = default;
  BinaryMask(std::size_t r, std::size_t c) : rows(r), cols(c), pixels(r * c, 0) {}

  std::size_t count() const;
};

// pixel is in the mask when its score >= 1 - beta
BinaryMask mask_from_scores(std::span<const double> scores, std::size_t rows,
                            std::size_t cols, double beta);

// intersection over union; 1 when both masks are empty
double iou(const BinaryMask& a, const BinaryMask& b);

// 1 - iou, bounded in [0, 1]
double loss_iou(const BinaryMask& reference, const BinaryMask& candidate);

}  // namespace riskprune

#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "riskprune/network.hpp"

namespace riskprune {

struct WeightCoord {
  std::size_t layer = 0;
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const WeightCoord&, const WeightCoord&) = default;
  friend bool operator<(const WeightCoord& a, const WeightCoord& b) {
    return std::tie(a.layer, a.row, a.col) < std::tie(b.layer, b.row, b.col);
  }
};

struct PruneMask {
  std::vector<WeightCoord> zeroed;  // sorted lexicographically
  double ratio = 0.0;
  double threshold = 0.0;
};

struct PrunedNetwork {
  DenseNetwork network;
  PruneMask mask;
  std::vector<WeightCoord> propagated;  // extra zeros from dead-neuron removal
};

// Global magnitude order of all weights, ascending by (|w|, layer, row, col).
// Masks for every ratio are prefixes of this order, so a grid of ratios can
// share one ranking.
class MagnitudeRanking {
 public:
  explicit MagnitudeRanking(const DenseNetwork& net);

  std::size_t weight_count() const { return order_.size(); }
  std::size_t zero_count(double ratio) const;  // floor(ratio * K)
  double threshold(double ratio) const;        // 0 when zero_count is 0
  PruneMask mask(double ratio) const;
  PrunedNetwork apply(const DenseNetwork& net, double ratio) const;

 private:
  std::vector<WeightCoord> order_;
  std::vector<double> magnitudes_;  // |w| in the same order
};

// magnitude at the pruning boundary; ratio in [0, 1]
double compute_threshold(const DenseNetwork& net, double ratio);

// zero exactly floor(ratio * K) weights of smallest absolute value, ties
// broken by (layer, row, col); biases are untouched
PrunedNetwork prune(const DenseNetwork& net, double ratio);

// Removes weights that provably cannot affect the output:
//  (a) a hidden unit whose outgoing weights are all zero loses its incoming
//      weights and its bias;
//  (b) a hidden unit with all-zero incoming weights and zero bias loses its
//      outgoing weights (only for activations that map 0 to 0).
// Repeats until nothing changes.  Forward outputs are bit-identical.
PrunedNetwork propagate_dead_neurons(const PrunedNetwork& pn);

// fraction of exactly-zero weights, biases excluded
double sparsity(const PrunedNetwork& pn);

// Mean |w| over the outgoing weights of each input pixel of the first layer,
// reshaped to 28x28 row-major.  Requires input_dim == 784.
Matrix average_magnitude_map(const DenseNetwork& net);

}  // namespace riskprune

#include "riskprune/prune.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskprune {

namespace {

void check_ratio(double ratio) {
  if (!(ratio >= 0.0 && ratio < 1.0))
    throw std::invalid_argument("prune ratio must lie in [0, 1)");
}

// ratio * K is integral in exact arithmetic for grid ratios j/Q; the slack
// keeps floor() from dropping a unit on the inexact double product
std::size_t count_for(double ratio, std::size_t total) {
  double scaled = ratio * static_cast<double>(total);
  return static_cast<std::size_t>(std::floor(scaled + 1e-9));
}

bool zero_preserving(Activation a) {
  return a == Activation::Relu || a == Activation::Identity;
}

}  // namespace

MagnitudeRanking::MagnitudeRanking(const DenseNetwork& net) {
  validate_network(net);
  order_.reserve(count_weights(net));
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Matrix& w = net.layers[l].weights;
    for (std::size_t r = 0; r < w.rows; ++r)
      for (std::size_t c = 0; c < w.cols; ++c) order_.push_back({l, r, c});
  }
  std::sort(order_.begin(), order_.end(),
            [&net](const WeightCoord& a, const WeightCoord& b) {
              double ma = std::abs(net.layers[a.layer].weights(a.row, a.col));
              double mb = std::abs(net.layers[b.layer].weights(b.row, b.col));
              if (ma != mb) return ma < mb;
              return a < b;
            });
  magnitudes_.reserve(order_.size());
  for (const WeightCoord& wc : order_)
    magnitudes_.push_back(std::abs(net.layers[wc.layer].weights(wc.row, wc.col)));
}

std::size_t MagnitudeRanking::zero_count(double ratio) const {
  check_ratio(ratio);
  return count_for(ratio, order_.size());
}

double MagnitudeRanking::threshold(double ratio) const {
  std::size_t m = zero_count(ratio);
  return m == 0 ? 0.0 : magnitudes_[m - 1];
}

PruneMask MagnitudeRanking::mask(double ratio) const {
  PruneMask out;
  out.ratio = ratio;
  out.threshold = threshold(ratio);
  std::size_t m = zero_count(ratio);
  out.zeroed.assign(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(out.zeroed.begin(), out.zeroed.end());
  return out;
}

PrunedNetwork MagnitudeRanking::apply(const DenseNetwork& net, double ratio) const {
  PrunedNetwork out;
  out.network = net;
  out.mask = mask(ratio);
  for (const WeightCoord& wc : out.mask.zeroed)
    out.network.layers[wc.layer].weights(wc.row, wc.col) = 0.0;
  return out;
}

double compute_threshold(const DenseNetwork& net, double ratio) {
  return MagnitudeRanking(net).threshold(ratio);
}

PrunedNetwork prune(const DenseNetwork& net, double ratio) {
  return MagnitudeRanking(net).apply(net, ratio);
}

PrunedNetwork propagate_dead_neurons(const PrunedNetwork& pn) {
  PrunedNetwork out = pn;
  DenseNetwork& net = out.network;
  bool changed = true;
  while (changed) {
    changed = false;
    // hidden unit u is the output of layer l and the input of layer l + 1
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
      Layer& here = net.layers[l];
      Layer& next = net.layers[l + 1];
      for (std::size_t u = 0; u < here.out_dim(); ++u) {
        bool out_dead = true;
        for (std::size_t r = 0; r < next.out_dim(); ++r)
          if (next.weights(r, u) != 0.0) {
            out_dead = false;
            break;
          }
        if (out_dead) {
          // nothing downstream reads this unit, so its inputs are free
          for (std::size_t c = 0; c < here.in_dim(); ++c) {
            if (here.weights(u, c) != 0.0) {
              here.weights(u, c) = 0.0;
              out.propagated.push_back({l, u, c});
              changed = true;
            }
          }
          if (here.biases[u] != 0.0) {
            here.biases[u] = 0.0;
            changed = true;
          }
          continue;
        }
        if (!zero_preserving(here.activation)) continue;
        bool in_dead = here.biases[u] == 0.0;
        for (std::size_t c = 0; in_dead && c < here.in_dim(); ++c)
          if (here.weights(u, c) != 0.0) in_dead = false;
        if (in_dead) {
          // the unit emits exactly zero, so downstream edges carry nothing
          for (std::size_t r = 0; r < next.out_dim(); ++r) {
            if (next.weights(r, u) != 0.0) {
              next.weights(r, u) = 0.0;
              out.propagated.push_back({l + 1, r, u});
              changed = true;
            }
          }
        }
      }
    }
  }
  std::sort(out.propagated.begin(), out.propagated.end());
  out.propagated.erase(std::unique(out.propagated.begin(), out.propagated.end()),
                       out.propagated.end());
  return out;
}

double sparsity(const PrunedNetwork& pn) {
  std::size_t zeros = 0;
  std::size_t total = 0;
  for (const Layer& layer : pn.network.layers) {
    total += layer.weights.data.size();
    for (double w : layer.weights.data)
      if (w == 0.0) ++zeros;
  }
  if (total == 0) return 0.0;
  return static_cast<double>(zeros) / static_cast<double>(total);
}

Matrix average_magnitude_map(const DenseNetwork& net) {
  validate_network(net);
  const Layer& first = net.layers.front();
  if (first.in_dim() != 784)
    throw std::invalid_argument("magnitude map needs a 784-input first layer");
  Matrix map(28, 28);
  for (std::size_t pix = 0; pix < 784; ++pix) {
    double sum = 0.0;
    for (std::size_t r = 0; r < first.out_dim(); ++r)
      sum += std::abs(first.weights(r, pix));
    map.data[pix] = sum / static_cast<double>(first.out_dim());
  }
  return map;
}

}  // namespace riskprune

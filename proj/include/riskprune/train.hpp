#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "riskprune/network.hpp"

namespace riskprune {

struct TrainConfig {
  int epochs = 5;
  double learning_rate = 0.1;
  int batch_size = 32;
  std::uint64_t seed = 1;
};

struct LayerGradients {
  Matrix weights;
  std::vector<double> biases;
};

// Glorot-uniform weights, zero biases, relu hidden layers, softmax output.
// dims lists the layer widths, e.g. {784, 128, 128, 10}.
DenseNetwork make_network(const std::vector<std::size_t>& dims, std::uint64_t seed);

// mean cross-entropy of the softmax output against the labels, natural log
double mean_cross_entropy(const DenseNetwork& net, std::span<const LabeledSample> batch);

// mean gradient of the cross-entropy over the batch, one entry per layer
std::vector<LayerGradients> cross_entropy_gradients(const DenseNetwork& net,
                                                    std::span<const LabeledSample> batch);

// plain mini-batch SGD; given the same seed, data and config the result is
// bit-identical from run to run
DenseNetwork train_sgd(const std::vector<std::size_t>& dims,
                       std::span<const LabeledSample> data, const TrainConfig& cfg);

}  // namespace riskprune

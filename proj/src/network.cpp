#include "riskprune/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskprune/parallel.hpp"

namespace riskprune {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Softmax: return "softmax";
    case Activation::Identity: return "identity";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "softmax") return Activation::Softmax;
  if (name == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + name);
}

void validate_network(const DenseNetwork& net) {
  if (net.layers.empty()) throw std::invalid_argument("network has no layers");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    if (layer.weights.rows == 0 || layer.weights.cols == 0)
      throw std::invalid_argument("layer has an empty weight matrix");
    if (layer.weights.data.size() != layer.weights.rows * layer.weights.cols)
      throw std::invalid_argument("weight buffer does not match its shape");
    if (layer.biases.size() != layer.out_dim())
      throw std::invalid_argument("bias length does not match the layer output");
    if (l > 0 && layer.in_dim() != net.layers[l - 1].out_dim())
      throw std::invalid_argument("layer input does not match the previous output");
  }
}

std::size_t count_parameters(const DenseNetwork& net) {
  std::size_t total = 0;
  for (const Layer& layer : net.layers)
    total += layer.weights.data.size() + layer.biases.size();
  return total;
}

std::size_t count_weights(const DenseNetwork& net) {
  std::size_t total = 0;
  for (const Layer& layer : net.layers) total += layer.weights.data.size();
  return total;
}

std::vector<double> forward(const DenseNetwork& net, std::span<const double> input) {
  if (net.layers.empty()) throw std::invalid_argument("network has no layers");
  if (input.size() != net.input_dim())
    throw std::invalid_argument("input size does not match the first layer");

  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (const Layer& layer : net.layers) {
    next.assign(layer.out_dim(), 0.0);
    for (std::size_t r = 0; r < layer.out_dim(); ++r) {
      const double* w = &layer.weights.data[r * layer.weights.cols];
      double acc = layer.biases[r];
      for (std::size_t c = 0; c < layer.in_dim(); ++c) acc += w[c] * cur[c];
      next[r] = acc;
    }
    switch (layer.activation) {
      case Activation::Relu:
        for (double& v : next) v = v > 0.0 ? v : 0.0;
        break;
      case Activation::Softmax: {
        // shift by the max logit so exp never overflows
        double mx = next[0];
        for (double v : next) mx = std::max(mx, v);
        double z = 0.0;
        for (double& v : next) {
          v = std::exp(v - mx);
          z += v;
        }
        for (double& v : next) v /= z;
        break;
      }
      case Activation::Identity: break;
    }
    cur.swap(next);
  }
  return cur;
}

Prediction predict_with_confidence(const DenseNetwork& net, std::span<const double> input) {
  std::vector<double> scores = forward(net, input);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return {static_cast<int>(best), scores[best]};
}

int predict(const DenseNetwork& net, std::span<const double> input) {
  return predict_with_confidence(net, input).label;
}

double max_confidence(const DenseNetwork& net, std::span<const double> input) {
  return predict_with_confidence(net, input).confidence;
}

std::vector<Prediction> batch_predict(const DenseNetwork& net,
                                      std::span<const LabeledSample> data) {
  std::vector<Prediction> out(data.size());
  parallel_for(data.size(),
               [&](std::size_t i) { out[i] = predict_with_confidence(net, data[i].input); });
  return out;
}

}  // namespace riskprune

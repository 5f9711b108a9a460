#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace riskprune {

enum class Activation { Relu, Softmax, Identity };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// dense row-major matrix
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// weights are [out x in]: row r holds the incoming weights of output unit r
struct Layer {
  Matrix weights;
  std::vector<double> biases;
  Activation activation = Activation::Relu;

  std::size_t in_dim() const { return weights.cols; }
  std::size_t out_dim() const { return weights.rows; }
};

struct DenseNetwork {
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }
};

// throws std::invalid_argument on dimension mismatches or empty networks
void validate_network(const DenseNetwork& net);

// weights plus biases
std::size_t count_parameters(const DenseNetwork& net);

// weights only, the pool global pruning draws from
std::size_t count_weights(const DenseNetwork& net);

std::vector<double> forward(const DenseNetwork& net, std::span<const double> input);

// argmax of the final scores, lowest index wins ties
int predict(const DenseNetwork& net, std::span<const double> input);

double max_confidence(const DenseNetwork& net, std::span<const double> input);

struct Prediction {
  int label = -1;
  double confidence = 0.0;
};

Prediction predict_with_confidence(const DenseNetwork& net, std::span<const double> input);

struct LabeledSample {
  std::vector<double> input;
  int label = -1;  // -1 when unlabeled
};

// one prediction per sample, in input order; parallel over samples
std::vector<Prediction> batch_predict(const DenseNetwork& net,
                                      std::span<const LabeledSample> data);

}  // namespace riskprune

#include "testutil.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "riskprune/rng.hpp"

#include <unistd.h>

namespace riskprune::testutil {

DenseNetwork random_network(const std::vector<std::size_t>& dims, std::uint64_t seed,
                            Activation last) {
  SplitMix64 g(seed);
  DenseNetwork net;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.weights = Matrix(dims[l + 1], dims[l]);
    for (double& w : layer.weights.data) w = g.uniform_signed(1.0);
    layer.biases.resize(dims[l + 1]);
    for (double& b : layer.biases) b = g.uniform_signed(0.1);
    layer.activation = (l + 2 < dims.size()) ? Activation::Relu : last;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

std::vector<double> random_input(std::size_t dim, std::uint64_t seed) {
  SplitMix64 g(seed);
  std::vector<double> x(dim);
  for (double& v : x) v = g.uniform();
  return x;
}

std::vector<LabeledSample> synthetic_digits(std::size_t count, std::uint64_t seed,
                                            double label_noise) {
  constexpr std::size_t side = 28;
  constexpr std::size_t dim = side * side;

  // mostly-black images with a few bright blobs per class, so inputs are
  // sparse the way real digit scans are
  static const std::vector<std::vector<double>> protos = [] {
    std::vector<std::vector<double>> p(10, std::vector<double>(dim, 0.0));
    for (int c = 0; c < 10; ++c) {
      SplitMix64 g = SplitMix64::stream(0xD161D5ULL, static_cast<std::uint64_t>(c));
      for (int blob = 0; blob < 6; ++blob) {
        double cr = 3.0 + 22.0 * g.uniform();
        double cc = 3.0 + 22.0 * g.uniform();
        double s2 = 2.0 * (1.0 + g.uniform());  // sigma^2 between 2 and 4
        for (std::size_t r = 0; r < side; ++r) {
          for (std::size_t col = 0; col < side; ++col) {
            double d2 = (r - cr) * (r - cr) + (col - cc) * (col - cc);
            p[c][r * side + col] += std::exp(-d2 / (2.0 * s2));
          }
        }
      }
      for (double& v : p[c]) v = std::min(v, 1.0);
    }
    return p;
  }();

  SplitMix64 g(seed);
  std::vector<LabeledSample> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    int cls = static_cast<int>(g.below(10));
    double gain = 0.8 + 0.4 * g.uniform();
    out[i].input.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      double v = protos[static_cast<std::size_t>(cls)][j] * gain + 0.08 * (g.uniform() - 0.5);
      out[i].input[j] = std::clamp(v, 0.0, 1.0);
    }
    out[i].label = cls;
    if (g.uniform() < label_noise)
      out[i].label = static_cast<int>((cls + 1 + g.below(9)) % 10);
  }
  return out;
}

std::string temp_path(const std::string& name) {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("riskprune-tests-" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return (dir / name).string();
}

}  // namespace riskprune::testutil

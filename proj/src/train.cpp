#include "riskprune/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "riskprune/rng.hpp"

namespace riskprune {

namespace {

void check_dims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("need at least input and output widths");
  for (std::size_t d : dims)
    if (d == 0) throw std::invalid_argument("layer widths must be positive");
}

struct ForwardTrace {
  std::vector<std::vector<double>> acts;  // acts[0] is the input
};

ForwardTrace traced_forward(const DenseNetwork& net, const LabeledSample& s) {
  ForwardTrace t;
  t.acts.reserve(net.layers.size() + 1);
  t.acts.push_back(s.input);
  for (const Layer& layer : net.layers) {
    const std::vector<double>& in = t.acts.back();
    std::vector<double> out(layer.out_dim());
    for (std::size_t r = 0; r < layer.out_dim(); ++r) {
      const double* w = &layer.weights.data[r * layer.weights.cols];
      double acc = layer.biases[r];
      for (std::size_t c = 0; c < layer.in_dim(); ++c) acc += w[c] * in[c];
      out[r] = acc;
    }
    if (layer.activation == Activation::Relu) {
      for (double& v : out) v = v > 0.0 ? v : 0.0;
    } else if (layer.activation == Activation::Softmax) {
      double mx = out[0];
      for (double v : out) mx = std::max(mx, v);
      double z = 0.0;
      for (double& v : out) {
        v = std::exp(v - mx);
        z += v;
      }
      for (double& v : out) v /= z;
    }
    t.acts.push_back(std::move(out));
  }
  return t;
}

void accumulate_gradients(const DenseNetwork& net, std::span<const LabeledSample> data,
                          std::span<const std::size_t> idx,
                          std::vector<LayerGradients>& grads) {
  const std::size_t L = net.layers.size();
  for (std::size_t pos = 0; pos < idx.size(); ++pos) {
    const LabeledSample& s = data[idx[pos]];
    ForwardTrace trace = traced_forward(net, s);

    // softmax plus cross-entropy: output delta is probs minus the one-hot
    std::vector<double> delta = trace.acts[L];
    delta[static_cast<std::size_t>(s.label)] -= 1.0;

    for (std::size_t l = L; l-- > 0;) {
      const Layer& layer = net.layers[l];
      const std::vector<double>& in = trace.acts[l];
      LayerGradients& g = grads[l];
      for (std::size_t r = 0; r < layer.out_dim(); ++r) {
        double d = delta[r];
        g.biases[r] += d;
        double* grow = &g.weights.data[r * layer.weights.cols];
        for (std::size_t c = 0; c < layer.in_dim(); ++c) grow[c] += d * in[c];
      }
      if (l == 0) break;
      std::vector<double> prev(layer.in_dim(), 0.0);
      for (std::size_t r = 0; r < layer.out_dim(); ++r) {
        double d = delta[r];
        const double* w = &layer.weights.data[r * layer.weights.cols];
        for (std::size_t c = 0; c < layer.in_dim(); ++c) prev[c] += d * w[c];
      }
      // relu hidden layers: gate by the activation sign
      const std::vector<double>& act = trace.acts[l];
      if (net.layers[l - 1].activation == Activation::Relu) {
        for (std::size_t c = 0; c < prev.size(); ++c)
          if (act[c] <= 0.0) prev[c] = 0.0;
      }
      delta = std::move(prev);
    }
  }
}

std::vector<LayerGradients> zero_gradients(const DenseNetwork& net) {
  std::vector<LayerGradients> grads(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    grads[l].weights = Matrix(net.layers[l].weights.rows, net.layers[l].weights.cols);
    grads[l].biases.assign(net.layers[l].biases.size(), 0.0);
  }
  return grads;
}

void check_batch(const DenseNetwork& net, std::span<const LabeledSample> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  for (const LabeledSample& s : batch) {
    if (s.input.size() != net.input_dim())
      throw std::invalid_argument("sample size does not match the network input");
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= net.output_dim())
      throw std::invalid_argument("label outside the output range");
  }
}

}  // namespace

DenseNetwork make_network(const std::vector<std::size_t>& dims, std::uint64_t seed) {
  check_dims(dims);
  // stream 0 of the seed, weights drawn row-major layer by layer
  SplitMix64 g = SplitMix64::stream(seed, 0);
  DenseNetwork net;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.weights = Matrix(dims[l + 1], dims[l]);
    double scale = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    for (double& w : layer.weights.data) w = g.uniform_signed(scale);
    layer.biases.assign(dims[l + 1], 0.0);
    layer.activation = (l + 2 < dims.size()) ? Activation::Relu : Activation::Softmax;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

double mean_cross_entropy(const DenseNetwork& net, std::span<const LabeledSample> batch) {
  check_batch(net, batch);
  double total = 0.0;
  for (const LabeledSample& s : batch) {
    std::vector<double> probs = forward(net, s.input);
    double p = probs[static_cast<std::size_t>(s.label)];
    total += -std::log(std::max(p, 1e-300));
  }
  return total / static_cast<double>(batch.size());
}

std::vector<LayerGradients> cross_entropy_gradients(const DenseNetwork& net,
                                                    std::span<const LabeledSample> batch) {
  check_batch(net, batch);
  if (net.layers.back().activation != Activation::Softmax)
    throw std::invalid_argument("cross-entropy training needs a softmax output");
  auto grads = zero_gradients(net);
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  accumulate_gradients(net, batch, idx, grads);
  double inv = 1.0 / static_cast<double>(batch.size());
  for (LayerGradients& g : grads) {
    for (double& v : g.weights.data) v *= inv;
    for (double& v : g.biases) v *= inv;
  }
  return grads;
}

DenseNetwork train_sgd(const std::vector<std::size_t>& dims,
                       std::span<const LabeledSample> data, const TrainConfig& cfg) {
  check_dims(dims);
  if (data.empty()) throw std::invalid_argument("no training data");
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be positive");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be positive");

  DenseNetwork net = make_network(dims, cfg.seed);
  check_batch(net, data);

  // stream 1 of the seed drives the epoch shuffles (Fisher-Yates)
  SplitMix64 shuffle = SplitMix64::stream(cfg.seed, 1);
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);

  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  auto grads = zero_gradients(net);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[shuffle.below(i)]);

    for (std::size_t start = 0; start < idx.size(); start += bs) {
      std::size_t end = std::min(idx.size(), start + bs);
      std::span<const std::size_t> batch_idx(idx.data() + start, end - start);
      for (LayerGradients& g : grads) {
        std::fill(g.weights.data.begin(), g.weights.data.end(), 0.0);
        std::fill(g.biases.begin(), g.biases.end(), 0.0);
      }
      accumulate_gradients(net, data, batch_idx, grads);
      double step = cfg.learning_rate / static_cast<double>(batch_idx.size());
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        double* w = net.layers[l].weights.data.data();
        const double* gw = grads[l].weights.data.data();
        for (std::size_t i = 0; i < grads[l].weights.data.size(); ++i) w[i] -= step * gw[i];
        for (std::size_t i = 0; i < grads[l].biases.size(); ++i)
          net.layers[l].biases[i] -= step * grads[l].biases[i];
      }
    }
  }
  return net;
}

}  // namespace riskprune

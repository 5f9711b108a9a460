#include "riskprune/io/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "riskprune/errors.hpp"

namespace riskprune {

namespace {

void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f32(std::ostream& out, double v) {
  float f = static_cast<float>(v);
  out.write(reinterpret_cast<const char*>(&f), sizeof f);
}

double read_value(std::istream& in, Precision prec, const std::string& path) {
  if (prec == Precision::Float64) {
    double v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
      throw io_error(path + ": truncated weight blob");
    return v;
  }
  float f;
  if (!in.read(reinterpret_cast<char*>(&f), sizeof f))
    throw io_error(path + ": truncated weight blob");
  return static_cast<double>(f);
}

std::string expect_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": truncated header");
  return line;
}

struct HeaderInfo {
  std::vector<std::size_t> in_dims;
  std::vector<std::size_t> out_dims;
  std::vector<Activation> activations;
};

HeaderInfo read_layer_lines(std::istream& in, const std::string& path,
                            std::size_t layers) {
  HeaderInfo info;
  for (std::size_t l = 0; l < layers; ++l) {
    std::istringstream ls(expect_line(in, path));
    std::string word, act;
    std::size_t in_dim = 0, out_dim = 0;
    if (!(ls >> word >> in_dim >> out_dim >> act) || word != "layer")
      throw io_error(path + ": bad layer line");
    if (in_dim == 0 || out_dim == 0)
      throw io_error(path + ": zero layer dimension");
    info.in_dims.push_back(in_dim);
    info.out_dims.push_back(out_dim);
    info.activations.push_back(activation_from_name(act));
  }
  if (expect_line(in, path) != "data") throw io_error(path + ": missing data marker");
  return info;
}

}  // namespace

void save_checkpoint(const DenseNetwork& net, const std::string& path,
                     Precision precision) {
  validate_network(net);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");

  out << "riskprune checkpoint 1\n";
  out << "precision "
      << (precision == Precision::Float64 ? "float64" : "float32") << "\n";
  out << "endian little\n";
  out << "layers " << net.layers.size() << "\n";
  for (const Layer& layer : net.layers)
    out << "layer " << layer.in_dim() << " " << layer.out_dim() << " "
        << activation_name(layer.activation) << "\n";
  out << "data\n";

  for (const Layer& layer : net.layers) {
    for (double w : layer.weights.data)
      precision == Precision::Float64 ? write_f64(out, w) : write_f32(out, w);
    for (double b : layer.biases)
      precision == Precision::Float64 ? write_f64(out, b) : write_f32(out, b);
  }
  if (!out) throw io_error(path + ": write failed");
}

DenseNetwork load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open");

  if (expect_line(in, path) != "riskprune checkpoint 1")
    throw io_error(path + ": not a riskprune checkpoint (or wrong version)");
  std::string prec_line = expect_line(in, path);
  Precision prec;
  if (prec_line == "precision float64") prec = Precision::Float64;
  else if (prec_line == "precision float32") prec = Precision::Float32;
  else throw io_error(path + ": unknown precision");
  if (expect_line(in, path) != "endian little")
    throw io_error(path + ": unsupported endianness");

  std::istringstream layers_line(expect_line(in, path));
  std::string word;
  std::size_t layer_count = 0;
  if (!(layers_line >> word >> layer_count) || word != "layers" || layer_count == 0)
    throw io_error(path + ": bad layer count");
  auto info = read_layer_lines(in, path, layer_count);

  DenseNetwork net;
  for (std::size_t l = 0; l < layer_count; ++l) {
    Layer layer;
    layer.weights = Matrix(info.out_dims[l], info.in_dims[l]);
    for (double& w : layer.weights.data) w = read_value(in, prec, path);
    layer.biases.resize(info.out_dims[l]);
    for (double& b : layer.biases) b = read_value(in, prec, path);
    layer.activation = info.activations[l];
    net.layers.push_back(std::move(layer));
  }
  validate_network(net);
  return net;
}

void export_sparse(const PrunedNetwork& pn, const std::string& path) {
  const DenseNetwork& net = pn.network;
  validate_network(net);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");

  out << "riskprune sparse 1\n";
  out << "endian little\n";
  out << "layers " << net.layers.size() << "\n";
  for (const Layer& layer : net.layers)
    out << "layer " << layer.in_dim() << " " << layer.out_dim() << " "
        << activation_name(layer.activation) << "\n";
  out << "data\n";

  for (const Layer& layer : net.layers) {
    std::uint64_t nonzero = 0;
    for (double w : layer.weights.data)
      if (w != 0.0) ++nonzero;
    out.write(reinterpret_cast<const char*>(&nonzero), sizeof nonzero);
    for (std::size_t r = 0; r < layer.out_dim(); ++r)
      for (std::size_t c = 0; c < layer.in_dim(); ++c) {
        double w = layer.weights(r, c);
        if (w == 0.0) continue;
        std::uint32_t row32 = static_cast<std::uint32_t>(r);
        std::uint32_t col32 = static_cast<std::uint32_t>(c);
        out.write(reinterpret_cast<const char*>(&row32), sizeof row32);
        out.write(reinterpret_cast<const char*>(&col32), sizeof col32);
        write_f64(out, w);
      }
    for (double b : layer.biases) write_f64(out, b);
  }
  if (!out) throw io_error(path + ": write failed");
}

DenseNetwork load_sparse(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open");

  if (expect_line(in, path) != "riskprune sparse 1")
    throw io_error(path + ": not a riskprune sparse export (or wrong version)");
  if (expect_line(in, path) != "endian little")
    throw io_error(path + ": unsupported endianness");
  std::istringstream layers_line(expect_line(in, path));
  std::string word;
  std::size_t layer_count = 0;
  if (!(layers_line >> word >> layer_count) || word != "layers" || layer_count == 0)
    throw io_error(path + ": bad layer count");
  auto info = read_layer_lines(in, path, layer_count);

  DenseNetwork net;
  for (std::size_t l = 0; l < layer_count; ++l) {
    Layer layer;
    layer.weights = Matrix(info.out_dims[l], info.in_dims[l]);
    std::uint64_t nonzero = 0;
    if (!in.read(reinterpret_cast<char*>(&nonzero), sizeof nonzero))
      throw io_error(path + ": truncated nonzero count");
    for (std::uint64_t i = 0; i < nonzero; ++i) {
      std::uint32_t r = 0, c = 0;
      if (!in.read(reinterpret_cast<char*>(&r), sizeof r) ||
          !in.read(reinterpret_cast<char*>(&c), sizeof c))
        throw io_error(path + ": truncated coordinate");
      if (r >= info.out_dims[l] || c >= info.in_dims[l])
        throw io_error(path + ": coordinate out of range");
      layer.weights(r, c) = read_value(in, Precision::Float64, path);
    }
    layer.biases.resize(info.out_dims[l]);
    for (double& b : layer.biases) b = read_value(in, Precision::Float64, path);
    layer.activation = info.activations[l];
    net.layers.push_back(std::move(layer));
  }
  validate_network(net);
  return net;
}

}  // namespace riskprune

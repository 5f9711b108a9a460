#include "riskprune/io/idx.hpp"

#include <algorithm>
#include <fstream>
#include <utility>

#include "riskprune/errors.hpp"
#include "riskprune/rng.hpp"

namespace riskprune {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw io_error(path + ": truncated header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");
  return out;
}

}  // namespace

ImageSet read_idx_images(const std::string& path) {
  auto in = open_in(path);
  std::uint32_t magic = read_u32_be(in, path);
  if (magic != kImageMagic)
    throw io_error(path + ": bad image magic");
  ImageSet set;
  set.count = read_u32_be(in, path);
  set.rows = read_u32_be(in, path);
  set.cols = read_u32_be(in, path);
  if (set.rows > 4096 || set.cols > 4096)
    throw io_error(path + ": unreasonable image dimensions");

  std::size_t total = set.count * set.rows * set.cols;
  std::vector<unsigned char> raw(total);
  if (total > 0 && !in.read(reinterpret_cast<char*>(raw.data()),
                            static_cast<std::streamsize>(total)))
    throw io_error(path + ": truncated pixel payload");
  set.pixels.resize(total);
  for (std::size_t i = 0; i < total; ++i)
    set.pixels[i] = static_cast<double>(raw[i]) / 255.0;
  return set;
}

std::vector<int> read_idx_labels(const std::string& path) {
  auto in = open_in(path);
  std::uint32_t magic = read_u32_be(in, path);
  if (magic != kLabelMagic)
    throw io_error(path + ": bad label magic");
  std::size_t count = read_u32_be(in, path);
  std::vector<unsigned char> raw(count);
  if (count > 0 && !in.read(reinterpret_cast<char*>(raw.data()),
                            static_cast<std::streamsize>(count)))
    throw io_error(path + ": truncated label payload");
  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) labels[i] = raw[i];
  return labels;
}

void write_idx_images(const std::string& path, const std::vector<std::uint8_t>& raw,
                      std::size_t count, std::size_t rows, std::size_t cols) {
  if (raw.size() != count * rows * cols)
    throw std::invalid_argument("pixel payload does not match the declared dims");
  auto out = open_out(path);
  write_u32_be(out, kImageMagic);
  write_u32_be(out, static_cast<std::uint32_t>(count));
  write_u32_be(out, static_cast<std::uint32_t>(rows));
  write_u32_be(out, static_cast<std::uint32_t>(cols));
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw io_error(path + ": write failed");
}

void write_idx_labels(const std::string& path, const std::vector<int>& labels) {
  std::vector<unsigned char> raw(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] > 255)
      throw std::invalid_argument("labels must fit one byte");
    raw[i] = static_cast<unsigned char>(labels[i]);
  }
  auto out = open_out(path);
  write_u32_be(out, kLabelMagic);
  write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw io_error(path + ": write failed");
}

std::vector<LabeledSample> to_samples(const ImageSet& images,
                                      const std::vector<int>* labels) {
  if (labels && labels->size() != images.count)
    throw io_error("label count does not match image count");
  std::size_t dim = images.pixels_per_image();
  std::vector<LabeledSample> out(images.count);
  for (std::size_t i = 0; i < images.count; ++i) {
    out[i].input.assign(images.pixels.begin() + static_cast<std::ptrdiff_t>(i * dim),
                        images.pixels.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    out[i].label = labels ? (*labels)[i] : -1;
  }
  return out;
}

DatasetSplit make_split(std::vector<LabeledSample> train_pool,
                        std::vector<LabeledSample> eval_pool, std::size_t n_cal,
                        std::size_t n_val, std::uint64_t seed) {
  if (n_cal + n_val != eval_pool.size())
    throw std::invalid_argument("calibration + validation must use the whole pool");
  DatasetSplit split;
  split.seed = seed;
  split.train = std::move(train_pool);

  SplitMix64 g(seed);
  for (std::size_t i = eval_pool.size(); i > 1; --i)
    std::swap(eval_pool[i - 1], eval_pool[g.below(i)]);

  split.calibration.assign(eval_pool.begin(),
                           eval_pool.begin() + static_cast<std::ptrdiff_t>(n_cal));
  split.validation.assign(eval_pool.begin() + static_cast<std::ptrdiff_t>(n_cal),
                          eval_pool.end());
  return split;
}

}  // namespace riskprune

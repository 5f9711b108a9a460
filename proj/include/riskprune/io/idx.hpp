#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskprune/network.hpp"

namespace riskprune {

/*
 * IDX image and label files (the MNIST container):
 *
 *   images: u32 magic 0x00000803, u32 count, u32 rows, u32 cols,
 *           then count*rows*cols unsigned bytes, row-major
 *   labels: u32 magic 0x00000801, u32 count, then count unsigned bytes
 *
 * All header integers are big-endian.  Pixels are scaled to [0, 1] by 1/255
 * on load.  Malformed or truncated files raise io_error.
 */

struct ImageSet {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;  // count * rows * cols, scaled

  std::size_t pixels_per_image() const { return rows * cols; }
};

ImageSet read_idx_images(const std::string& path);
std::vector<int> read_idx_labels(const std::string& path);

void write_idx_images(const std::string& path, const std::vector<std::uint8_t>& raw,
                      std::size_t count, std::size_t rows, std::size_t cols);
void write_idx_labels(const std::string& path, const std::vector<int>& labels);

// pair images with labels; pass nullptr for unlabeled data (label -1)
std::vector<LabeledSample> to_samples(const ImageSet& images,
                                      const std::vector<int>* labels);

struct DatasetSplit {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> calibration;
  std::vector<LabeledSample> validation;
  std::uint64_t seed = 0;
};

// The training pool is taken whole; the evaluation pool is shuffled by the
// seed and split into n_cal calibration plus n_val validation samples, which
// must use it up exactly.
DatasetSplit make_split(std::vector<LabeledSample> train_pool,
                        std::vector<LabeledSample> eval_pool, std::size_t n_cal,
                        std::size_t n_val, std::uint64_t seed);

}  // namespace riskprune

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace riskprune {

/*
 * Score-map bundle, one file per model variant:
 *
 *   bytes 0-3   "SMAP"
 *   u32         version (1)
 *   u32         rows, u32 cols, u32 image count
 *   u32         tag length, then the tag bytes ("full" or a pruning ratio)
 *   payload     count * rows * cols float32 scores in [0, 1], row-major
 *
 * All integers and floats little-endian.  A directory holds one "full" file
 * plus one file per pruned variant; images pair across files by index.
 */

struct ScoreMaps {
  std::string tag;
  double lambda = 0.0;  // parsed from the tag, 0 for "full"
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t count = 0;
  std::vector<double> scores;  // count * rows * cols

  std::span<const double> image(std::size_t i) const {
    std::size_t px = rows * cols;
    return {scores.data() + i * px, px};
  }
};

struct ScoreMapSet {
  ScoreMaps full;
  std::vector<ScoreMaps> pruned;  // sorted by lambda ascending
};

ScoreMaps read_scoremap_file(const std::string& path);

// loads every *.smap file in the directory; exactly one "full" tag required,
// image counts and grid dims must agree across files
ScoreMapSet read_scoremaps(const std::string& dir);

void write_scoremap_file(const std::string& path, const std::string& tag,
                         std::size_t rows, std::size_t cols,
                         const std::vector<float>& scores);

}  // namespace riskprune

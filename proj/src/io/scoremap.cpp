#include "riskprune/io/scoremap.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "riskprune/errors.hpp"

namespace riskprune {

namespace {

constexpr char kMagic[4] = {'S', 'M', 'A', 'P'};

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw io_error(path + ": truncated header");
  return v;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

double lambda_from_tag(const std::string& tag, const std::string& path) {
  if (tag == "full") return 0.0;
  try {
    std::size_t used = 0;
    double v = std::stod(tag, &used);
    if (used != tag.size() || !(v >= 0.0 && v < 1.0))
      throw io_error(path + ": tag is not a pruning ratio: " + tag);
    return v;
  } catch (const io_error&) {
    throw;
  } catch (...) {
    throw io_error(path + ": tag is not a pruning ratio: " + tag);
  }
}

}  // namespace

ScoreMaps read_scoremap_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open");

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw io_error(path + ": bad magic");
  std::uint32_t version = read_u32(in, path);
  if (version != 1) throw io_error(path + ": unsupported version");

  ScoreMaps maps;
  maps.rows = read_u32(in, path);
  maps.cols = read_u32(in, path);
  maps.count = read_u32(in, path);
  std::uint32_t tag_len = read_u32(in, path);
  if (maps.rows == 0 || maps.cols == 0 || tag_len == 0 || tag_len > 64)
    throw io_error(path + ": bad header fields");
  maps.tag.resize(tag_len);
  if (!in.read(maps.tag.data(), tag_len)) throw io_error(path + ": truncated tag");
  maps.lambda = lambda_from_tag(maps.tag, path);

  std::size_t total = maps.count * maps.rows * maps.cols;
  std::vector<float> raw(total);
  if (total > 0 && !in.read(reinterpret_cast<char*>(raw.data()),
                            static_cast<std::streamsize>(total * sizeof(float))))
    throw io_error(path + ": truncated score payload");
  maps.scores.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    if (!(raw[i] >= 0.0f && raw[i] <= 1.0f))
      throw io_error(path + ": score out of [0,1] at index " + std::to_string(i));
    maps.scores[i] = static_cast<double>(raw[i]);
  }
  return maps;
}

ScoreMapSet read_scoremaps(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw io_error(dir + ": not a directory");

  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".smap")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw io_error(dir + ": no .smap files");

  ScoreMapSet set;
  bool have_full = false;
  for (const std::string& f : files) {
    ScoreMaps maps = read_scoremap_file(f);
    if (maps.tag == "full") {
      if (have_full) throw io_error(dir + ": more than one full score map");
      set.full = std::move(maps);
      have_full = true;
    } else {
      set.pruned.push_back(std::move(maps));
    }
  }
  if (!have_full) throw io_error(dir + ": missing the full-model score map");

  for (const ScoreMaps& m : set.pruned) {
    if (m.rows != set.full.rows || m.cols != set.full.cols)
      throw io_error(dir + ": grid dims differ between " + m.tag + " and full");
    if (m.count != set.full.count)
      throw io_error(dir + ": image counts differ between " + m.tag + " and full");
  }
  std::sort(set.pruned.begin(), set.pruned.end(),
            [](const ScoreMaps& a, const ScoreMaps& b) { return a.lambda < b.lambda; });
  for (std::size_t i = 1; i < set.pruned.size(); ++i)
    if (set.pruned[i].lambda == set.pruned[i - 1].lambda)
      throw io_error(dir + ": duplicate pruning ratio tag " + set.pruned[i].tag);
  return set;
}

void write_scoremap_file(const std::string& path, const std::string& tag,
                         std::size_t rows, std::size_t cols,
                         const std::vector<float>& scores) {
  if (rows == 0 || cols == 0 || tag.empty() || tag.size() > 64)
    throw std::invalid_argument("bad score map header fields");
  try {
    lambda_from_tag(tag, path);
  } catch (const io_error&) {
    throw std::invalid_argument("tag must be \"full\" or a pruning ratio in [0, 1)");
  }
  if (scores.size() % (rows * cols) != 0)
    throw std::invalid_argument("score payload is not a whole number of images");
  for (float s : scores)
    if (!(s >= 0.0f && s <= 1.0f))
      throw std::invalid_argument("scores must lie in [0, 1]");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");
  out.write(kMagic, 4);
  write_u32(out, 1);
  write_u32(out, static_cast<std::uint32_t>(rows));
  write_u32(out, static_cast<std::uint32_t>(cols));
  write_u32(out, static_cast<std::uint32_t>(scores.size() / (rows * cols)));
  write_u32(out, static_cast<std::uint32_t>(tag.size()));
  out.write(tag.data(), static_cast<std::streamsize>(tag.size()));
  out.write(reinterpret_cast<const char*>(scores.data()),
            static_cast<std::streamsize>(scores.size() * sizeof(float)));
  if (!out) throw io_error(path + ": write failed");
}

}  // namespace riskprune

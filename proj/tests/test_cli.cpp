#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "riskprune/io/checkpoint.hpp"
#include "riskprune/io/idx.hpp"
#include "riskprune/io/report.hpp"
#include "riskprune/io/scoremap.hpp"
#include "riskprune/rng.hpp"
#include "riskprune/train.hpp"
#include "testutil.hpp"

using namespace riskprune;
using namespace riskprune::testutil;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string out_path = temp_path("cli_out_" + std::to_string(counter++) + ".txt");
  std::string cmd = std::string(RISKPRUNE_BIN) + " " + args + " > " + out_path +
                    " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult res;
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  res.out = ss.str();
  return res;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

double scrape(const std::string& out, const std::string& key) {
  auto pos = out.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(out.substr(pos + key.size()));
}

// small 8x8 two-class blob set that a 64-16-2 net separates perfectly
struct CliFixture {
  std::string images, labels, ckpt;
};

const CliFixture& fixture() {
  static CliFixture f = [] {
    constexpr std::size_t n = 240, side = 8, dim = side * side;
    std::vector<std::uint8_t> pixels(n * dim, 0);
    std::vector<int> labels(n);

    std::vector<std::vector<int>> protos(2, std::vector<int>(dim, 0));
    for (int c = 0; c < 2; ++c) {
      SplitMix64 g(40 + static_cast<std::uint64_t>(c));
      for (int blob = 0; blob < 3; ++blob) {
        double cr = 7.0 * g.uniform(), cc = 7.0 * g.uniform();
        for (std::size_t r = 0; r < side; ++r)
          for (std::size_t col = 0; col < side; ++col) {
            double d2 = (r - cr) * (r - cr) + (col - cc) * (col - cc);
            int v = protos[c][r * side + col] + int(255.0 * std::exp(-d2 / 2.0));
            protos[c][r * side + col] = std::min(255, v);
          }
      }
    }
    SplitMix64 g(99);
    for (std::size_t i = 0; i < n; ++i) {
      int c = int(i % 2);
      labels[i] = c;
      for (std::size_t j = 0; j < dim; ++j) {
        int v = protos[c][j] + int(g.below(41)) - 20;
        pixels[i * dim + j] = std::uint8_t(std::clamp(v, 0, 255));
      }
    }

    CliFixture out;
    out.images = temp_path("cli_images.idx");
    out.labels = temp_path("cli_labels.idx");
    out.ckpt = temp_path("cli_net.ckpt");
    write_idx_images(out.images, pixels, n, side, side);
    write_idx_labels(out.labels, labels);

    ImageSet set = read_idx_images(out.images);
    auto data = to_samples(set, &labels);
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.learning_rate = 0.3;
    cfg.seed = 3;
    DenseNetwork net = train_sgd({dim, 16, 2}, data, cfg);
    save_checkpoint(net, out.ckpt, Precision::Float64);
    return out;
  }();
  return f;
}

}  // namespace

TEST_CASE("cli trains, reports the parameter count and writes a checkpoint") {
  // 28x28 random images so the default architecture applies
  constexpr std::size_t n = 50, dim = 28 * 28;
  std::vector<std::uint8_t> pixels(n * dim);
  std::vector<int> labels(n);
  SplitMix64 g(5);
  for (auto& p : pixels) p = std::uint8_t(g.below(256));
  for (auto& l : labels) l = int(g.below(10));
  std::string images = temp_path("train_images.idx");
  std::string labs = temp_path("train_labels.idx");
  write_idx_images(images, pixels, n, 28, 28);
  write_idx_labels(labs, labels);

  std::string out = temp_path("trained.ckpt");
  RunResult r = run_cli("train --images " + images + " --labels " + labs +
                        " --epochs 1 --out " + out);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "parameters: 118282"));
  CHECK(contains(r.out, "accuracy"));
  DenseNetwork net = load_checkpoint(out);
  CHECK(net.layers.size() == 3);
  CHECK(count_parameters(net) == 118282);
}

TEST_CASE("cli train distinguishes usage errors from data errors") {
  const CliFixture& f = fixture();

  RunResult missing = run_cli("train --images /nonexistent.idx --labels " +
                              f.labels + " --out /tmp/x.ckpt");
  CHECK(missing.code == 2);

  RunResult bad_arch = run_cli("train --images " + f.images + " --labels " +
                               f.labels + " --arch 64,abc,2 --out /tmp/x.ckpt");
  CHECK(bad_arch.code == 1);

  RunResult no_sub = run_cli("");
  CHECK(no_sub.code == 1);

  RunResult help = run_cli("--help");
  CHECK(help.code == 0);

  // labels that do not fit the output layer are a data problem
  std::string wide = temp_path("wide_labels.idx");
  std::vector<int> labels(240, 0);
  labels[7] = 5;
  write_idx_labels(wide, labels);
  RunResult bad_label = run_cli("train --images " + f.images + " --labels " +
                                wide + " --arch 64,8,2 --out /tmp/x.ckpt");
  CHECK(bad_label.code == 2);
}

TEST_CASE("cli calibrate certifies, reports and honours the exit contract") {
  const CliFixture& f = fixture();
  std::string report = temp_path("cal_report.csv");

  RunResult r = run_cli("calibrate --checkpoint " + f.ckpt + " --images " +
                        f.images + " --labels " + f.labels +
                        " --alpha 0.1 --delta 0.1 --Q 20 --report " + report);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "guarantee:"));
  CHECK(contains(r.out, "lambda_hat:"));

  std::vector<GridPoint> curve = read_risk_curve_csv(report);
  CHECK(curve.size() == 20);
  double lam = scrape(r.out, "lambda_hat:");
  bool found = false;
  for (const GridPoint& p : curve) found = found || (p.rejected && p.lambda == lam);
  CHECK(found);

  // the json twin parses as a report too
  std::string jreport = temp_path("cal_report.json");
  RunResult rj = run_cli("calibrate --checkpoint " + f.ckpt + " --images " +
                         f.images + " --labels " + f.labels +
                         " --alpha 0.1 --delta 0.1 --Q 20 --report " + jreport);
  CHECK(rj.code == 0);
  std::ifstream jin(jreport);
  CHECK(jin.peek() == '{');

  // an unattainable tolerance certifies nothing
  RunResult hopeless = run_cli("calibrate --checkpoint " + f.ckpt + " --images " +
                               f.images + " --labels " + f.labels +
                               " --alpha 0.0001 --delta 0.1 --Q 5");
  CHECK(hopeless.code == 3);
  CHECK(contains(hopeless.out, "no pruning certified"));

  RunResult gone = run_cli("calibrate --checkpoint /nonexistent.ckpt --images " +
                           f.images + " --labels " + f.labels);
  CHECK(gone.code == 2);
}

TEST_CASE("cli calibrate enforces the loss and p-value pairing at parse time") {
  const CliFixture& f = fixture();
  std::string base = "calibrate --checkpoint " + f.ckpt + " --images " + f.images;

  RunResult pairing = run_cli(base + " --loss iou --pvalue binomial");
  CHECK(pairing.code == 1);
  CHECK(contains(pairing.out, "binary"));

  RunResult wrong_cmd = run_cli(base + " --loss iou --pvalue hb");
  CHECK(wrong_cmd.code == 1);
  CHECK(contains(wrong_cmd.out, "segcal"));

  RunResult needs_labels = run_cli(base + " --loss relaxed");
  CHECK(needs_labels.code == 1);
  CHECK(contains(needs_labels.out, "--labels"));

  // the disagreement loss never looks at labels
  RunResult disagree = run_cli(base + " --loss disagree --alpha 0.1 --Q 10");
  CHECK((disagree.code == 0 || disagree.code == 3));
  CHECK(contains(disagree.out, "guarantee:"));
  CHECK(contains(disagree.out, "disagree"));
}

TEST_CASE("cli naive scan is reported as such and reaches at least as far") {
  const CliFixture& f = fixture();
  std::string base = "calibrate --checkpoint " + f.ckpt + " --images " + f.images +
                     " --labels " + f.labels + " --alpha 0.08 --delta 0.1 --Q 20";

  RunResult certified = run_cli(base);
  RunResult naive = run_cli(base + " --naive");
  REQUIRE(certified.code == 0);
  REQUIRE(naive.code == 0);
  CHECK(contains(naive.out, "no statistical guarantee"));
  CHECK(scrape(naive.out, "lambda_hat:") >= scrape(certified.out, "lambda_hat:"));
}

TEST_CASE("cli selective with one zero threshold matches plain calibration") {
  const CliFixture& f = fixture();

  RunResult cal = run_cli("calibrate --checkpoint " + f.ckpt + " --images " +
                          f.images + " --labels " + f.labels +
                          " --alpha 0.1 --delta 0.1 --Q 10");
  RunResult sel = run_cli("selective --checkpoint " + f.ckpt + " --images " +
                          f.images + " --labels " + f.labels +
                          " --alpha 0.1 --delta 0.1 --Q 10 --T 9 --thresholds 0");
  REQUIRE(cal.code == 0);
  REQUIRE(sel.code == 0);
  CHECK(contains(sel.out, "selection policy"));
  CHECK(scrape(sel.out, "lambda1") == 0.0);
  CHECK(scrape(sel.out, "lambda2") == scrape(cal.out, "lambda_hat:"));

  // degenerate tolerance: empty rejection set
  RunResult none = run_cli("selective --checkpoint " + f.ckpt + " --images " +
                           f.images + " --labels " + f.labels +
                           " --alpha 0.0001 --delta 0.1 --Q 10 --T 4 --J 2");
  CHECK(none.code == 3);
  CHECK(contains(none.out, "no pruning certified"));

  RunResult clash = run_cli("selective --checkpoint " + f.ckpt + " --images " +
                            f.images + " --labels " + f.labels +
                            " --J 3 --thresholds 0.1,0.2");
  CHECK(clash.code == 1);
}

TEST_CASE("cli prune writes forward-equivalent checkpoints and sparse exports") {
  const CliFixture& f = fixture();
  std::string out = temp_path("pruned0.ckpt");
  std::string sparse = temp_path("pruned60.sparse");

  RunResult zero = run_cli("prune --checkpoint " + f.ckpt +
                           " --ratio 0 --f64 --out " + out);
  REQUIRE(zero.code == 0);
  CHECK(contains(zero.out, "sparsity: 0"));
  DenseNetwork original = load_checkpoint(f.ckpt);
  DenseNetwork untouched = load_checkpoint(out);
  for (int t = 0; t < 20; ++t) {
    auto x = random_input(64, 600 + t);
    CHECK(forward(original, x) == forward(untouched, x));
  }

  RunResult sixty = run_cli("prune --checkpoint " + f.ckpt +
                            " --ratio 0.6 --propagate --sparse-out " + sparse);
  REQUIRE(sixty.code == 0);
  CHECK(contains(sixty.out, "dead-neuron propagation"));
  DenseNetwork thin = load_sparse(sparse);
  CHECK(count_weights(thin) == count_weights(original));

  RunResult bad = run_cli("prune --checkpoint " + f.ckpt + " --ratio 1.0");
  CHECK(bad.code == 1);
}

TEST_CASE("cli bootstrap is seed-deterministic and resamples B times") {
  const CliFixture& f = fixture();
  std::string rep1 = temp_path("boot1.csv");
  std::string rep2 = temp_path("boot2.csv");
  std::string base = "bootstrap --checkpoint " + f.ckpt + " --images " + f.images +
                     " --labels " + f.labels + " --ratio 0.5 --B 50 --seed 12";

  RunResult a = run_cli(base + " --report " + rep1);
  RunResult b = run_cli(base + " --report " + rep2);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);

  std::ifstream f1(rep1), f2(rep2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());

  ParsedCsv parsed = read_csv_report(rep1);
  CHECK(parsed.rows.size() == 50);

  RunResult naive = run_cli(base + " --naive-alpha 0.25");
  REQUIRE(naive.code == 0);
  CHECK(contains(naive.out, "share of resamples with risk above"));

  RunResult unlabeled = run_cli("bootstrap --checkpoint " + f.ckpt + " --images " +
                                f.images + " --ratio 0.5 --B 5");
  CHECK(unlabeled.code == 1);
}

TEST_CASE("cli simulate covers both monte-carlo harnesses") {
  std::string rep = temp_path("super.csv");
  RunResult sup = run_cli(
      "simulate --mode superuniform --pvalue hb --n 50 --alpha 0.1 "
      "--trials 2000 --seed 5 --u 0.01,0.05,0.2 --report " + rep);
  REQUIRE(sup.code == 0);
  CHECK(contains(sup.out, "P(p <="));
  CHECK(read_csv_report(rep).rows.size() == 3);

  RunResult fs = run_cli(
      "simulate --mode fwer --procedure fixed-sequence "
      "--curve 0.02,0.05,0.12,0.3 --n 300 --alpha 0.1 --delta 0.1 "
      "--trials 200 --seed 6");
  REQUIRE(fs.code == 0);
  CHECK(contains(fs.out, "violation rate:"));
  CHECK(scrape(fs.out, "violation rate:") <= 0.2);

  RunResult fb = run_cli(
      "simulate --mode fwer --procedure fallback --curve \"0.02,0.08;0.01,0.3\" "
      "--n 300 --alpha 0.1 --delta 0.1 --trials 200 --seed 7");
  REQUIRE(fb.code == 0);
  CHECK(contains(fb.out, "fallback"));

  RunResult no_curve = run_cli("simulate --mode fwer --n 100");
  CHECK(no_curve.code == 1);
}

TEST_CASE("cli segcal calibrates a score-map directory") {
  namespace fs = std::filesystem;
  std::string dir = temp_path("cli_maps");
  fs::create_directories(dir);

  // 200 copies of a 2x2 map; the 0.2 variant matches the dense model exactly,
  // the 0.5 variant loses one of the two mask pixels (IoU 1/2 per image)
  std::vector<float> full, same, half;
  for (int i = 0; i < 200; ++i) {
    for (float v : {0.9f, 0.9f, 0.1f, 0.1f}) full.push_back(v);
    for (float v : {0.9f, 0.9f, 0.1f, 0.1f}) same.push_back(v);
    for (float v : {0.9f, 0.1f, 0.1f, 0.1f}) half.push_back(v);
  }
  write_scoremap_file(dir + "/full.smap", "full", 2, 2, full);
  write_scoremap_file(dir + "/a.smap", "0.2", 2, 2, same);
  write_scoremap_file(dir + "/b.smap", "0.5", 2, 2, half);

  RunResult r = run_cli("segcal --scoremaps " + dir +
                        " --beta 0.5 --alpha 0.2 --delta 0.1 --pvalue hb");
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "iou"));
  CHECK(scrape(r.out, "lambda_hat:") == 0.2);

  RunResult binom = run_cli("segcal --scoremaps " + dir +
                            " --beta 0.5 --alpha 0.2 --pvalue binomial");
  CHECK(binom.code == 1);

  RunResult absent = run_cli("segcal --scoremaps " + dir +
                             "_missing --beta 0.5 --alpha 0.2");
  CHECK(absent.code == 2);
}

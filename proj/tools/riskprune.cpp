// riskprune: certified one-shot magnitude pruning from the command line.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 unreadable or
// malformed data, 3 statistically degenerate result (nothing certified).

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskprune/calibrate.hpp"
#include "riskprune/errors.hpp"
#include "riskprune/io/checkpoint.hpp"
#include "riskprune/io/idx.hpp"
#include "riskprune/io/report.hpp"
#include "riskprune/io/scoremap.hpp"
#include "riskprune/loss.hpp"
#include "riskprune/network.hpp"
#include "riskprune/prune.hpp"
#include "riskprune/pvalue.hpp"
#include "riskprune/train.hpp"
#include "riskprune/validate.hpp"

namespace {

using namespace riskprune;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDegenerate = 3;

std::vector<LabeledSample> load_samples(const std::string& images,
                                        const std::string& labels) {
  ImageSet set = read_idx_images(images);
  if (labels.empty()) return to_samples(set, nullptr);
  std::vector<int> lab = read_idx_labels(labels);
  return to_samples(set, &lab);
}

std::vector<std::size_t> parse_arch(const std::string& arch) {
  std::vector<std::size_t> dims;
  std::stringstream ss(arch);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad architecture string: " + arch);
    dims.push_back(std::stoull(part));
  }
  if (dims.size() < 2)
    throw std::invalid_argument("architecture needs an input and an output width");
  return dims;
}

PValueNMode nmode_from_name(const std::string& name) {
  if (name == "kept") return PValueNMode::Kept;
  if (name == "paper-literal") return PValueNMode::PaperLiteral;
  throw std::invalid_argument("unknown p-value n mode: " + name);
}

void print_notes(const std::vector<std::string>& notes) {
  for (const std::string& n : notes) std::cout << n << "\n";
}

std::ostream& value(std::ostream& os) { return os << std::setprecision(12); }

// ---- train ----------------------------------------------------------------

struct TrainOpts {
  std::string images, labels, arch = "784,128,128,10", out;
  TrainConfig cfg;
  bool f64 = false;
};

int cmd_train(const TrainOpts& o) {
  std::vector<std::size_t> dims = parse_arch(o.arch);
  std::vector<LabeledSample> data = load_samples(o.images, o.labels);
  if (!data.empty() && data.front().input.size() != dims.front())
    throw std::invalid_argument("architecture input width " +
                                std::to_string(dims.front()) +
                                " does not match the image size " +
                                std::to_string(data.front().input.size()));
  for (const LabeledSample& s : data)
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= dims.back()) {
      std::cerr << "error: label " << s.label << " does not fit the "
                << dims.back() << "-class output layer\n";
      return kExitData;
    }

  DenseNetwork net = train_sgd(dims, data, o.cfg);

  auto preds = batch_predict(net, data);
  long hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    hits += preds[i].label == data[i].label;

  std::cout << "parameters: " << count_parameters(net) << "\n";
  std::cout << "accuracy (training set): " << value
            << double(hits) / double(data.size()) << "\n";
  save_checkpoint(net, o.out, o.f64 ? Precision::Float64 : Precision::Float32);
  std::cout << "checkpoint: " << o.out << "\n";
  return kExitOk;
}

// ---- calibrate --------------------------------------------------------------

struct CalibrateOpts {
  std::string checkpoint, images, labels, report;
  std::string loss = "misclassify", pvalue = "binomial", nmode = "kept";
  CalibrationConfig cfg;
};

int cmd_calibrate(const CalibrateOpts& o) {
  LossKind loss = loss_from_name(o.loss);
  PValueKind pv = pvalue_from_name(o.pvalue);
  if (loss == LossKind::Iou) {
    if (pv == PValueKind::Binomial)
      throw std::invalid_argument(
          "loss iou is bounded, not binary; use a prw or hb p-value");
    throw std::invalid_argument(
        "iou risk comes from score maps; use the segcal subcommand");
  }
  if (loss_needs_labels(loss) && o.labels.empty())
    throw std::invalid_argument("loss " + o.loss + " needs --labels");

  CalibrationConfig cfg = o.cfg;
  cfg.loss = loss;
  cfg.pvalue = pv;
  cfg.n_mode = nmode_from_name(o.nmode);

  DenseNetwork net = load_checkpoint(o.checkpoint);
  std::vector<LabeledSample> data = load_samples(o.images, o.labels);

  CalibrationResult res = calibrate_1d(net, data, cfg);
  print_notes(res.notes);
  if (!o.report.empty()) write_report(res, o.report, infer_format(o.report));
  if (!res.lambda_hat) return kExitDegenerate;
  std::cout << "lambda_hat: " << value << *res.lambda_hat << "\n";
  return kExitOk;
}

// ---- selective --------------------------------------------------------------

struct SelectiveOpts {
  std::string checkpoint, images, labels, report;
  std::string nmode = "kept";
  int J = 4;
  bool j_given = false;
  std::vector<double> thresholds;
  SelectiveConfig cfg;
};

int cmd_selective(const SelectiveOpts& o) {
  SelectiveConfig cfg = o.cfg;
  cfg.n_mode = nmode_from_name(o.nmode);
  if (!o.thresholds.empty()) {
    if (o.j_given && o.thresholds.size() != static_cast<std::size_t>(o.J))
      throw std::invalid_argument("--J disagrees with the --thresholds count");
    cfg.thresholds = o.thresholds;
  } else {
    if (o.J < 1) throw std::invalid_argument("--J must be positive");
    for (int k = 1; k <= o.J; ++k)
      cfg.thresholds.push_back(double(k) / double(o.J + 1));
  }

  DenseNetwork net = load_checkpoint(o.checkpoint);
  std::vector<LabeledSample> data = load_samples(o.images, o.labels);

  SelectiveResult res = calibrate_selective(net, data, cfg);
  print_notes(res.notes);
  if (!o.report.empty()) write_report(res, o.report, infer_format(o.report));
  if (!res.selected) return kExitDegenerate;
  std::cout << "selected: lambda1 " << value << res.selected->first
            << " lambda2 " << value << res.selected->second << "\n";
  return kExitOk;
}

// ---- prune ------------------------------------------------------------------

struct PruneOpts {
  std::string checkpoint, out, sparse_out;
  double ratio = 0.0;
  bool propagate = false;
  bool f64 = false;
};

int cmd_prune(const PruneOpts& o) {
  DenseNetwork net = load_checkpoint(o.checkpoint);
  PrunedNetwork pn = prune(net, o.ratio);
  if (o.propagate) pn = propagate_dead_neurons(pn);

  std::cout << "weights zeroed: " << pn.mask.zeroed.size() << " of "
            << count_weights(net) << "\n";
  if (o.propagate)
    std::cout << "zeroed by dead-neuron propagation: " << pn.propagated.size()
              << "\n";
  std::cout << "sparsity: " << value << sparsity(pn) << "\n";
  std::cout << "magnitude threshold: " << value << pn.mask.threshold << "\n";

  if (!o.out.empty()) {
    save_checkpoint(pn.network, o.out,
                    o.f64 ? Precision::Float64 : Precision::Float32);
    std::cout << "checkpoint: " << o.out << "\n";
  }
  if (!o.sparse_out.empty()) {
    export_sparse(pn, o.sparse_out);
    std::cout << "sparse export: " << o.sparse_out << "\n";
  }
  return kExitOk;
}

// ---- bootstrap ----------------------------------------------------------------

struct BootstrapOpts {
  std::string checkpoint, images, labels, report;
  std::string loss = "misclassify";
  double ratio = 0.0;
  long B = 1000;
  std::uint64_t seed = 1;
  double naive_alpha = 0.0;
  bool naive_alpha_given = false;
};

int cmd_bootstrap(const BootstrapOpts& o) {
  LossKind loss = loss_from_name(o.loss);
  if (loss == LossKind::Iou)
    throw std::invalid_argument("iou risk comes from score maps; bootstrap "
                                "supports classifier losses only");
  if (loss_needs_labels(loss) && o.labels.empty())
    throw std::invalid_argument("loss " + o.loss + " needs --labels");

  DenseNetwork net = load_checkpoint(o.checkpoint);
  std::vector<LabeledSample> data = load_samples(o.images, o.labels);

  BootstrapReport rep = bootstrap_risk(net, o.ratio, data, loss, o.B, o.seed);
  double mean = 0.0;
  for (double r : rep.risks) mean += r;
  mean /= double(rep.risks.size());

  std::cout << "point risk: " << value << rep.point_risk << "\n";
  std::cout << "bootstrap mean risk (" << rep.B << " resamples of " << rep.m
            << "): " << value << mean << "\n";
  if (o.naive_alpha_given) {
    long above = 0;
    for (double r : rep.risks) above += r > o.naive_alpha;
    std::cout << "share of resamples with risk above " << value << o.naive_alpha
              << ": " << value << double(above) / double(rep.risks.size())
              << "\n";
  }
  if (!o.report.empty()) write_report(rep, o.report, infer_format(o.report));
  return kExitOk;
}

// ---- simulate -----------------------------------------------------------------

struct SimulateOpts {
  std::string mode, report, curve;
  std::string pvalue = "binomial", procedure = "fixed-sequence";
  long n = 100;
  double alpha = 0.1;
  double delta = 0.1;
  long trials = 1000;
  std::uint64_t seed = 1;
  std::vector<double> u_levels = {0.01, 0.02, 0.05, 0.1, 0.2};
};

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    double v = std::stod(part, &used);
    if (used != part.size())
      throw std::invalid_argument("bad number in curve: " + part);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty curve");
  return out;
}

int cmd_simulate(const SimulateOpts& o) {
  PValueKind pv = pvalue_from_name(o.pvalue);

  if (o.mode == "superuniform") {
    SuperuniformReport rep = simulate_superuniformity(pv, o.n, o.alpha, o.trials,
                                                      o.seed, o.u_levels);
    std::cout << "boundary null: n " << o.n << ", alpha " << value << o.alpha
              << ", trials " << o.trials << "\n";
    for (std::size_t i = 0; i < rep.u.size(); ++i)
      std::cout << "P(p <= " << value << rep.u[i] << ") = " << value
                << rep.cdf[i] << "\n";
    if (!o.report.empty()) write_report(rep, o.report, infer_format(o.report));
    return kExitOk;
  }

  if (o.curve.empty())
    throw std::invalid_argument("fwer simulation needs --curve");
  SimReport rep;
  if (o.procedure == "fixed-sequence") {
    std::vector<double> risks = parse_number_list(o.curve);
    std::vector<double> grid;
    for (std::size_t j = 0; j < risks.size(); ++j)
      grid.push_back(double(j) / double(risks.size()));
    rep = simulate_fwer(grid, risks, o.n, o.alpha, o.delta, pv, o.trials, o.seed);
  } else {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(o.curve);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_number_list(row));
    Matrix surface(rows.size(), rows.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].size() != surface.cols)
        throw std::invalid_argument("curve rows must share one length");
      for (std::size_t j = 0; j < surface.cols; ++j) surface(k, j) = rows[k][j];
    }
    rep = simulate_fwer_fallback(surface, o.n, o.alpha, o.delta, pv, o.trials,
                                 o.seed);
  }

  long certified = 0;
  for (double lh : rep.lambda_hat) certified += !std::isnan(lh);
  std::cout << rep.procedure << " over " << rep.trials << " trials\n";
  std::cout << "violation rate: " << value << rep.violation_rate
            << " (delta " << value << rep.delta << ")\n";
  std::cout << "trials certifying anything: " << certified << " of "
            << rep.trials << "\n";
  if (!o.report.empty()) write_report(rep, o.report, infer_format(o.report));
  return kExitOk;
}

// ---- segcal -------------------------------------------------------------------

struct SegcalOpts {
  std::string scoremaps, report;
  std::string pvalue = "hb";
  double beta = 0.5;
  double alpha = 0.1;
  double delta = 0.1;
};

int cmd_segcal(const SegcalOpts& o) {
  PValueKind pv = pvalue_from_name(o.pvalue);
  if (pv == PValueKind::Binomial)
    throw std::invalid_argument(
        "loss iou is bounded, not binary; use a prw or hb p-value");

  ScoreMapSet maps = read_scoremaps(o.scoremaps);
  std::vector<RiskCurvePoint> curve = segmentation_curve(maps, o.beta);

  CalibrationConfig cfg;
  cfg.alpha = o.alpha;
  cfg.delta = o.delta;
  cfg.Q = static_cast<int>(curve.size());
  cfg.loss = LossKind::Iou;
  cfg.pvalue = pv;

  CalibrationResult res = calibrate_curve(curve, cfg);
  print_notes(res.notes);
  if (!o.report.empty()) write_report(res, o.report, infer_format(o.report));
  if (!res.lambda_hat) return kExitDegenerate;
  std::cout << "lambda_hat: " << value << *res.lambda_hat << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified one-shot magnitude pruning toolkit"};
  app.require_subcommand(1);

  int rc = kExitOk;

  TrainOpts train;
  auto* t = app.add_subcommand("train", "train a dense network and save a checkpoint");
  t->add_option("--images", train.images, "IDX image file")->required();
  t->add_option("--labels", train.labels, "IDX label file")->required();
  t->add_option("--arch", train.arch, "layer widths, e.g. 784,128,128,10");
  t->add_option("--epochs", train.cfg.epochs, "training epochs");
  t->add_option("--lr", train.cfg.learning_rate, "learning rate");
  t->add_option("--batch", train.cfg.batch_size, "mini-batch size");
  t->add_option("--seed", train.cfg.seed, "init and shuffle seed");
  t->add_option("--out", train.out, "checkpoint path")->required();
  t->add_flag("--f64", train.f64, "store float64 weights (default float32)");
  t->callback([&] { rc = cmd_train(train); });

  CalibrateOpts cal;
  auto* c = app.add_subcommand(
      "calibrate", "certify pruning ratios with family-wise error control");
  c->add_option("--checkpoint", cal.checkpoint, "trained network")->required();
  c->add_option("--images", cal.images, "calibration IDX images")->required();
  c->add_option("--labels", cal.labels, "calibration IDX labels");
  c->add_option("--loss", cal.loss, "risk definition")
      ->check(CLI::IsMember({"misclassify", "relaxed", "disagree", "iou"}));
  c->add_option("--alpha", cal.cfg.alpha, "risk tolerance");
  c->add_option("--delta", cal.cfg.delta, "error budget for the certificate");
  c->add_option("--pvalue", cal.pvalue, "p-value family")
      ->check(CLI::IsMember({"binomial", "prw", "hb"}));
  c->add_option("--Q", cal.cfg.Q, "grid resolution, ratios j/Q");
  c->add_option("--pvalue-n", cal.nmode, "sample count convention")
      ->check(CLI::IsMember({"kept", "paper-literal"}));
  c->add_option("--report", cal.report, "write a csv or json report");
  c->add_flag("--naive", cal.cfg.naive,
              "heuristic first-exceedance scan instead of the certified procedure");
  c->callback([&] { rc = cmd_calibrate(cal); });

  SelectiveOpts sel;
  auto* s = app.add_subcommand(
      "selective", "jointly certify a confidence threshold and a pruning ratio");
  s->add_option("--checkpoint", sel.checkpoint, "trained network")->required();
  s->add_option("--images", sel.images, "calibration IDX images")->required();
  s->add_option("--labels", sel.labels, "calibration IDX labels")->required();
  s->add_option("--alpha", sel.cfg.alpha, "risk tolerance on kept samples");
  s->add_option("--delta", sel.cfg.delta, "error budget for the certificate");
  auto* jopt = s->add_option("--J", sel.J, "threshold count when --thresholds is absent");
  s->add_option("--T", sel.cfg.T, "last pruning column, ratios j/Q for j <= T");
  s->add_option("--Q", sel.cfg.Q, "grid resolution");
  s->add_option("--thresholds", sel.thresholds, "confidence cutoffs, ascending")
      ->delimiter(',');
  s->add_option("--pvalue-n", sel.nmode, "sample count convention")
      ->check(CLI::IsMember({"kept", "paper-literal"}));
  s->add_option("--report", sel.report, "write a csv or json report");
  s->callback([&] {
    sel.j_given = jopt->count() > 0;
    rc = cmd_selective(sel);
  });

  PruneOpts pru;
  auto* p = app.add_subcommand("prune", "apply global magnitude pruning once");
  p->add_option("--checkpoint", pru.checkpoint, "trained network")->required();
  p->add_option("--ratio", pru.ratio, "fraction of weights to zero, in [0,1)")
      ->required();
  p->add_flag("--propagate", pru.propagate,
              "also zero weights made unreachable by dead neurons");
  p->add_option("--out", pru.out, "write the pruned checkpoint");
  p->add_flag("--f64", pru.f64, "store float64 weights (default float32)");
  p->add_option("--sparse-out", pru.sparse_out, "write a coordinate-list export");
  p->callback([&] { rc = cmd_prune(pru); });

  BootstrapOpts boot;
  auto* b = app.add_subcommand(
      "bootstrap", "resample the empirical risk of a pruned network");
  b->add_option("--checkpoint", boot.checkpoint, "trained network")->required();
  b->add_option("--ratio", boot.ratio, "pruning ratio")->required();
  b->add_option("--images", boot.images, "validation IDX images")->required();
  b->add_option("--labels", boot.labels, "validation IDX labels");
  b->add_option("--loss", boot.loss, "risk definition")
      ->check(CLI::IsMember({"misclassify", "relaxed", "disagree"}));
  b->add_option("--B", boot.B, "number of resamples");
  b->add_option("--seed", boot.seed, "resampling seed");
  b->add_option("--report", boot.report, "write a csv or json report");
  auto* na = b->add_option("--naive-alpha", boot.naive_alpha,
                           "also report the share of resamples above this risk");
  b->callback([&] {
    boot.naive_alpha_given = na->count() > 0;
    rc = cmd_bootstrap(boot);
  });

  SimulateOpts sim;
  auto* m = app.add_subcommand(
      "simulate", "Monte-Carlo checks of the statistical machinery");
  m->add_option("--mode", sim.mode, "what to simulate")
      ->check(CLI::IsMember({"superuniform", "fwer"}))
      ->required();
  m->add_option("--pvalue", sim.pvalue, "p-value family")
      ->check(CLI::IsMember({"binomial", "prw", "hb"}));
  m->add_option("--procedure", sim.procedure, "testing procedure (fwer mode)")
      ->check(CLI::IsMember({"fixed-sequence", "fallback"}));
  m->add_option("--curve", sim.curve,
                "true risks, comma separated; semicolons split fallback rows");
  m->add_option("--n", sim.n, "calibration sample size");
  m->add_option("--alpha", sim.alpha, "risk tolerance");
  m->add_option("--delta", sim.delta, "error budget");
  m->add_option("--trials", sim.trials, "Monte-Carlo trials");
  m->add_option("--seed", sim.seed, "simulation seed");
  m->add_option("--u", sim.u_levels, "probed levels (superuniform mode)")
      ->delimiter(',');
  m->add_option("--report", sim.report, "write a csv or json report");
  m->callback([&] { rc = cmd_simulate(sim); });

  SegcalOpts seg;
  auto* g = app.add_subcommand(
      "segcal", "certify pruning ratios for segmentation score maps");
  g->add_option("--scoremaps", seg.scoremaps, "directory of .smap files")
      ->required();
  g->add_option("--beta", seg.beta, "mask threshold, keep scores >= 1-beta")
      ->required();
  g->add_option("--alpha", seg.alpha, "tolerance on 1 - IoU");
  g->add_option("--delta", seg.delta, "error budget for the certificate");
  g->add_option("--pvalue", seg.pvalue, "p-value family")
      ->check(CLI::IsMember({"binomial", "prw", "hb"}));
  g->add_option("--report", seg.report, "write a csv or json report");
  g->callback([&] { rc = cmd_segcal(seg); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return rc;
}

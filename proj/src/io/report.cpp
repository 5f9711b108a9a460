#include "riskprune/io/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riskprune/errors.hpp"

namespace riskprune {

namespace {

using nlohmann::json;

// 17 significant digits round-trip any double exactly
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error(path + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  if (!out) throw io_error(path + ": write failed");
}

void write_json_file(const json& j, const std::string& path) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  finish(out, path);
}

json notes_json(const std::vector<std::string>& notes) {
  return json(notes);
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::nan("");
  return std::stod(s);
}

}  // namespace

ReportFormat infer_format(const std::string& path) {
  const std::string ext = ".json";
  if (path.size() >= ext.size() &&
      path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
    return ReportFormat::Json;
  return ReportFormat::Csv;
}

void write_report(const CalibrationResult& result, const std::string& path,
                  ReportFormat format) {
  const CalibrationConfig& cfg = result.config;
  if (format == ReportFormat::Json) {
    json j;
    j["kind"] = "calibration";
    j["alpha"] = cfg.alpha;
    j["delta"] = cfg.delta;
    j["Q"] = cfg.Q;
    j["loss"] = loss_name(cfg.loss);
    j["pvalue"] = pvalue_name(cfg.pvalue);
    j["pvalue_n"] = pvalue_n_mode_name(cfg.n_mode);
    j["naive"] = cfg.naive;
    j["lambda_hat"] = result.lambda_hat ? json(*result.lambda_hat) : json();
    j["notes"] = notes_json(result.notes);
    json pts = json::array();
    for (const GridPoint& p : result.points)
      pts.push_back({{"lambda", p.lambda},
                     {"rhat", p.rhat},
                     {"n_defined", p.n_defined},
                     {"defined", p.defined},
                     {"p", p.p},
                     {"rejected", p.rejected}});
    j["points"] = pts;
    write_json_file(j, path);
    return;
  }

  auto out = open_out(path);
  out << "# kind=calibration\n";
  out << "# alpha=" << fmt(cfg.alpha) << "\n";
  out << "# delta=" << fmt(cfg.delta) << "\n";
  out << "# Q=" << cfg.Q << "\n";
  out << "# loss=" << loss_name(cfg.loss) << "\n";
  out << "# pvalue=" << pvalue_name(cfg.pvalue) << "\n";
  out << "# pvalue_n=" << pvalue_n_mode_name(cfg.n_mode) << "\n";
  out << "# naive=" << (cfg.naive ? 1 : 0) << "\n";
  out << "# lambda_hat=" << (result.lambda_hat ? fmt(*result.lambda_hat) : "none")
      << "\n";
  for (const std::string& n : result.notes) out << "# note=" << n << "\n";
  out << "lambda,rhat,n_defined,defined,p,rejected\n";
  for (const GridPoint& p : result.points)
    out << fmt(p.lambda) << "," << fmt(p.rhat) << "," << p.n_defined << ","
        << (p.defined ? 1 : 0) << "," << fmt(p.p) << "," << (p.rejected ? 1 : 0)
        << "\n";
  finish(out, path);
}

void write_report(const SelectiveResult& result, const std::string& path,
                  ReportFormat format) {
  const SelectiveConfig& cfg = result.config;
  if (format == ReportFormat::Json) {
    json j;
    j["kind"] = "selective";
    j["alpha"] = cfg.alpha;
    j["delta"] = cfg.delta;
    j["T"] = cfg.T;
    j["Q"] = cfg.Q;
    j["thresholds"] = cfg.thresholds;
    j["pvalue_n"] = pvalue_n_mode_name(cfg.n_mode);
    j["policy"] = selection_policy_name(cfg.policy);
    if (result.selected)
      j["selected"] = {{"lambda1", result.selected->first},
                       {"lambda2", result.selected->second}};
    else
      j["selected"] = json();
    j["notes"] = notes_json(result.notes);
    json cells = json::array();
    for (const auto& row : result.cells)
      for (const SelectiveCell& c : row)
        cells.push_back({{"lambda1", c.lambda1},
                         {"lambda2", c.lambda2},
                         {"rhat", c.rhat},
                         {"defined", c.defined},
                         {"n_kept", c.n_kept},
                         {"abstention", c.abstention},
                         {"p", c.p},
                         {"budget", c.budget},
                         {"rejected", c.rejected}});
    j["cells"] = cells;
    write_json_file(j, path);
    return;
  }

  auto out = open_out(path);
  out << "# kind=selective\n";
  out << "# alpha=" << fmt(cfg.alpha) << "\n";
  out << "# delta=" << fmt(cfg.delta) << "\n";
  out << "# T=" << cfg.T << "\n";
  out << "# Q=" << cfg.Q << "\n";
  {
    std::ostringstream ts;
    for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
      if (i) ts << " ";
      ts << fmt(cfg.thresholds[i]);
    }
    out << "# thresholds=" << ts.str() << "\n";
  }
  out << "# pvalue_n=" << pvalue_n_mode_name(cfg.n_mode) << "\n";
  out << "# policy=" << selection_policy_name(cfg.policy) << "\n";
  if (result.selected)
    out << "# selected=" << fmt(result.selected->first) << " "
        << fmt(result.selected->second) << "\n";
  else
    out << "# selected=none\n";
  for (const std::string& n : result.notes) out << "# note=" << n << "\n";
  out << "lambda1,lambda2,rhat,defined,n_kept,abstention,p,budget,rejected\n";
  for (const auto& row : result.cells)
    for (const SelectiveCell& c : row)
      out << fmt(c.lambda1) << "," << fmt(c.lambda2) << "," << fmt(c.rhat) << ","
          << (c.defined ? 1 : 0) << "," << c.n_kept << "," << fmt(c.abstention)
          << "," << fmt(c.p) << "," << fmt(c.budget) << "," << (c.rejected ? 1 : 0)
          << "\n";
  finish(out, path);
}

void write_report(const BootstrapReport& report, const std::string& path,
                  ReportFormat format) {
  if (format == ReportFormat::Json) {
    json j;
    j["kind"] = "bootstrap";
    j["lambda"] = report.lambda;
    j["loss"] = loss_name(report.loss);
    j["B"] = report.B;
    j["m"] = report.m;
    j["seed"] = report.seed;
    j["point_risk"] = report.point_risk;
    j["risks"] = report.risks;
    write_json_file(j, path);
    return;
  }
  auto out = open_out(path);
  out << "# kind=bootstrap\n";
  out << "# lambda=" << fmt(report.lambda) << "\n";
  out << "# loss=" << loss_name(report.loss) << "\n";
  out << "# B=" << report.B << "\n";
  out << "# m=" << report.m << "\n";
  out << "# seed=" << report.seed << "\n";
  out << "# point_risk=" << fmt(report.point_risk) << "\n";
  out << "b,risk\n";
  for (std::size_t b = 0; b < report.risks.size(); ++b)
    out << b << "," << fmt(report.risks[b]) << "\n";
  finish(out, path);
}

void write_report(const SuperuniformReport& report, const std::string& path,
                  ReportFormat format) {
  if (format == ReportFormat::Json) {
    json j;
    j["kind"] = "superuniformity";
    j["pvalue"] = pvalue_name(report.pvalue);
    j["n"] = report.n;
    j["alpha"] = report.alpha;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    j["u"] = report.u;
    j["cdf"] = report.cdf;
    write_json_file(j, path);
    return;
  }
  auto out = open_out(path);
  out << "# kind=superuniformity\n";
  out << "# pvalue=" << pvalue_name(report.pvalue) << "\n";
  out << "# n=" << report.n << "\n";
  out << "# alpha=" << fmt(report.alpha) << "\n";
  out << "# trials=" << report.trials << "\n";
  out << "# seed=" << report.seed << "\n";
  out << "u,cdf\n";
  for (std::size_t i = 0; i < report.u.size(); ++i)
    out << fmt(report.u[i]) << "," << fmt(report.cdf[i]) << "\n";
  finish(out, path);
}

void write_report(const SimReport& report, const std::string& path,
                  ReportFormat format) {
  if (format == ReportFormat::Json) {
    json j;
    j["kind"] = "fwer-simulation";
    j["trials"] = report.trials;
    j["n"] = report.n;
    j["alpha"] = report.alpha;
    j["delta"] = report.delta;
    j["pvalue"] = pvalue_name(report.pvalue);
    j["procedure"] = report.procedure;
    j["violation_rate"] = report.violation_rate;
    json rows = json::array();
    for (std::size_t t = 0; t < report.lambda_hat.size(); ++t)
      rows.push_back(
          {{"lambda_hat", std::isnan(report.lambda_hat[t])
                              ? json()
                              : json(report.lambda_hat[t])},
           {"violated", report.violated[t] != 0}});
    j["trials_detail"] = rows;
    write_json_file(j, path);
    return;
  }
  auto out = open_out(path);
  out << "# kind=fwer-simulation\n";
  out << "# trials=" << report.trials << "\n";
  out << "# n=" << report.n << "\n";
  out << "# alpha=" << fmt(report.alpha) << "\n";
  out << "# delta=" << fmt(report.delta) << "\n";
  out << "# pvalue=" << pvalue_name(report.pvalue) << "\n";
  out << "# procedure=" << report.procedure << "\n";
  out << "# violation_rate=" << fmt(report.violation_rate) << "\n";
  out << "trial,lambda_hat,violated\n";
  for (std::size_t t = 0; t < report.lambda_hat.size(); ++t)
    out << t << ","
        << (std::isnan(report.lambda_hat[t]) ? "nan" : fmt(report.lambda_hat[t]))
        << "," << int(report.violated[t]) << "\n";
  finish(out, path);
}

ParsedCsv read_csv_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path + ": cannot open");
  ParsedCsv parsed;
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      auto eq = body.find('=');
      if (eq != std::string::npos)
        parsed.meta.emplace(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!header_done) {
      parsed.columns = std::move(fields);
      header_done = true;
    } else {
      parsed.rows.push_back(std::move(fields));
    }
  }
  if (!header_done) throw io_error(path + ": no column header");
  return parsed;
}

std::vector<GridPoint> read_risk_curve_csv(const std::string& path) {
  ParsedCsv parsed = read_csv_report(path);
  std::vector<std::string> expect = {"lambda",  "rhat", "n_defined",
                                     "defined", "p",    "rejected"};
  if (parsed.columns != expect)
    throw io_error(path + ": not a calibration report");
  std::vector<GridPoint> points;
  points.reserve(parsed.rows.size());
  for (const auto& row : parsed.rows) {
    if (row.size() != 6) throw io_error(path + ": short row");
    GridPoint p;
    p.lambda = parse_double(row[0]);
    p.rhat = parse_double(row[1]);
    p.n_defined = std::stol(row[2]);
    p.defined = row[3] == "1";
    p.p = parse_double(row[4]);
    p.rejected = row[5] == "1";
    points.push_back(p);
  }
  return points;
}

void write_lambda_table_csv(const std::vector<LambdaTableRow>& rows,
                            const std::string& path) {
  auto out = open_out(path);
  out << "# kind=lambda-table\n";
  out << "alpha,delta,certified,lambda_hat\n";
  for (const LambdaTableRow& r : rows)
    out << fmt(r.alpha) << "," << fmt(r.delta) << "," << (r.certified ? 1 : 0)
        << "," << (r.certified ? fmt(r.lambda_hat) : "none") << "\n";
  finish(out, path);
}

void write_magnitude_csv(const Matrix& map, const std::string& path) {
  auto out = open_out(path);
  for (std::size_t r = 0; r < map.rows; ++r) {
    for (std::size_t c = 0; c < map.cols; ++c) {
      if (c) out << ",";
      out << fmt(map(r, c));
    }
    out << "\n";
  }
  finish(out, path);
}

void write_magnitude_pgm(const Matrix& map, const std::string& path) {
  double top = 0.0;
  for (double v : map.data) top = std::max(top, v);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");
  out << "P5\n" << map.cols << " " << map.rows << "\n255\n";
  for (double v : map.data) {
    unsigned char byte =
        top == 0.0 ? 0
                   : static_cast<unsigned char>(std::lround(v / top * 255.0));
    out.write(reinterpret_cast<const char*>(&byte), 1);
  }
  finish(out, path);
}

}  // namespace riskprune

#pragma once

#include <map>
#include <string>
#include <vector>

#include "riskprune/calibrate.hpp"
#include "riskprune/validate.hpp"

namespace riskprune {

enum class ReportFormat { Csv, Json };

// by extension: .json gives Json, anything else Csv
ReportFormat infer_format(const std::string& path);

/*
 * CSV reports start with "# key=value" echo lines covering the full run
 * configuration, then a column header and the data rows.  Floats print with
 * 17 significant digits so re-parsing reproduces them exactly.  JSON
 * reports carry the same content as one object.
 */

void write_report(const CalibrationResult& result, const std::string& path,
                  ReportFormat format);
void write_report(const SelectiveResult& result, const std::string& path,
                  ReportFormat format);
void write_report(const BootstrapReport& report, const std::string& path,
                  ReportFormat format);
void write_report(const SuperuniformReport& report, const std::string& path,
                  ReportFormat format);
void write_report(const SimReport& report, const std::string& path,
                  ReportFormat format);

struct ParsedCsv {
  std::map<std::string, std::string> meta;      // the # key=value lines
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

ParsedCsv read_csv_report(const std::string& path);

// data rows of a calibration CSV, parsed back into grid points
std::vector<GridPoint> read_risk_curve_csv(const std::string& path);

struct LambdaTableRow {
  double alpha = 0.0;
  double delta = 0.0;
  bool certified = false;
  double lambda_hat = 0.0;
};

// summary table over a batch of (alpha, delta) runs
void write_lambda_table_csv(const std::vector<LambdaTableRow>& rows,
                            const std::string& path);

// 28x28 magnitude map as CSV and as an 8-bit PGM scaled so the largest
// entry maps to 255
void write_magnitude_csv(const Matrix& map, const std::string& path);
void write_magnitude_pgm(const Matrix& map, const std::string& path);

}  // namespace riskprune

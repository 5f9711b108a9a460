#include "riskprune/fwer.hpp"

#include <stdexcept>

namespace riskprune {

std::vector<std::size_t> fixed_sequence(std::span<const double> pvalues, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (pvalues.empty()) throw std::invalid_argument("empty p-value sequence");
  std::vector<std::size_t> rejected;
  for (std::size_t j = 0; j < pvalues.size(); ++j) {
    if (pvalues[j] > delta) break;
    rejected.push_back(j);
  }
  return rejected;
}

FallbackResult fallback_graph(const Matrix& pvalues, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (pvalues.rows == 0 || pvalues.cols == 0)
    throw std::invalid_argument("empty p-value grid");

  std::size_t j_rows = pvalues.rows;
  std::size_t t_cols = pvalues.cols;
  FallbackResult out;
  out.tested_budgets = Matrix(j_rows, t_cols);
  out.final_budgets = Matrix(j_rows, t_cols);
  Matrix& budget = out.final_budgets;
  for (std::size_t k = 0; k < j_rows; ++k)
    budget(k, 0) = delta / static_cast<double>(j_rows);

  for (std::size_t k = 0; k < j_rows; ++k) {
    for (std::size_t j = 0; j < t_cols; ++j) {
      out.tested_budgets(k, j) = budget(k, j);
      if (pvalues(k, j) > budget(k, j)) continue;  // no break, keep walking
      out.rejected.emplace_back(k, j);
      if (j + 1 < t_cols) {
        budget(k, j + 1) += budget(k, j);
      } else if (k + 1 < j_rows) {
        budget(k + 1, 0) += budget(k, j);
      }
      budget(k, j) = 0.0;
    }
  }
  return out;
}

}  // namespace riskprune

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "riskprune/network.hpp"

namespace riskprune {

// Fixed-sequence testing at full level delta: walk the p-values in order,
// reject while p <= delta, stop at the first failure.  Returns the indices
// of the rejected prefix.
std::vector<std::size_t> fixed_sequence(std::span<const double> pvalues, double delta);

struct FallbackResult {
  std::vector<std::pair<std::size_t, std::size_t>> rejected;  // (row, col), traversal order
  Matrix tested_budgets;  // budget each cell was compared against
  Matrix final_budgets;   // where unspent budget sits afterwards
};

// Fallback (graphical) procedure over a J x (T+1) grid of p-values.  Each
// row starts with budget delta / J in its first cell; a rejection hands the
// cell's budget to the next cell in the row, and the last cell of a row
// hands it to the next row's first cell.  Non-rejections keep going, they
// just pass nothing on.
FallbackResult fallback_graph(const Matrix& pvalues, double delta);

}  // namespace riskprune

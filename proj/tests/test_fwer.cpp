#include <doctest.h>

#include <stdexcept>

#include <vector>

#include "riskprune/fwer.hpp"
#include "riskprune/rng.hpp"

using namespace riskprune;

TEST_CASE("fixed sequence stops at the first exceedance") {
  std::vector<double> p = {0.001, 0.002, 0.2, 0.001};
  auto rej = fixed_sequence(p, 0.05);
  CHECK(rej == std::vector<std::size_t>{0, 1});
}

TEST_CASE("fixed sequence edge cases") {
  std::vector<double> high = {0.9, 0.01, 0.01};
  CHECK(fixed_sequence(high, 0.05).empty());

  std::vector<double> low = {0.01, 0.02, 0.03};
  CHECK(fixed_sequence(low, 0.05) == std::vector<std::size_t>{0, 1, 2});

  // boundary is inclusive
  std::vector<double> at = {0.05, 0.06};
  CHECK(fixed_sequence(at, 0.05) == std::vector<std::size_t>{0});

  CHECK_THROWS_AS(fixed_sequence(std::vector<double>{}, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(fixed_sequence(low, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fixed_sequence(low, 1.0), std::invalid_argument);
}

TEST_CASE("fixed sequence output is always a prefix") {
  SplitMix64 g(2024);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> p(1 + g.below(20));
    for (double& v : p) v = g.uniform();
    auto rej = fixed_sequence(p, 0.3);
    for (std::size_t i = 0; i < rej.size(); ++i) CHECK(rej[i] == i);
    if (rej.size() < p.size()) CHECK(p[rej.size()] > 0.3);
  }
}

TEST_CASE("fallback hand trace on a 2x2 grid") {
  Matrix p(2, 2);
  p(0, 0) = 0.01;
  p(0, 1) = 0.04;
  p(1, 0) = 0.03;
  p(1, 1) = 0.5;
  auto res = fallback_graph(p, 0.1);

  std::vector<std::pair<std::size_t, std::size_t>> expect = {{0, 0}, {0, 1}, {1, 0}};
  CHECK(res.rejected == expect);

  // all budget ended up at the one unrejected cell
  CHECK(res.final_budgets(0, 0) == 0.0);
  CHECK(res.final_budgets(0, 1) == 0.0);
  CHECK(res.final_budgets(1, 0) == 0.0);
  CHECK(res.final_budgets(1, 1) == doctest::Approx(0.1));

  // budgets at test time follow the hand trace
  CHECK(res.tested_budgets(0, 0) == doctest::Approx(0.05));
  CHECK(res.tested_budgets(0, 1) == doctest::Approx(0.05));
  CHECK(res.tested_budgets(1, 0) == doctest::Approx(0.1));
  CHECK(res.tested_budgets(1, 1) == doctest::Approx(0.1));
}

TEST_CASE("fallback rejects nothing when every p-value is 1") {
  Matrix p(3, 4);
  for (double& v : p.data) v = 1.0;
  auto res = fallback_graph(p, 0.09);
  CHECK(res.rejected.empty());
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(res.final_budgets(k, 0) == doctest::Approx(0.03));
    for (std::size_t j = 1; j < 4; ++j) CHECK(res.final_budgets(k, j) == 0.0);
  }
}

TEST_CASE("fallback with one row acts like a prefix procedure") {
  Matrix p(1, 5);
  p.data = {0.01, 0.02, 0.5, 0.001, 0.001};
  auto res = fallback_graph(p, 0.05);
  std::vector<std::pair<std::size_t, std::size_t>> expect = {{0, 0}, {0, 1}};
  CHECK(res.rejected == expect);
}

TEST_CASE("fallback traversal does not break within a row") {
  // row 0 dies at its first cell; row 1 still runs on its own budget
  Matrix p(2, 2);
  p(0, 0) = 0.9;
  p(0, 1) = 0.001;  // no budget ever arrives here
  p(1, 0) = 0.04;
  p(1, 1) = 0.04;
  auto res = fallback_graph(p, 0.1);
  std::vector<std::pair<std::size_t, std::size_t>> expect = {{1, 0}, {1, 1}};
  CHECK(res.rejected == expect);
  CHECK(res.final_budgets(0, 0) == doctest::Approx(0.05));
}

TEST_CASE("fallback rejections form a prefix within each row") {
  SplitMix64 g(3131);
  for (int t = 0; t < 50; ++t) {
    std::size_t rows = 1 + g.below(4);
    std::size_t cols = 1 + g.below(6);
    Matrix p(rows, cols);
    for (double& v : p.data) v = 0.001 + 0.999 * g.uniform();
    auto res = fallback_graph(p, 0.2);

    std::vector<std::vector<std::size_t>> byrow(rows);
    for (auto [k, j] : res.rejected) byrow[k].push_back(j);
    for (const auto& row : byrow)
      for (std::size_t i = 0; i < row.size(); ++i) CHECK(row[i] == i);

    // budget is conserved: moved on rejection, never created
    double total = 0.0;
    for (double b : res.final_budgets.data) {
      CHECK(b >= 0.0);
      total += b;
    }
    CHECK(total <= 0.2 + 1e-12);
  }
}

TEST_CASE("fallback full-grid rejection forwards all budget to the last cell") {
  Matrix p(2, 3);
  for (double& v : p.data) v = 1e-6;
  auto res = fallback_graph(p, 0.1);
  CHECK(res.rejected.size() == 6);
  for (double b : res.final_budgets.data) CHECK(b == 0.0);
}

TEST_CASE("fallback argument validation") {
  Matrix p(1, 1);
  p(0, 0) = 0.5;
  CHECK_THROWS_AS(fallback_graph(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fallback_graph(Matrix(), 0.1), std::invalid_argument);
}

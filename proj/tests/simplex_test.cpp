#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sigrev/generators.hpp"
#include "sigrev/simplex.hpp"

using sigrev::lp::BoundedSimplex;
using sigrev::lp::RowSense;
using sigrev::lp::SimplexStatus;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
  std::vector<std::size_t> idx;
  std::vector<double> coef;
  RowSense sense;
  double rhs;
};

double dot(const Row& r, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t k = 0; k < r.idx.size(); ++k) acc += r.coef[k] * y[r.idx[k]];
  return acc;
}

/// Upper bound on max c'y from the solver's row multipliers: every row is turned into <= form,
/// positive leftover reduced costs are charged to the variable bounds.
double dual_bound(const std::vector<double>& c, const std::vector<double>& u, const std::vector<Row>& rows,
                  const std::vector<double>& pi) {
  std::vector<double> red = c;
  double obj = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double sgn = rows[r].sense == RowSense::LessEqual ? 1.0 : -1.0;
    obj += sgn * pi[r] * rows[r].rhs;
    for (std::size_t k = 0; k < rows[r].idx.size(); ++k) red[rows[r].idx[k]] -= sgn * pi[r] * rows[r].coef[k];
  }
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (red[j] > 0.0) obj += std::isinf(u[j]) ? (red[j] > 1e-9 ? kInf : 0.0) : red[j] * u[j];
  }
  return obj;
}

}  // namespace

TEST(Simplex, TextbookMaximum) {
  // max 3a + 5b, a <= 4, 2b <= 12, 3a + 2b <= 18  ->  36 at (2, 6)
  const std::vector<double> c{3.0, 5.0}, u{kInf, kInf};
  BoundedSimplex<> s(c, u);
  const std::vector<std::size_t> i0{0}, i1{1}, i01{0, 1};
  const std::vector<double> one{1.0}, two{2.0}, three_two{3.0, 2.0};
  s.add_row(i0, one, RowSense::LessEqual, 4.0);
  s.add_row(i1, two, RowSense::LessEqual, 12.0);
  s.add_row(i01, three_two, RowSense::LessEqual, 18.0);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  EXPECT_NEAR(s.objective(), 36.0, 1e-12);
  const auto y = s.primal();
  EXPECT_NEAR(y[0], 2.0, 1e-12);
  EXPECT_NEAR(y[1], 6.0, 1e-12);
  const auto d = s.row_duals();
  EXPECT_NEAR(d[0], 0.0, 1e-12);
  EXPECT_NEAR(d[1], 1.5, 1e-12);
  EXPECT_NEAR(d[2], 1.0, 1e-12);
}

TEST(Simplex, BoundsOnly) {
  const std::vector<double> c{1.0, -1.0, 2.0}, u{3.0, 5.0, 0.5};
  BoundedSimplex<> s(c, u);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  EXPECT_NEAR(s.objective(), 4.0, 1e-12);
}

TEST(Simplex, GreaterEqualRowsNeedDualPhase) {
  // max -a - b with a + b >= 2, a - b >= -1  ->  -2
  const std::vector<double> c{-1.0, -1.0}, u{kInf, kInf};
  BoundedSimplex<> s(c, u);
  const std::vector<std::size_t> i01{0, 1};
  const std::vector<double> ones{1.0, 1.0}, diff{1.0, -1.0};
  s.add_row(i01, ones, RowSense::GreaterEqual, 2.0);
  s.add_row(i01, diff, RowSense::GreaterEqual, -1.0);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  EXPECT_NEAR(s.objective(), -2.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  const std::vector<double> c{1.0}, u{1.0};
  BoundedSimplex<> s(c, u);
  const std::vector<std::size_t> i0{0};
  const std::vector<double> one{1.0};
  s.add_row(i0, one, RowSense::GreaterEqual, 2.0);
  EXPECT_EQ(s.solve(), SimplexStatus::Infeasible);
}

TEST(Simplex, Unbounded) {
  const std::vector<double> c{1.0, 1.0}, u{kInf, kInf};
  BoundedSimplex<> s(c, u);
  const std::vector<std::size_t> i01{0, 1};
  const std::vector<double> diff{1.0, -1.0};
  s.add_row(i01, diff, RowSense::LessEqual, 1.0);
  EXPECT_EQ(s.solve(), SimplexStatus::Unbounded);
}

TEST(Simplex, BealeCyclingExample) {
  // Classic instance on which Dantzig pricing with naive ties cycles; optimum 1/20.
  const std::vector<double> c{0.75, -150.0, 0.02, -6.0}, u{kInf, kInf, kInf, kInf};
  BoundedSimplex<> s(c, u);
  const std::vector<std::size_t> all{0, 1, 2, 3}, i2{2};
  const std::vector<double> r1{0.25, -60.0, -0.04, 9.0}, r2{0.5, -90.0, -0.02, 3.0}, one{1.0};
  s.add_row(all, r1, RowSense::LessEqual, 0.0);
  s.add_row(all, r2, RowSense::LessEqual, 0.0);
  s.add_row(i2, one, RowSense::LessEqual, 1.0);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  EXPECT_NEAR(s.objective(), 0.05, 1e-12);
}

TEST(Simplex, RowsAddedAfterSolveWarmStart) {
  const std::vector<double> c{1.0, 1.0}, u{10.0, 10.0};
  BoundedSimplex<> s(c, u);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  EXPECT_NEAR(s.objective(), 20.0, 1e-12);
  const std::vector<std::size_t> i01{0, 1};
  const std::vector<double> w{1.0, 2.0};
  s.add_row(i01, w, RowSense::LessEqual, 12.0);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  EXPECT_NEAR(s.objective(), 11.0, 1e-12);
  const std::vector<double> w2{3.0, 1.0};
  s.add_row(i01, w2, RowSense::LessEqual, 9.0);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  // vertex of a + 2b = 12 and 3a + b = 9
  EXPECT_NEAR(s.objective(), 1.2 + 5.4, 1e-12);
}

TEST(Simplex, DroppedRowsKeepOptimum) {
  const std::vector<double> c{1.0, 1.0}, u{kInf, kInf};
  BoundedSimplex<> s(c, u);
  const std::vector<std::size_t> i0{0}, i1{1};
  const std::vector<double> one{1.0};
  s.add_row(i0, one, RowSense::LessEqual, 1.0);
  s.add_row(i1, one, RowSense::LessEqual, 1.0);
  s.add_row(i0, one, RowSense::LessEqual, 50.0);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  const auto dropped = s.drop_loose_rows(1e-6, [](std::size_t) { return false; });
  ASSERT_EQ(dropped.size(), 1u);
  EXPECT_EQ(dropped[0], 2u);
  EXPECT_FALSE(s.row_alive(2));
  EXPECT_EQ(s.num_rows(), 2u);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  EXPECT_NEAR(s.objective(), 2.0, 1e-12);
}

TEST(Simplex, RandomProgramsMeetTheirDualBound) {
  sigrev::Rng rng(2024);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 3 + rng.below(10), m = 2 + rng.below(14);
    std::vector<double> c(n), u(n);
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = rng.uniform(-1.0, 2.0);
      u[j] = rng.uniform() < 0.3 ? kInf : rng.uniform(0.5, 3.0);
    }
    std::vector<Row> rows;
    BoundedSimplex<> s(c, u);
    for (std::size_t r = 0; r < m; ++r) {
      Row row{{}, {}, rng.uniform() < 0.2 ? RowSense::GreaterEqual : RowSense::LessEqual, 0.0};
      for (std::size_t j = 0; j < n; ++j) {
        if (rng.uniform() < 0.6) {
          row.idx.push_back(j);
          // a few rows with tied coefficients make degenerate vertices likely
          row.coef.push_back(rep % 3 == 0 ? 1.0 : rng.uniform(0.1, 2.0));
        }
      }
      if (row.idx.empty()) continue;
      row.rhs = row.sense == RowSense::LessEqual ? rng.uniform(0.0, 4.0) : rng.uniform(0.0, 0.5);
      if (rep % 4 == 0) row.rhs = std::round(row.rhs);
      s.add_row(row.idx, row.coef, row.sense, row.rhs);
      rows.push_back(row);
      // rows are also added between solves
      if (r == m / 2) {
        const auto st = s.solve();
        if (st == SimplexStatus::Unbounded) break;
      }
    }
    const auto st = s.solve();
    if (st == SimplexStatus::Unbounded || st == SimplexStatus::Infeasible) continue;
    ASSERT_EQ(st, SimplexStatus::Optimal);
    const auto y = s.primal();
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_GE(y[j], -1e-9);
      if (!std::isinf(u[j])) {
        EXPECT_LE(y[j], u[j] + 1e-9);
      }
    }
    for (const auto& r : rows) {
      const double a = dot(r, y);
      if (r.sense == RowSense::LessEqual) EXPECT_LE(a, r.rhs + 1e-9);
      else EXPECT_GE(a, r.rhs - 1e-9);
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += c[j] * y[j];
    EXPECT_NEAR(obj, s.objective(), 1e-9);
    const auto pi = s.row_duals();
    for (double v : pi) EXPECT_GE(v, -1e-12);
    EXPECT_NEAR(dual_bound(c, u, rows, pi), obj, 1e-8 * std::max(1.0, std::abs(obj))) << rep;
  }
}

TEST(Simplex, LongDoubleScalar) {
  const std::vector<double> c{3.0, 5.0}, u{kInf, kInf};
  BoundedSimplex<long double> s(c, u);
  const std::vector<std::size_t> i01{0, 1};
  const std::vector<double> w{3.0, 2.0};
  s.add_row(i01, w, RowSense::LessEqual, 18.0);
  ASSERT_EQ(s.solve(), SimplexStatus::Optimal);
  EXPECT_NEAR(s.objective(), 45.0, 1e-12);
}

#include <gtest/gtest.h>

#include "maxplus/fundamental.hpp"
#include "maxplus/riccati.hpp"
#include "maxplus/value.hpp"
#include "support/test_problems.hpp"

using namespace maxplus;
using namespace maxplus::testing;

namespace {

// Dyadic kernel and grid: every sum and product below is exact in binary.
PartitionedHessian dyadic_kernel() {
  return PartitionedHessian(from_rows(4, 4, {1.5, 0.25, 0.5, -0.25,   //
                                             0.25, 2.0, 0.125, 0.75,  //
                                             0.5, 0.125, -3.0, 0.5,   //
                                             -0.25, 0.75, 0.5, -4.0}));
}

std::vector<double> dyadic_values(Rng& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(-64, 64);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng) / 16.0;
  return v;
}

}  // namespace

TEST(ValueAt, MatchesDirectMaximization) {
  const PartitionedHessian Q = dyadic_kernel();
  const GridSpec zg = GridSpec::uniform(2, -1, 1, 0.25);
  Rng rng(51);
  const DualFunction a{SpaceKind::convex(), zg, dyadic_values(rng, zg.size())};
  Vector x(2);
  x << 0.75, -0.5;
  double best = kMinusInf;
  for (std::size_t j = 0; j < zg.size(); ++j) {
    best = std::max(best, Q.quadratic(x, zg.point(j)) + a.values[j]);
  }
  EXPECT_NEAR(value_at(Q, a, x), best, 1e-14);
}

TEST(ValueAt, SkipsMinusInfinity) {
  const PartitionedHessian Q = dyadic_kernel();
  const GridSpec zg = GridSpec::uniform(2, -1, 1, 0.5);
  DualFunction a{SpaceKind::convex(), zg, std::vector<double>(zg.size(), kMinusInf)};
  Vector x(2);
  x << 0.5, 0.5;
  EXPECT_EQ(value_at(Q, a, x), kMinusInf);
  a.values[4] = 1.0;
  EXPECT_DOUBLE_EQ(value_at(Q, a, x), Q.quadratic(x, zg.point(4)) + 1.0);
}

TEST(ValueAt, MonotoneInDual) {
  const PartitionedHessian Q = dyadic_kernel();
  const GridSpec zg = GridSpec::uniform(2, -1, 1, 0.25);
  const GridSpec xg = GridSpec::uniform(2, -1, 1, 0.5);
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> lo = dyadic_values(rng, zg.size());
    std::vector<double> hi = lo;
    for (double& v : hi) v += std::uniform_int_distribution<int>(0, 3)(rng) / 4.0;
    const auto w1 = value_grid(Q, {SpaceKind::convex(), zg, lo}, xg);
    const auto w2 = value_grid(Q, {SpaceKind::convex(), zg, hi}, xg);
    for (std::size_t i = 0; i < w1.size(); ++i) EXPECT_LE(w1[i], w2[i]);
  }
}

TEST(ValueAt, MaxPlusLinearExactly) {
  const PartitionedHessian Q = dyadic_kernel();
  const GridSpec zg = GridSpec::uniform(2, -1, 1, 0.25);
  const GridSpec xg = GridSpec::uniform(2, -1, 1, 0.25);
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> a1 = dyadic_values(rng, zg.size());
    const std::vector<double> a2 = dyadic_values(rng, zg.size());
    const double c = std::uniform_int_distribution<int>(-8, 8)(rng) / 4.0;
    std::vector<double> mix(zg.size());
    for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = std::max(a1[j], c + a2[j]);
    const auto w1 = value_grid(Q, {SpaceKind::convex(), zg, a1}, xg);
    const auto w2 = value_grid(Q, {SpaceKind::convex(), zg, a2}, xg);
    const auto wm = value_grid(Q, {SpaceKind::convex(), zg, mix}, xg);
    for (std::size_t i = 0; i < wm.size(); ++i) {
      ASSERT_EQ(wm[i], std::max(w1[i], c + w2[i])) << "x index " << i;
    }
  }
}

TEST(ValueGrid, QuadraticPayoffTracksRiccati) {
  const RegulatorProblem p = example1();
  const SpaceKind c = SpaceKind::convex();
  const long K = 8;
  const Propagation pr = propagate(initial_state(p, c), K, p);
  const GridSpec zg = GridSpec::uniform(2, -6, 6, 0.05);
  const DualFunction a =
      sample_quadratic_dual(quadratic_dual(example1_lambda(), c), c, zg);
  const GridSpec xg = GridSpec::uniform(2, -1, 1, 0.25);
  const std::vector<double> w = value_grid(pr.Q, a, xg);
  const Matrix P = dre_solve(p, example1_lambda(), K).back();
  for (std::size_t i = 0; i < xg.size(); ++i) {
    const Vector x = xg.point(i);
    EXPECT_LE(relative_error(w[i], 0.5 * x.dot(P * x)), 1e-2);
  }
}

TEST(ValueGrid, DimensionErrors) {
  const PartitionedHessian Q = dyadic_kernel();
  const GridSpec z1 = GridSpec::uniform(1, -1, 1, 0.5);
  const GridSpec z2 = GridSpec::uniform(2, -1, 1, 0.5);
  EXPECT_THROW(value_grid(Q, {SpaceKind::convex(), z1, std::vector<double>(z1.size())}, z2),
               InputError);
  EXPECT_THROW(value_grid(Q, {SpaceKind::convex(), z2, std::vector<double>(3)}, z2),
               InputError);
  EXPECT_THROW(value_grid(Q, {SpaceKind::convex(), z2, std::vector<double>(z2.size())}, z1),
               InputError);
}

TEST(WInfinity, QuadraticPlusOffset) {
  const Matrix Q11 = reference_q_inf_ex3().topLeftCorner(2, 2);
  Vector x(2);
  x << 1.0, 0.0;
  EXPECT_NEAR(w_infinity(Q11, kReferenceKappaEx3, x), 4.1319, 5e-5);
  x.setZero();
  EXPECT_EQ(w_infinity(Q11, 2.5, x), 2.5);
  EXPECT_EQ(w_infinity(Matrix::Zero(2, 2), 2.5, Vector::Ones(2)), 2.5);
  const GridSpec g = GridSpec::uniform(2, -1, 1, 1);
  const auto grid = w_infinity_grid(Q11, 0.0, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(grid[i], w_infinity(Q11, 0.0, g.point(i)));
  }
}

TEST(RelativeError, Formula) {
  EXPECT_DOUBLE_EQ(relative_error(3.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(relative_error(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(1.0, 3.0), 0.5);
}

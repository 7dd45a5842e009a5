#include <gtest/gtest.h>

#include "maxplus/fundamental.hpp"
#include "maxplus/grid_oracle.hpp"
#include "support/test_problems.hpp"

using namespace maxplus;
using namespace maxplus::testing;

TEST(Projection, GridPointsClampAndFloor) {
  const GridSpec g = GridSpec::uniform(2, -3, 3, 0.025);
  for (std::size_t i = 0; i < g.size(); i += 997) {
    EXPECT_EQ(projection_index(g.point(i), g), i);
  }
  Vector x(2);
  x << 3.7, 0.013;
  const Vector y = projection(x, g);
  EXPECT_DOUBLE_EQ(y(0), 3.0);
  EXPECT_NEAR(y(1), 0.0, 1e-12);
  x << -9.0, 0.0499;
  const Vector y2 = projection(x, g);
  EXPECT_DOUBLE_EQ(y2(0), -3.0);
  EXPECT_NEAR(y2(1), 0.025, 1e-12);
}

TEST(DpStepGrid, ZeroValuesAndZeroInputGivePhiQuadratic) {
  const RegulatorProblem p = example1();
  const GridSpec xg = GridSpec::uniform(2, -1, 1, 0.25);
  const GridSpec wg = GridSpec::uniform(1, 0, 0, 0.1);
  const auto out = dp_step_grid(std::vector<double>(xg.size(), 0.0), p, wg, xg);
  for (std::size_t i = 0; i < xg.size(); ++i) {
    const Vector x = xg.point(i);
    EXPECT_DOUBLE_EQ(out[i], 0.5 * x.dot(p.Phi * x));
  }
}

TEST(DpStepGrid, SinglePointGridKeepsConstant) {
  const RegulatorProblem p = example1();
  const GridSpec xg = GridSpec::uniform(2, 0, 0, 0.1);
  const GridSpec wg = GridSpec::uniform(1, -1, 1, 0.1);
  EXPECT_EQ(dp_step_grid({1.25}, p, wg, xg), std::vector<double>{1.25});
}

TEST(DpStepGrid, MatchesDefinition) {
  const RegulatorProblem p = example3();
  const GridSpec xg = GridSpec::uniform(2, -1, 1, 0.1);
  const GridSpec wg = GridSpec::uniform(1, -1, 1, 0.25);
  Rng rng(61);
  std::vector<double> v(xg.size());
  for (double& t : v) t = uniform(rng, -1, 1);
  const auto out = dp_step_grid(v, p, wg, xg);
  for (std::size_t i = 0; i < xg.size(); i += 13) {
    const Vector x = xg.point(i);
    double best = kMinusInf;
    for (std::size_t j = 0; j < wg.size(); ++j) {
      const Vector w = wg.point(j);
      best = std::max(best, 0.5 * x.dot(p.Phi * x) - 0.5 * p.gamma_sq() * w.squaredNorm() +
                                v[projection_index(p.A * x + p.B * w, xg)]);
    }
    EXPECT_NEAR(out[i], best, 1e-14);
  }
}

TEST(DpStepGrid, Errors) {
  const RegulatorProblem p = example1();
  const GridSpec xg = GridSpec::uniform(2, -1, 1, 0.5);
  const GridSpec wg = GridSpec::uniform(1, -1, 1, 0.5);
  EXPECT_THROW(dp_step_grid({0.0}, p, wg, xg), InputError);
  EXPECT_THROW(dp_step_grid(std::vector<double>(xg.size()), p, xg, xg), InputError);
  EXPECT_THROW(dp_solve_grid(std::vector<double>(xg.size()), -1, p, wg, xg), InputError);
}

TEST(DpSolveGrid, ZeroHorizonEchoesAndStepsCompose) {
  const RegulatorProblem p = example1();
  const GridSpec xg = GridSpec::uniform(2, -1, 1, 0.125);
  const GridSpec wg = GridSpec::uniform(1, -1, 1, 0.25);
  std::vector<double> psi(xg.size());
  for (std::size_t i = 0; i < xg.size(); ++i) {
    psi[i] = 0.5 * xg.point(i).dot(example1_lambda() * xg.point(i));
  }
  EXPECT_EQ(dp_solve_grid(psi, 0, p, wg, xg).values, psi);
  const GridDpResult r = dp_solve_grid(psi, 3, p, wg, xg);
  EXPECT_EQ(r.step_seconds.size(), 3u);
  EXPECT_EQ(r.values,
            dp_step_grid(dp_step_grid(dp_step_grid(psi, p, wg, xg), p, wg, xg), p, wg, xg));
}

TEST(ConstrainedOracle, OriginIsZero) {
  Rng rng(62);
  const RegulatorProblem p = random_problem(rng, 3, 1);
  EXPECT_EQ(constrained_qp_oracle(p, 3, Vector::Zero(3), Vector::Zero(3)), 0.0);
  EXPECT_THROW(constrained_qp_oracle(p, 0, Vector::Zero(3), Vector::Zero(3)), InputError);
}

TEST(ConstrainedOracle, SquareOneStepClosedForm) {
  const RegulatorProblem p = example2();
  Rng rng(63);
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_matrix(rng, 2, 1, -2, 2);
    const Vector z = random_matrix(rng, 2, 1, -2, 2);
    const Vector w = p.B.inverse() * (z - p.A * x);
    EXPECT_NEAR(constrained_qp_oracle(p, 1, x, z),
                0.5 * x.dot(p.Phi * x) - 0.5 * p.gamma_sq() * w.squaredNorm(), 1e-12);
  }
}

TEST(ConstrainedOracle, UnreachableTargetIsMinusInfinity) {
  Rng rng(64);
  const RegulatorProblem p = random_problem(rng, 3, 1);
  const Vector x = random_matrix(rng, 3, 1);
  const Vector z = random_matrix(rng, 3, 1);
  EXPECT_EQ(constrained_qp_oracle(p, 1, x, z), kMinusInf);
  EXPECT_NE(constrained_qp_oracle(p, 3, x, z), kMinusInf);
}

TEST(ConstrainedOracle, AgreesWithExample2Kernel) {
  const RegulatorProblem p = example2();
  const PartitionedHessian Q = init_Q1(p, SpaceKind::indicator()).Q;
  Rng rng(65);
  for (int i = 0; i < 100; ++i) {
    const Vector x = random_matrix(rng, 2, 1, -2, 2);
    const Vector z = random_matrix(rng, 2, 1, -2, 2);
    EXPECT_NEAR(constrained_qp_oracle(p, 2, x, z), q_step(Q, p).quadratic(x, z), 1e-9);
    EXPECT_NEAR(constrained_qp_oracle(p, 1, x, z), Q.quadratic(x, z), 1e-9);
  }
}

#include <gtest/gtest.h>

#include "maxplus/riccati.hpp"
#include "support/test_problems.hpp"

using namespace maxplus;
using namespace maxplus::testing;

TEST(DreStep, ZeroInputGivesPhi) {
  const RegulatorProblem p = example1();
  EXPECT_LE(max_abs(dre_step(Matrix::Zero(2, 2), p) - p.Phi), 0.0);
}

TEST(DreStep, ZeroDynamicsScalar) {
  RegulatorProblem p{Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1),
                     2.0};
  EXPECT_DOUBLE_EQ(dre_step(Matrix::Ones(1, 1), p)(0, 0), 1.0);
}

TEST(DreStep, OutputIsExactlySymmetric) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const RegulatorProblem p = random_problem(rng, 3, 2);
    const Matrix P = dre_step(random_spd(rng, 3, 0.0, 1.0), p);
    EXPECT_EQ(P, P.transpose());
  }
}

TEST(DreStep, InfeasibleGainCarriesMinEigenvalue) {
  RegulatorProblem p = example1();
  p.gamma = 0.05;
  try {
    dre_step(example1_lambda(), p);
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& e) {
    EXPECT_LT(e.min_eigenvalue(), 0.0);
    EXPECT_NE(std::string(e.what()).find("gain too small"), std::string::npos);
  }
}

TEST(DreSolve, ExampleOneHorizon64MatchesPrintedHessian) {
  const auto traj = dre_solve(example1(), example1_lambda(), 64);
  ASSERT_EQ(traj.size(), 65u);
  EXPECT_LE(max_abs(traj.back() - reference_P64()), 5e-5);
  EXPECT_EQ(traj.front(), example1_lambda());
}

TEST(DreSolve, ZeroHorizonEchoes) {
  const auto traj = dre_solve(example1(), example1_lambda(), 0);
  ASSERT_EQ(traj.size(), 1u);
  EXPECT_EQ(traj[0], example1_lambda());
}

TEST(DreSolve, MonotoneFromZero) {
  const auto traj = dre_solve(example1(), Matrix::Zero(2, 2), 16);
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    EXPECT_GE(min_eigenvalue(traj[k + 1] - traj[k]), -1e-10) << "k=" << k;
  }
}

TEST(DreSolve, FailureReportsStep) {
  // gamma^2 just above B'Lambda B: step 0 is feasible, P_1 is not.
  RegulatorProblem p = example1();
  const double bLb = (p.B.transpose() * example1_lambda() * p.B)(0, 0);
  p.gamma = std::sqrt(bLb * 1.0001);
  try {
    dre_solve(p, example1_lambda(), 10);
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& e) {
    ASSERT_TRUE(e.step().has_value());
    EXPECT_EQ(*e.step(), 1);
  }
}

TEST(DreSolve, SemigroupOfTheRecursion) {
  Rng rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + trial % 3;
    const RegulatorProblem p = random_problem(rng, n, 1 + trial % n);
    const Matrix P0 = random_spd(rng, n, 0.0, 1.0);
    const long K1 = 1 + trial % 7;
    const long K2 = 2 + trial % 5;
    const Matrix direct = dre_solve(p, P0, K1 + K2).back();
    const Matrix split = dre_solve(p, dre_solve(p, P0, K1).back(), K2).back();
    EXPECT_LE(max_abs(direct - split), 1e-12);
  }
}

TEST(AreFixedPoint, ExampleOneMatchesHorizon64) {
  const RegulatorProblem p = example1();
  const Matrix P = are_fixed_point(p, 1e-12);
  EXPECT_LE(max_abs(P - reference_P64()), 5e-5);
  EXPECT_LE(inf_norm(P - dre_step(P, p)), 1e-11);
}

TEST(AreFixedPoint, ZeroDynamicsIsPhi) {
  RegulatorProblem p = example2();
  p.A.setZero();
  EXPECT_LE(max_abs(are_fixed_point(p) - p.Phi), 0.0);
}

TEST(AreFixedPoint, ExampleTwo) {
  const Matrix P = are_fixed_point(example2());
  EXPECT_LE(max_abs(P - from_rows(2, 2, {0.6313, -0.0135, -0.0135, 0.2069})),
            5e-5);
}

TEST(AreFixedPoint, NonConvergenceCarriesResidual) {
  try {
    are_fixed_point(example1(), 1e-12, 2);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_residual(), 1e-12);
  }
}

TEST(ExistenceCheck, ExampleThreeSemiconvex) {
  const auto rep = check_assumption_existence(
      example3(), SpaceKind::semi_convex(example3_M()), 64);
  EXPECT_TRUE(rep.applicable);
  EXPECT_TRUE(rep.satisfied);
  ASSERT_EQ(rep.margins.size(), 64u);
  EXPECT_GT(rep.worst_margin, 0.0);
}

TEST(ExistenceCheck, IndicatorNotApplicable) {
  const auto rep =
      check_assumption_existence(example2(), SpaceKind::indicator(), 10);
  EXPECT_FALSE(rep.applicable);
  EXPECT_NE(rep.note.find("not applicable"), std::string::npos);
}

TEST(ExistenceCheck, ExampleOneConvexInvertible) {
  const auto rep =
      check_assumption_existence(example1(), SpaceKind::convex(), 64);
  EXPECT_TRUE(rep.satisfied);
  for (double m : rep.margins) EXPECT_GT(m, 0.0);
}

TEST(ExistenceCheck, ReportsBreakdownWithoutThrowing) {
  RegulatorProblem p = example1();
  p.gamma = 0.01;
  ExistenceReport rep;
  // P_1 = Phi, and gamma^2 < B'Phi B makes the second step infeasible.
  ASSERT_NO_THROW(rep = check_assumption_existence(p, SpaceKind::convex(), 5));
  EXPECT_FALSE(rep.satisfied);
  ASSERT_TRUE(rep.breakdown_step.has_value());
  EXPECT_EQ(*rep.breakdown_step, 1);
}

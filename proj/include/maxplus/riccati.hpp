#pragma once

// Difference Riccati recursion
//   P+ = Phi + A'PA + A'PB (gamma^2 I - B'PB)^{-1} B'PA
// and its fixed point.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "maxplus/errors.hpp"
#include "maxplus/linalg.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

/// gamma^2 I - B' P B; must be positive definite for the recursion to exist.
inline Matrix riccati_gain_matrix(const Matrix& P, const RegulatorProblem& p) {
  return p.gamma_sq() * Matrix::Identity(p.m(), p.m()) -
         p.B.transpose() * P * p.B;
}

inline Matrix dre_step(const Matrix& P, const RegulatorProblem& p) {
  if (P.rows() != p.n() || P.cols() != p.n()) {
    throw InputError("dre_step: P must be n x n");
  }
  const Matrix BtPA = p.B.transpose() * P * p.A;
  const Matrix K = solve_spd(riccati_gain_matrix(P, p), BtPA,
                             "gain too small / horizon blow-up: gamma^2 I - "
                             "B'PB is not positive definite");
  return symmetrize(p.Phi + p.A.transpose() * P * p.A + BtPA.transpose() * K);
}

/// Returns [P_0, P_1, ..., P_K].
inline std::vector<Matrix> dre_solve(const RegulatorProblem& p,
                                     const Matrix& P0, long K) {
  if (K < 0) throw InputError("dre_solve: horizon must be nonnegative");
  std::vector<Matrix> traj;
  traj.reserve(static_cast<std::size_t>(K) + 1);
  traj.push_back(symmetrize(P0));
  for (long k = 0; k < K; ++k) {
    try {
      traj.push_back(dre_step(traj.back(), p));
    } catch (const FeasibilityError& e) {
      throw e.at_step(k);
    }
  }
  return traj;
}

/// Iterates from P = 0 until ||P_{k+1} - P_k||_inf <= tol.
inline Matrix are_fixed_point(const RegulatorProblem& p, double tol = 1e-12,
                              long max_iter = 100000) {
  Matrix P = Matrix::Zero(p.n(), p.n());
  double residual = std::numeric_limits<double>::infinity();
  for (long k = 0; k < max_iter; ++k) {
    Matrix next;
    try {
      next = dre_step(P, p);
    } catch (const FeasibilityError& e) {
      throw e.at_step(k);
    }
    residual = inf_norm(next - P);
    P = std::move(next);
    if (residual <= tol) return P;
  }
  throw ConvergenceError("Riccati fixed point not reached within " +
                             std::to_string(max_iter) + " iterations",
                         residual);
}

struct ExistenceReport {
  bool applicable = true;
  bool satisfied = true;
  /// Per step k = 1..K: smallest singular value of P_k (i=1) or smallest
  /// eigenvalue of P_k + M (i=2).
  std::vector<double> margins;
  double worst_margin = std::numeric_limits<double>::infinity();
  long worst_step = -1;
  /// Set when the recursion itself broke down before K.
  std::optional<long> breakdown_step;
  std::string note;
};

/// Checks the existence conditions that make the space-i transforms well
/// defined along the horizon: P_k invertible (i=1, P_0 = 0) or P_k + M > 0
/// (i=2, P_0 = -M). Failures are reported, never thrown.
inline ExistenceReport check_assumption_existence(const RegulatorProblem& p,
                                                  const SpaceKind& space,
                                                  long K) {
  ExistenceReport rep;
  if (space.variant() == Space::Indicator) {
    rep.applicable = false;
    rep.note = "not applicable: the indicator space needs no existence check";
    return rep;
  }
  const bool convex = space.variant() == Space::Convex;
  Matrix P = convex ? Matrix(Matrix::Zero(p.n(), p.n())) : Matrix(-space.M());
  for (long k = 1; k <= K; ++k) {
    try {
      P = dre_step(P, p);
    } catch (const FeasibilityError& e) {
      rep.satisfied = false;
      rep.breakdown_step = k - 1;
      rep.note = e.reason();
      return rep;
    }
    double margin = 0.0;
    bool ok = false;
    if (convex) {
      const Vector s = singular_values(P);
      margin = s.minCoeff();
      ok = margin > kRankTolerance * s.maxCoeff();
    } else {
      const Matrix PM = P + space.M();
      margin = min_eigenvalue(PM);
      ok = is_positive_definite(PM);
    }
    rep.margins.push_back(margin);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_step = k;
    }
    if (!ok) rep.satisfied = false;
  }
  rep.note = rep.satisfied ? "satisfied" : "violated";
  return rep;
}

}  // namespace maxplus

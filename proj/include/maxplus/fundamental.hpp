#pragma once

// Max-plus fundamental solution. Kernels are quadratic in (x, z) and are
// carried as partitioned Hessians: Q in the primal space, Theta in the dual
// space. Theta propagates by the semigroup product (oplus_compose), which
// makes horizon k reachable in O(log k) products.

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "maxplus/errors.hpp"
#include "maxplus/linalg.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

struct InitialKernel {
  PartitionedHessian Q;
  /// Horizon of Q: 1, except n for the indicator space when m < n.
  int base_horizon = 1;
};

namespace detail {

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline InitialKernel init_convex(const RegulatorProblem& p) {
  return {PartitionedHessian(p.Phi, p.A.transpose(),
                             p.B * p.B.transpose() / p.gamma_sq()),
          1};
}

inline InitialKernel init_semiconvex(const RegulatorProblem& p,
                                     const Matrix& M) {
  const Matrix MB = M * p.B;
  const Matrix S = p.gamma_sq() * identity(p.m()) + p.B.transpose() * MB;
  const Matrix Delta =
      symmetrize(MB * solve_spd(S, MB.transpose(),
                                "gamma^2 I + B'MB is not positive definite") -
                 M);
  const Matrix At = p.A.transpose();
  return {PartitionedHessian(At * Delta * p.A + p.Phi, -At * Delta, Delta), 1};
}

/// One-step state-to-state kernel; needs B invertible.
inline InitialKernel init_indicator_square(const RegulatorProblem& p) {
  const Matrix BBt = p.B * p.B.transpose();
  const Matrix R =
      symmetrize(checked_inverse(BBt, "indicator space with m = n: B is "
                                      "singular"));
  const double g2 = p.gamma_sq();
  const Matrix At = p.A.transpose();
  return {PartitionedHessian(p.Phi - g2 * At * R * p.A, g2 * At * R, -g2 * R),
          1};
}

/// n-step state-to-state kernel for m < n. The inputs w = (w_0..w_{n-1})
/// reaching z from x form the affine set F x + G z + D what, D an orthonormal
/// null-space basis of the controllability matrix; the payoff is then a
/// concave quadratic in what, maximized in closed form.
inline InitialKernel init_indicator_wide(const RegulatorProblem& p) {
  const int n = p.n();
  const int m = p.m();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  const Eigen::Index nm = static_cast<Eigen::Index>(n) * m;

  std::vector<Matrix> Apow(static_cast<std::size_t>(n) + 1);
  Apow[0] = identity(n);
  for (int i = 1; i <= n; ++i) Apow[i] = p.A * Apow[i - 1];

  // Stacked states x_0..x_{n-1} = Abar x + Bbar w.
  Matrix Abar(nn, n);
  Matrix Bbar = Matrix::Zero(nn, nm);
  for (int i = 0; i < n; ++i) {
    Abar.middleRows(static_cast<Eigen::Index>(i) * n, n) = Apow[i];
    for (int j = 0; j < i; ++j) {
      Bbar.block(static_cast<Eigen::Index>(i) * n,
                 static_cast<Eigen::Index>(j) * m, n, m) = Apow[i - 1 - j] * p.B;
    }
  }
  Matrix Phibar = Matrix::Zero(nn, nn);
  for (int i = 0; i < n; ++i) {
    Phibar.block(static_cast<Eigen::Index>(i) * n,
                 static_cast<Eigen::Index>(i) * n, n, n) = p.Phi;
  }

  const Matrix C = controllability_matrix(p);
  const Matrix Cplus = right_pseudo_inverse(C);
  const Matrix D = null_space_basis(C);
  const Matrix F = -Cplus * Apow[n];

  Matrix E(nm, 2 * n);
  E << F, Cplus;
  Matrix H(nn, 2 * n);
  H << Abar + Bbar * F, Bbar * Cplus;

  const double g2 = p.gamma_sq();
  Matrix Q = H.transpose() * Phibar * H - g2 * E.transpose() * E;
  if (D.cols() > 0) {
    const Matrix BD = Bbar * D;
    const Matrix negOmega = symmetrize(g2 * identity(D.cols()) -
                                       BD.transpose() * Phibar * BD);
    const Matrix Pi = BD.transpose() * Phibar * H - g2 * D.transpose() * E;
    Q += Pi.transpose() *
         solve_spd(negOmega, Pi,
                   "supremum not attained: the free-input payoff is not "
                   "negative definite");
  }
  return {PartitionedHessian(Q), n};
}

}  // namespace detail

inline InitialKernel init_Q1(const RegulatorProblem& p,
                             const SpaceKind& space) {
  check_dimensions(p);
  switch (space.variant()) {
    case Space::Convex:
      return detail::init_convex(p);
    case Space::SemiConvex:
      if (space.M().rows() != p.n()) {
        throw InputError("semiconvex space: M must be n x n");
      }
      return detail::init_semiconvex(p, space.M());
    case Space::Indicator:
      if (p.m() == p.n()) return detail::init_indicator_square(p);
      if (p.m() > p.n()) throw InputError("B has more columns than rows");
      return detail::init_indicator_wide(p);
  }
  throw InputError("unknown space");
}

/// One step of dynamic programming in the first (state) variable.
inline PartitionedHessian q_step(const PartitionedHessian& Q,
                                 const RegulatorProblem& p) {
  const Matrix Q11 = Q.q11();
  const Matrix Q12 = Q.q12();
  const Matrix Bt = p.B.transpose();
  const Matrix S = p.gamma_sq() * Matrix::Identity(p.m(), p.m()) -
                   Bt * Q11 * p.B;
  Matrix rhs(p.m(), 2 * p.n());
  rhs << Bt * Q11 * p.A, Bt * Q12;
  const Matrix KR = solve_spd(S, rhs,
                              "gamma^2 I - B'Q11 B is not positive definite");
  // [A'Q11 B; Q21 B] K B' [Q11 A, Q12]
  Matrix L(2 * p.n(), p.m());
  L << p.A.transpose() * Q11 * p.B, Q12.transpose() * p.B;
  const Matrix corr = L * KR;

  const Matrix At = p.A.transpose();
  const Matrix n11 = p.Phi + At * Q11 * p.A + corr.topLeftCorner(p.n(), p.n());
  const Matrix n12 = At * Q12 + corr.topRightCorner(p.n(), p.n());
  const Matrix n22 = Q.q22() + corr.bottomRightCorner(p.n(), p.n());
  return PartitionedHessian(n11, n12, n22);
}

/// Converts between primal (Q) and dual (Theta) Hessians. Each transform is
/// an involution.
inline PartitionedHessian gamma_transform(const PartitionedHessian& Q,
                                          const SpaceKind& space) {
  switch (space.variant()) {
    case Space::Indicator:
      return -Q;
    case Space::Convex: {
      const Matrix K = symmetrize(checked_inverse(
          Q.q11(), "existence condition violated: Q11 is singular"));
      const Matrix KQ12 = K * Q.q12();
      return PartitionedHessian(K, -KQ12, Q.q21() * KQ12 - Q.q22());
    }
    case Space::SemiConvex: {
      const Matrix& M = space.M();
      if (M.rows() != Q.n()) throw InputError("semiconvex space: M size");
      Matrix rhs(Q.n(), 2 * Q.n());
      rhs << M, Q.q12();
      const Matrix X = solve_spd(
          Q.q11() + M, rhs,
          "existence condition violated: Q11 + M is not positive definite");
      const Matrix SM = X.leftCols(Q.n());
      const Matrix SQ12 = X.rightCols(Q.n());
      return PartitionedHessian(M * SM - M, -M * SQ12,
                                Q.q21() * SQ12 - Q.q22());
    }
  }
  throw InputError("unknown space");
}

/// Semigroup product of dual kernels: Theta_{a+b} = Theta_a (*) Theta_b.
inline PartitionedHessian oplus_compose(const PartitionedHessian& T1,
                                        const PartitionedHessian& T2) {
  if (T1.n() != T2.n()) throw InputError("oplus_compose: size mismatch");
  const Eigen::Index n = T1.n();
  Matrix L(2 * n, n);
  L << T1.q12(), T2.q21();
  const Matrix X = solve_spd(T1.q22() + T2.q11(), L.transpose(),
                             "semigroup product infeasible: T1_22 + T2_11 "
                             "is not positive definite");
  Matrix full = Matrix::Zero(2 * n, 2 * n);
  full.topLeftCorner(n, n) = T1.q11();
  full.bottomRightCorner(n, n) = T2.q22();
  full -= L * X;
  return PartitionedHessian(full);
}

/// Hessian of the basis function psi itself, i.e. the kernel at horizon 0.
/// The indicator basis is not quadratic, so it has none.
inline PartitionedHessian psi_hessian(const SpaceKind& space, int n) {
  const Matrix I = Matrix::Identity(n, n);
  switch (space.variant()) {
    case Space::Convex:
      return PartitionedHessian(Matrix::Zero(n, n), I, Matrix::Zero(n, n));
    case Space::SemiConvex:
      return PartitionedHessian(-space.M(), space.M(), -space.M());
    case Space::Indicator:
      throw InputError("the indicator basis has no quadratic Hessian");
  }
  throw InputError("unknown space");
}

struct FundamentalState {
  SpaceKind space;
  int base_horizon = 1;
  PartitionedHessian theta;
  /// Theta at the base horizon; generator of every later state.
  PartitionedHessian unit;
  long horizon = 1;
};

inline FundamentalState initial_state(const RegulatorProblem& p,
                                      const SpaceKind& space) {
  const InitialKernel init = init_Q1(p, space);
  const PartitionedHessian theta = gamma_transform(init.Q, space);
  return {space, init.base_horizon, theta, theta, init.base_horizon};
}

struct OpCounts {
  long oplus = 0;
  long doubling = 0;
  long subdoubling = 0;
  long primal_steps = 0;
};

struct Propagation {
  /// State at the largest base multiple not above the target.
  FundamentalState state;
  long horizon = 0;
  PartitionedHessian theta;
  PartitionedHessian Q;
  OpCounts ops;
};

/// Number of semigroup products to reach multiplier t from the base kernel.
inline long expected_oplus_ops(std::uint64_t t) {
  if (t == 0) return 0;
  const long mt = std::bit_width(t);
  const long nt = std::popcount(t);
  return (mt - 1) + (nt - 1);
}

namespace detail {

/// Theta at multiplier t >= 1 by binary decomposition.
inline PartitionedHessian theta_power(const PartitionedHessian& unit,
                                      std::uint64_t t, OpCounts& ops) {
  const int bits = std::bit_width(t);
  std::vector<PartitionedHessian> pow;
  pow.reserve(static_cast<std::size_t>(bits));
  pow.push_back(unit);
  for (int j = 1; j < bits; ++j) {
    try {
      pow.push_back(oplus_compose(pow.back(), pow.back()));
    } catch (const FeasibilityError& e) {
      throw e.at_step(j);
    }
    ++ops.doubling;
    ++ops.oplus;
  }
  PartitionedHessian acc = pow.back();
  for (int j = bits - 2; j >= 0; --j) {
    if (((t >> j) & 1U) == 0) continue;
    try {
      acc = oplus_compose(acc, pow[static_cast<std::size_t>(j)]);
    } catch (const FeasibilityError& e) {
      throw e.at_step(j);
    }
    ++ops.subdoubling;
    ++ops.oplus;
  }
  return acc;
}

}  // namespace detail

/// Advances `state` to horizon `target_k`. Multiples of the base horizon are
/// reached in the dual space; a remainder (indicator space with m < n only)
/// is applied as primal steps.
inline Propagation propagate(const FundamentalState& state, long target_k,
                             const RegulatorProblem& p) {
  if (target_k < state.horizon) {
    throw InputError("propagate: target horizon " + std::to_string(target_k) +
                     " is below the current horizon " +
                     std::to_string(state.horizon));
  }
  const long base = state.base_horizon;
  const long t_target = target_k / base;
  const long t_now = state.horizon / base;

  Propagation out;
  out.state = state;
  if (t_target > t_now) {
    if (t_now == 1) {
      out.state.theta = detail::theta_power(
          state.unit, static_cast<std::uint64_t>(t_target), out.ops);
    } else {
      const PartitionedHessian rest = detail::theta_power(
          state.unit, static_cast<std::uint64_t>(t_target - t_now), out.ops);
      out.state.theta = oplus_compose(state.theta, rest);
      ++out.ops.oplus;
      ++out.ops.subdoubling;
    }
    out.state.horizon = t_target * base;
  }

  out.horizon = target_k;
  const long r = target_k - out.state.horizon;
  if (r == 0) {
    out.theta = out.state.theta;
    out.Q = gamma_transform(out.theta, state.space);
    return out;
  }
  PartitionedHessian Q = gamma_transform(out.state.theta, state.space);
  for (long j = 0; j < r; ++j) {
    try {
      Q = q_step(Q, p);
    } catch (const FeasibilityError& e) {
      throw e.at_step(out.state.horizon + j);
    }
    ++out.ops.primal_steps;
  }
  out.Q = Q;
  out.theta = gamma_transform(Q, state.space);
  return out;
}

}  // namespace maxplus

#pragma once

// Brute-force references that share no code path with the fundamental
// solution: value iteration on a state grid with exhaustive input search,
// and exact state-to-state optimal payoffs by equality-constrained QP.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <vector>

#include "maxplus/duality.hpp"
#include "maxplus/grid.hpp"
#include "maxplus/linalg.hpp"
#include "maxplus/parallel.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

/// Flat index of the grid point below x: clamp into the box, then floor.
inline std::size_t projection_index(const Vector& x, const GridSpec& grid) {
  std::size_t flat = 0;
  for (int d = 0; d < grid.dim(); ++d) {
    const double lo = grid.lower()(d);
    const double c = std::clamp(x(d), lo, grid.upper()(d));
    // The small guard keeps exact grid points from falling one cell down.
    const double t = std::floor((c - lo) / grid.spacing()(d) + 1e-9);
    const auto hi = grid.count(d) - 1;
    const std::size_t i = std::min(static_cast<std::size_t>(std::max(t, 0.0)), hi);
    flat = flat * grid.count(d) + i;
  }
  return flat;
}

inline Vector projection(const Vector& x, const GridSpec& grid) {
  return grid.point(projection_index(x, grid));
}

/// One value-iteration step
///   W'(x) = 1/2 x'Phi x + max_w { -gamma^2/2 |w|^2 + W[proj(Ax + Bw)] }.
inline std::vector<double> dp_step_grid(const std::vector<double>& values,
                                        const RegulatorProblem& p,
                                        const GridSpec& wgrid,
                                        const GridSpec& xgrid) {
  if (values.size() != xgrid.size()) {
    throw InputError("dp step: value array does not match the x grid");
  }
  if (xgrid.dim() != p.n() || wgrid.dim() != p.m()) {
    throw InputError("dp step: grid dimensions do not match the problem");
  }
  const std::size_t nw = wgrid.size();
  Matrix BW(p.n(), static_cast<Eigen::Index>(nw));
  std::vector<double> penalty(nw);
  for (std::size_t j = 0; j < nw; ++j) {
    const Vector w = wgrid.point(j);
    BW.col(static_cast<Eigen::Index>(j)) = p.B * w;
    penalty[j] = -0.5 * p.gamma_sq() * w.squaredNorm();
  }
  std::vector<double> out(values.size());
  parallel_for(xgrid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Vector x = xgrid.point(i);
      const Vector Ax = p.A * x;
      double best = kMinusInf;
      for (std::size_t j = 0; j < nw; ++j) {
        const Vector y = Ax + BW.col(static_cast<Eigen::Index>(j));
        const double v = penalty[j] + values[projection_index(y, xgrid)];
        if (v > best) best = v;
      }
      out[i] = 0.5 * x.dot(p.Phi * x) + best;
    }
  });
  return out;
}

struct GridDpResult {
  std::vector<double> values;
  /// Wall time of each step, seconds.
  std::vector<double> step_seconds;
};

inline GridDpResult dp_solve_grid(const std::vector<double>& psi_values,
                                  long K, const RegulatorProblem& p,
                                  const GridSpec& wgrid,
                                  const GridSpec& xgrid) {
  if (K < 0) throw InputError("dp solve: horizon must be nonnegative");
  if (psi_values.size() != xgrid.size()) {
    throw InputError("dp solve: payoff samples do not match the x grid");
  }
  GridDpResult r{psi_values, {}};
  r.step_seconds.reserve(static_cast<std::size_t>(K));
  for (long k = 0; k < K; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    r.values = dp_step_grid(r.values, p, wgrid, xgrid);
    r.step_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count());
  }
  return r;
}

/// Optimal k-step payoff from x to exactly z:
///   max sum_{j<k} 1/2 x_j'Phi x_j - gamma^2/2 |w_j|^2  s.t. x_0 = x, x_k = z,
/// or -inf when z is unreachable or the supremum is infinite. The state
/// trajectory is built by simulating unit inputs, the constraint is solved by
/// SVD least squares and its null space is maximized over in closed form.
inline double constrained_qp_oracle(const RegulatorProblem& p, long k,
                                    const Vector& x, const Vector& z) {
  if (k < 1) throw InputError("constrained QP oracle: k must be >= 1");
  const int n = p.n();
  const int m = p.m();
  const Eigen::Index dim_w = static_cast<Eigen::Index>(k) * m;

  // x_j = X_j x + W_j w, accumulated step by step.
  Matrix Xj = Matrix::Identity(n, n);
  Matrix Wj = Matrix::Zero(n, dim_w);
  Matrix Hww = -p.gamma_sq() * Matrix::Identity(dim_w, dim_w);
  Matrix Hwx = Matrix::Zero(dim_w, n);
  Matrix Hxx = Matrix::Zero(n, n);
  for (long j = 0; j < k; ++j) {
    Hww += Wj.transpose() * p.Phi * Wj;
    Hwx += Wj.transpose() * p.Phi * Xj;
    Hxx += Xj.transpose() * p.Phi * Xj;
    Matrix Wnext = p.A * Wj;
    Wnext.middleCols(static_cast<Eigen::Index>(j) * m, m) += p.B;
    Wj = std::move(Wnext);
    Xj = p.A * Xj;
  }

  const Vector target = z - Xj * x;
  Eigen::JacobiSVD<Matrix> svd(Wj, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(kRankTolerance);
  const Vector wp = svd.solve(target);
  const double scale = std::max({1.0, target.norm(), spectral_norm(Wj)});
  if ((Wj * wp - target).norm() > 1e-9 * scale) return kMinusInf;

  const Eigen::Index rank = svd.rank();
  const Matrix N = svd.matrixV().rightCols(dim_w - rank);
  const Vector grad = Hww * wp + Hwx * x;
  double best = 0.5 * x.dot(Hxx * x) + wp.dot(Hwx * x) + 0.5 * wp.dot(Hww * wp);
  if (N.cols() > 0) {
    const Matrix negH = symmetrize(-N.transpose() * Hww * N);
    if (!is_positive_definite(negH)) return kMinusInf;
    const Vector g = N.transpose() * grad;
    best += 0.5 * g.dot(negH.llt().solve(g));
  }
  return best;
}

}  // namespace maxplus

#pragma once

// Infinite-horizon limits. Repeated self-composition Theta <- Theta (*) Theta
// drives the off-diagonal blocks to zero when
//   sigma = lambda_max(T12 T21),  lambda = lambda_min(T11 + T22)
// admit a rho in (sqrt(sigma), lambda) with f(rho) > 0. The limit value is
// then W_inf(x) = 1/2 x'Q11_inf x + kappa.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "maxplus/duality.hpp"
#include "maxplus/errors.hpp"
#include "maxplus/fundamental.hpp"
#include "maxplus/linalg.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

struct ScalarSequence {
  std::vector<double> sigma;
  std::vector<double> lambda;
  /// First index with lambda_k <= 0; the sequence stops there.
  std::optional<long> breakdown;
};

/// sigma_{k+1} = sigma_k^2 / lambda_k^2,
/// lambda_{k+1} = lambda_k - 2 sigma_k / lambda_k.
inline ScalarSequence scalar_sequence(double sigma, double lambda, long K) {
  if (sigma < 0.0) throw InputError("scalar sequence: sigma must be >= 0");
  ScalarSequence s;
  s.sigma.push_back(sigma);
  s.lambda.push_back(lambda);
  if (!(lambda > 0.0)) {
    s.breakdown = 0;
    return s;
  }
  for (long k = 0; k < K; ++k) {
    const double sg = s.sigma.back();
    const double lm = s.lambda.back();
    s.sigma.push_back(sg * sg / (lm * lm));
    s.lambda.push_back(lm - 2.0 * sg / lm);
    if (!(s.lambda.back() > 0.0)) {
      s.breakdown = k + 1;
      break;
    }
  }
  return s;
}

/// f(rho) = lambda - rho - 2 sigma / (rho (1 - sigma / rho^2)).
inline double rho_margin(double sigma, double lambda, double rho) {
  return lambda - rho - 2.0 * sigma / (rho * (1.0 - sigma / (rho * rho)));
}

struct HypothesisResult {
  double sigma = 0.0;
  double lambda = 0.0;
  /// Maximizer of f on the scan, present only when f > 0 there.
  std::optional<double> rho;
  double f_at_rho = 0.0;
};

inline double offdiag_sigma(const PartitionedHessian& T) {
  const Matrix T12 = T.q12();
  return std::max(0.0, max_eigenvalue(T12 * T12.transpose()));
}

inline double diag_lambda(const PartitionedHessian& T) {
  return min_eigenvalue(T.q11() + T.q22());
}

inline HypothesisResult hypothesis_check(const PartitionedHessian& theta) {
  HypothesisResult h;
  h.sigma = offdiag_sigma(theta);
  h.lambda = diag_lambda(theta);
  const double lo = std::sqrt(h.sigma);
  if (!(h.lambda > lo)) return h;
  constexpr int kSteps = 10000;
  const double step = (h.lambda - lo) / kSteps;
  double best = -std::numeric_limits<double>::infinity();
  double best_rho = 0.0;
  for (int i = 1; i < kSteps; ++i) {
    const double rho = lo + i * step;
    const double f = rho_margin(h.sigma, h.lambda, rho);
    if (f > best) {
      best = f;
      best_rho = rho;
    }
  }
  if (best > 0.0) {
    h.rho = best_rho;
    h.f_at_rho = best;
  }
  return h;
}

struct DoublingRecord {
  /// Theta after `doubling` self-compositions (0 is the input).
  long doubling = 0;
  double sigma = 0.0;
  double lambda = 0.0;
  double offblock_norm = 0.0;
};

struct ConvergenceReport {
  double sigma = 0.0;
  double lambda = 0.0;
  std::optional<double> rho;
  bool feasible = false;
  std::vector<DoublingRecord> trace;
  std::optional<PartitionedHessian> theta_inf;
  std::optional<double> kappa;
};

inline DoublingRecord doubling_record(long j, const PartitionedHessian& T) {
  return {j, offdiag_sigma(T), diag_lambda(T), spectral_norm(T.q12())};
}

/// Self-composes until ||T12||_2 <= tol and the diagonal blocks move by at
/// most tol (max-abs). The reported limit has exactly zero off-blocks. An
/// infeasible hypothesis does not stop the iteration; it is only reported.
inline ConvergenceReport theta_limit(const PartitionedHessian& theta_base,
                                     double tol = 1e-10,
                                     long max_doublings = 60) {
  ConvergenceReport rep;
  const HypothesisResult h = hypothesis_check(theta_base);
  rep.sigma = h.sigma;
  rep.lambda = h.lambda;
  rep.rho = h.rho;
  rep.feasible = h.rho.has_value();

  PartitionedHessian T = theta_base;
  rep.trace.push_back(doubling_record(0, T));
  double change = std::numeric_limits<double>::infinity();
  for (long j = 1; j <= max_doublings; ++j) {
    PartitionedHessian next;
    try {
      next = oplus_compose(T, T);
    } catch (const FeasibilityError& e) {
      throw e.at_step(j);
    }
    change = std::max(max_abs(next.q11() - T.q11()),
                      max_abs(next.q22() - T.q22()));
    T = std::move(next);
    rep.trace.push_back(doubling_record(j, T));
    if (rep.trace.back().offblock_norm <= tol && change <= tol) {
      rep.theta_inf = PartitionedHessian::block_diagonal(T.q11(), T.q22());
      return rep;
    }
  }
  throw ConvergenceError("dual kernel did not converge within " +
                             std::to_string(max_doublings) + " doublings",
                         std::max(rep.trace.back().offblock_norm, change));
}

/// Primal limit Hessian; block diagonal when theta_inf is.
inline PartitionedHessian q_infinity(const PartitionedHessian& theta_inf,
                                     const SpaceKind& space) {
  return gamma_transform(theta_inf, space);
}

struct KappaResult {
  double kappa = 0.0;
  Vector argmax;
  /// Largest a(z) + 1/2 z'(Q22 + eps0 I) z over |z| > r0; <= 0 when the
  /// growth hypothesis holds.
  double growth_excess = 0.0;
};

/// kappa = max_z { a(z) + 1/2 z'Q22 z } over the dual grid. Requires
/// a(z) <= -1/2 z'(Q22 + eps0 I) z for |z| > r0 and the maximum to be
/// attained at an interior grid point. r0 < 0 selects half the grid radius.
inline KappaResult compute_kappa(const DualFunction& a, const Matrix& Q22_inf,
                                 double eps0 = 1e-3, double r0 = -1.0) {
  const GridSpec& g = a.grid;
  if (Q22_inf.rows() != g.dim()) {
    throw InputError("kappa: Q22 does not match the dual grid dimension");
  }
  if (r0 < 0.0) r0 = 0.5 * g.inner_radius();
  const Matrix Q22e =
      Q22_inf + eps0 * Matrix::Identity(Q22_inf.rows(), Q22_inf.cols());

  KappaResult out;
  out.growth_excess = -std::numeric_limits<double>::infinity();
  Vector worst_z;
  double best = kMinusInf;
  std::size_t best_j = 0;
  bool interior_attains = false;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Vector z = g.point(j);
    const double aj = a.values[j];
    if (z.norm() > r0 && aj != kMinusInf) {
      const double excess = aj + 0.5 * z.dot(Q22e * z);
      if (excess > out.growth_excess) {
        out.growth_excess = excess;
        worst_z = z;
      }
    }
    const double v = aj + 0.5 * z.dot(Q22_inf * z);
    if (v > best) {
      best = v;
      best_j = j;
      interior_attains = !g.on_boundary(j);
    } else if (v == best && !interior_attains && !g.on_boundary(j)) {
      best_j = j;
      interior_attains = true;
    }
  }
  if (out.growth_excess > 0.0) {
    std::ostringstream msg;
    msg << "growth hypothesis violated: a(z) exceeds -1/2 z'(Q22 + eps0 I) z "
           "by "
        << out.growth_excess << " at z = (" << worst_z.transpose() << ")";
    throw HypothesisError(msg.str());
  }
  if (best == kMinusInf) throw InputError("kappa: dual function is -inf");
  if (!interior_attains) {
    throw InputError(
        "dual grid too small: the kappa maximizer lies on the grid boundary");
  }
  out.kappa = best;
  out.argmax = g.point(best_j);
  return out;
}

}  // namespace maxplus

#pragma once

// Value functions from a kernel Hessian and a dual payoff:
//   W(x) = 1/2 x'Q11 x + max_z { x'Q12 z + 1/2 z'Q22 z + a(z) }.

#include <cmath>
#include <cstddef>
#include <vector>

#include "maxplus/duality.hpp"
#include "maxplus/grid.hpp"
#include "maxplus/linalg.hpp"
#include "maxplus/parallel.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

/// The x-independent part of the z-maximization, g(z) = 1/2 z'Q22 z + a(z),
/// with the dual grid flattened to a column-major n x N matrix. Build once
/// per (Q, a) pair and evaluate at many x.
class ValueKernel {
 public:
  ValueKernel(const PartitionedHessian& Q, const DualFunction& a)
      : Q11_(Q.q11()), Q21_(Q.q21()) {
    const int n = Q.n();
    if (a.grid.dim() != n) {
      throw InputError("value: kernel and dual function differ in dimension");
    }
    if (a.values.size() != a.grid.size()) {
      throw InputError("value: dual values do not match the dual grid");
    }
    const Matrix Q22 = Q.q22();
    const std::size_t N = a.grid.size();
    Z_.resize(n, static_cast<Eigen::Index>(N));
    g_.resize(N);
    parallel_for(N, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        const Vector z = a.grid.point(j);
        Z_.col(static_cast<Eigen::Index>(j)) = z;
        g_[j] = 0.5 * z.dot(Q22 * z) + a.values[j];
      }
    });
  }

  [[nodiscard]] double operator()(const Vector& x) const {
    const Vector c = Q21_ * x;
    const Eigen::Index n = Z_.rows();
    const double* zp = Z_.data();
    double best = kMinusInf;
    for (std::size_t j = 0; j < g_.size(); ++j, zp += n) {
      if (g_[j] == kMinusInf) continue;
      double v = 0.0;
      for (Eigen::Index d = 0; d < n; ++d) v += c(d) * zp[d];
      v += g_[j];
      if (v > best) best = v;
    }
    return 0.5 * x.dot(Q11_ * x) + best;
  }

 private:
  Matrix Q11_;
  Matrix Q21_;
  Matrix Z_;
  std::vector<double> g_;
};

inline double value_at(const PartitionedHessian& Q, const DualFunction& a,
                       const Vector& x) {
  if (x.size() != Q.n()) throw InputError("value: x has the wrong dimension");
  return ValueKernel(Q, a)(x);
}

/// value_at at every point of `xgrid`, row-major.
inline std::vector<double> value_grid(const PartitionedHessian& Q,
                                      const DualFunction& a,
                                      const GridSpec& xgrid) {
  if (xgrid.dim() != Q.n()) {
    throw InputError("value: x grid has the wrong dimension");
  }
  const ValueKernel kernel(Q, a);
  std::vector<double> out(xgrid.size());
  parallel_for(xgrid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = kernel(xgrid.point(i));
  }, 1);
  return out;
}

inline double w_infinity(const Matrix& Q11_inf, double kappa, const Vector& x) {
  return 0.5 * x.dot(Q11_inf * x) + kappa;
}

inline std::vector<double> w_infinity_grid(const Matrix& Q11_inf, double kappa,
                                           const GridSpec& xgrid) {
  std::vector<double> out(xgrid.size());
  for (std::size_t i = 0; i < xgrid.size(); ++i) {
    out[i] = w_infinity(Q11_inf, kappa, xgrid.point(i));
  }
  return out;
}

/// |phi - ref| / (1 + ref).
inline double relative_error(double phi, double ref) {
  return std::abs(phi - ref) / (1.0 + ref);
}

}  // namespace maxplus

#pragma once

// Terminal payoffs and their max-plus duals with respect to the basis
//   psi1(x, z) = z'x,  psi2(x, z) = -1/2 (x - z)'M(x - z),  psi3 = indicator.
// dual:          a(z) = -max_x { psi(x, z) - Psi(x) }
// inverse dual:  Psi(x) = max_z { psi(x, z) + a(z) }
// Minus infinity is IEEE -inf.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "maxplus/errors.hpp"
#include "maxplus/grid.hpp"
#include "maxplus/linalg.hpp"
#include "maxplus/parallel.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

struct QuadraticPayoff {
  Matrix Lambda;
};

/// Analytic payoffs by name:
///   "quadratic"     scale/2 |x|^2                        (scale = 1)
///   "abs-sin"       a |x2 + b| |sin(x1 - c)|              (a = 3, b = 1, c = 1)
///   "abs-weighted"  sum_i ci |xi|                         (ci = 1)
struct NamedPayoff {
  std::string name;
  std::map<std::string, double> params;
};

struct SampledPayoff {
  GridSpec grid;
  std::vector<double> values;
};

namespace detail {

inline double param(const NamedPayoff& p, const std::string& key, double def) {
  const auto it = p.params.find(key);
  return it == p.params.end() ? def : it->second;
}

inline void check_named(const NamedPayoff& p) {
  if (p.name != "quadratic" && p.name != "abs-sin" &&
      p.name != "abs-weighted") {
    throw InputError("unknown named payoff '" + p.name +
                     "' (known: quadratic, abs-sin, abs-weighted)");
  }
}

}  // namespace detail

class TerminalPayoff {
 public:
  using Variant = std::variant<QuadraticPayoff, NamedPayoff, SampledPayoff>;

  TerminalPayoff(Variant v, GrowthBound growth)
      : v_(std::move(v)), growth_(growth) {
    if (!(growth_.r > 0.0)) throw InputError("growth bound r must be positive");
    if (const auto* q = std::get_if<QuadraticPayoff>(&v_)) {
      if (!is_square(q->Lambda)) throw InputError("Lambda must be square");
    } else if (const auto* nm = std::get_if<NamedPayoff>(&v_)) {
      detail::check_named(*nm);
    } else {
      const auto& s = std::get<SampledPayoff>(v_);
      if (s.values.size() != s.grid.size()) {
        throw InputError("sampled payoff has " +
                         std::to_string(s.values.size()) +
                         " values but its grid has " +
                         std::to_string(s.grid.size()) + " points");
      }
    }
  }

  static TerminalPayoff quadratic(const Matrix& Lambda, GrowthBound g) {
    return TerminalPayoff(QuadraticPayoff{symmetrize(Lambda)}, g);
  }
  static TerminalPayoff named(std::string name,
                              std::map<std::string, double> params,
                              GrowthBound g) {
    return TerminalPayoff(NamedPayoff{std::move(name), std::move(params)}, g);
  }
  static TerminalPayoff sampled(GridSpec grid, std::vector<double> values,
                                GrowthBound g) {
    return TerminalPayoff(SampledPayoff{std::move(grid), std::move(values)}, g);
  }

  [[nodiscard]] const Variant& variant() const { return v_; }
  [[nodiscard]] const GrowthBound& growth() const { return growth_; }

  /// Sampled payoffs use the nearest sample, clamped to the sample grid.
  [[nodiscard]] double operator()(const Vector& x) const {
    if (const auto* q = std::get_if<QuadraticPayoff>(&v_)) {
      if (q->Lambda.rows() != x.size()) {
        throw InputError("payoff dimension does not match the state");
      }
      return 0.5 * x.dot(q->Lambda * x);
    }
    if (const auto* nm = std::get_if<NamedPayoff>(&v_)) {
      return eval_named(*nm, x);
    }
    const auto& s = std::get<SampledPayoff>(v_);
    if (s.grid.dim() != x.size()) {
      throw InputError("payoff dimension does not match the state");
    }
    std::vector<std::size_t> idx(static_cast<std::size_t>(x.size()));
    for (int d = 0; d < s.grid.dim(); ++d) {
      const double t =
          std::round((x(d) - s.grid.lower()(d)) / s.grid.spacing()(d));
      const double hi = static_cast<double>(s.grid.count(d) - 1);
      idx[d] = static_cast<std::size_t>(std::clamp(t, 0.0, hi));
    }
    return s.values[s.grid.flat_index(idx)];
  }

  [[nodiscard]] std::vector<double> sample(const GridSpec& grid) const {
    if (const auto* s = std::get_if<SampledPayoff>(&v_)) {
      if (same_grid(s->grid, grid)) return s->values;
    }
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) out[i] = (*this)(grid.point(i));
    });
    return out;
  }

 private:
  static bool same_grid(const GridSpec& a, const GridSpec& b) {
    return a.dim() == b.dim() && a.lower() == b.lower() &&
           a.spacing() == b.spacing() && a.size() == b.size();
  }

  static double eval_named(const NamedPayoff& p, const Vector& x) {
    if (p.name == "quadratic") {
      return 0.5 * detail::param(p, "scale", 1.0) * x.squaredNorm();
    }
    if (p.name == "abs-sin") {
      if (x.size() < 2) {
        throw InputError("payoff abs-sin needs a state of dimension >= 2");
      }
      const double a = detail::param(p, "a", 3.0);
      const double b = detail::param(p, "b", 1.0);
      const double c = detail::param(p, "c", 1.0);
      return a * std::abs(x(1) + b) * std::abs(std::sin(x(0) - c));
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      s += detail::param(p, "c" + std::to_string(i + 1), 1.0) * std::abs(x(i));
    }
    return s;
  }

  Variant v_;
  GrowthBound growth_;
};

struct GrowthViolation {
  bool ok = true;
  /// Largest Psi(x) - (r/2 |x|^2 + c) over the samples.
  double worst_excess = kMinusInf;
  Vector worst_point;
};

/// Verifies Psi(x) <= r/2 |x|^2 + c at every grid sample.
inline GrowthViolation check_growth(const TerminalPayoff& psi,
                                    const GridSpec& grid) {
  const std::vector<double> v = psi.sample(grid);
  GrowthViolation out;
  const auto& g = psi.growth();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vector x = grid.point(i);
    const double excess = v[i] - (0.5 * g.r * x.squaredNorm() + g.c);
    if (excess > out.worst_excess) {
      out.worst_excess = excess;
      out.worst_point = x;
    }
  }
  // Relative slack for rounding in the bound itself.
  out.ok = out.worst_excess <= 1e-12 * std::max(1.0, std::abs(g.c));
  return out;
}

struct DualFunction {
  SpaceKind space;
  GridSpec grid;
  std::vector<double> values;
};

/// psi^i(x, z) for i = 1, 2.
inline double basis_value(const SpaceKind& space, const Vector& x,
                          const Vector& z) {
  switch (space.variant()) {
    case Space::Convex:
      return z.dot(x);
    case Space::SemiConvex: {
      const Vector d = x - z;
      return -0.5 * d.dot(space.M() * d);
    }
    case Space::Indicator:
      return (x - z).cwiseAbs().maxCoeff() == 0.0 ? 0.0 : kMinusInf;
  }
  return kMinusInf;
}

namespace detail {

/// Whether psi is a sum of per-coordinate terms.
inline bool basis_is_separable(const SpaceKind& space) {
  if (space.variant() == Space::Convex) return true;
  if (space.variant() != Space::SemiConvex) return false;
  const Matrix& M = space.M();
  return (M - Matrix(M.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

/// Coordinate-d term of a separable psi.
inline double basis_term(const SpaceKind& space, int d, double x, double z) {
  if (space.variant() == Space::Convex) return z * x;
  const double t = x - z;
  return -0.5 * space.M()(d, d) * t * t;
}

/// Exhaustive max over x of psi(x, z) - Psi(x). For separable psi the sum is
/// formed as term_0 + (term_1 + (... + (term_{n-1} + (-Psi)))), the order the
/// separable scan uses, so the two agree bit for bit.
inline std::vector<double> dual_scan_exhaustive(const SpaceKind& space,
                                                const std::vector<double>& Psi,
                                                const GridSpec& zgrid,
                                                const GridSpec& xgrid) {
  const bool separable = basis_is_separable(space);
  const int n = xgrid.dim();
  std::vector<double> out(zgrid.size());
  std::vector<Vector> xs(xgrid.size());
  for (std::size_t i = 0; i < xgrid.size(); ++i) xs[i] = xgrid.point(i);
  parallel_for(zgrid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      const Vector z = zgrid.point(j);
      double best = kMinusInf;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        double val = -Psi[i];
        if (separable) {
          for (int d = n - 1; d >= 0; --d) {
            val = basis_term(space, d, xs[i](d), z(d)) + val;
          }
        } else {
          val = basis_value(space, xs[i], z) + val;
        }
        if (val > best) best = val;
      }
      out[j] = best;
    }
  }, 1);
  return out;
}

/// Same maximum, one coordinate at a time: eliminates x_{n-1} first, then
/// x_{n-2}, and so on. Work is O(sum_d Nx^(d+1) Nz^(n-d)) instead of
/// O(Nx^n Nz^n).
inline std::vector<double> dual_scan_separable(const SpaceKind& space,
                                               const std::vector<double>& Psi,
                                               const GridSpec& zgrid,
                                               const GridSpec& xgrid) {
  const int n = xgrid.dim();
  // Table over (x_0..x_{d-1}) x (z_d..z_{n-1}), x-part major.
  std::vector<double> table(Psi.size());
  for (std::size_t i = 0; i < Psi.size(); ++i) table[i] = -Psi[i];
  std::size_t x_outer = xgrid.size();
  std::size_t z_inner = 1;
  for (int d = n - 1; d >= 0; --d) {
    const std::size_t nx = xgrid.count(d);
    const std::size_t nz = zgrid.count(d);
    x_outer /= nx;
    std::vector<double> next(x_outer * nz * z_inner);
    parallel_for(x_outer * nz, [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r) {
        const std::size_t xo = r / nz;
        const std::size_t jz = r % nz;
        const double zc = zgrid.coord(d, jz);
        double* dst = &next[(xo * nz + jz) * z_inner];
        std::fill(dst, dst + z_inner, kMinusInf);
        for (std::size_t ix = 0; ix < nx; ++ix) {
          const double t = basis_term(space, d, xgrid.coord(d, ix), zc);
          const double* src = &table[(xo * nx + ix) * z_inner];
          for (std::size_t k = 0; k < z_inner; ++k) {
            const double v = t + src[k];
            if (v > dst[k]) dst[k] = v;
          }
        }
      }
    }, 1);
    table = std::move(next);
    z_inner *= nz;
  }
  return table;
}

}  // namespace detail

/// Grid dual of Psi. For the indicator space the dual is Psi itself, sampled
/// on the z grid.
inline DualFunction dual_transform(const TerminalPayoff& psi,
                                   const SpaceKind& space,
                                   const GridSpec& zgrid,
                                   const GridSpec& xgrid) {
  if (zgrid.size() == 0 || xgrid.size() == 0) {
    throw InputError("dual transform: empty grid");
  }
  if (zgrid.dim() != xgrid.dim()) {
    throw InputError("dual transform: x and z grids differ in dimension");
  }
  if (space.variant() == Space::Indicator) {
    return {space, zgrid, psi.sample(zgrid)};
  }
  if (space.variant() == Space::SemiConvex && space.M().rows() != zgrid.dim()) {
    throw InputError("semiconvex space: M does not match the grid dimension");
  }
  const std::vector<double> Psi = psi.sample(xgrid);
  std::vector<double> best =
      detail::basis_is_separable(space)
          ? detail::dual_scan_separable(space, Psi, zgrid, xgrid)
          : detail::dual_scan_exhaustive(space, Psi, zgrid, xgrid);
  for (double& v : best) v = -v;
  return {space, zgrid, std::move(best)};
}

/// Exhaustive-scan variant of dual_transform (reference for the separable
/// scan).
inline DualFunction dual_transform_exhaustive(const TerminalPayoff& psi,
                                              const SpaceKind& space,
                                              const GridSpec& zgrid,
                                              const GridSpec& xgrid) {
  if (space.variant() == Space::Indicator) {
    return dual_transform(psi, space, zgrid, xgrid);
  }
  std::vector<double> best = detail::dual_scan_exhaustive(
      space, psi.sample(xgrid), zgrid, xgrid);
  for (double& v : best) v = -v;
  return {space, zgrid, std::move(best)};
}

/// a(z) = 1/2 z'Hz + offset.
struct QuadraticForm {
  Matrix hessian;
  double offset = 0.0;
};

/// Exact dual of 1/2 x'Lambda x.
inline QuadraticForm quadratic_dual(const Matrix& Lambda,
                                    const SpaceKind& space) {
  const Matrix L = symmetrize(Lambda);
  switch (space.variant()) {
    case Space::Indicator:
      return {L, 0.0};
    case Space::Convex:
      return {-solve_spd(L, Matrix::Identity(L.rows(), L.cols()),
                         "convex duality needs Lambda positive definite"),
              0.0};
    case Space::SemiConvex: {
      const Matrix& M = space.M();
      if (M.rows() != L.rows()) throw InputError("semiconvex space: M size");
      const Matrix X = solve_spd(
          L + M, M, "semiconvex duality needs Lambda + M positive definite");
      return {symmetrize(M - M * X), 0.0};
    }
  }
  throw InputError("unknown space");
}

inline DualFunction sample_quadratic_dual(const QuadraticForm& q,
                                          const SpaceKind& space,
                                          const GridSpec& zgrid) {
  if (q.hessian.rows() != zgrid.dim()) {
    throw InputError("quadratic dual does not match the grid dimension");
  }
  std::vector<double> v(zgrid.size());
  parallel_for(zgrid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      const Vector z = zgrid.point(j);
      v[j] = 0.5 * z.dot(q.hessian * z) + q.offset;
    }
  });
  return {space, zgrid, std::move(v)};
}

/// max_z { psi(x, z) + a(z) }. For the indicator space this selects the grid
/// point nearest x, or -inf when x is off the grid by more than half a step.
inline double inverse_dual(const DualFunction& a, const Vector& x) {
  const GridSpec& g = a.grid;
  if (x.size() != g.dim()) throw InputError("inverse dual: dimension mismatch");
  if (a.space.variant() == Space::Indicator) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dim()));
    for (int d = 0; d < g.dim(); ++d) {
      const double t = std::round((x(d) - g.lower()(d)) / g.spacing()(d));
      if (t < 0.0 || t > static_cast<double>(g.count(d) - 1)) return kMinusInf;
      idx[d] = static_cast<std::size_t>(t);
    }
    return a.values[g.flat_index(idx)];
  }
  const bool convex = a.space.variant() == Space::Convex;
  Vector z(g.dim()), d(g.dim()), Md(g.dim());
  double best = kMinusInf;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (a.values[j] == kMinusInf) continue;
    g.point_into(j, z);
    double psi;
    if (convex) {
      psi = z.dot(x);
    } else {
      d.noalias() = x - z;
      Md.noalias() = a.space.M() * d;
      psi = -0.5 * d.dot(Md);
    }
    const double v = psi + a.values[j];
    if (v > best) best = v;
  }
  return best;
}

}  // namespace maxplus

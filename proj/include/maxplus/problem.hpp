#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "maxplus/errors.hpp"
#include "maxplus/linalg.hpp"

namespace maxplus {

/// Dynamics x+ = A x + B w with running payoff 1/2 x'Phi x - gamma^2/2 |w|^2.
struct RegulatorProblem {
  Matrix A;
  Matrix B;
  Matrix Phi;
  double gamma = 1.0;

  [[nodiscard]] int n() const { return static_cast<int>(A.rows()); }
  [[nodiscard]] int m() const { return static_cast<int>(B.cols()); }
  [[nodiscard]] double gamma_sq() const { return gamma * gamma; }
};

/// Quadratic growth bound phi(x) <= r/2 |x|^2 + c.
struct GrowthBound {
  double r = 1.0;
  double c = 0.0;
};

enum class Space { Convex = 1, SemiConvex = 2, Indicator = 3 };

/// Which max-plus space (and hence which basis psi^i) is in use. Only the
/// semiconvex space carries a matrix.
class SpaceKind {
 public:
  /// The convex space.
  SpaceKind() : variant_(Space::Convex) {}

  static SpaceKind convex() { return SpaceKind(Space::Convex, Matrix()); }
  static SpaceKind indicator() { return SpaceKind(Space::Indicator, Matrix()); }
  static SpaceKind semi_convex(const Matrix& M) {
    if (!is_square(M) || M.rows() == 0) {
      throw InputError("semiconvex space: M must be a nonempty square matrix");
    }
    const Matrix Ms = symmetrize(M);
    if (max_abs(M - M.transpose()) > 1e-12 * std::max(1.0, max_abs(M))) {
      throw InputError("semiconvex space: M must be symmetric");
    }
    if (!is_positive_definite(Ms)) {
      throw InputError("semiconvex space: M must be positive definite");
    }
    return SpaceKind(Space::SemiConvex, Ms);
  }
  /// 1, 2 or 3; `M` is required for 2.
  static SpaceKind from_index(int i, const Matrix& M = Matrix()) {
    switch (i) {
      case 1: return convex();
      case 2: return semi_convex(M);
      case 3: return indicator();
      default: throw InputError("space index must be 1, 2 or 3");
    }
  }

  [[nodiscard]] Space variant() const { return variant_; }
  [[nodiscard]] int index() const { return static_cast<int>(variant_); }
  [[nodiscard]] const Matrix& M() const { return M_; }

 private:
  SpaceKind(Space v, Matrix M) : variant_(v), M_(std::move(M)) {}
  Space variant_;
  Matrix M_;
};

/// Symmetric 2n x 2n matrix [[Q11, Q12], [Q21, Q22]] with Q21 = Q12'.
/// Symmetry is restored on every construction.
class PartitionedHessian {
 public:
  PartitionedHessian() = default;

  explicit PartitionedHessian(const Matrix& full) {
    if (!is_square(full) || full.rows() % 2 != 0) {
      throw InputError("partitioned Hessian must be square with even size");
    }
    n_ = static_cast<int>(full.rows() / 2);
    full_ = symmetrize(full);
  }

  PartitionedHessian(const Matrix& Q11, const Matrix& Q12, const Matrix& Q22) {
    const auto n = Q11.rows();
    if (Q11.cols() != n || Q12.rows() != n || Q12.cols() != n ||
        Q22.rows() != n || Q22.cols() != n) {
      throw InputError("partitioned Hessian blocks must all be n x n");
    }
    n_ = static_cast<int>(n);
    full_.resize(2 * n, 2 * n);
    full_ << Q11, Q12, Q12.transpose(), Q22;
    full_ = symmetrize(full_);
  }

  static PartitionedHessian block_diagonal(const Matrix& Q11,
                                           const Matrix& Q22) {
    return PartitionedHessian(Q11, Matrix::Zero(Q11.rows(), Q11.rows()), Q22);
  }

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const Matrix& full() const { return full_; }
  [[nodiscard]] Matrix q11() const { return full_.topLeftCorner(n_, n_); }
  [[nodiscard]] Matrix q12() const { return full_.topRightCorner(n_, n_); }
  [[nodiscard]] Matrix q21() const { return full_.bottomLeftCorner(n_, n_); }
  [[nodiscard]] Matrix q22() const { return full_.bottomRightCorner(n_, n_); }

  /// 1/2 [x; z]' Q [x; z].
  [[nodiscard]] double quadratic(const Vector& x, const Vector& z) const {
    Vector s(2 * n_);
    s << x, z;
    return 0.5 * s.dot(full_ * s);
  }

  [[nodiscard]] PartitionedHessian operator-() const {
    return PartitionedHessian(Matrix(-full_));
  }

 private:
  int n_ = 0;
  Matrix full_;
};

/// [A^{n-1} B, A^{n-2} B, ..., A B, B].
inline Matrix controllability_matrix(const RegulatorProblem& p) {
  const int n = p.n();
  const int m = p.m();
  if (p.A.cols() != n || p.B.rows() != n) {
    throw InputError("controllability matrix: A must be n x n and B n x m");
  }
  Matrix C(n, static_cast<Eigen::Index>(n) * m);
  Matrix AkB = p.B;
  for (int j = n - 1; j >= 0; --j) {
    C.middleCols(static_cast<Eigen::Index>(j) * m, m) = AkB;
    AkB = p.A * AkB;
  }
  return C;
}

/// Throws InputError on inconsistent dimensions.
inline void check_dimensions(const RegulatorProblem& p) {
  const auto n = p.A.rows();
  if (n == 0) throw InputError("A must be nonempty");
  if (p.A.cols() != n) throw InputError("A must be square");
  if (p.B.rows() != n) {
    throw InputError("B must have as many rows as A (" + std::to_string(n) +
                     ")");
  }
  if (p.B.cols() == 0) throw InputError("B must have at least one column");
  if (p.Phi.rows() != n || p.Phi.cols() != n) {
    throw InputError("Phi must be n x n");
  }
  if (!std::isfinite(p.gamma)) throw InputError("gamma must be finite");
}

/// Lists every violated problem invariant; empty means the problem is valid.
/// Dimension mismatches are structural and throw instead.
inline std::vector<std::string> validate_problem(const RegulatorProblem& p) {
  check_dimensions(p);
  std::vector<std::string> violations;
  const double asym = max_abs(p.Phi - p.Phi.transpose());
  if (asym > 1e-12 * std::max(1.0, max_abs(p.Phi))) {
    violations.emplace_back("Phi is not symmetric");
  }
  if (!is_positive_definite(p.Phi)) {
    violations.emplace_back("Phi is not positive definite (min eigenvalue " +
                            std::to_string(min_eigenvalue(p.Phi)) + ")");
  }
  if (!(p.gamma > 0.0)) violations.emplace_back("gamma must be positive");
  if (p.m() > p.n()) violations.emplace_back("B has more columns than rows");
  if (numerical_rank(p.B) != p.m()) {
    violations.emplace_back("B does not have full column rank");
  }
  if (numerical_rank(controllability_matrix(p)) != p.n()) {
    violations.emplace_back("(A, B) is not controllable");
  }
  return violations;
}

inline void require_valid(const RegulatorProblem& p) {
  const auto v = validate_problem(p);
  if (!v.empty()) {
    std::string msg = "invalid regulator problem:";
    for (const auto& s : v) msg += " " + s + ";";
    throw InputError(msg);
  }
}

}  // namespace maxplus

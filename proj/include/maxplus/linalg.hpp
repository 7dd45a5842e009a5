#pragma once

// Dense linear-algebra helpers shared by every module. Matrices are small
// (n <= ~50), so everything is a direct dense factorization.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "maxplus/errors.hpp"

namespace maxplus {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative threshold for rank and definiteness decisions (times the largest
/// singular value / eigenvalue magnitude).
inline constexpr double kRankTolerance = 1e-10;

inline Matrix symmetrize(const Matrix& X) {
  return 0.5 * (X + X.transpose());
}

inline bool is_square(const Matrix& X) { return X.rows() == X.cols(); }

inline Vector symmetric_eigenvalues(const Matrix& S) {
  if (S.size() == 0) return Vector(0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double min_eigenvalue(const Matrix& S) {
  const Vector ev = symmetric_eigenvalues(S);
  return ev.size() == 0 ? 0.0 : ev.minCoeff();
}

inline double max_eigenvalue(const Matrix& S) {
  const Vector ev = symmetric_eigenvalues(S);
  return ev.size() == 0 ? 0.0 : ev.maxCoeff();
}

/// Positive definiteness with a scale-relative margin.
inline bool is_positive_definite(const Matrix& S) {
  const Vector ev = symmetric_eigenvalues(S);
  if (ev.size() == 0) return true;
  const double scale = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff() > kRankTolerance * scale;
}

inline Vector singular_values(const Matrix& X) {
  if (X.size() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(X);
  return svd.singularValues();
}

inline int numerical_rank(const Matrix& X) {
  const Vector s = singular_values(X);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = kRankTolerance * s(0);
  return static_cast<int>((s.array() > cut).count());
}

/// Solves S X = R for symmetric positive-definite S. The definiteness check
/// precedes the factorization; failure raises FeasibilityError carrying the
/// minimum eigenvalue of S.
inline Matrix solve_spd(const Matrix& S, const Matrix& R,
                        const std::string& what) {
  const Matrix Ss = symmetrize(S);
  if (!is_positive_definite(Ss)) {
    throw FeasibilityError(what, min_eigenvalue(Ss));
  }
  Eigen::LLT<Matrix> llt(Ss);
  if (llt.info() != Eigen::Success) {
    throw FeasibilityError(what, min_eigenvalue(Ss));
  }
  return llt.solve(R);
}

/// Inverse of a square matrix that must be numerically nonsingular.
inline Matrix checked_inverse(const Matrix& X, const std::string& what) {
  Eigen::FullPivLU<Matrix> lu(X);
  lu.setThreshold(kRankTolerance);
  if (!lu.isInvertible()) {
    const Vector s = singular_values(X);
    throw FeasibilityError(what, s.size() ? s.minCoeff() : 0.0);
  }
  return lu.inverse();
}

/// Moore-Penrose pseudo-inverse C^T (C C^T)^{-1} of a full-row-rank matrix.
inline Matrix right_pseudo_inverse(const Matrix& C) {
  const Matrix CCt = C * C.transpose();
  return C.transpose() * solve_spd(CCt, Matrix::Identity(C.rows(), C.rows()),
                                   "C C^T is singular (C not full row rank)");
}

/// Orthonormal basis (columns) of the null space of X, via SVD with the
/// library rank threshold. May have zero columns.
inline Matrix null_space_basis(const Matrix& X) {
  const auto cols = X.cols();
  if (X.rows() == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  int rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    rank = static_cast<int>((s.array() > kRankTolerance * s(0)).count());
  }
  return svd.matrixV().rightCols(cols - rank);
}

/// Entrywise max-norm ||X||_max.
inline double max_abs(const Matrix& X) {
  return X.size() == 0 ? 0.0 : X.cwiseAbs().maxCoeff();
}

/// Induced infinity norm (max row sum).
inline double inf_norm(const Matrix& X) {
  return X.size() == 0 ? 0.0 : X.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Spectral norm.
inline double spectral_norm(const Matrix& X) {
  const Vector s = singular_values(X);
  return s.size() == 0 ? 0.0 : s(0);
}

}  // namespace maxplus

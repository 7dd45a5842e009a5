#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "maxplus/errors.hpp"
#include "maxplus/linalg.hpp"

namespace maxplus {

/// Tensor grid lower + i * spacing, i = 0..count-1 per dimension. Points are
/// enumerated row-major: the last coordinate varies fastest.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(Vector lower, Vector upper, Vector spacing)
      : lower_(std::move(lower)),
        upper_(std::move(upper)),
        spacing_(std::move(spacing)) {
    validate();
  }

  /// Same bounds and spacing in every dimension.
  static GridSpec uniform(int n, double lower, double upper, double spacing) {
    return GridSpec(Vector::Constant(n, lower), Vector::Constant(n, upper),
                    Vector::Constant(n, spacing));
  }

  [[nodiscard]] int dim() const { return static_cast<int>(lower_.size()); }
  [[nodiscard]] const Vector& lower() const { return lower_; }
  [[nodiscard]] const Vector& upper() const { return upper_; }
  [[nodiscard]] const Vector& spacing() const { return spacing_; }
  [[nodiscard]] std::size_t count(int d) const { return counts_[d]; }
  [[nodiscard]] std::size_t size() const { return size_; }

  [[nodiscard]] double coord(int d, std::size_t i) const {
    return lower_(d) + static_cast<double>(i) * spacing_(d);
  }

  [[nodiscard]] std::vector<std::size_t> multi_index(std::size_t flat) const {
    std::vector<std::size_t> idx(counts_.size());
    for (int d = dim() - 1; d >= 0; --d) {
      idx[d] = flat % counts_[d];
      flat /= counts_[d];
    }
    return idx;
  }

  [[nodiscard]] std::size_t flat_index(const std::vector<std::size_t>& idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < dim(); ++d) flat = flat * counts_[d] + idx[d];
    return flat;
  }

  [[nodiscard]] Vector point(std::size_t flat) const {
    Vector x(dim());
    point_into(flat, x);
    return x;
  }

  /// point() without allocating; x must already have dim() entries.
  void point_into(std::size_t flat, Vector& x) const {
    for (int d = dim() - 1; d >= 0; --d) {
      x(d) = coord(d, flat % counts_[d]);
      flat /= counts_[d];
    }
  }

  /// Largest coordinate of the upper-most grid point, per dimension.
  [[nodiscard]] double last_coord(int d) const {
    return coord(d, counts_[d] - 1);
  }

  /// True if the point with this flat index lies on the grid's outer face.
  [[nodiscard]] bool on_boundary(std::size_t flat) const {
    for (int d = dim() - 1; d >= 0; --d) {
      const std::size_t i = flat % counts_[d];
      if (counts_[d] > 1 && (i == 0 || i + 1 == counts_[d])) return true;
      flat /= counts_[d];
    }
    return false;
  }

  /// Radius of the largest centered ball inside the grid box.
  [[nodiscard]] double inner_radius() const {
    double r = std::numeric_limits<double>::infinity();
    for (int d = 0; d < dim(); ++d) {
      r = std::min(r, 0.5 * (last_coord(d) - lower_(d)));
    }
    return r;
  }

 private:
  void validate() {
    const auto n = lower_.size();
    if (n == 0) throw InputError("grid must have at least one dimension");
    if (upper_.size() != n || spacing_.size() != n) {
      throw InputError("grid lower/upper/spacing dimensions differ");
    }
    counts_.assign(static_cast<std::size_t>(n), 0);
    size_ = 1;
    for (Eigen::Index d = 0; d < n; ++d) {
      if (!(spacing_(d) > 0.0) || !std::isfinite(spacing_(d))) {
        throw InputError("grid spacing must be positive");
      }
      if (!(lower_(d) <= upper_(d))) {
        throw InputError("grid lower bound must not exceed upper bound");
      }
      // The guard keeps (upper - lower) / spacing from losing a point to
      // rounding, e.g. 6 / 0.025 = 239.99999999999997.
      counts_[d] = static_cast<std::size_t>(
                       std::floor((upper_(d) - lower_(d)) / spacing_(d) + 1e-9)) +
                   1;
      size_ *= counts_[d];
    }
  }

  Vector lower_;
  Vector upper_;
  Vector spacing_;
  std::vector<std::size_t> counts_;
  std::size_t size_ = 0;
};

}  // namespace maxplus

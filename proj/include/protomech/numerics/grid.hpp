#pragma once

#include <Eigen/Core>

#include <vector>

namespace protomech::numerics {

using Index = Eigen::Index;

/// One periodic axis: `points` samples on [lower, lower + length).
struct Axis {
  Index points = 0;
  double length = 0.0;
  double lower = 0.0;

  double spacing() const { return length / static_cast<double>(points); }
  double coordinate(Index i) const { return lower + static_cast<double>(i) * spacing(); }
  double upper() const { return lower + length; }

  bool operator==(const Axis&) const = default;
};

/// Flat torus discretization. Fields over the grid are flattened row-major:
/// the last declared axis varies fastest.
class PeriodicGrid {
 public:
  static constexpr Index kMinPoints = 8;

  PeriodicGrid() = default;
  explicit PeriodicGrid(std::vector<Axis> axes);

  /// Convenience for a single axis.
  static PeriodicGrid line(Index points, double length, double lower = 0.0);
  /// Convenience for a d-dimensional cube with identical axes.
  static PeriodicGrid cube(Index dims, Index points, double length, double lower = 0.0);

  Index dimension() const { return static_cast<Index>(axes_.size()); }
  Index size() const { return size_; }
  const Axis& axis(Index a) const { return axes_[static_cast<std::size_t>(a)]; }
  const std::vector<Axis>& axes() const { return axes_; }

  Index stride(Index a) const { return strides_[static_cast<std::size_t>(a)]; }
  Index index_along(Index flat, Index a) const { return (flat / stride(a)) % axis(a).points; }
  double coordinate(Index flat, Index a) const { return axis(a).coordinate(index_along(flat, a)); }
  Eigen::VectorXd point(Index flat) const;

  double cell_volume() const;
  double volume() const;

  /// Angular wavenumbers 2*pi*m/L in FFT order along axis `a`. Odd-order
  /// derivatives should pass `zero_nyquist = true` so real fields stay real.
  Eigen::VectorXd wavenumbers(Index a, bool zero_nyquist) const;

  bool operator==(const PeriodicGrid& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<Index> strides_;
  Index size_ = 0;
};

/// Throws InvalidInput when the two grids differ.
void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where);

}  // namespace protomech::numerics

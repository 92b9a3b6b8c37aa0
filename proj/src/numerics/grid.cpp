#include "protomech/numerics/grid.hpp"

#include "protomech/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace protomech::numerics {

PeriodicGrid::PeriodicGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw InvalidInput("PeriodicGrid: at least one axis required");
  for (const auto& ax : axes_) {
    if (ax.points < kMinPoints)
      throw InvalidInput("PeriodicGrid: point count " + std::to_string(ax.points) +
                         " below minimum of 8");
    if (!(ax.length > 0.0) || !std::isfinite(ax.length))
      throw InvalidInput("PeriodicGrid: axis length must be positive and finite");
    if (!std::isfinite(ax.lower)) throw InvalidInput("PeriodicGrid: axis lower bound not finite");
  }
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  for (std::size_t k = axes_.size(); k-- > 0;) {
    strides_[k] = size_;
    size_ *= axes_[k].points;
  }
}

PeriodicGrid PeriodicGrid::line(Index points, double length, double lower) {
  return PeriodicGrid({Axis{points, length, lower}});
}

PeriodicGrid PeriodicGrid::cube(Index dims, Index points, double length, double lower) {
  return PeriodicGrid(std::vector<Axis>(static_cast<std::size_t>(dims), Axis{points, length, lower}));
}

Eigen::VectorXd PeriodicGrid::point(Index flat) const {
  Eigen::VectorXd x(dimension());
  for (Index a = 0; a < dimension(); ++a) x[a] = coordinate(flat, a);
  return x;
}

double PeriodicGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.spacing();
  return v;
}

double PeriodicGrid::volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.length;
  return v;
}

Eigen::VectorXd PeriodicGrid::wavenumbers(Index a, bool zero_nyquist) const {
  const Axis& ax = axis(a);
  const Index n = ax.points;
  Eigen::VectorXd k(n);
  const double base = 2.0 * std::numbers::pi / ax.length;
  for (Index m = 0; m < n; ++m) {
    Index mode = m <= (n - 1) / 2 ? m : m - n;
    k[m] = base * static_cast<double>(mode);
  }
  if (n % 2 == 0) {
    k[n / 2] = zero_nyquist ? 0.0 : -base * static_cast<double>(n / 2);
  }
  return k;
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where) {
  if (!(a == b)) throw InvalidInput(std::string(where) + ": grid mismatch");
}

}  // namespace protomech::numerics

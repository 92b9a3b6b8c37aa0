#pragma once

#include "protomech/numerics/field.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>

namespace protomech::synchro {

using numerics::Index;
using Point = Eigen::VectorXd;

/// H(x, p) on the cotangent bundle given by caller callables. Missing partials
/// fall back to central differences with step 1e-6 * scale.
class GeneralHamiltonian {
 public:
  using Evaluator = std::function<double(const Point& x, const Point& p)>;
  using Partial = std::function<Point(const Point& x, const Point& p)>;

  GeneralHamiltonian() = default;
  explicit GeneralHamiltonian(Evaluator value, Partial momentum_partial = {}, Partial position_partial = {},
                              double scale = 1.0);

  double operator()(const Point& x, const Point& p) const { return value_(x, p); }
  Point momentum_partial(const Point& x, const Point& p) const;
  Point position_partial(const Point& x, const Point& p) const;

  bool has_analytic_partials() const { return static_cast<bool>(dp_) && static_cast<bool>(dx_); }
  double fd_step() const { return 1e-6 * scale_; }

  /// Largest discrepancy between the supplied partials and central
  /// differences at (x, p); zero when no partials were supplied.
  double partial_consistency(const Point& x, const Point& p) const;

 private:
  Point fd_momentum(const Point& x, const Point& p) const;
  Point fd_position(const Point& x, const Point& p) const;

  Evaluator value_;
  Partial dp_;
  Partial dx_;
  double scale_ = 1.0;
};

/// H = T(p) + V(x).
struct SeparableHamiltonian {
  std::function<double(const Point&)> kinetic;
  std::function<Point(const Point&)> kinetic_gradient;
  std::function<double(const Point&)> potential;
  std::function<Point(const Point&)> potential_gradient;

  double operator()(const Point& x, const Point& p) const { return kinetic(p) + potential(x); }
  GeneralHamiltonian general() const;

  /// p^2/(2m) + V(x).
  static SeparableHamiltonian newtonian(double mass, std::function<double(const Point&)> potential,
                                        std::function<Point(const Point&)> potential_gradient);
  /// p^2/(2m) + m w^2 |x - center|^2 / 2.
  static SeparableHamiltonian harmonic(double mass, double omega, const Point& center);
};

/// H = 1/2 (p + A) h (p + A) + U with a constant metric h and fields A, U on
/// a grid.
struct CanonicalHamiltonian {
  Eigen::MatrixXd metric;
  numerics::CovectorField vector_potential;
  numerics::ScalarField scalar_potential;

  /// Validates that the metric is symmetric positive-definite and that the
  /// fields share a grid of matching dimension.
  CanonicalHamiltonian(Eigen::MatrixXd metric, numerics::CovectorField vector_potential,
                       numerics::ScalarField scalar_potential);

  /// h = I/m, A = 0.
  static CanonicalHamiltonian with_potential(numerics::ScalarField potential, double mass = 1.0);

  const numerics::PeriodicGrid& grid() const { return scalar_potential.grid(); }
  bool has_constant_vector_potential(double tol = 0.0) const;
};

/// A Hamiltonian evaluated at the points of a grid. This is the form the
/// field-based solvers (synchronicity, emergence-momentum, Madelung) consume.
class GridHamiltonian {
 public:
  explicit GridHamiltonian(const CanonicalHamiltonian& h);
  GridHamiltonian(const GeneralHamiltonian& h, const numerics::PeriodicGrid& grid);

  const numerics::PeriodicGrid& grid() const { return grid_; }

  double value(Index i, const Point& p) const;
  Point momentum_partial(Index i, const Point& p) const;
  /// Explicit x-derivative at fixed p.
  Point position_partial(Index i, const Point& p) const;

  const std::optional<CanonicalHamiltonian>& canonical() const { return canonical_; }

 private:
  numerics::PeriodicGrid grid_;
  std::optional<CanonicalHamiltonian> canonical_;
  std::vector<Eigen::MatrixXd> potential_jacobian_;  // per point: d_k A_j at (k, j)
  numerics::CovectorField potential_gradient_;
  std::optional<GeneralHamiltonian> general_;
};

}  // namespace protomech::synchro

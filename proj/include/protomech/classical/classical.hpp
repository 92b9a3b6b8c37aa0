#pragma once

#include "protomech/numerics/field.hpp"
#include "protomech/synchro/hamiltonian.hpp"

#include <filesystem>
#include <functional>
#include <vector>

namespace protomech::classical {

using numerics::Axis;
using numerics::Index;
using numerics::PeriodicGrid;
using numerics::ScalarField;
using synchro::GeneralHamiltonian;
using synchro::Point;
using synchro::SeparableHamiltonian;

/// A function on phase space with its partials; the same callable bundle the
/// Hamiltonians use.
using PhaseFunction = GeneralHamiltonian;

/// Phase-space grid: the configuration axes followed by the same number of
/// momentum axes.
PeriodicGrid phase_grid(const std::vector<Axis>& x_axes, const std::vector<Axis>& p_axes);

/// Momentum axis covering mean +/- sigmas * sigma.
Axis momentum_box(double mean, double sigma, Index points, double sigmas = 8.0);

/// Probability density on a phase-space grid. The momentum axes are a finite
/// box treated as periodic; boundary_mass() tracks how much probability sits
/// in the outer three cells of each momentum axis.
class PhaseSpacePDF {
 public:
  static constexpr Index kBoundaryCells = 3;
  static constexpr double kTruncationTolerance = 1e-6;

  /// Validates non-negativity (to 1e-8 of the peak, the level of spectral
  /// ringing) and unit mass (1e-8).
  PhaseSpacePDF(ScalarField values, Index config_dim);

  /// Rescales to unit mass before validating.
  static PhaseSpacePDF normalized(ScalarField values, Index config_dim);

  /// Product Gaussian. Standard deviations below 1.5 cells are widened so the
  /// two-sigma width spans at least three cells.
  static PhaseSpacePDF gaussian(const PeriodicGrid& grid, const Point& mean_x, const Point& mean_p,
                                const Point& sigma_x, const Point& sigma_p);

  const PeriodicGrid& grid() const { return values_.grid(); }
  const ScalarField& values() const { return values_; }
  Index config_dim() const { return config_dim_; }

  Point position(Index flat) const;
  Point momentum(Index flat) const;

  double mass() const;
  double boundary_mass() const;

 private:
  ScalarField values_;
  Index config_dim_ = 0;
};

struct TrajectoryState {
  Point q;
  Point p;
  double t = 0.0;
};

/// Kick-drift-kick leapfrog.
TrajectoryState canonical_step(const TrajectoryState& s, const SeparableHamiltonian& h, double dt);
/// Implicit midpoint; the Hamiltonian must carry analytic partials.
TrajectoryState canonical_step(const TrajectoryState& s, const GeneralHamiltonian& h, double dt);

/// Transport of the density along the canonical flow. For separable H the
/// flow is split (half kick, drift, half kick) and each sub-flow is an exact
/// translation of grid lines. The general case traces every node back through
/// the implicit-midpoint map and interpolates with tensor cubics.
/// Requires dt * max|velocity| <= spacing along every axis; throws
/// TruncationError when the momentum-boundary mass exceeds 1e-6.
PhaseSpacePDF liouville_step(const PhaseSpacePDF& pdf, const SeparableHamiltonian& h, double dt);
PhaseSpacePDF liouville_step(const PhaseSpacePDF& pdf, const GeneralHamiltonian& h, double dt);

/// {A, B} = dA/dp dB/dx - dB/dp dA/dx with spectral derivatives; fields live
/// on a phase-space grid with `config_dim` position axes.
ScalarField poisson_bracket(const ScalarField& a, const ScalarField& b, Index config_dim);
/// Same bracket from analytic (or differenced) partials at every node.
ScalarField poisson_bracket(const PhaseFunction& a, const PhaseFunction& b, const PeriodicGrid& grid,
                            Index config_dim);

/// max |{H, Q}| over the grid.
double check_charge_invariance(const PhaseFunction& h, const PhaseFunction& q, const PeriodicGrid& grid,
                               Index config_dim);

double expectation(const PhaseSpacePDF& pdf, const ScalarField& f);
double expectation(const PhaseSpacePDF& pdf, const std::function<double(const Point& x, const Point& p)>& f);

/// Samples a phase-space function at every node.
ScalarField sample_phase(const PeriodicGrid& grid, Index config_dim,
                         const std::function<double(const Point& x, const Point& p)>& f);

void write_pdf(const std::filesystem::path& stem, const PhaseSpacePDF& pdf);
/// Columns t, q..., p..., H.
void write_trajectory(const std::filesystem::path& path, const std::vector<TrajectoryState>& states,
                      const std::function<double(const Point&, const Point&)>& h);

}  // namespace protomech::classical

#pragma once

#include "protomech/numerics/field.hpp"
#include "protomech/synchro/hamiltonian.hpp"

#include <filesystem>

namespace protomech::synchro {

using numerics::ComplexField;
using numerics::CovectorField;
using numerics::ScalarField;
using numerics::VectorField;

/// Phase field eta (unit modulus) and signed emergence density mu.
/// hbar_bar is half of the reduced Planck constant, so the phase of a mode
/// with momentum hbar*k advances as 2*k*x.
struct SynchronicityState {
  static constexpr double kModulusTolerance = 1e-9;

  ComplexField eta;
  ScalarField mu;
  double hbar_bar = 0.5;

  SynchronicityState(ComplexField eta, ScalarField mu, double hbar_bar);

  /// State with eta = exp(i * phase / hbar_bar), from a library-level hbar.
  static SynchronicityState from_phase(const ScalarField& phase, ScalarField mu, double hbar);

  const numerics::PeriodicGrid& grid() const { return eta.grid(); }
  double modulus_defect() const;
  double total_measure() const;
};

/// p = -i hbar_bar eta^{-1} grad(eta). Throws InvalidState when eta leaves the
/// unit circle or the discarded imaginary part is not negligible.
CovectorField momentum_map(const SynchronicityState& state);

/// v^j = dH/dp_j at (x, p(x)); throws DomainError listing points where the
/// partials are not finite.
VectorField velocity_field(const GridHamiltonian& h, const CovectorField& p);

/// Legendre value L = v.p - H at every point.
ScalarField lagrangian_density(const GridHamiltonian& h, const CovectorField& p, const VectorField& v);

/// Largest dt allowed by dt * max|v| <= 0.5 * spacing.
double admissible_dt(const SynchronicityState& state, const GridHamiltonian& h);

struct StepDiagnostics {
  double renormalization = 0.0;  // max | |eta| - 1 | before renormalizing
  double max_speed = 0.0;
};

/// One RK4 step of the phase and measure transport. The phase equation is
/// d_t eta + v.grad(eta) = (i / hbar_bar) L eta and the measure is moved in
/// flux form, d_t mu + div(mu v) = 0, so the total measure is kept to
/// round-off. Throws StepSizeError on CFL violation.
SynchronicityState step(const SynchronicityState& state, const GridHamiltonian& h, double dt,
                        StepDiagnostics* diagnostics = nullptr);

/// Integral of mu * H(x, p(eta)).
double energy_functional(const SynchronicityState& state, const GridHamiltonian& h);

/// f = mu / nu pointwise; throws DomainError listing points where nu = 0 and
/// mu != 0. Points with mu = nu = 0 get f = 0.
ScalarField emergence_frequency(const SynchronicityState& state, const ScalarField& nu);

/// Phase winding of eta along the line through `start` in direction `axis`,
/// in units of full turns.
double winding_number(const SynchronicityState& state, Index axis, Index start);

/// Integral of p_axis along the same line; equals 2 pi hbar_bar times the
/// winding number for a momentum map.
double circulation(const CovectorField& p, Index axis, Index start);

/// Largest |d_a p_b - d_b p_a| over all axis pairs.
double max_curl(const CovectorField& p);

void write_state(const std::filesystem::path& stem, const SynchronicityState& state);
SynchronicityState read_state(const std::filesystem::path& stem, double hbar_bar);

}  // namespace protomech::synchro

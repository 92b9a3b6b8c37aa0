#pragma once

#include "protomech/numerics/field.hpp"
#include "protomech/numerics/io.hpp"

#include <functional>
#include <vector>

namespace protomech::fluids {

using numerics::CovectorField;
using numerics::Index;
using numerics::PeriodicGrid;
using numerics::ScalarField;
using numerics::VectorField;

/// Specific internal energy U(rho, sigma) with its partials.
struct InternalEnergy {
  std::function<double(double rho, double sigma)> value;
  std::function<double(double rho, double sigma)> d_rho;
  std::function<double(double rho, double sigma)> d_sigma;

  /// U = K rho^{gamma - 1} / (gamma - 1), independent of sigma.
  static InternalEnergy polytropic(double k, double gamma);
  /// U = c.
  static InternalEnergy constant(double c);
};

/// P = rho (rho dU/drho + sigma dU/dsigma).
ScalarField pressure(const ScalarField& rho, const ScalarField& sigma, const InternalEnergy& u);

/// Mass density, entropy density and momentum density m = rho p.
class CompressibleState {
 public:
  /// Throws InvalidInput on grid mismatch or non-finite values and
  /// PositivityFault unless rho > 0 everywhere.
  CompressibleState(ScalarField rho, ScalarField sigma, CovectorField momentum, InternalEnergy energy);

  const ScalarField& rho() const { return rho_; }
  const ScalarField& sigma() const { return sigma_; }
  const CovectorField& momentum() const { return momentum_; }
  const InternalEnergy& internal_energy() const { return energy_; }
  const PeriodicGrid& grid() const { return rho_.grid(); }

  /// v = m / rho.
  VectorField velocity() const;
  /// Isentropic sound speed sqrt(d P(lambda rho, lambda sigma) / d(lambda rho)).
  ScalarField sound_speed() const;

 private:
  ScalarField rho_;
  ScalarField sigma_;
  CovectorField momentum_;
  InternalEnergy energy_;
};

/// Integral of |m|^2 / (2 rho) + rho U(rho, sigma).
double hamiltonian(const CompressibleState& state);

/// Largest dt with dt * max(|v| + c) <= kCourant * spacing.
inline constexpr double kCourant = 0.5;
double admissible_dt(const CompressibleState& state);

/// Halvings tried when a step would drive rho non-positive.
inline constexpr int kPositivityRetries = 4;

/// RK4 step of the isentropic conservation laws
///   d_t rho = -div(m),  d_t sigma = -div(sigma v),
///   d_t m_i = -d_j(m_i v^j) - d_i P
/// with spectral fluxes dealiased by the 2/3 rule. Throws StepSizeError on
/// CFL violation and PositivityFault if rho stays non-positive after
/// kPositivityRetries halvings.
CompressibleState compressible_step(const CompressibleState& state, double dt);

/// v - grad(theta) with div(v - grad(theta)) = 0, spectrally.
VectorField project_divergence_free(const VectorField& v);

/// Scalar vorticity on a periodic square.
class IncompressibleState2D {
 public:
  /// Mean vorticity tolerance relative to max |omega|.
  static constexpr double kMeanTolerance = 1e-10;

  /// Throws InvalidInput unless the grid is 2D and square, omega is finite and
  /// of zero mean.
  explicit IncompressibleState2D(ScalarField omega);

  const ScalarField& omega() const { return omega_; }
  const PeriodicGrid& grid() const { return omega_.grid(); }

  /// psi with -lap(psi) = omega and zero mean.
  ScalarField streamfunction() const;
  /// u = (d_y psi, -d_x psi).
  VectorField velocity() const;

 private:
  ScalarField omega_;
};

/// Vorticity of a velocity field on a 2D grid, d_x u_y - d_y u_x.
ScalarField vorticity(const VectorField& u);

/// Largest dt with dt * max|u| <= kCourant * spacing.
double admissible_dt(const IncompressibleState2D& state);

/// RK4 step of d_t omega = -u . grad(omega) with 2/3 dealiasing. Throws
/// StepSizeError on CFL violation.
IncompressibleState2D euler_step_2d(const IncompressibleState2D& state, double dt);

/// 1/2 integral |u|^2.
double kinetic_energy(const VectorField& u);
double kinetic_energy(const IncompressibleState2D& state);
/// 1/2 integral omega^2.
double enstrophy(const IncompressibleState2D& state);

struct Diagnostics {
  double t = 0.0;
  double energy = 0.0;
  double enstrophy = 0.0;
  double mass = 0.0;
  double entropy = 0.0;
};

/// Energy is the fluid Hamiltonian; enstrophy uses the velocity curl in 2D
/// and is zero otherwise.
Diagnostics diagnose(const CompressibleState& state, double t);
/// Unit density: mass is the domain area and entropy zero.
Diagnostics diagnose(const IncompressibleState2D& state, double t);

/// Columns t, energy, enstrophy, mass, entropy.
numerics::CsvTable diagnostics_table(const std::vector<Diagnostics>& rows);

}  // namespace protomech::fluids

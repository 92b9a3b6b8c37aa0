#pragma once

#include "protomech/bridge/wigner.hpp"
#include "protomech/classical/classical.hpp"
#include "protomech/quantum/quantum.hpp"

#include <filesystem>
#include <vector>

namespace protomech::bridge {

using classical::PhaseSpacePDF;
using numerics::CovectorField;
using numerics::VectorField;
using quantum::WaveFunction;
using synchro::CanonicalHamiltonian;
using synchro::SeparableHamiltonian;

/// Points with |psi| below this fraction of max |psi| are treated as nodes.
inline constexpr double kNodeFraction = 1e-6;
/// Cells around a node excluded from residual norms.
inline constexpr Index kNodeCollar = 2;

/// Hydrodynamic variables of a wave function. Every quantity is formed from
/// spectral derivatives of psi combined pointwise, so no phase unwrapping is
/// involved. Values at excluded points are zero.
struct MadelungFields {
  ScalarField rho_bar;
  CovectorField p_bar;
  VectorField v_bar;
  /// T^i_j stored at i * d + j:
  /// (hbar^2 / 4) h^{ik} rho d_k d_j log(rho).
  std::vector<ScalarField> stress_q;
  /// 1 where the fields are defined, 0 at nodes.
  ScalarField support;
};

/// Free particle of the wave function's mass when no Hamiltonian is given.
MadelungFields madelung_decompose(const WaveFunction& psi);
/// Uses the metric and vector potential of `h`: v = h (p + A).
MadelungFields madelung_decompose(const WaveFunction& psi, const CanonicalHamiltonian& h);
/// Evaluates on `points` only; throws DomainError if |psi| <= 1e-12 at any of them.
MadelungFields madelung_decompose(const WaveFunction& psi, const CanonicalHamiltonian& h,
                                  const std::vector<Index>& points);

struct HydroResidual {
  double continuity = 0.0;
  double momentum = 0.0;
  /// Per interior frame (frames 1 .. n-2).
  std::vector<double> continuity_series;
  std::vector<double> momentum_series;
};

/// Max-norm residuals of
///   d_t rho + d_i (rho v^i) = 0
///   d_t (rho p_j) + d_i (rho v^i p_j) + rho d_j U + rho v^i d_j A_i = d_i T^i_j
/// at every interior frame of a series with uniform spacing dt. Time
/// derivatives are central differences. Points within two cells of a node
/// (in any frame) are excluded; a node crossing inside the window, that is a
/// point which is a node in some frame and above 1e-6 max|psi| in another
/// while |psi| <= 1e-12 max, throws DomainError.
HydroResidual hydrodynamic_residual(const std::vector<WaveFunction>& series, const CanonicalHamiltonian& h,
                                    double dt);
/// Same, with the potential gradient supplied instead of differentiated
/// spectrally (for potentials that are not smooth across the box edge).
HydroResidual hydrodynamic_residual(const std::vector<WaveFunction>& series, const CanonicalHamiltonian& h,
                                    double dt, const CovectorField& potential_gradient);

struct ConvergenceStudy {
  double coarse = 0.0;
  double fine = 0.0;
  /// log2(coarse / fine) of the larger of the two residual norms.
  double order = 0.0;
  HydroResidual coarse_residual;
  HydroResidual fine_residual;
};

/// Evolves psi0 to t_end with steps dt and dt/2 and compares the residuals at
/// t_end.
ConvergenceStudy hydrodynamic_convergence(const WaveFunction& psi0, const CanonicalHamiltonian& h, double dt,
                                          double t_end, const CovectorField& potential_gradient);

struct ClassicalMoments {
  ScalarField rho_bar;
  CovectorField p_bar;
  VectorField v_bar;
  /// T^i_j = -int (v_bar^i - dH/dp_i) rho (p_bar_j - p_j) dp at i * d + j.
  std::vector<ScalarField> stress_cl;
  ScalarField support;
};

/// Fraction of max rho_bar below which moments are masked.
inline constexpr double kMomentFloor = 1e-12;

ClassicalMoments classical_moments(const PhaseSpacePDF& pdf, const classical::PhaseFunction& h);
/// p^2 / 2m kinetic velocity.
ClassicalMoments classical_moments(const PhaseSpacePDF& pdf, double mass = 1.0);

/// max |T_q - T_cl| over points where both are defined; grids must match.
double stress_difference(const MadelungFields& q, const ClassicalMoments& c);

/// Phase-space density with the Wigner values, rejecting negative W.
PhaseSpacePDF classical_from_wigner(const WignerField& w);

struct LimitSample {
  double t = 0.0;
  double distance = 0.0;
};

/// Evolves psi0 with the split Schrodinger propagator and pdf0 with the
/// split Liouville map of the same Hamiltonian (potential sampled on the grid,
/// kinetic term as a Fourier multiplier), and records the L1 distance
/// sum |W - rho| dx dp every `record_every` steps. pdf0 must live on the
/// Wigner grid of psi0.
std::vector<LimitSample> classical_limit_compare(const WaveFunction& psi0, const PhaseSpacePDF& pdf0,
                                                 const SeparableHamiltonian& h, double t_end, double dt,
                                                 Index record_every = 1);

/// Columns t, res_continuity, res_momentum.
void write_residual_series(const std::filesystem::path& path, const HydroResidual& r, double t0, double dt);

}  // namespace protomech::bridge

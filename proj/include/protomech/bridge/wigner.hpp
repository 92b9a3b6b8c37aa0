#pragma once

#include "protomech/numerics/field.hpp"

#include <filesystem>

namespace protomech::quantum {
struct WaveFunction;
class DensityMatrix;
}  // namespace protomech::quantum

namespace protomech::bridge {

using numerics::Index;
using numerics::PeriodicGrid;
using numerics::ScalarField;

/// Discrete Wigner function of a state on a 1D grid of N points and length L.
/// Values live on an N x 2N phase-space grid (x axis first) with momenta
/// p_n = pi hbar n / (2L), n in [-N, N). The state is zero-embedded rather
/// than periodized, so it must be band-limited to half the Nyquist wavenumber.
/// Normalized as a phase-space density: sum W dx dp = 1.
struct WignerField {
  ScalarField values;
  double hbar = 1.0;

  const PeriodicGrid& grid() const { return values.grid(); }
  double mass() const;
  /// Integral over p at every x.
  ScalarField position_marginal() const;
  /// Integral over x at every p (length 2N, ascending momenta).
  Eigen::VectorXd momentum_marginal() const;
  double min() const { return values.values().minCoeff(); }
};

/// Phase-space grid matching the discrete Wigner function of `x_grid`.
PeriodicGrid wigner_grid(const PeriodicGrid& x_grid, double hbar);

/// Fraction of spectral energy at |m| >= N/4 above which a state counts as
/// not band-limited.
inline constexpr double kBandLimitTolerance = 1e-10;

WignerField wigner_transform(const quantum::WaveFunction& psi);
WignerField wigner_transform(const quantum::DensityMatrix& rho, double hbar);

void write_wigner(const std::filesystem::path& stem, const WignerField& w);

}  // namespace protomech::bridge

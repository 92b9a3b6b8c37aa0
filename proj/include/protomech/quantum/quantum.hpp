#pragma once

#include "protomech/numerics/field.hpp"
#include "protomech/synchro/hamiltonian.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace protomech::quantum {

using numerics::Complex;
using numerics::ComplexField;
using numerics::Index;
using numerics::PeriodicGrid;
using numerics::ScalarField;
using numerics::Values;
using synchro::CanonicalHamiltonian;

/// Dense operator work is limited to grids of at most this many points.
inline constexpr Index kDenseLimit = 512;

struct WaveFunction {
  static constexpr double kNormTolerance = 1e-9;

  ComplexField values;
  double hbar = 1.0;
  double mass = 1.0;

  WaveFunction(ComplexField values, double hbar, double mass = 1.0);
  static WaveFunction normalized(ComplexField values, double hbar, double mass = 1.0);

  const PeriodicGrid& grid() const { return values.grid(); }
  double norm() const;
};

/// Density matrix in the grid basis, normalized so that tr(rho) = 1 with the
/// plain matrix trace: a pure state has entries dV * psi_i * conj(psi_j).
/// Expectations are tr(rho F) with F the matrix acting on grid values.
class DensityMatrix {
 public:
  DensityMatrix(PeriodicGrid grid, Eigen::MatrixXcd entries, bool is_signed = false);

  static DensityMatrix pure(const WaveFunction& psi);
  /// sum_k w_k |psi_k><psi_k|; weights may be negative only when is_signed.
  static DensityMatrix mixture(const std::vector<double>& weights, const std::vector<WaveFunction>& states,
                               bool is_signed = false);

  const PeriodicGrid& grid() const { return grid_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  bool is_signed() const { return signed_; }
  Index dim() const { return entries_.rows(); }

  Complex trace() const { return entries_.trace(); }
  double hermiticity_defect() const;
  Eigen::VectorXd spectrum() const;
  Complex expectation(const Eigen::MatrixXcd& op) const { return (entries_ * op).trace(); }

 private:
  PeriodicGrid grid_;
  Eigen::MatrixXcd entries_;
  bool signed_ = false;
};

/// One symmetrized term f * P_{a1}...P_{an} + P_{a1}...P_{an} * f with a real
/// coefficient field f. The identity operator is the single term f = 1/2.
struct ObservableTerm {
  ScalarField coefficient;
  std::vector<Index> axes;
};

/// Polynomial in the momentum operators with field coefficients, plus an
/// optional Fourier multiplier s(hbar k). Momentum operators are spectral,
/// -i hbar d/dx with the Nyquist mode removed; the multiplier is applied to
/// every mode including Nyquist.
class Observable {
 public:
  using Symbol = std::function<double(const Eigen::VectorXd& momentum)>;

  Observable(PeriodicGrid grid, double hbar);

  static Observable identity(const PeriodicGrid& grid, double hbar);
  /// Multiplication by a field.
  static Observable multiplication(const ScalarField& f, double hbar);
  static Observable position(const PeriodicGrid& grid, double hbar, Index axis = 0);
  /// P_axis^power.
  static Observable momentum(const PeriodicGrid& grid, double hbar, Index axis = 0, int power = 1);

  Observable& add_term(ScalarField coefficient, std::vector<Index> axes);
  Observable& set_symbol(Symbol symbol, int degree);

  const PeriodicGrid& grid() const { return grid_; }
  double hbar() const { return hbar_; }
  const std::vector<ObservableTerm>& terms() const { return terms_; }
  const Symbol& symbol() const { return symbol_; }
  int degree() const;
  /// True when every field term has degree zero, so the operator is a
  /// multiplier in momentum plus a multiplier in position.
  bool is_split() const;
  /// Sum of the degree-zero terms as a potential field (2 f summed).
  ScalarField potential() const;

  Values<Complex> apply(const Values<Complex>& psi) const;
  Eigen::MatrixXcd matrix() const;

  /// Weyl symbol at grid point `flat` and momentum p. Supports degree <= 2.
  double weyl_symbol(Index flat, const Eigen::VectorXd& p) const;

 private:
  PeriodicGrid grid_;
  double hbar_ = 1.0;
  std::vector<ObservableTerm> terms_;
  std::vector<ScalarField> curvature_;  // d_a d_b f for degree-two terms
  Symbol symbol_;
  int symbol_degree_ = 0;
};

/// 1/2 (P + A) h (P + A) + U. A constant vector potential is carried as a
/// Fourier multiplier; a varying one is expanded into symmetrized terms.
Observable build_hamiltonian(const CanonicalHamiltonian& h, double hbar);

/// exp(-i H dt / hbar). Split operators use Strang splitting (half potential,
/// kinetic multiplier, half potential); anything else is exponentiated densely.
class Propagator {
 public:
  Propagator(const Observable& h, double dt);

  Values<Complex> apply(const Values<Complex>& psi) const;
  /// U M U^dagger.
  Eigen::MatrixXcd conjugate(const Eigen::MatrixXcd& m) const;

  double dt() const { return dt_; }
  bool is_split() const { return !dense_.has_value(); }

 private:
  PeriodicGrid grid_;
  double dt_ = 0.0;
  Values<Complex> half_potential_;
  Values<Complex> kinetic_;
  std::optional<Eigen::MatrixXcd> dense_;
};

/// Throws IntegrationFault when the norm moves by more than 1e-8.
WaveFunction schrodinger_step(const WaveFunction& psi, const Propagator& u);
WaveFunction schrodinger_step(const WaveFunction& psi, const Observable& h, double dt);

/// rho -> U rho U^dagger with the same propagator; throws IntegrationFault
/// when the trace moves by more than 1e-8.
DensityMatrix liouville_step_quantum(const DensityMatrix& rho, const Propagator& u);
DensityMatrix liouville_step_quantum(const DensityMatrix& rho, const Observable& h, double dt);

/// Exact evolution operator exp(-i H t / hbar) from the dense spectrum.
Eigen::MatrixXcd exact_propagator(const Observable& h, double t);

/// |tr(rho0 U^dagger F U) - tr(U rho0 U^dagger F)| with the exact propagator.
double heisenberg_expectation_check(const DensityMatrix& rho0, const Observable& h, const Observable& f, double t);

/// max |[P_a, f] psi - (hbar/i) d_a f psi| over unit plane-wave probes with
/// |k| < N/4 along every axis and over all axes a.
double commutation_check(const PeriodicGrid& grid, const ScalarField& f, double hbar);

/// |tr(rho F) - sum W * symbol(F)| using the discrete Wigner function of rho.
/// One-dimensional grids only; throws InvalidInput for degree > 2.
double duality_check(const DensityMatrix& rho, const Observable& f);

/// Columns index, re, im.
void write_wavefunction(const std::filesystem::path& path, const WaveFunction& psi);
/// Columns i, j, re, im.
void write_density_matrix(const std::filesystem::path& path, const DensityMatrix& rho);

}  // namespace protomech::quantum

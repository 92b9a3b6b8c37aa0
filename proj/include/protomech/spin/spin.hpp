#pragma once

#include "protomech/errors.hpp"
#include "protomech/numerics/io.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace protomech::spin {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Functions on the sphere either are single-valued (integer sector) or
/// change sign once around phi (half-integer sector, e^{i phi / 2} times a
/// single-valued function).
enum class Sector { Integer, HalfInteger };

/// Gauss-Legendre nodes in cos(theta) times a uniform phi grid. Values are
/// stored theta-major: index(t, p) = t * phi_count + p.
class SphereGrid {
 public:
  static constexpr Index kMinTheta = 16;
  static constexpr Index kMinPhi = 32;

  SphereGrid(Index theta_count, Index phi_count);

  Index theta_count() const { return theta_.size(); }
  Index phi_count() const { return phi_.size(); }
  Index size() const { return theta_count() * phi_count(); }
  Index index(Index t, Index p) const { return t * phi_count() + p; }

  /// Ascending polar angles, none at the poles.
  const Eigen::VectorXd& theta() const { return theta_; }
  const Eigen::VectorXd& phi() const { return phi_; }
  /// Quadrature weight of every point; they sum to 4 pi.
  const Eigen::VectorXd& weights() const { return weights_; }

  Eigen::VectorXcd sample(const std::function<Complex(double theta, double phi)>& f) const;

  Complex integrate(const Eigen::VectorXcd& f) const;
  /// <f, g> = integral conj(f) g dOmega.
  Complex inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) const;
  double norm(const Eigen::VectorXcd& f) const;

  /// Spectral partial derivatives within a sector.
  Eigen::VectorXcd d_theta(const Eigen::VectorXcd& f, Sector sector) const;
  Eigen::VectorXcd d_phi(const Eigen::VectorXcd& f, Sector sector) const;

 private:
  // theta differentiation matrix for signed FFT index q (phi mode q, or
  // q + 1/2 in the half-integer sector)
  const Eigen::MatrixXd& theta_matrix(long q, Sector sector) const;
  // forward / inverse phi transform of every theta row, as (theta, q)
  Eigen::MatrixXcd to_modes(const Eigen::VectorXcd& f, Sector sector) const;
  Eigen::VectorXcd from_modes(const Eigen::MatrixXcd& modes, Sector sector) const;
  long signed_mode(Index q) const;

  Eigen::VectorXd theta_;
  Eigen::VectorXd phi_;
  Eigen::VectorXd weights_;
  std::array<Eigen::MatrixXd, 4> theta_matrices_;
};

/// (hbar / i)(a_theta d_theta + a_phi d_phi) + multiplier.
struct AngularOperator {
  static constexpr double kHermitianTolerance = 1e-8;

  Eigen::VectorXd theta_coefficient;
  Eigen::VectorXd phi_coefficient;
  Eigen::VectorXcd multiplier;
  /// Gauge function the multiplier was built with (zero for L).
  Eigen::VectorXd gauge;
  double hbar = 1.0;

  Eigen::VectorXcd apply(const SphereGrid& grid, const Eigen::VectorXcd& f, Sector sector) const;
  /// Column j is apply(e_j).
  Eigen::MatrixXcd matrix(const SphereGrid& grid, Sector sector) const;
};

using OperatorTriple = std::array<AngularOperator, 3>;

/// The three rotation generators with their (hbar / i) factors.
OperatorTriple build_L(const SphereGrid& grid, double hbar);

/// Half-integer spin generators: L_j plus hbar/2 cos(phi)/sin(theta),
/// hbar/2 sin(phi)/sin(theta), 0, plus hbar L_j s for the gauge s sampled on
/// the grid.
OperatorTriple build_S(const SphereGrid& grid, double hbar, const Eigen::VectorXd& gauge);
OperatorTriple build_S(const SphereGrid& grid, double hbar);

/// sum_j O_j O_j f.
Eigen::VectorXcd apply_casimir(const SphereGrid& grid, const OperatorTriple& ops, const Eigen::VectorXcd& f,
                               Sector sector);

/// max |<g, O f> - <O g, f>| over the given functions, relative to the
/// largest |<O f, O f>|^(1/2) |f|.
double hermiticity_defect(const SphereGrid& grid, const AngularOperator& op, const std::vector<Eigen::VectorXcd>& probes,
                          Sector sector);

/// <b_a, O b_b> over a quadrature-orthonormal basis. The assembled grid
/// matrix also acts on modes the grid cannot resolve; restricting to a basis
/// the operator preserves gives the exact finite matrix.
Eigen::MatrixXcd galerkin_matrix(const SphereGrid& grid, const AngularOperator& op,
                                 const std::vector<Eigen::VectorXcd>& basis, Sector sector);

/// Y_l^m for every l <= max_l, in (l, m) order.
std::vector<Eigen::VectorXcd> harmonic_basis(const SphereGrid& grid, int max_l);

/// Y_l^m with the Condon-Shortley phase.
Eigen::VectorXcd spherical_harmonic(const SphereGrid& grid, int l, int m);

/// The spin-1/2 pair: (1/sqrt(2 pi)) e^{-is} e^{+-i phi/2} (cos, sin)(theta/2).
Eigen::VectorXcd spin_up(const SphereGrid& grid, const Eigen::VectorXd& gauge);
Eigen::VectorXcd spin_down(const SphereGrid& grid, const Eigen::VectorXd& gauge);

/// |l + 1/2, m + 1/2> for m in [-l - 1, l], normalized by quadrature.
Eigen::VectorXcd half_integer_state(const SphereGrid& grid, int l, int m, const Eigen::VectorXd& gauge);

/// Which family a SpinorState's labels refer to.
enum class Family { Harmonic, HalfInteger };

struct BasisLabel {
  int l = 0;
  int m = 0;
};

/// Coefficients over Y_l^m (Harmonic) or |l + 1/2, m + 1/2> (HalfInteger).
struct SpinorState {
  static constexpr double kNormTolerance = 1e-10;

  Family family = Family::Harmonic;
  std::vector<BasisLabel> labels;
  Eigen::VectorXcd coefficients;

  SpinorState(Family family, std::vector<BasisLabel> labels, Eigen::VectorXcd coefficients);

  Sector sector() const { return family == Family::Harmonic ? Sector::Integer : Sector::HalfInteger; }
  /// Values on the grid (the gauge only enters the half-integer family).
  Eigen::VectorXcd evaluate(const SphereGrid& grid, const Eigen::VectorXd& gauge) const;
};

/// Largest acceptable condition number of the {|+>, |->} Gram matrix.
inline constexpr double kGramConditionLimit = 1e8;

/// 2x2 blocks G^{-1/2} <b_a, S_j b_b> G^{-1/2} over b = (|+>, |->).
std::array<Eigen::Matrix2cd, 3> pauli_reduce(const SphereGrid& grid, const OperatorTriple& s_ops);

// ---- two-qubit correlations

using DensityMatrix4 = Eigen::Matrix4cd;
using Direction = Eigen::Vector3d;

inline constexpr double kDirectionTolerance = 1e-12;

/// Pauli matrices sigma_1..3.
std::array<Eigen::Matrix2cd, 3> pauli_matrices();

/// Spin singlet (|ud> - |du>) / sqrt 2 as a density matrix.
DensityMatrix4 singlet();
/// rho_a (x) rho_b for two normalized qubit vectors.
DensityMatrix4 product_state(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b);

/// tr(rho (alpha.sigma (x) beta.sigma)). Throws InvalidInput for non-unit
/// directions and InvalidState for a non-Hermitian or non-unit-trace rho.
double correlation(const DensityMatrix4& rho, const Direction& alpha, const Direction& beta);

/// |P(a,b) - P(a,b')| + |P(a',b') + P(a',b)|.
double bell_lhs(double p_ab, double p_ab_prime, double p_a_prime_b_prime, double p_a_prime_b);

/// Unit vector in the x-z plane at angle `angle` from the z axis.
Direction coplanar_direction(double angle);

/// Columns alpha, beta, P for every pair of coplanar angles.
numerics::CsvTable correlation_sweep(const DensityMatrix4& rho, const std::vector<double>& alpha_angles,
                                     const std::vector<double>& beta_angles);

}  // namespace protomech::spin

#pragma once

#include "protomech/numerics/field.hpp"
#include "protomech/synchro/hamiltonian.hpp"
#include "protomech/synchro/synchro.hpp"

#include <filesystem>
#include <functional>
#include <vector>

namespace protomech::liepoisson {

using numerics::CovectorField;
using numerics::Index;
using numerics::PeriodicGrid;
using numerics::ScalarField;
using numerics::VectorField;
using synchro::GridHamiltonian;
using synchro::Point;

/// Element (v, U) of the semidirect product of vector fields with functions.
struct Generator {
  VectorField v;
  ScalarField U;

  Generator(VectorField v, ScalarField U);
  static Generator zero(const PeriodicGrid& grid);
  /// (0, c).
  static Generator constant(const PeriodicGrid& grid, double c);

  const PeriodicGrid& grid() const { return U.grid(); }
  /// Largest component magnitude of either part.
  double max_abs() const;

  Generator& operator+=(const Generator& o);
  Generator& operator-=(const Generator& o);
  Generator& operator*=(double s);
  friend Generator operator+(Generator a, const Generator& b) { return a += b; }
  friend Generator operator-(Generator a, const Generator& b) { return a -= b; }
  friend Generator operator*(double s, Generator a) { return a *= s; }
};

/// A tangent to the dual: rates (or any unconstrained pair) of momentum
/// density and density.
struct MomentumRate {
  CovectorField momentum_density;
  ScalarField density;

  MomentumRate(CovectorField momentum_density, ScalarField density);
  static MomentumRate zero(const PeriodicGrid& grid);
  const PeriodicGrid& grid() const { return density.grid(); }
};

/// J = (rho p, rho). rho may be signed.
class EmergenceMomentum {
 public:
  static constexpr double kNormTolerance = 1e-9;
  /// |rho| at or below this fraction of max |rho| counts as vacuum: p is
  /// taken as zero there.
  static constexpr double kVacuumFraction = 1e-14;

  /// Validates a shared grid, integral of rho = 1 and rho p = 0 where rho = 0.
  EmergenceMomentum(CovectorField momentum_density, ScalarField density);
  /// (rho p, rho) from a density and a momentum field.
  static EmergenceMomentum from_momentum(const ScalarField& density, const CovectorField& momentum);
  /// Density mu and momentum map of a synchronicity state.
  static EmergenceMomentum from_synchronicity(const synchro::SynchronicityState& state);

  const CovectorField& momentum_density() const { return momentum_density_; }
  const ScalarField& density() const { return density_; }
  const PeriodicGrid& grid() const { return density_.grid(); }

  /// p = rho p / rho away from vacuum, 0 in vacuum.
  CovectorField momentum() const;
  /// 1 where rho is above the vacuum floor.
  ScalarField support() const;
  double total() const;

 private:
  struct Unchecked {};
  EmergenceMomentum(CovectorField momentum_density, ScalarField density, Unchecked);
  friend EmergenceMomentum advance(const EmergenceMomentum&, const MomentumRate&, double);

  CovectorField momentum_density_;
  ScalarField density_;
};

/// J + s K without validation; used for intermediate integrator stages.
EmergenceMomentum advance(const EmergenceMomentum& J, const MomentumRate& K, double s);

/// ([v1, v2], v1.dU2 - v2.dU1); the function part is abelian.
Generator bracket(const Generator& a, const Generator& b);

/// Max-norm of the cyclic sum [[a, b], c] + [[b, c], a] + [[c, a], b].
double jacobi_residual(const Generator& a, const Generator& b, const Generator& c);

/// Coadjoint action of V on J:
///   rho     -> -div(rho v)
///   rho p_k -> -d_j(v^j rho p_k) - rho p_j d_k v^j - rho d_k U
/// so that pairing(ad_star(V, J), W) = pairing(J, bracket(V, W)).
MomentumRate ad_star(const Generator& V, const EmergenceMomentum& J);

/// Integral of rho p . v + rho U.
double pairing(const EmergenceMomentum& J, const Generator& G);
double pairing(const MomentumRate& K, const Generator& G);

/// |pairing(ad_star(a, J), b) - pairing(J, bracket(a, b))|.
double coadjoint_duality_residual(const EmergenceMomentum& J, const Generator& a, const Generator& b);

/// Values and partials of a local density F(x, p, dp, ddp) at one point.
/// dp(i, j) = d_i p_j and ddp[j](i, k) = d_i d_k p_j.
struct MomentumJet {
  Index point = 0;
  Point x;
  Point p;
  Eigen::MatrixXd dp;
  std::vector<Eigen::MatrixXd> ddp;
};

/// A functional of J of the form integral rho F. Partials in the
/// derivatives of p are optional and default to zero.
struct LocalFunctional {
  std::function<double(const MomentumJet&)> value;
  /// dF/dp_j.
  std::function<Point(const MomentumJet&)> momentum_partial;
  /// (i, j) -> dF/d(d_i p_j).
  std::function<Eigen::MatrixXd(const MomentumJet&)> gradient_partial;
  /// [j](i, k) -> dF/d(d_i d_k p_j).
  std::function<std::vector<Eigen::MatrixXd>(const MomentumJet&)> hessian_partial;

  int order() const;

  /// F = H(x, p).
  static LocalFunctional hamiltonian(const GridHamiltonian& h);
  /// F = c.
  static LocalFunctional constant(double c);
};

/// Integral of rho F.
double functional_value(const LocalFunctional& F, const EmergenceMomentum& J);

struct FunctionalGenerator {
  Generator generator;
  /// Points where rho vanished and the generator was set to zero.
  Index masked_points = 0;
};

/// Pairing identity tolerance checked on return, relative to the scale of
/// integral |rho F|.
inline constexpr double kPairingTolerance = 1e-8;

/// (D F, F - p . D F) with
///   (D F)^j = F_{p_j} - rho^{-1} d_i (rho F_{d_i p_j}) + rho^{-1} d_i d_k (rho F_{d_i d_k p_j}).
/// Throws InvalidState if pairing(J, result) differs from integral rho F.
FunctionalGenerator generator_from_functional(const LocalFunctional& F, const EmergenceMomentum& J);

/// Largest dt with dt * max|dH/dp| <= 0.5 * spacing.
double admissible_dt(const EmergenceMomentum& J, const GridHamiltonian& h);

/// Fraction of max |rho| both sides of a zero crossing must exceed for the
/// crossing to count as a discontinuous sign flip.
inline constexpr double kSignFlipFraction = 1e-2;

/// RK4 step of dJ/dt = ad_star(H(J), J). Throws StepSizeError on CFL
/// violation and IntegrationFault on a discontinuous sign flip of rho.
EmergenceMomentum lie_poisson_step(const EmergenceMomentum& J, const GridHamiltonian& h, double dt);

using UpdateRule = std::function<MomentumRate(const EmergenceMomentum&)>;

/// RK4 step of dJ/dt = rule(J). The result is validated (normalization
/// included) but not renormalized.
EmergenceMomentum custom_generator_step(const EmergenceMomentum& J, const UpdateRule& rule, double dt);

/// Integral of rho H(x, p).
double energy(const EmergenceMomentum& J, const GridHamiltonian& h);

/// Columns x..., rho, rho_p... .
void write_momentum(const std::filesystem::path& path, const EmergenceMomentum& J);

}  // namespace protomech::liepoisson

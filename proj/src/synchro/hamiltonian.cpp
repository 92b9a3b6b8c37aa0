#include "protomech/synchro/hamiltonian.hpp"

#include "protomech/numerics/spectral.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace protomech::synchro {

using numerics::CovectorField;
using numerics::PeriodicGrid;
using numerics::ScalarField;
using numerics::Values;

GeneralHamiltonian::GeneralHamiltonian(Evaluator value, Partial momentum_partial, Partial position_partial,
                                       double scale)
    : value_(std::move(value)), dp_(std::move(momentum_partial)), dx_(std::move(position_partial)), scale_(scale) {
  if (!value_) throw ConfigurationError("GeneralHamiltonian: evaluator required");
  if (!(scale_ > 0.0)) throw ConfigurationError("GeneralHamiltonian: scale must be positive");
}

Point GeneralHamiltonian::fd_momentum(const Point& x, const Point& p) const {
  Point g(p.size());
  const double h = fd_step();
  Point q = p;
  for (Index j = 0; j < p.size(); ++j) {
    q[j] = p[j] + h;
    const double up = value_(x, q);
    q[j] = p[j] - h;
    const double dn = value_(x, q);
    q[j] = p[j];
    g[j] = (up - dn) / (2.0 * h);
  }
  return g;
}

Point GeneralHamiltonian::fd_position(const Point& x, const Point& p) const {
  Point g(x.size());
  const double h = fd_step();
  Point y = x;
  for (Index j = 0; j < x.size(); ++j) {
    y[j] = x[j] + h;
    const double up = value_(y, p);
    y[j] = x[j] - h;
    const double dn = value_(y, p);
    y[j] = x[j];
    g[j] = (up - dn) / (2.0 * h);
  }
  return g;
}

Point GeneralHamiltonian::momentum_partial(const Point& x, const Point& p) const {
  return dp_ ? dp_(x, p) : fd_momentum(x, p);
}

Point GeneralHamiltonian::position_partial(const Point& x, const Point& p) const {
  return dx_ ? dx_(x, p) : fd_position(x, p);
}

double GeneralHamiltonian::partial_consistency(const Point& x, const Point& p) const {
  double worst = 0.0;
  if (dp_) worst = std::max(worst, (dp_(x, p) - fd_momentum(x, p)).cwiseAbs().maxCoeff());
  if (dx_) worst = std::max(worst, (dx_(x, p) - fd_position(x, p)).cwiseAbs().maxCoeff());
  return worst;
}

GeneralHamiltonian SeparableHamiltonian::general() const {
  auto T = kinetic;
  auto dT = kinetic_gradient;
  auto V = potential;
  auto dV = potential_gradient;
  return GeneralHamiltonian([T, V](const Point& x, const Point& p) { return T(p) + V(x); },
                            [dT](const Point&, const Point& p) { return dT(p); },
                            [dV](const Point& x, const Point&) { return dV(x); });
}

SeparableHamiltonian SeparableHamiltonian::newtonian(double mass, std::function<double(const Point&)> potential,
                                                     std::function<Point(const Point&)> potential_gradient) {
  if (!(mass > 0.0)) throw ConfigurationError("SeparableHamiltonian: mass must be positive");
  return SeparableHamiltonian{[mass](const Point& p) { return 0.5 * p.squaredNorm() / mass; },
                              [mass](const Point& p) -> Point { return p / mass; }, std::move(potential),
                              std::move(potential_gradient)};
}

SeparableHamiltonian SeparableHamiltonian::harmonic(double mass, double omega, const Point& center) {
  const double k = mass * omega * omega;
  return newtonian(
      mass, [k, center](const Point& x) { return 0.5 * k * (x - center).squaredNorm(); },
      [k, center](const Point& x) -> Point { return k * (x - center); });
}

CanonicalHamiltonian::CanonicalHamiltonian(Eigen::MatrixXd m, CovectorField a, ScalarField u)
    : metric(std::move(m)), vector_potential(std::move(a)), scalar_potential(std::move(u)) {
  const Index d = scalar_potential.grid().dimension();
  numerics::require_same_grid(vector_potential.grid(), scalar_potential.grid(), "CanonicalHamiltonian");
  if (metric.rows() != d || metric.cols() != d)
    throw ConfigurationError("CanonicalHamiltonian: metric must be d x d for a d-dimensional grid");
  if ((metric - metric.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + metric.cwiseAbs().maxCoeff()))
    throw ConfigurationError("CanonicalHamiltonian: metric is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(metric);
  if (llt.info() != Eigen::Success) throw ConfigurationError("CanonicalHamiltonian: metric is not positive-definite");
  if (!scalar_potential.all_finite() || vector_potential.max_abs() != vector_potential.max_abs())
    throw InvalidInput("CanonicalHamiltonian: non-finite potential");
}

CanonicalHamiltonian CanonicalHamiltonian::with_potential(ScalarField potential, double mass) {
  if (!(mass > 0.0)) throw ConfigurationError("CanonicalHamiltonian: mass must be positive");
  const Index d = potential.grid().dimension();
  CovectorField a(potential.grid());
  return CanonicalHamiltonian(Eigen::MatrixXd::Identity(d, d) / mass, std::move(a), std::move(potential));
}

bool CanonicalHamiltonian::has_constant_vector_potential(double tol) const {
  for (Index a = 0; a < vector_potential.dimension(); ++a) {
    const auto& c = vector_potential.component(a);
    if (c.maxCoeff() - c.minCoeff() > tol) return false;
  }
  return true;
}

GridHamiltonian::GridHamiltonian(const CanonicalHamiltonian& h)
    : grid_(h.grid()), canonical_(h), potential_gradient_(numerics::spectral_gradient(h.scalar_potential)) {
  const Index d = grid_.dimension();
  std::vector<CovectorField> dA;  // dA[j] = gradient of A_j
  for (Index j = 0; j < d; ++j) dA.push_back(numerics::spectral_gradient(h.vector_potential.component_field(j)));
  potential_jacobian_.assign(static_cast<std::size_t>(grid_.size()), Eigen::MatrixXd::Zero(d, d));
  for (Index i = 0; i < grid_.size(); ++i)
    for (Index k = 0; k < d; ++k)
      for (Index j = 0; j < d; ++j) potential_jacobian_[static_cast<std::size_t>(i)](k, j) = dA[static_cast<std::size_t>(j)].component(k)[i];
}

GridHamiltonian::GridHamiltonian(const GeneralHamiltonian& h, const PeriodicGrid& grid)
    : grid_(grid), general_(h) {}

double GridHamiltonian::value(Index i, const Point& p) const {
  if (canonical_) {
    const Point q = p + canonical_->vector_potential.at(i);
    return 0.5 * q.dot(canonical_->metric * q) + canonical_->scalar_potential[i];
  }
  return (*general_)(grid_.point(i), p);
}

Point GridHamiltonian::momentum_partial(Index i, const Point& p) const {
  if (canonical_) return canonical_->metric * (p + canonical_->vector_potential.at(i));
  return general_->momentum_partial(grid_.point(i), p);
}

Point GridHamiltonian::position_partial(Index i, const Point& p) const {
  if (canonical_) {
    const Point v = canonical_->metric * (p + canonical_->vector_potential.at(i));
    return potential_jacobian_[static_cast<std::size_t>(i)] * v + potential_gradient_.at(i);
  }
  return general_->position_partial(grid_.point(i), p);
}

}  // namespace protomech::synchro

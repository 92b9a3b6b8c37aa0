#include "protomech/fluids/fluids.hpp"

#include "protomech/numerics/spectral.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace protomech::fluids {

using numerics::Complex;
using numerics::ComplexField;
using numerics::dealias_two_thirds;
using numerics::spectral_derivative;

namespace {

double min_spacing(const PeriodicGrid& grid) {
  double h = grid.axis(0).spacing();
  for (Index a = 1; a < grid.dimension(); ++a) h = std::min(h, grid.axis(a).spacing());
  return h;
}

ScalarField product(const ScalarField& a, const ScalarField& b) { return numerics::pointwise_product(a, b); }

ScalarField component(const CovectorField& f, Index a) { return f.component_field(a); }
ScalarField component(const VectorField& f, Index a) { return f.component_field(a); }

struct Rates {
  ScalarField rho;
  ScalarField sigma;
  CovectorField momentum;
};

// Fields at an intermediate RK stage; rho is not yet known to be positive.
struct Stage {
  ScalarField rho;
  ScalarField sigma;
  CovectorField momentum;
};

Stage shifted(const Stage& s, const Rates& k, double h) {
  Stage out = s;
  out.rho += h * k.rho;
  out.sigma += h * k.sigma;
  out.momentum += h * k.momentum;
  return out;
}

bool positive(const ScalarField& rho) { return rho.all_finite() && rho.values().minCoeff() > 0.0; }

Rates conservation_rates(const Stage& s, const InternalEnergy& u) {
  const PeriodicGrid& grid = s.rho.grid();
  const Index d = grid.dimension();
  std::vector<ScalarField> v;
  for (Index a = 0; a < d; ++a)
    v.emplace_back(grid, s.momentum.component(a).cwiseQuotient(s.rho.values()));
  const ScalarField p = dealias_two_thirds(pressure(s.rho, s.sigma, u));

  ScalarField drho(grid);
  ScalarField dsigma(grid);
  CovectorField dm(grid);
  for (Index j = 0; j < d; ++j) {
    drho -= spectral_derivative(component(s.momentum, j), j);
    dsigma -= spectral_derivative(dealias_two_thirds(product(s.sigma, v[static_cast<std::size_t>(j)])), j);
  }
  for (Index i = 0; i < d; ++i) {
    ScalarField rate = spectral_derivative(p, i);
    const ScalarField mi = component(s.momentum, i);
    for (Index j = 0; j < d; ++j)
      rate += spectral_derivative(dealias_two_thirds(product(mi, v[static_cast<std::size_t>(j)])), j);
    dm.component(i) = -rate.values();
  }
  return {drho, dsigma, dm};
}

std::optional<Stage> try_rk4(const Stage& s0, const InternalEnergy& u, double dt) {
  const Rates k1 = conservation_rates(s0, u);
  const Stage s1 = shifted(s0, k1, 0.5 * dt);
  if (!positive(s1.rho)) return std::nullopt;
  const Rates k2 = conservation_rates(s1, u);
  const Stage s2 = shifted(s0, k2, 0.5 * dt);
  if (!positive(s2.rho)) return std::nullopt;
  const Rates k3 = conservation_rates(s2, u);
  const Stage s3 = shifted(s0, k3, dt);
  if (!positive(s3.rho)) return std::nullopt;
  const Rates k4 = conservation_rates(s3, u);
  Stage out = s0;
  out.rho += (dt / 6.0) * (k1.rho + 2.0 * k2.rho + 2.0 * k3.rho + k4.rho);
  out.sigma += (dt / 6.0) * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
  out.momentum += (dt / 6.0) * (k1.momentum + 2.0 * k2.momentum + 2.0 * k3.momentum + k4.momentum);
  if (!positive(out.rho)) return std::nullopt;
  return out;
}

Stage advance_with_retries(const Stage& s, const InternalEnergy& u, double dt, int depth) {
  if (auto out = try_rk4(s, u, dt)) return *out;
  if (depth >= kPositivityRetries) throw PositivityFault("density became non-positive during a compressible step");
  const Stage half = advance_with_retries(s, u, 0.5 * dt, depth + 1);
  return advance_with_retries(half, u, 0.5 * dt, depth + 1);
}

double kinetic_from_components(const std::vector<Eigen::VectorXd>& u, const PeriodicGrid& grid) {
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(grid.size());
  for (const auto& c : u) sq += c.cwiseAbs2();
  return 0.5 * sq.sum() * grid.cell_volume();
}

}  // namespace

InternalEnergy InternalEnergy::polytropic(double k, double gamma) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidInput("polytropic constant must be non-negative");
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw InvalidInput("polytropic exponent must exceed 1");
  return {[k, gamma](double rho, double) { return k * std::pow(rho, gamma - 1.0) / (gamma - 1.0); },
          [k, gamma](double rho, double) { return k * std::pow(rho, gamma - 2.0); },
          [](double, double) { return 0.0; }};
}

InternalEnergy InternalEnergy::constant(double c) {
  return {[c](double, double) { return c; }, [](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
}

ScalarField pressure(const ScalarField& rho, const ScalarField& sigma, const InternalEnergy& u) {
  numerics::require_same_grid(rho.grid(), sigma.grid(), "pressure");
  if (!u.d_rho || !u.d_sigma) throw InvalidInput("pressure needs both partials of the internal energy");
  ScalarField p(rho.grid());
  for (Index i = 0; i < rho.size(); ++i) p[i] = rho[i] * (rho[i] * u.d_rho(rho[i], sigma[i]) + sigma[i] * u.d_sigma(rho[i], sigma[i]));
  return p;
}

CompressibleState::CompressibleState(ScalarField rho, ScalarField sigma, CovectorField momentum, InternalEnergy energy)
    : rho_(std::move(rho)), sigma_(std::move(sigma)), momentum_(std::move(momentum)), energy_(std::move(energy)) {
  numerics::require_same_grid(rho_.grid(), sigma_.grid(), "CompressibleState");
  numerics::require_same_grid(rho_.grid(), momentum_.grid(), "CompressibleState");
  if (!energy_.value || !energy_.d_rho || !energy_.d_sigma)
    throw InvalidInput("internal energy needs a value and both partials");
  if (!rho_.all_finite() || !sigma_.all_finite()) throw InvalidInput("fluid densities must be finite");
  for (Index a = 0; a < momentum_.dimension(); ++a)
    if (!momentum_.component(a).allFinite()) throw InvalidInput("fluid momentum must be finite");
  if (rho_.values().minCoeff() <= 0.0) throw PositivityFault("mass density must be positive");
}

VectorField CompressibleState::velocity() const {
  VectorField v(grid());
  for (Index a = 0; a < grid().dimension(); ++a) v.component(a) = momentum_.component(a).cwiseQuotient(rho_.values());
  return v;
}

ScalarField CompressibleState::sound_speed() const {
  constexpr double h = 1e-6;
  const ScalarField up = pressure(rho_ * (1.0 + h), sigma_ * (1.0 + h), energy_);
  const ScalarField down = pressure(rho_ * (1.0 - h), sigma_ * (1.0 - h), energy_);
  ScalarField c(grid());
  for (Index i = 0; i < c.size(); ++i) c[i] = std::sqrt(std::max(0.0, (up[i] - down[i]) / (2.0 * h * rho_[i])));
  return c;
}

double hamiltonian(const CompressibleState& state) {
  const VectorField v = state.velocity();
  double total = 0.0;
  for (Index i = 0; i < state.grid().size(); ++i) {
    double kinetic = 0.0;
    for (Index a = 0; a < state.grid().dimension(); ++a) kinetic += state.momentum().component(a)[i] * v.component(a)[i];
    const double rho = state.rho()[i];
    total += 0.5 * kinetic + rho * state.internal_energy().value(rho, state.sigma()[i]);
  }
  return total * state.grid().cell_volume();
}

double admissible_dt(const CompressibleState& state) {
  const VectorField v = state.velocity();
  Eigen::VectorXd speed = Eigen::VectorXd::Zero(state.grid().size());
  for (Index a = 0; a < state.grid().dimension(); ++a) speed += v.component(a).cwiseAbs2();
  const double top = (speed.cwiseSqrt() + state.sound_speed().values()).maxCoeff();
  return top > 0.0 ? kCourant * min_spacing(state.grid()) / top : std::numeric_limits<double>::infinity();
}

CompressibleState compressible_step(const CompressibleState& state, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be positive");
  const double limit = admissible_dt(state);
  if (dt > limit) throw StepSizeError("compressible step violates the acoustic CFL bound", limit);
  const Stage start{state.rho(), state.sigma(), state.momentum()};
  Stage out = advance_with_retries(start, state.internal_energy(), dt, 0);
  return CompressibleState(std::move(out.rho), std::move(out.sigma), std::move(out.momentum), state.internal_energy());
}

VectorField project_divergence_free(const VectorField& v) {
  const PeriodicGrid& grid = v.grid();
  const Index d = grid.dimension();
  std::vector<ComplexField> coeff;
  for (Index a = 0; a < d; ++a) coeff.push_back(numerics::forward_transform(numerics::to_complex(component(v, a))));
  std::vector<Eigen::VectorXd> k;
  for (Index a = 0; a < d; ++a) k.push_back(grid.wavenumbers(a, true));
  for (Index i = 0; i < grid.size(); ++i) {
    Eigen::VectorXd ki(d);
    Complex dot = 0.0;
    for (Index a = 0; a < d; ++a) {
      ki[a] = k[static_cast<std::size_t>(a)][grid.index_along(i, a)];
      dot += ki[a] * coeff[static_cast<std::size_t>(a)][i];
    }
    const double k2 = ki.squaredNorm();
    if (k2 == 0.0) continue;
    for (Index a = 0; a < d; ++a) coeff[static_cast<std::size_t>(a)][i] -= ki[a] * dot / k2;
  }
  VectorField out(grid);
  for (Index a = 0; a < d; ++a)
    out.component(a) = numerics::inverse_transform(coeff[static_cast<std::size_t>(a)]).values().real();
  return out;
}

IncompressibleState2D::IncompressibleState2D(ScalarField omega) : omega_(std::move(omega)) {
  const PeriodicGrid& g = omega_.grid();
  if (g.dimension() != 2) throw InvalidInput("incompressible state needs a 2D grid");
  if (g.axis(0).points != g.axis(1).points || g.axis(0).length != g.axis(1).length)
    throw InvalidInput("incompressible state needs a square grid");
  if (!omega_.all_finite()) throw InvalidInput("vorticity must be finite");
  const double scale = std::max(1.0, omega_.values().cwiseAbs().maxCoeff());
  if (std::abs(omega_.values().mean()) > kMeanTolerance * scale) throw InvalidInput("vorticity must have zero mean");
}

ScalarField IncompressibleState2D::streamfunction() const { return -1.0 * numerics::inverse_laplacian(omega_); }

VectorField IncompressibleState2D::velocity() const {
  const ScalarField psi = streamfunction();
  return VectorField::from_fields({spectral_derivative(psi, 1), -1.0 * spectral_derivative(psi, 0)});
}

ScalarField vorticity(const VectorField& u) {
  if (u.grid().dimension() != 2) throw InvalidInput("vorticity needs a 2D velocity");
  return spectral_derivative(component(u, 1), 0) - spectral_derivative(component(u, 0), 1);
}

double admissible_dt(const IncompressibleState2D& state) {
  const VectorField u = state.velocity();
  const double top = (u.component(0).cwiseAbs2() + u.component(1).cwiseAbs2()).cwiseSqrt().maxCoeff();
  return top > 0.0 ? kCourant * min_spacing(state.grid()) / top : std::numeric_limits<double>::infinity();
}

namespace {

// -u . grad(omega) with u and grad(omega) packed as the real and imaginary
// parts of one inverse transform each; dealiased and of zero mean.
ScalarField vorticity_rate(const ScalarField& omega) {
  const PeriodicGrid& grid = omega.grid();
  const ComplexField w = numerics::forward_transform(numerics::to_complex(omega));
  const Eigen::VectorXd kx = grid.wavenumbers(0, true);
  const Eigen::VectorXd ky = grid.wavenumbers(1, true);
  const Eigen::VectorXd kx2 = grid.wavenumbers(0, false);
  const Eigen::VectorXd ky2 = grid.wavenumbers(1, false);
  const Complex i(0.0, 1.0);
  ComplexField velocity(grid);
  ComplexField gradient(grid);
  for (Index n = 0; n < grid.size(); ++n) {
    const Index a = grid.index_along(n, 0);
    const Index b = grid.index_along(n, 1);
    const double k2 = kx2[a] * kx2[a] + ky2[b] * ky2[b];
    const Complex psi = k2 > 0.0 ? w[n] / k2 : Complex(0.0);
    velocity[n] = i * ky[b] * psi + i * (-i * kx[a] * psi);
    gradient[n] = i * kx[a] * w[n] + i * (i * ky[b] * w[n]);
  }
  const ComplexField u = numerics::inverse_transform(velocity);
  const ComplexField g = numerics::inverse_transform(gradient);
  ComplexField advection(grid);
  for (Index n = 0; n < grid.size(); ++n)
    advection[n] = -(u[n].real() * g[n].real() + u[n].imag() * g[n].imag());
  ComplexField rate = numerics::forward_transform(advection);
  rate[0] = 0.0;
  for (Index n = 0; n < grid.size(); ++n)
    for (Index axis = 0; axis < 2; ++axis) {
      const Index points = grid.axis(axis).points;
      const Index m = grid.index_along(n, axis);
      if (3 * std::min(m, points - m) > points) rate[n] = 0.0;
    }
  return numerics::real_part(numerics::inverse_transform(rate));
}

}  // namespace

IncompressibleState2D euler_step_2d(const IncompressibleState2D& state, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be positive");
  const double limit = admissible_dt(state);
  if (dt > limit) throw StepSizeError("Euler step violates the CFL bound", limit);
  const ScalarField& w0 = state.omega();
  const ScalarField k1 = vorticity_rate(w0);
  const ScalarField k2 = vorticity_rate(w0 + (0.5 * dt) * k1);
  const ScalarField k3 = vorticity_rate(w0 + (0.5 * dt) * k2);
  const ScalarField k4 = vorticity_rate(w0 + dt * k3);
  return IncompressibleState2D(w0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

double kinetic_energy(const VectorField& u) {
  std::vector<Eigen::VectorXd> comps;
  for (Index a = 0; a < u.dimension(); ++a) comps.push_back(u.component(a));
  return kinetic_from_components(comps, u.grid());
}

double kinetic_energy(const IncompressibleState2D& state) { return kinetic_energy(state.velocity()); }

double enstrophy(const IncompressibleState2D& state) {
  return 0.5 * state.omega().values().squaredNorm() * state.grid().cell_volume();
}

Diagnostics diagnose(const CompressibleState& state, double t) {
  Diagnostics d;
  d.t = t;
  d.energy = hamiltonian(state);
  if (state.grid().dimension() == 2)
    d.enstrophy = 0.5 * vorticity(state.velocity()).values().squaredNorm() * state.grid().cell_volume();
  d.mass = numerics::integrate(state.rho());
  d.entropy = numerics::integrate(state.sigma());
  return d;
}

Diagnostics diagnose(const IncompressibleState2D& state, double t) {
  return {t, kinetic_energy(state), enstrophy(state), state.grid().volume(), 0.0};
}

numerics::CsvTable diagnostics_table(const std::vector<Diagnostics>& rows) {
  numerics::CsvTable table;
  table.columns = {"t", "energy", "enstrophy", "mass", "entropy"};
  for (const auto& r : rows) table.add_row({r.t, r.energy, r.enstrophy, r.mass, r.entropy});
  return table;
}

}  // namespace protomech::fluids

#include "protomech/synchro/synchro.hpp"

#include "protomech/numerics/io.hpp"
#include "protomech/numerics/spectral.hpp"

#include <cmath>
#include <numbers>

namespace protomech::synchro {

using numerics::Complex;
using numerics::ComplexCovectorField;
using numerics::Values;

SynchronicityState::SynchronicityState(ComplexField e, ScalarField m, double hb)
    : eta(std::move(e)), mu(std::move(m)), hbar_bar(hb) {
  numerics::require_same_grid(eta.grid(), mu.grid(), "SynchronicityState");
  if (!(hbar_bar > 0.0)) throw InvalidInput("SynchronicityState: hbar_bar must be positive");
  if (!eta.all_finite() || !mu.all_finite()) throw InvalidInput("SynchronicityState: non-finite values");
  if (modulus_defect() > kModulusTolerance) throw InvalidState("SynchronicityState: eta is not unit-modulus");
}

SynchronicityState SynchronicityState::from_phase(const ScalarField& phase, ScalarField mu, double hbar) {
  const double hb = 0.5 * hbar;
  Values<Complex> e(phase.size());
  for (Index i = 0; i < phase.size(); ++i) e[i] = std::polar(1.0, phase[i] / hb);
  return SynchronicityState(ComplexField(phase.grid(), std::move(e)), std::move(mu), hb);
}

double SynchronicityState::modulus_defect() const {
  return (eta.values().cwiseAbs().array() - 1.0).abs().maxCoeff();
}

double SynchronicityState::total_measure() const { return numerics::integrate(mu); }

namespace {

// p and the relative imaginary residue for an eta that may be slightly off
// the unit circle (RK stages).
CovectorField phase_momentum(const ComplexField& eta, double hbar_bar, double* residue) {
  const ComplexCovectorField g = numerics::spectral_gradient(eta);
  CovectorField p(eta.grid());
  double worst = 0.0;
  for (Index a = 0; a < p.dimension(); ++a) {
    const Values<Complex> q = eta.values().conjugate().cwiseProduct(g.component(a)).cwiseQuotient(
        eta.values().cwiseAbs2().cast<Complex>());
    p.component(a) = hbar_bar * q.imag();
    const double scale = 1.0 + q.imag().cwiseAbs().maxCoeff();
    worst = std::max(worst, q.real().cwiseAbs().maxCoeff() / scale);
  }
  if (residue) *residue = worst;
  return p;
}

struct Rates {
  ComplexField deta;
  ScalarField dmu;
};

Rates rates(const ComplexField& eta, const ScalarField& mu, double hbar_bar, const GridHamiltonian& h) {
  const CovectorField p = phase_momentum(eta, hbar_bar, nullptr);
  const VectorField v = velocity_field(h, p);
  const ScalarField lag = lagrangian_density(h, p, v);
  const ComplexCovectorField g = numerics::spectral_gradient(eta);
  Values<Complex> de = Values<Complex>::Zero(eta.size());
  for (Index a = 0; a < v.dimension(); ++a) de -= v.component(a).cast<Complex>().cwiseProduct(g.component(a));
  de += (Complex(0.0, 1.0 / hbar_bar) * lag.values().cast<Complex>()).cwiseProduct(eta.values());

  VectorField flux(mu.grid());
  for (Index a = 0; a < v.dimension(); ++a) flux.component(a) = mu.values().cwiseProduct(v.component(a));
  ScalarField dm = numerics::divergence(flux);
  dm *= -1.0;
  return {ComplexField(eta.grid(), std::move(de)), std::move(dm)};
}

}  // namespace

CovectorField momentum_map(const SynchronicityState& state) {
  if (state.modulus_defect() > SynchronicityState::kModulusTolerance)
    throw InvalidState("momentum_map: eta is not unit-modulus");
  double residue = 0.0;
  CovectorField p = phase_momentum(state.eta, state.hbar_bar, &residue);
  if (residue > 1e-6) throw InvalidState("momentum_map: eta^{-1} d eta has a large real part");
  return p;
}

VectorField velocity_field(const GridHamiltonian& h, const CovectorField& p) {
  numerics::require_same_grid(h.grid(), p.grid(), "velocity_field");
  VectorField v(p.grid());
  std::vector<std::size_t> bad;
  for (Index i = 0; i < p.grid().size(); ++i) {
    const Point vi = h.momentum_partial(i, p.at(i));
    if (!vi.allFinite()) bad.push_back(static_cast<std::size_t>(i));
    v.set(i, vi);
  }
  if (!bad.empty()) throw DomainError("velocity_field: non-finite dH/dp", std::move(bad));
  return v;
}

ScalarField lagrangian_density(const GridHamiltonian& h, const CovectorField& p, const VectorField& v) {
  ScalarField lag(p.grid());
  for (Index i = 0; i < p.grid().size(); ++i) {
    const Point pi = p.at(i);
    lag[i] = v.at(i).dot(pi) - h.value(i, pi);
  }
  return lag;
}

double admissible_dt(const SynchronicityState& state, const GridHamiltonian& h) {
  const VectorField v = velocity_field(h, momentum_map(state));
  double limit = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < v.dimension(); ++a) {
    const double vmax = v.component(a).cwiseAbs().maxCoeff();
    if (vmax > 0.0) limit = std::min(limit, 0.5 * state.grid().axis(a).spacing() / vmax);
  }
  return limit;
}

SynchronicityState step(const SynchronicityState& s, const GridHamiltonian& h, double dt,
                        StepDiagnostics* diagnostics) {
  if (!(dt > 0.0)) throw InvalidInput("synchro::step: dt must be positive");
  numerics::require_same_grid(s.grid(), h.grid(), "synchro::step");
  const double limit = admissible_dt(s, h);
  if (dt > limit) throw StepSizeError("synchro::step: CFL violated", limit);

  const double hb = s.hbar_bar;
  const Rates k1 = rates(s.eta, s.mu, hb, h);
  const Rates k2 = rates(s.eta + 0.5 * dt * k1.deta, s.mu + 0.5 * dt * k1.dmu, hb, h);
  const Rates k3 = rates(s.eta + 0.5 * dt * k2.deta, s.mu + 0.5 * dt * k2.dmu, hb, h);
  const Rates k4 = rates(s.eta + dt * k3.deta, s.mu + dt * k3.dmu, hb, h);

  Values<Complex> eta = s.eta.values() + (dt / 6.0) * (k1.deta.values() + 2.0 * k2.deta.values() +
                                                       2.0 * k3.deta.values() + k4.deta.values());
  const Eigen::VectorXd mu = s.mu.values() + (dt / 6.0) * (k1.dmu.values() + 2.0 * k2.dmu.values() +
                                                          2.0 * k3.dmu.values() + k4.dmu.values());
  const Eigen::VectorXd mod = eta.cwiseAbs();
  const double correction = (mod.array() - 1.0).abs().maxCoeff();
  if (!(correction < 1e-8))
    throw IntegrationFault("synchro::step: unit-modulus drift " + std::to_string(correction) + " exceeds 1e-8");
  eta = eta.cwiseQuotient(mod.cast<Complex>());
  if (diagnostics) {
    diagnostics->renormalization = correction;
    diagnostics->max_speed = 0.0;
    const VectorField v = velocity_field(h, momentum_map(s));
    for (Index a = 0; a < v.dimension(); ++a)
      diagnostics->max_speed = std::max(diagnostics->max_speed, v.component(a).cwiseAbs().maxCoeff());
  }
  return SynchronicityState(ComplexField(s.grid(), std::move(eta)), ScalarField(s.grid(), mu), hb);
}

double energy_functional(const SynchronicityState& state, const GridHamiltonian& h) {
  const CovectorField p = momentum_map(state);
  ScalarField e(state.grid());
  for (Index i = 0; i < e.size(); ++i) e[i] = state.mu[i] == 0.0 ? 0.0 : state.mu[i] * h.value(i, p.at(i));
  return numerics::integrate(e);
}

ScalarField emergence_frequency(const SynchronicityState& state, const ScalarField& nu) {
  numerics::require_same_grid(state.grid(), nu.grid(), "emergence_frequency");
  ScalarField f(nu.grid());
  std::vector<std::size_t> bad;
  for (Index i = 0; i < f.size(); ++i) {
    if (nu[i] != 0.0)
      f[i] = state.mu[i] / nu[i];
    else if (state.mu[i] != 0.0)
      bad.push_back(static_cast<std::size_t>(i));
  }
  if (!bad.empty()) throw DomainError("emergence_frequency: nu vanishes where mu does not", std::move(bad));
  return f;
}

double winding_number(const SynchronicityState& state, Index axis, Index start) {
  const auto& g = state.grid();
  const Index n = g.axis(axis).points;
  const Index stride = g.stride(axis);
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    const Complex a = state.eta[start + j * stride];
    const Complex b = state.eta[start + ((j + 1) % n) * stride];
    total += std::arg(b * std::conj(a));
  }
  return total / (2.0 * std::numbers::pi);
}

double circulation(const CovectorField& p, Index axis, Index start) {
  const auto& g = p.grid();
  const Index n = g.axis(axis).points;
  const Index stride = g.stride(axis);
  double total = 0.0;
  for (Index j = 0; j < n; ++j) total += p.component(axis)[start + j * stride];
  return total * g.axis(axis).spacing();
}

double max_curl(const CovectorField& p) {
  double worst = 0.0;
  for (Index a = 0; a < p.dimension(); ++a)
    for (Index b = a + 1; b < p.dimension(); ++b) {
      const Eigen::VectorXd c = numerics::spectral_derivative(p.component_field(b), a).values() -
                                numerics::spectral_derivative(p.component_field(a), b).values();
      worst = std::max(worst, c.cwiseAbs().maxCoeff());
    }
  return worst;
}

void write_state(const std::filesystem::path& stem, const SynchronicityState& state) {
  numerics::write_field_snapshot(stem, state.grid(),
                                 {{"eta_re", state.eta.values().real()},
                                  {"eta_im", state.eta.values().imag()},
                                  {"mu", state.mu.values()}});
}

SynchronicityState read_state(const std::filesystem::path& stem, double hbar_bar) {
  const numerics::FieldSnapshot snap = numerics::read_field_snapshot(stem);
  Values<Complex> e(snap.grid.size());
  e.real() = snap.value("eta_re");
  e.imag() = snap.value("eta_im");
  return SynchronicityState(ComplexField(snap.grid, std::move(e)), ScalarField(snap.grid, snap.value("mu")),
                            hbar_bar);
}

}  // namespace protomech::synchro

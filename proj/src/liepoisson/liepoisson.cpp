#include "protomech/liepoisson/liepoisson.hpp"

#include "protomech/numerics/io.hpp"
#include "protomech/numerics/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace protomech::liepoisson {

using numerics::spectral_derivative;
using numerics::Values;

namespace {

void require_dimension(const PeriodicGrid& grid, Index components, const char* where) {
  if (components != grid.dimension()) throw InvalidInput(std::string(where) + ": component count must equal grid dimension");
}

Values<double> derivative(const Values<double>& f, const PeriodicGrid& g, Index axis) {
  return spectral_derivative(ScalarField(g, f), axis).values();
}

// (a . grad) b for vector b.
VectorField advective(const VectorField& a, const VectorField& b) {
  const PeriodicGrid& g = a.grid();
  VectorField out(g);
  for (Index k = 0; k < g.dimension(); ++k) {
    for (Index j = 0; j < g.dimension(); ++j)
      out.component(j) += a.component(k).cwiseProduct(derivative(b.component(j), g, k));
  }
  return out;
}

Values<double> directional(const VectorField& a, const ScalarField& f) {
  const PeriodicGrid& g = a.grid();
  Values<double> out = Values<double>::Zero(g.size());
  for (Index k = 0; k < g.dimension(); ++k) out += a.component(k).cwiseProduct(derivative(f.values(), g, k));
  return out;
}

Generator hamiltonian_generator(const GridHamiltonian& h, const EmergenceMomentum& J) {
  const PeriodicGrid& g = J.grid();
  if (!(h.grid() == g)) throw InvalidInput("lie_poisson_step: Hamiltonian grid differs from J");
  const CovectorField p = J.momentum();
  VectorField v(g);
  ScalarField U(g);
  for (Index i = 0; i < g.size(); ++i) {
    const Point pi = p.at(i);
    const Point vi = h.momentum_partial(i, pi);
    if (!vi.allFinite()) throw DomainError("lie_poisson_step: non-finite velocity", {static_cast<std::size_t>(i)});
    v.set(i, vi);
    U[i] = h.value(i, pi) - pi.dot(vi);
  }
  return Generator(std::move(v), std::move(U));
}

void check_courant(const VectorField& v, double dt) {
  const PeriodicGrid& g = v.grid();
  double limit = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < g.dimension(); ++a) {
    const double vmax = v.component(a).cwiseAbs().maxCoeff();
    if (vmax > 0.0) limit = std::min(limit, 0.5 * g.axis(a).spacing() / vmax);
  }
  if (dt > limit) throw StepSizeError("lie_poisson_step: CFL violated", limit);
}

void check_sign_flips(const ScalarField& before, const ScalarField& after) {
  const double scale = std::max(before.values().cwiseAbs().maxCoeff(), after.values().cwiseAbs().maxCoeff());
  const double floor = kSignFlipFraction * scale;
  std::vector<std::size_t> bad;
  for (Index i = 0; i < before.size(); ++i)
    if (before[i] * after[i] < 0.0 && std::abs(before[i]) > floor && std::abs(after[i]) > floor)
      bad.push_back(static_cast<std::size_t>(i));
  if (!bad.empty())
    throw IntegrationFault("emergence density changed sign discontinuously at " + std::to_string(bad.size()) +
                           " points");
}

template <typename Rate>
EmergenceMomentum rk4(const EmergenceMomentum& J, const Rate& rate, double dt);

}  // namespace

EmergenceMomentum advance(const EmergenceMomentum& J, const MomentumRate& k, double s) {
  return EmergenceMomentum(J.momentum_density() + s * k.momentum_density, J.density() + s * k.density,
                           EmergenceMomentum::Unchecked{});
}

namespace {

template <typename Rate>
EmergenceMomentum rk4(const EmergenceMomentum& J, const Rate& rate, double dt) {
  const MomentumRate k1 = rate(J);
  const MomentumRate k2 = rate(advance(J, k1, 0.5 * dt));
  const MomentumRate k3 = rate(advance(J, k2, 0.5 * dt));
  const MomentumRate k4 = rate(advance(J, k3, dt));
  CovectorField m = J.momentum_density() +
                    (dt / 6.0) * (k1.momentum_density + 2.0 * k2.momentum_density + 2.0 * k3.momentum_density +
                                  k4.momentum_density);
  ScalarField rho = J.density() + (dt / 6.0) * (k1.density + 2.0 * k2.density + 2.0 * k3.density + k4.density);
  check_sign_flips(J.density(), rho);
  return EmergenceMomentum(std::move(m), std::move(rho));
}

}  // namespace

Generator::Generator(VectorField v_, ScalarField U_) : v(std::move(v_)), U(std::move(U_)) {
  numerics::require_same_grid(v.grid(), U.grid(), "Generator");
  require_dimension(U.grid(), v.dimension(), "Generator");
}

Generator Generator::zero(const PeriodicGrid& grid) { return Generator(VectorField(grid), ScalarField(grid)); }

Generator Generator::constant(const PeriodicGrid& grid, double c) {
  return Generator(VectorField(grid), ScalarField::constant(grid, c));
}

double Generator::max_abs() const { return std::max(v.max_abs(), U.values().cwiseAbs().maxCoeff()); }

Generator& Generator::operator+=(const Generator& o) {
  v += o.v;
  U += o.U;
  return *this;
}

Generator& Generator::operator-=(const Generator& o) {
  v -= o.v;
  U -= o.U;
  return *this;
}

Generator& Generator::operator*=(double s) {
  v *= s;
  U *= s;
  return *this;
}

MomentumRate::MomentumRate(CovectorField m, ScalarField rho) : momentum_density(std::move(m)), density(std::move(rho)) {
  numerics::require_same_grid(momentum_density.grid(), density.grid(), "MomentumRate");
  require_dimension(density.grid(), momentum_density.dimension(), "MomentumRate");
}

MomentumRate MomentumRate::zero(const PeriodicGrid& grid) { return MomentumRate(CovectorField(grid), ScalarField(grid)); }

EmergenceMomentum::EmergenceMomentum(CovectorField m, ScalarField rho, Unchecked)
    : momentum_density_(std::move(m)), density_(std::move(rho)) {}

EmergenceMomentum::EmergenceMomentum(CovectorField m, ScalarField rho)
    : momentum_density_(std::move(m)), density_(std::move(rho)) {
  numerics::require_same_grid(momentum_density_.grid(), density_.grid(), "EmergenceMomentum");
  require_dimension(density_.grid(), momentum_density_.dimension(), "EmergenceMomentum");
  if (!density_.all_finite()) throw InvalidInput("EmergenceMomentum: non-finite density");
  for (Index a = 0; a < momentum_density_.dimension(); ++a)
    if (!momentum_density_.component(a).allFinite()) throw InvalidInput("EmergenceMomentum: non-finite momentum density");
  const double total = numerics::integrate(density_);
  if (std::abs(total - 1.0) > kNormTolerance)
    throw InvalidState("EmergenceMomentum: density integrates to " + numerics::format_double(total) + ", not 1");
  const double mscale = momentum_density_.max_abs();
  for (Index i = 0; i < density_.size(); ++i)
    if (density_[i] == 0.0 && momentum_density_.at(i).cwiseAbs().maxCoeff() > 1e-12 * mscale)
      throw InvalidState("EmergenceMomentum: momentum density is nonzero where the density vanishes");
}

EmergenceMomentum EmergenceMomentum::from_momentum(const ScalarField& density, const CovectorField& momentum) {
  numerics::require_same_grid(density.grid(), momentum.grid(), "EmergenceMomentum::from_momentum");
  CovectorField m = momentum;
  for (Index a = 0; a < m.dimension(); ++a) m.component(a) = m.component(a).cwiseProduct(density.values());
  return EmergenceMomentum(std::move(m), density);
}

EmergenceMomentum EmergenceMomentum::from_synchronicity(const synchro::SynchronicityState& state) {
  return from_momentum(state.mu, synchro::momentum_map(state));
}

CovectorField EmergenceMomentum::momentum() const {
  const PeriodicGrid& g = grid();
  const double floor = kVacuumFraction * density_.values().cwiseAbs().maxCoeff();
  CovectorField p(g);
  for (Index i = 0; i < g.size(); ++i) {
    if (std::abs(density_[i]) <= floor) continue;
    for (Index a = 0; a < g.dimension(); ++a) p.component(a)[i] = momentum_density_.component(a)[i] / density_[i];
  }
  return p;
}

ScalarField EmergenceMomentum::support() const {
  const double floor = kVacuumFraction * density_.values().cwiseAbs().maxCoeff();
  return ScalarField(grid(), (density_.values().cwiseAbs().array() > floor).cast<double>().matrix());
}

double EmergenceMomentum::total() const { return numerics::integrate(density_); }

Generator bracket(const Generator& a, const Generator& b) {
  numerics::require_same_grid(a.grid(), b.grid(), "bracket");
  VectorField v = advective(a.v, b.v) - advective(b.v, a.v);
  ScalarField U(a.grid(), directional(a.v, b.U) - directional(b.v, a.U));
  return Generator(std::move(v), std::move(U));
}

double jacobi_residual(const Generator& a, const Generator& b, const Generator& c) {
  const Generator sum = bracket(bracket(a, b), c) + bracket(bracket(b, c), a) + bracket(bracket(c, a), b);
  return sum.max_abs();
}

MomentumRate ad_star(const Generator& V, const EmergenceMomentum& J) {
  numerics::require_same_grid(V.grid(), J.grid(), "ad_star");
  const PeriodicGrid& g = J.grid();
  const Index d = g.dimension();
  const Values<double>& rho = J.density().values();
  const CovectorField& m = J.momentum_density();

  VectorField flux(g);
  for (Index j = 0; j < d; ++j) flux.component(j) = V.v.component(j).cwiseProduct(rho);
  ScalarField drho = -1.0 * numerics::divergence(flux);

  CovectorField dm(g);
  const CovectorField dU = numerics::spectral_gradient(V.U);
  for (Index k = 0; k < d; ++k) {
    for (Index j = 0; j < d; ++j) flux.component(j) = V.v.component(j).cwiseProduct(m.component(k));
    Values<double> r = -numerics::divergence(flux).values() - rho.cwiseProduct(dU.component(k));
    for (Index j = 0; j < d; ++j) r -= m.component(j).cwiseProduct(derivative(V.v.component(j), g, k));
    dm.component(k) = std::move(r);
  }
  return MomentumRate(std::move(dm), std::move(drho));
}

double pairing(const MomentumRate& K, const Generator& G) {
  numerics::require_same_grid(K.grid(), G.grid(), "pairing");
  Values<double> density = K.density.values().cwiseProduct(G.U.values());
  for (Index a = 0; a < G.v.dimension(); ++a) density += K.momentum_density.component(a).cwiseProduct(G.v.component(a));
  return numerics::integrate(ScalarField(G.grid(), density));
}

double pairing(const EmergenceMomentum& J, const Generator& G) {
  return pairing(MomentumRate(J.momentum_density(), J.density()), G);
}

double coadjoint_duality_residual(const EmergenceMomentum& J, const Generator& a, const Generator& b) {
  return std::abs(pairing(ad_star(a, J), b) - pairing(J, bracket(a, b)));
}

int LocalFunctional::order() const {
  if (hessian_partial) return 2;
  if (gradient_partial) return 1;
  return 0;
}

LocalFunctional LocalFunctional::hamiltonian(const GridHamiltonian& h) {
  LocalFunctional f;
  f.value = [h](const MomentumJet& jet) { return h.value(jet.point, jet.p); };
  f.momentum_partial = [h](const MomentumJet& jet) { return h.momentum_partial(jet.point, jet.p); };
  return f;
}

LocalFunctional LocalFunctional::constant(double c) {
  LocalFunctional f;
  f.value = [c](const MomentumJet&) { return c; };
  f.momentum_partial = [](const MomentumJet& jet) { return Point::Zero(jet.p.size()); };
  return f;
}

namespace {

std::vector<MomentumJet> jets(const EmergenceMomentum& J, int order) {
  const PeriodicGrid& g = J.grid();
  const Index d = g.dimension();
  const CovectorField p = J.momentum();
  // dp[i][j] = d_i p_j, ddp[j][i][k] = d_i d_k p_j
  std::vector<std::vector<Values<double>>> dp;
  std::vector<std::vector<std::vector<Values<double>>>> ddp;
  if (order >= 1) {
    dp.assign(static_cast<std::size_t>(d), {});
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) dp[i].push_back(derivative(p.component(j), g, i));
  }
  if (order >= 2) {
    ddp.assign(static_cast<std::size_t>(d), std::vector<std::vector<Values<double>>>(static_cast<std::size_t>(d)));
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i)
        for (Index k = 0; k < d; ++k)
          ddp[j][i].push_back(derivative(dp[k][j], g, i));
  }
  std::vector<MomentumJet> out(static_cast<std::size_t>(g.size()));
  for (Index n = 0; n < g.size(); ++n) {
    MomentumJet& jet = out[static_cast<std::size_t>(n)];
    jet.point = n;
    jet.x = g.point(n);
    jet.p = p.at(n);
    jet.dp = Eigen::MatrixXd::Zero(d, d);
    if (order >= 1)
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) jet.dp(i, j) = dp[i][j][n];
    if (order >= 2) {
      jet.ddp.assign(static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(d, d));
      for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i)
          for (Index k = 0; k < d; ++k) jet.ddp[j](i, k) = ddp[j][i][k][n];
    }
  }
  return out;
}

}  // namespace

double functional_value(const LocalFunctional& F, const EmergenceMomentum& J) {
  if (!F.value) throw InvalidInput("functional_value: functional has no value");
  const std::vector<MomentumJet> js = jets(J, F.order());
  ScalarField f(J.grid());
  for (Index i = 0; i < J.grid().size(); ++i) f[i] = J.density()[i] * F.value(js[static_cast<std::size_t>(i)]);
  return numerics::integrate(f);
}

FunctionalGenerator generator_from_functional(const LocalFunctional& F, const EmergenceMomentum& J) {
  if (!F.value || !F.momentum_partial) throw InvalidInput("generator_from_functional: value and momentum partial required");
  const PeriodicGrid& g = J.grid();
  const Index d = g.dimension();
  const int order = F.order();
  const std::vector<MomentumJet> js = jets(J, order);
  const Values<double>& rho = J.density().values();
  const ScalarField support = J.support();

  VectorField v(g);
  ScalarField value(g);
  // rho-weighted partials in the derivatives of p, differentiated afterwards
  std::vector<std::vector<Values<double>>> grad_terms(static_cast<std::size_t>(d));
  std::vector<std::vector<std::vector<Values<double>>>> hess_terms(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j) {
    if (order >= 1) grad_terms[j].assign(static_cast<std::size_t>(d), Values<double>::Zero(g.size()));
    if (order >= 2)
      hess_terms[j].assign(static_cast<std::size_t>(d),
                           std::vector<Values<double>>(static_cast<std::size_t>(d), Values<double>::Zero(g.size())));
  }
  for (Index n = 0; n < g.size(); ++n) {
    const MomentumJet& jet = js[static_cast<std::size_t>(n)];
    value[n] = F.value(jet);
    const Point fp = F.momentum_partial(jet);
    if (fp.size() != d) throw InvalidInput("generator_from_functional: momentum partial has wrong size");
    v.set(n, fp);
    if (order >= 1) {
      const Eigen::MatrixXd fg = F.gradient_partial(jet);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) grad_terms[j][i][n] = rho[n] * fg(i, j);
    }
    if (order >= 2) {
      const std::vector<Eigen::MatrixXd> fh = F.hessian_partial(jet);
      for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i)
          for (Index k = 0; k < d; ++k) hess_terms[j][i][k][n] = rho[n] * fh[j](i, k);
    }
  }

  Index masked = 0;
  for (Index j = 0; j < d; ++j) {
    Values<double> correction = Values<double>::Zero(g.size());
    if (order >= 1)
      for (Index i = 0; i < d; ++i) correction -= derivative(grad_terms[j][i], g, i);
    if (order >= 2)
      for (Index i = 0; i < d; ++i)
        for (Index k = 0; k < d; ++k) correction += derivative(derivative(hess_terms[j][i][k], g, k), g, i);
    if (order >= 1)
      for (Index n = 0; n < g.size(); ++n)
        if (support[n] > 0.0) v.component(j)[n] += correction[n] / rho[n];
  }

  const CovectorField p = J.momentum();
  ScalarField U(g);
  for (Index n = 0; n < g.size(); ++n) {
    if (support[n] == 0.0) {
      ++masked;
      v.set(n, Point::Zero(d));
      continue;
    }
    U[n] = value[n] - p.at(n).dot(v.at(n));
  }

  FunctionalGenerator out{Generator(std::move(v), std::move(U)), masked};
  const double expected = numerics::integrate(ScalarField(g, rho.cwiseProduct(value.values())));
  const double scale = numerics::integrate(ScalarField(g, rho.cwiseProduct(value.values()).cwiseAbs()));
  const double got = pairing(J, out.generator);
  if (std::abs(got - expected) > kPairingTolerance * std::max(1.0, scale))
    throw InvalidState("generator_from_functional: pairing identity violated by " +
                       numerics::format_double(std::abs(got - expected)));
  return out;
}

double admissible_dt(const EmergenceMomentum& J, const GridHamiltonian& h) {
  const Generator H = hamiltonian_generator(h, J);
  double limit = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < J.grid().dimension(); ++a) {
    const double vmax = H.v.component(a).cwiseAbs().maxCoeff();
    if (vmax > 0.0) limit = std::min(limit, 0.5 * J.grid().axis(a).spacing() / vmax);
  }
  return limit;
}

EmergenceMomentum lie_poisson_step(const EmergenceMomentum& J, const GridHamiltonian& h, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("lie_poisson_step: dt must be positive");
  check_courant(hamiltonian_generator(h, J).v, dt);
  return rk4(J, [&](const EmergenceMomentum& s) { return ad_star(hamiltonian_generator(h, s), s); }, dt);
}

EmergenceMomentum custom_generator_step(const EmergenceMomentum& J, const UpdateRule& rule, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("custom_generator_step: dt must be positive");
  if (!rule) throw InvalidInput("custom_generator_step: empty rule");
  return rk4(J,
             [&](const EmergenceMomentum& s) {
               MomentumRate r = rule(s);
               if (!(r.grid() == s.grid()))
                 throw InvalidInput("custom_generator_step: rule returned a field on a different grid");
               return r;
             },
             dt);
}

double energy(const EmergenceMomentum& J, const GridHamiltonian& h) {
  if (!(h.grid() == J.grid())) throw InvalidInput("energy: Hamiltonian grid differs from J");
  const CovectorField p = J.momentum();
  ScalarField f(J.grid());
  for (Index i = 0; i < f.size(); ++i) f[i] = J.density()[i] * h.value(i, p.at(i));
  return numerics::integrate(f);
}

void write_momentum(const std::filesystem::path& path, const EmergenceMomentum& J) {
  const PeriodicGrid& g = J.grid();
  const Index d = g.dimension();
  numerics::CsvTable t;
  auto suffix = [d](Index a) { return d == 1 ? std::string() : std::to_string(a); };
  for (Index a = 0; a < d; ++a) t.columns.push_back("x" + suffix(a));
  t.columns.push_back("rho");
  for (Index a = 0; a < d; ++a) t.columns.push_back("rho_p" + suffix(a));
  for (Index i = 0; i < g.size(); ++i) {
    std::vector<double> row;
    for (Index a = 0; a < d; ++a) row.push_back(g.coordinate(i, a));
    row.push_back(J.density()[i]);
    for (Index a = 0; a < d; ++a) row.push_back(J.momentum_density().component(a)[i]);
    t.add_row(std::move(row));
  }
  numerics::write_csv(path, t);
}

}  // namespace protomech::liepoisson

#include "protomech/bridge/bridge.hpp"

#include "protomech/numerics/io.hpp"
#include "protomech/numerics/spectral.hpp"

#include <cmath>
#include <string>

namespace protomech::bridge {

namespace {

using numerics::Complex;
using numerics::ComplexField;
using numerics::Values;

// Spectral derivatives of psi up to the order needed.
struct Jet {
  Index d = 0;
  Values<Complex> psi;
  std::vector<Values<Complex>> d1;  // [k]
  std::vector<Values<Complex>> d2;  // [k * d + j]
  std::vector<Values<Complex>> d3;  // [(i * d + k) * d + j]

  Jet(const ComplexField& f, int order) : d(f.grid().dimension()), psi(f.values()) {
    const PeriodicGrid& g = f.grid();
    for (Index k = 0; k < d; ++k) d1.push_back(numerics::spectral_derivative(f, k).values());
    if (order < 2) return;
    for (Index k = 0; k < d; ++k)
      for (Index j = 0; j < d; ++j)
        d2.push_back(numerics::spectral_derivative(ComplexField(g, d1[static_cast<std::size_t>(j)]), k).values());
    if (order < 3) return;
    for (Index i = 0; i < d; ++i)
      for (Index k = 0; k < d; ++k)
        for (Index j = 0; j < d; ++j)
          d3.push_back(
              numerics::spectral_derivative(ComplexField(g, d2[static_cast<std::size_t>(k * d + j)]), i).values());
  }

  Complex first(Index k, Index pt) const { return d1[static_cast<std::size_t>(k)][pt]; }
  Complex second(Index k, Index j, Index pt) const { return d2[static_cast<std::size_t>(k * d + j)][pt]; }
  Complex third(Index i, Index k, Index j, Index pt) const {
    return d3[static_cast<std::size_t>((i * d + k) * d + j)][pt];
  }
};

// Logarithmic derivatives at one point: w_k = psi_k / psi and
// W_kj = d_k w_j = psi_kj / psi - w_k w_j.
struct LogDerivatives {
  Eigen::VectorXcd w;
  Eigen::MatrixXcd W;

  LogDerivatives(const Jet& jet, Index pt) : w(jet.d), W(jet.d, jet.d) {
    const Complex psi = jet.psi[pt];
    for (Index k = 0; k < jet.d; ++k) w[k] = jet.first(k, pt) / psi;
    for (Index k = 0; k < jet.d; ++k)
      for (Index j = 0; j < jet.d; ++j) W(k, j) = jet.second(k, j, pt) / psi - w[k] * w[j];
  }
};

std::vector<char> node_mask(const Values<Complex>& psi) {
  const double peak = psi.cwiseAbs().maxCoeff();
  std::vector<char> ok(static_cast<std::size_t>(psi.size()));
  for (Index i = 0; i < psi.size(); ++i) ok[static_cast<std::size_t>(i)] = std::abs(psi[i]) >= kNodeFraction * peak;
  return ok;
}

// Removes every point within `collar` cells (box neighbourhood) of an excluded one.
std::vector<char> shrink(const std::vector<char>& ok, const PeriodicGrid& g, Index collar) {
  std::vector<char> out = ok;
  const Index d = g.dimension();
  Index span = 1;
  for (Index a = 0; a < d; ++a) span *= 2 * collar + 1;
  for (Index i = 0; i < g.size(); ++i) {
    if (ok[static_cast<std::size_t>(i)]) continue;
    for (Index n = 0; n < span; ++n) {
      Index rest = n, flat = 0;
      for (Index a = d - 1; a >= 0; --a) {
        const Index off = rest % (2 * collar + 1) - collar;
        rest /= 2 * collar + 1;
        const Index np = g.axis(a).points;
        flat += ((g.index_along(i, a) + off) % np + np) % np * g.stride(a);
      }
      out[static_cast<std::size_t>(flat)] = 0;
    }
  }
  return out;
}

MadelungFields decompose(const WaveFunction& psi, const Eigen::MatrixXd& metric, const CovectorField& a,
                         const std::vector<char>& ok) {
  const PeriodicGrid& g = psi.grid();
  const Index d = g.dimension();
  const double hbar = psi.hbar;
  const Jet jet(psi.values, 2);
  MadelungFields m{ScalarField(g), CovectorField(g), VectorField(g), {}, ScalarField(g)};
  for (Index k = 0; k < d * d; ++k) m.stress_q.emplace_back(g);
  for (Index pt = 0; pt < g.size(); ++pt) {
    m.rho_bar[pt] = std::norm(psi.values[pt]);
    if (!ok[static_cast<std::size_t>(pt)]) continue;
    m.support[pt] = 1.0;
    const LogDerivatives ld(jet, pt);
    const Eigen::VectorXd p = hbar * ld.w.imag();
    m.p_bar.set(pt, p);
    m.v_bar.set(pt, metric * (p + a.at(pt)));
    const Eigen::MatrixXd t = 0.5 * hbar * hbar * m.rho_bar[pt] * metric * ld.W.real();
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) m.stress_q[static_cast<std::size_t>(i * d + j)][pt] = t(i, j);
  }
  return m;
}

std::vector<Index> failing_points(const std::vector<char>& bad) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < bad.size(); ++i)
    if (bad[i]) out.push_back(static_cast<Index>(i));
  return out;
}

std::vector<std::size_t> to_size(const std::vector<Index>& v) { return std::vector<std::size_t>(v.begin(), v.end()); }

}  // namespace

MadelungFields madelung_decompose(const WaveFunction& psi) {
  const PeriodicGrid& g = psi.grid();
  const Eigen::MatrixXd metric = Eigen::MatrixXd::Identity(g.dimension(), g.dimension()) / psi.mass;
  return decompose(psi, metric, CovectorField(g), node_mask(psi.values.values()));
}

MadelungFields madelung_decompose(const WaveFunction& psi, const CanonicalHamiltonian& h) {
  require_same_grid(psi.grid(), h.grid(), "madelung_decompose");
  return decompose(psi, h.metric, h.vector_potential, node_mask(psi.values.values()));
}

MadelungFields madelung_decompose(const WaveFunction& psi, const CanonicalHamiltonian& h,
                                  const std::vector<Index>& points) {
  require_same_grid(psi.grid(), h.grid(), "madelung_decompose");
  std::vector<char> ok(static_cast<std::size_t>(psi.grid().size()), 0);
  std::vector<std::size_t> nodes;
  for (Index pt : points) {
    if (pt < 0 || pt >= psi.grid().size()) throw InvalidInput("madelung_decompose: point outside grid");
    if (std::abs(psi.values[pt]) <= 1e-12) nodes.push_back(static_cast<std::size_t>(pt));
    ok[static_cast<std::size_t>(pt)] = 1;
  }
  if (!nodes.empty())
    throw DomainError("madelung_decompose: " + std::to_string(nodes.size()) + " node(s) in the evaluation set",
                      nodes);
  return decompose(psi, h.metric, h.vector_potential, ok);
}

HydroResidual hydrodynamic_residual(const std::vector<WaveFunction>& series, const CanonicalHamiltonian& h,
                                    double dt) {
  return hydrodynamic_residual(series, h, dt, numerics::spectral_gradient(h.scalar_potential));
}

HydroResidual hydrodynamic_residual(const std::vector<WaveFunction>& series, const CanonicalHamiltonian& h,
                                    double dt, const CovectorField& grad_u) {
  if (series.size() < 3) throw InvalidInput("hydrodynamic_residual: need at least three frames");
  if (!(dt > 0.0)) throw InvalidInput("hydrodynamic_residual: dt must be positive");
  const PeriodicGrid& g = series.front().grid();
  require_same_grid(g, h.grid(), "hydrodynamic_residual");
  require_same_grid(g, grad_u.grid(), "hydrodynamic_residual");
  const Index d = g.dimension();
  const double hbar = series.front().hbar;
  const Eigen::MatrixXd& metric = h.metric;

  // Node crossings: a point that is a hard node in one frame and inside the
  // support in another.
  std::vector<char> hard(static_cast<std::size_t>(g.size()), 0), soft(static_cast<std::size_t>(g.size()), 0);
  for (const auto& f : series) {
    require_same_grid(g, f.grid(), "hydrodynamic_residual");
    const double peak = f.values.values().cwiseAbs().maxCoeff();
    for (Index i = 0; i < g.size(); ++i) {
      const double r = std::abs(f.values[i]);
      if (r <= 1e-12 * peak) hard[static_cast<std::size_t>(i)] = 1;
      if (r >= kNodeFraction * peak) soft[static_cast<std::size_t>(i)] = 1;
    }
  }
  std::vector<char> crossing(hard.size());
  for (std::size_t i = 0; i < hard.size(); ++i) crossing[i] = hard[i] && soft[i];
  const auto crossed = failing_points(crossing);
  if (!crossed.empty())
    throw DomainError("hydrodynamic_residual: node crossing at " + std::to_string(crossed.size()) + " point(s)",
                      to_size(crossed));

  std::vector<CovectorField> grad_a;
  for (Index k = 0; k < d; ++k)
    grad_a.push_back(numerics::spectral_gradient(h.vector_potential.component_field(k)));  // grad_a[k](i) = d_i A_k

  auto rho_of = [](const WaveFunction& f) { return Values<double>(f.values.values().cwiseAbs2()); };
  auto current_of = [&](const WaveFunction& f, const Jet& jet, Index j) {
    return Values<double>(hbar * (f.values.values().conjugate().cwiseProduct(jet.d1[static_cast<std::size_t>(j)])).imag());
  };

  HydroResidual out;
  std::vector<Jet> jets;
  jets.reserve(series.size());
  for (std::size_t n = 0; n < series.size(); ++n) jets.emplace_back(series[n].values, n == 0 || n + 1 == series.size() ? 1 : 3);

  for (std::size_t n = 1; n + 1 < series.size(); ++n) {
    std::vector<char> ok = node_mask(series[n].values.values());
    for (std::size_t s : {n - 1, n + 1}) {
      const auto other = node_mask(series[s].values.values());
      for (std::size_t i = 0; i < ok.size(); ++i) ok[i] = ok[i] && other[i];
    }
    ok = shrink(ok, g, kNodeCollar);

    const Values<double> drho = (rho_of(series[n + 1]) - rho_of(series[n - 1])) / (2.0 * dt);
    std::vector<Values<double>> dcur;
    for (Index j = 0; j < d; ++j)
      dcur.push_back((current_of(series[n + 1], jets[n + 1], j) - current_of(series[n - 1], jets[n - 1], j)) /
                     (2.0 * dt));

    const Jet& jet = jets[n];
    double worst_c = 0.0, worst_m = 0.0;
    for (Index pt = 0; pt < g.size(); ++pt) {
      if (!ok[static_cast<std::size_t>(pt)]) continue;
      const double rho = std::norm(jet.psi[pt]);
      const LogDerivatives ld(jet, pt);
      const Eigen::VectorXd p = hbar * ld.w.imag();
      const Eigen::VectorXd a = h.vector_potential.at(pt);
      const Eigen::VectorXd v = metric * (p + a);
      const Eigen::VectorXd grad_rho = 2.0 * rho * ld.w.real();
      const Eigen::MatrixXd grad_p = hbar * ld.W.imag();  // (i, j) = d_i p_j
      Eigen::MatrixXd da(d, d);                            // (i, k) = d_i A_k
      for (Index i = 0; i < d; ++i)
        for (Index k = 0; k < d; ++k) da(i, k) = grad_a[static_cast<std::size_t>(k)].component(i)[pt];

      // d_i (rho v^i) with v^i = h^{ik} (p_k + A_k)
      double div_flux = 0.0;
      for (Index i = 0; i < d; ++i)
        for (Index k = 0; k < d; ++k)
          div_flux += metric(i, k) * (grad_rho[i] * (p[k] + a[k]) + rho * (grad_p(i, k) + da(i, k)));
      worst_c = std::max(worst_c, std::abs(drho[pt] + div_flux));

      for (Index j = 0; j < d; ++j) {
        double transport = div_flux * p[j];
        for (Index i = 0; i < d; ++i) transport += rho * v[i] * grad_p(i, j);
        double lorentz = 0.0;
        for (Index i = 0; i < d; ++i) lorentz += rho * v[i] * da(j, i);
        // d_i T^i_j with T^i_j = (hbar^2 / 2) h^{ik} rho Re W_kj
        double div_stress = 0.0;
        for (Index i = 0; i < d; ++i)
          for (Index k = 0; k < d; ++k) {
            if (metric(i, k) == 0.0) continue;
            const Complex psi = jet.psi[pt];
            const Complex dW = jet.third(i, k, j, pt) / psi - ld.w[i] * jet.second(k, j, pt) / psi -
                               ld.W(i, k) * ld.w[j] - ld.w[k] * ld.W(i, j);
            div_stress += metric(i, k) * (grad_rho[i] * ld.W(k, j).real() + rho * dW.real());
          }
        div_stress *= 0.5 * hbar * hbar;
        const double r = dcur[static_cast<std::size_t>(j)][pt] + transport + rho * grad_u.component(j)[pt] +
                         lorentz - div_stress;
        worst_m = std::max(worst_m, std::abs(r));
      }
    }
    out.continuity_series.push_back(worst_c);
    out.momentum_series.push_back(worst_m);
    out.continuity = std::max(out.continuity, worst_c);
    out.momentum = std::max(out.momentum, worst_m);
  }
  return out;
}

ConvergenceStudy hydrodynamic_convergence(const WaveFunction& psi0, const CanonicalHamiltonian& h, double dt,
                                          double t_end, const CovectorField& potential_gradient) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidInput("hydrodynamic_convergence: dt and t_end must be positive");
  const quantum::Observable op = quantum::build_hamiltonian(h, psi0.hbar);
  auto window = [&](double step) {
    const auto n = static_cast<Index>(std::llround(t_end / step));
    if (n < 1) throw InvalidInput("hydrodynamic_convergence: t_end shorter than one step");
    const quantum::Propagator u(op, step);
    std::vector<WaveFunction> frames;
    WaveFunction psi = psi0;
    for (Index k = 0; k <= n + 1; ++k) {
      if (k >= n - 1) frames.push_back(psi);
      if (k <= n) psi = quantum::schrodinger_step(psi, u);
    }
    return hydrodynamic_residual(frames, h, step, potential_gradient);
  };
  ConvergenceStudy s;
  s.coarse_residual = window(dt);
  s.fine_residual = window(0.5 * dt);
  s.coarse = std::max(s.coarse_residual.continuity, s.coarse_residual.momentum);
  s.fine = std::max(s.fine_residual.continuity, s.fine_residual.momentum);
  s.order = std::log2(s.coarse / s.fine);
  return s;
}

ClassicalMoments classical_moments(const PhaseSpacePDF& pdf, const classical::PhaseFunction& h) {
  const PeriodicGrid& g = pdf.grid();
  const Index d = pdf.config_dim();
  std::vector<numerics::Axis> xa(g.axes().begin(), g.axes().begin() + d);
  const PeriodicGrid xg(xa);
  const Index per_x = g.size() / xg.size();
  double dvp = 1.0;
  for (Index a = d; a < 2 * d; ++a) dvp *= g.axis(a).spacing();

  ClassicalMoments m{ScalarField(xg), CovectorField(xg), VectorField(xg), {}, ScalarField(xg)};
  for (Index k = 0; k < d * d; ++k) m.stress_cl.emplace_back(xg);
  std::vector<Eigen::VectorXd> velocity(static_cast<std::size_t>(g.size()));
  for (Index i = 0; i < g.size(); ++i) velocity[static_cast<std::size_t>(i)] = h.momentum_partial(pdf.position(i), pdf.momentum(i));

  for (Index i = 0; i < g.size(); ++i) m.rho_bar[i / per_x] += pdf.values()[i] * dvp;
  const double floor = kMomentFloor * m.rho_bar.values().maxCoeff();
  for (Index x = 0; x < xg.size(); ++x) {
    const double rb = m.rho_bar[x];
    if (!(rb > floor)) continue;
    m.support[x] = 1.0;
    Eigen::VectorXd pb = Eigen::VectorXd::Zero(d), vb = Eigen::VectorXd::Zero(d);
    for (Index i = x * per_x; i < (x + 1) * per_x; ++i) {
      pb += pdf.values()[i] * dvp * pdf.momentum(i);
      vb += pdf.values()[i] * dvp * velocity[static_cast<std::size_t>(i)];
    }
    pb /= rb;
    vb /= rb;
    m.p_bar.set(x, pb);
    m.v_bar.set(x, vb);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
    for (Index i = x * per_x; i < (x + 1) * per_x; ++i)
      t -= pdf.values()[i] * dvp * (vb - velocity[static_cast<std::size_t>(i)]) * (pb - pdf.momentum(i)).transpose();
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < d; ++b) m.stress_cl[static_cast<std::size_t>(a * d + b)][x] = t(a, b);
  }
  return m;
}

ClassicalMoments classical_moments(const PhaseSpacePDF& pdf, double mass) {
  if (!(mass > 0.0)) throw InvalidInput("classical_moments: mass must be positive");
  const classical::PhaseFunction h(
      [mass](const synchro::Point&, const synchro::Point& p) { return p.squaredNorm() / (2.0 * mass); },
      [mass](const synchro::Point&, const synchro::Point& p) -> synchro::Point { return p / mass; },
      [](const synchro::Point& x, const synchro::Point&) -> synchro::Point { return synchro::Point::Zero(x.size()); });
  return classical_moments(pdf, h);
}

double stress_difference(const MadelungFields& q, const ClassicalMoments& c) {
  require_same_grid(q.rho_bar.grid(), c.rho_bar.grid(), "stress_difference");
  double worst = 0.0;
  for (std::size_t k = 0; k < q.stress_q.size(); ++k)
    for (Index i = 0; i < q.rho_bar.size(); ++i)
      if (q.support[i] > 0.0 && c.support[i] > 0.0)
        worst = std::max(worst, std::abs(q.stress_q[k][i] - c.stress_cl[k][i]));
  return worst;
}

PhaseSpacePDF classical_from_wigner(const WignerField& w) {
  const double peak = w.values.values().maxCoeff();
  if (w.min() < -1e-8 * peak)
    throw InvalidState("classical_from_wigner: Wigner function has negative values (min " +
                       numerics::format_double(w.min()) + "), not a classical density");
  return PhaseSpacePDF(w.values, 1);
}

std::vector<LimitSample> classical_limit_compare(const WaveFunction& psi0, const PhaseSpacePDF& pdf0,
                                                 const SeparableHamiltonian& h, double t_end, double dt,
                                                 Index record_every) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidInput("classical_limit_compare: bad time parameters");
  if (record_every < 1) throw InvalidInput("classical_limit_compare: record_every must be positive");
  const PeriodicGrid& xg = psi0.grid();
  if (!(pdf0.grid() == wigner_grid(xg, psi0.hbar)))
    throw InvalidInput("classical_limit_compare: pdf0 must live on the Wigner grid of psi0");

  quantum::Observable op(xg, psi0.hbar);
  op.set_symbol([k = h.kinetic](const Eigen::VectorXd& p) { return k(p); }, 2);
  op.add_term(0.5 * ScalarField::sample(xg, [&](const Eigen::VectorXd& x) { return h.potential(x); }), {});
  const quantum::Propagator u(op, dt);

  auto distance = [](const WignerField& w, const PhaseSpacePDF& c) {
    return (w.values.values() - c.values().values()).cwiseAbs().sum() * w.grid().cell_volume();
  };

  const auto steps = static_cast<Index>(std::llround(t_end / dt));
  WaveFunction psi = psi0;
  PhaseSpacePDF rho = pdf0;
  std::vector<LimitSample> out{{0.0, distance(wigner_transform(psi), rho)}};
  for (Index n = 1; n <= steps; ++n) {
    psi = quantum::schrodinger_step(psi, u);
    rho = classical::liouville_step(rho, h, dt);
    if (n % record_every == 0 || n == steps)
      out.push_back({static_cast<double>(n) * dt, distance(wigner_transform(psi), rho)});
  }
  return out;
}

void write_residual_series(const std::filesystem::path& path, const HydroResidual& r, double t0, double dt) {
  numerics::CsvTable t;
  t.columns = {"t", "res_continuity", "res_momentum"};
  for (std::size_t k = 0; k < r.continuity_series.size(); ++k)
    t.add_row({t0 + static_cast<double>(k + 1) * dt, r.continuity_series[k], r.momentum_series[k]});
  numerics::write_csv(path, t);
}

}  // namespace protomech::bridge

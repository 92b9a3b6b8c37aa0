#include "protomech/bridge/bridge.hpp"
#include "protomech/classical/classical.hpp"
#include "protomech/cli/cli.hpp"
#include "protomech/fluids/fluids.hpp"
#include "protomech/liepoisson/liepoisson.hpp"
#include "protomech/numerics/spectral.hpp"
#include "protomech/quantum/quantum.hpp"
#include "protomech/spin/spin.hpp"
#include "protomech/synchro/synchro.hpp"
#include "protomech/thermo/thermo.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace protomech::cli {

namespace {

using numerics::Complex;
using numerics::ComplexField;
using numerics::CovectorField;
using numerics::CsvTable;
using numerics::Index;
using numerics::PeriodicGrid;
using numerics::ScalarField;
using numerics::VectorField;

constexpr double kPi = std::numbers::pi;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::mt19937_64 engine_;
};

// Real field with Gaussian coefficients on every mode with |m_a| <= max_mode.
ScalarField band_limited(const PeriodicGrid& g, int max_mode, Rng& rng) {
  const Index d = g.dimension();
  std::vector<Eigen::VectorXd> waves;
  std::vector<Complex> amps;
  std::vector<int> m(static_cast<std::size_t>(d), -max_mode);
  while (true) {
    Eigen::VectorXd k(d);
    for (Index a = 0; a < d; ++a) k[a] = 2 * kPi * m[static_cast<std::size_t>(a)] / g.axis(a).length;
    const double re = rng.normal(), im = rng.normal();
    waves.push_back(k);
    amps.emplace_back(re, im);
    std::size_t a = 0;
    while (a < m.size() && ++m[a] > max_mode) m[a++] = -max_mode;
    if (a == m.size()) break;
  }
  return ScalarField::sample(g, [&](const Eigen::VectorXd& x) {
    double v = 0.0;
    for (std::size_t j = 0; j < waves.size(); ++j) v += (amps[j] * std::polar(1.0, waves[j].dot(x))).real();
    return v;
  });
}

double max_abs(const ScalarField& f) { return f.values().cwiseAbs().maxCoeff(); }

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Recorder {
  std::string experiment;
  RunResult result;
  Stopwatch clock;

  void add(ResultRecord r) {
    r.wall_time = clock.lap();
    result.records.push_back(std::move(r));
  }
  void at_most(const std::string& metric, double value, double tolerance) {
    add(ResultRecord::at_most(experiment, metric, value, tolerance));
  }
  void near(const std::string& metric, double value, double target, double tolerance) {
    add(ResultRecord::near(experiment, metric, value, target, tolerance));
  }
  void at_least(const std::string& metric, double value, double bound) {
    add(ResultRecord::at_least(experiment, metric, value, bound));
  }
};

ComplexField packet(const PeriodicGrid& g, double x0, double sigma, double p0, double hbar) {
  return ComplexField::sample(g, [=](const Eigen::VectorXd& x) {
    const double u = (x[0] - x0) / sigma;
    return std::pow(kPi * sigma * sigma, -0.25) * std::exp(-0.5 * u * u) * std::polar(1.0, p0 * (x[0] - x0) / hbar);
  });
}

ScalarField trap_potential(const PeriodicGrid& g, double omega) {
  return ScalarField::sample(g, [omega](const Eigen::VectorXd& x) { return 0.5 * omega * omega * x[0] * x[0]; });
}

CovectorField trap_gradient(const PeriodicGrid& g, double omega) {
  return CovectorField::from_fields(
      {ScalarField::sample(g, [omega](const Eigen::VectorXd& x) { return omega * omega * x[0]; })});
}

double position_mean(const quantum::WaveFunction& psi, const quantum::Observable& x) {
  return (psi.values.values().dot(x.apply(psi.values.values())) * psi.grid().cell_volume()).real();
}

ScalarField unit_mass(ScalarField f) {
  f *= 1.0 / numerics::integrate(f);
  return f;
}

// ---- pipelines

void synchro_conserve(const ExperimentConfig& c, Recorder& r) {
  const Index n = c.count("points");
  const double hbar = c.get("hbar");
  const double dt = c.get("dt");
  const long steps = c.count("steps");
  const PeriodicGrid g = PeriodicGrid::line(n, 2 * kPi);

  double worst = 0.0;
  for (long k = -(n / 4 - 1); k <= n / 4 - 1; ++k) {
    const ComplexField eta =
        ComplexField::sample(g, [k](const Eigen::VectorXd& x) { return std::polar(1.0, 2.0 * k * x[0]); });
    const synchro::SynchronicityState s(eta, ScalarField::constant(g, 1.0), 0.5 * hbar);
    const double expected = hbar * static_cast<double>(k);
    const double err = (synchro::momentum_map(s).component(0).array() - expected).abs().maxCoeff();
    worst = std::max(worst, err / std::max(1.0, std::abs(expected)));
  }
  r.at_most("de_broglie_momentum_error", worst, 1e-12);

  const double width = c.get("width");
  const ScalarField mu = unit_mass(ScalarField::sample(g, [width](const Eigen::VectorXd& x) {
    const double d = x[0] - kPi - 1.0;
    return std::exp(-d * d / (width * width));
  }));
  const synchro::GridHamiltonian h(synchro::CanonicalHamiltonian::with_potential(
      ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 1.0 - std::cos(x[0] - kPi); })));
  synchro::SynchronicityState s(ComplexField::constant(g, 1.0), mu, 0.5 * hbar);
  const double m0 = s.total_measure();
  const double e0 = synchro::energy_functional(s, h);
  CsvTable series;
  series.columns = {"t", "energy", "measure"};
  series.add_row({0.0, e0, m0});
  double energy_drift = 0.0, measure_drift = 0.0;
  const long every = c.count("sample_every");
  for (long k = 1; k <= steps; ++k) {
    s = synchro::step(s, h, dt);
    const double e = synchro::energy_functional(s, h), m = s.total_measure();
    energy_drift = std::max(energy_drift, std::abs(e - e0));
    measure_drift = std::max(measure_drift, std::abs(m - m0) / std::abs(m0));
    if (k % every == 0 || k == steps) series.add_row({static_cast<double>(k) * dt, e, m});
  }
  r.at_most("energy_drift", energy_drift, 1e-6);
  r.at_most("measure_drift", measure_drift, 1e-9);
  r.result.tables["synchro-conserve.series"] = std::move(series);
}

void classical_liouville(const ExperimentConfig& c, Recorder& r) {
  const Index n = c.count("points");
  const double half = c.get("half_width");
  const double dt = c.get("dt");
  const double sigma = c.get("sigma");
  const double x0 = c.get("x0");
  const long steps = std::lround(c.get("periods") * 2 * kPi / dt);
  const numerics::Axis axis{n, 2 * half, -half};
  const PeriodicGrid g = classical::phase_grid({axis}, {axis});
  const synchro::Point mx = synchro::Point::Constant(1, x0), mp = synchro::Point::Zero(1);
  const synchro::Point sd = synchro::Point::Constant(1, sigma);
  classical::PhaseSpacePDF pdf = classical::PhaseSpacePDF::gaussian(g, mx, mp, sd, sd);
  const auto h = synchro::SeparableHamiltonian::harmonic(1.0, 1.0, synchro::Point::Zero(1));

  // Oscillator characteristics are rotations of the phase plane.
  auto exact = [&](double t) {
    return classical::sample_phase(g, 1, [&](const synchro::Point& x, const synchro::Point& p) {
      const double q0 = x[0] * std::cos(t) - p[0] * std::sin(t);
      const double p0 = x[0] * std::sin(t) + p[0] * std::cos(t);
      return std::exp(-0.5 * ((q0 - x0) * (q0 - x0) + p0 * p0) / (sigma * sigma)) / (2 * kPi * sigma * sigma);
    });
  };
  CsvTable series;
  series.columns = {"t", "linf_error", "mass"};
  const long every = std::max(1L, steps / 20);
  double worst = 0.0;
  for (long k = 1; k <= steps; ++k) {
    pdf = classical::liouville_step(pdf, h, dt);
    if (k % every == 0 || k == steps) {
      const double t = static_cast<double>(k) * dt;
      const double err = max_abs(pdf.values() - exact(t));
      worst = std::max(worst, err);
      series.add_row({t, err, pdf.mass()});
    }
  }
  r.at_most("liouville_linf_error", worst, 1e-3);
  r.at_most("mass_drift", pdf.mass() - 1.0, 1e-9);
  r.result.tables["classical-liouville.series"] = std::move(series);
}

void quantum_schrodinger(const ExperimentConfig& c, Recorder& r) {
  const double hbar = c.get("hbar");
  const double omega = c.get("omega");
  const double length = c.get("length");
  const synchro::CanonicalHamiltonian trap_small =
      synchro::CanonicalHamiltonian::with_potential(trap_potential(PeriodicGrid::line(c.count("points"), length, -length / 2), omega));
  const quantum::Observable h_small = quantum::build_hamiltonian(trap_small, hbar);
  const Eigen::MatrixXcd m = h_small.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  r.near("ground_energy", es.eigenvalues()[0], 0.5 * hbar * omega, 1e-4);

  const PeriodicGrid g = PeriodicGrid::line(c.count("coherent_points"), length, -length / 2);
  const double x0 = c.get("x0");
  const double dt = c.get("dt");
  const long steps = std::lround(c.get("t_end") / dt);
  const quantum::Observable h = quantum::build_hamiltonian(synchro::CanonicalHamiltonian::with_potential(trap_potential(g, omega)), hbar);
  const quantum::Observable x = quantum::Observable::position(g, hbar);
  const quantum::Propagator u(h, dt);
  quantum::WaveFunction psi(packet(g, x0, std::sqrt(hbar / omega), 0.0, hbar), hbar);
  CsvTable series;
  series.columns = {"t", "x_mean", "x_oracle"};
  series.add_row({0.0, position_mean(psi, x), x0});
  double worst = 0.0;
  const long every = c.count("sample_every");
  for (long k = 1; k <= steps; ++k) {
    psi = quantum::schrodinger_step(psi, u);
    if (k % every == 0 || k == steps) {
      const double t = static_cast<double>(k) * dt;
      const double mean = position_mean(psi, x), oracle = x0 * std::cos(omega * t);
      worst = std::max(worst, std::abs(mean - oracle));
      series.add_row({t, mean, oracle});
    }
  }
  r.at_most("coherent_centroid_error", worst, 1e-6);
  r.result.tables["quantum-schrodinger.series"] = std::move(series);
}

void quantum_duality(const ExperimentConfig& c, Recorder& r) {
  const double hbar = c.get("hbar");
  const double length = c.get("length");
  const PeriodicGrid g = PeriodicGrid::line(c.count("points"), length, -length / 2);
  const double t_end = c.get("t_end");
  const long steps = c.count("steps");
  const quantum::Observable h =
      quantum::build_hamiltonian(synchro::CanonicalHamiltonian::with_potential(trap_potential(g, 1.0)), hbar);
  quantum::WaveFunction psi(packet(g, c.get("x0"), std::sqrt(hbar), c.get("p0"), hbar), hbar);
  quantum::DensityMatrix rho = quantum::DensityMatrix::pure(psi);
  const quantum::DensityMatrix rho0 = rho;
  const quantum::Propagator u(h, t_end / static_cast<double>(steps));
  CsvTable series;
  series.columns = {"t", "gap"};
  double worst = 0.0;
  for (long k = 1; k <= steps; ++k) {
    psi = quantum::schrodinger_step(psi, u);
    rho = quantum::liouville_step_quantum(rho, u);
    const double gap = (rho.entries() - quantum::DensityMatrix::pure(psi).entries()).cwiseAbs().maxCoeff();
    worst = std::max(worst, gap);
    series.add_row({t_end * static_cast<double>(k) / static_cast<double>(steps), gap});
  }
  r.at_most("density_matrix_vs_outer_product", worst, 1e-9);
  r.at_most("trace_drift", std::abs(rho.trace() - 1.0), 1e-12);
  r.at_most("heisenberg_vs_schrodinger_position",
            quantum::heisenberg_expectation_check(rho0, h, quantum::Observable::position(g, hbar), t_end), 1e-8);
  r.result.tables["quantum-duality.series"] = std::move(series);
}

void bridge_wigner(const ExperimentConfig& c, Recorder& r) {
  const double hbar = c.get("hbar");
  const double length = c.get("length");
  const PeriodicGrid g = PeriodicGrid::line(c.count("points"), length, -length / 2);
  const double x0 = c.get("x0"), sigma = c.get("sigma"), p0 = c.get("p0");
  const bridge::WignerField w = bridge::wigner_transform(quantum::WaveFunction(packet(g, x0, sigma, p0, hbar), hbar));
  double err = 0.0;
  for (Index i = 0; i < w.grid().size(); ++i) {
    const double u = (w.grid().coordinate(i, 0) - x0) / sigma;
    const double v = (w.grid().coordinate(i, 1) - p0) * sigma / hbar;
    err = std::max(err, std::abs(w.values[i] - std::exp(-u * u - v * v) / (kPi * hbar)));
  }
  r.at_most("gaussian_closed_form", err, 1e-8);
  r.at_most("gaussian_mass", w.mass() - 1.0, 1e-8);

  const quantum::WaveFunction psi = quantum::WaveFunction::normalized(
      packet(g, -1.0, 0.9, 0.75 * hbar, hbar) + packet(g, 1.5, 1.2, -0.375 * hbar, hbar), hbar);
  const bridge::WignerField ws = bridge::wigner_transform(psi);
  const ScalarField xm = ws.position_marginal();
  CsvTable marginals;
  marginals.columns = {"x", "marginal", "density"};
  double xerr = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    xerr = std::max(xerr, std::abs(xm[i] - std::norm(psi.values[i])));
    marginals.add_row({g.coordinate(i, 0), xm[i], std::norm(psi.values[i])});
  }
  r.at_most("position_marginal", xerr, 1e-8);
  // Momentum density by direct summation of the continuum Fourier integral.
  const Eigen::VectorXd pm = ws.momentum_marginal();
  double perr = 0.0;
  for (Index k = 0; k < pm.size(); ++k) {
    const double p = ws.grid().axis(1).coordinate(k);
    Complex amp = 0.0;
    for (Index j = 0; j < g.size(); ++j) amp += psi.values[j] * std::polar(1.0, -p * g.coordinate(j, 0) / hbar);
    amp *= g.cell_volume() / std::sqrt(2 * kPi * hbar);
    perr = std::max(perr, std::abs(pm[k] - std::norm(amp)));
  }
  r.at_most("momentum_marginal", perr, 1e-8);
  r.result.tables["bridge-wigner.marginals"] = std::move(marginals);
}

void bridge_madelung(const ExperimentConfig& c, Recorder& r) {
  const double length = c.get("length");
  const PeriodicGrid g = PeriodicGrid::line(c.count("points"), length, -length / 2);
  const double dt = c.get("dt");
  const auto h = synchro::CanonicalHamiltonian::with_potential(trap_potential(g, 1.0));
  const CovectorField grad = trap_gradient(g, 1.0);
  const quantum::WaveFunction psi0(packet(g, c.get("x0"), 1.0, c.get("p0"), 1.0), 1.0);
  quantum::WaveFunction psi = psi0;
  const quantum::Propagator u(quantum::build_hamiltonian(h, 1.0), dt);
  const long skip = c.count("skip_steps");
  for (long k = 0; k < skip; ++k) psi = quantum::schrodinger_step(psi, u);
  std::vector<quantum::WaveFunction> frames{psi};
  for (long k = 1; k < c.count("frames"); ++k) frames.push_back(quantum::schrodinger_step(frames.back(), u));
  const bridge::HydroResidual res = bridge::hydrodynamic_residual(frames, h, dt, grad);
  r.at_most("continuity_residual", res.continuity, 1e-5);
  r.at_most("momentum_residual", res.momentum, 1e-5);
  CsvTable series;
  series.columns = {"t", "res_continuity", "res_momentum"};
  for (std::size_t k = 0; k < res.continuity_series.size(); ++k)
    series.add_row({static_cast<double>(skip + 1 + static_cast<long>(k)) * dt, res.continuity_series[k],
                    res.momentum_series[k]});
  r.result.tables["bridge-madelung.series"] = std::move(series);

  const bridge::ConvergenceStudy study =
      bridge::hydrodynamic_convergence(psi0, h, c.get("convergence_dt"), c.get("convergence_t"), grad);
  r.at_least("residual_convergence_order", study.order, c.get("min_order"));
}

void bridge_limit(const ExperimentConfig& c, Recorder& r) {
  const double hbar = c.get("hbar");
  const double length = c.get("length");
  const PeriodicGrid g = PeriodicGrid::line(c.count("points"), length, -length / 2);
  const quantum::WaveFunction psi(packet(g, c.get("x0"), std::sqrt(hbar), c.get("p0"), hbar), hbar);
  const classical::PhaseSpacePDF pdf = bridge::classical_from_wigner(bridge::wigner_transform(psi));
  const auto samples = bridge::classical_limit_compare(
      psi, pdf, synchro::SeparableHamiltonian::harmonic(1.0, 1.0, synchro::Point::Zero(1)), c.get("t_end"), c.get("dt"),
      c.count("record_every"));
  CsvTable series;
  series.columns = {"t", "l1_distance"};
  double worst = 0.0;
  for (const auto& s : samples) {
    worst = std::max(worst, s.distance);
    series.add_row({s.t, s.distance});
  }
  r.at_most("quadratic_l1_distance", worst, 1e-6);
  r.at_most("stress_difference",
            bridge::stress_difference(bridge::madelung_decompose(psi), bridge::classical_moments(pdf)), 1e-8);
  r.result.tables["bridge-limit.series"] = std::move(series);
}

void liepoisson_core(const ExperimentConfig& c, Recorder& r) {
  Rng rng(c.seed);
  const Index n = c.count("points");
  const PeriodicGrid g = PeriodicGrid::line(n, 2 * kPi, -kPi);
  const int modes = static_cast<int>(c.count("modes"));
  auto random_state = [&] {
    ScalarField bump = band_limited(g, modes, rng);
    bump *= 0.3 / max_abs(bump);
    return liepoisson::EmergenceMomentum::from_momentum(unit_mass(ScalarField::constant(g, 1.0) + bump),
                                                       CovectorField::from_fields({band_limited(g, modes, rng)}));
  };
  auto random_generator = [&] {
    return liepoisson::Generator(VectorField::from_fields({band_limited(g, modes, rng)}), band_limited(g, modes, rng));
  };
  // Gradient-dependent density F = p^2/2 + c1 |dp|^2 + c2 p lap p.
  const double c1 = 0.15, c2 = 0.05;
  liepoisson::LocalFunctional F;
  F.value = [&](const liepoisson::MomentumJet& j) {
    return 0.5 * j.p.squaredNorm() + c1 * j.dp.squaredNorm() + c2 * j.p[0] * j.ddp[0](0, 0);
  };
  F.momentum_partial = [&](const liepoisson::MomentumJet& j) {
    synchro::Point out = j.p;
    out[0] += c2 * j.ddp[0](0, 0);
    return out;
  };
  F.gradient_partial = [&](const liepoisson::MomentumJet& j) -> Eigen::MatrixXd { return 2.0 * c1 * j.dp; };
  F.hessian_partial = [&](const liepoisson::MomentumJet& j) {
    return std::vector<Eigen::MatrixXd>{c2 * j.p[0] * Eigen::MatrixXd::Identity(1, 1)};
  };

  double pairing_gap = 0.0, duality = 0.0;
  for (long trial = 0; trial < c.count("trials"); ++trial) {
    const auto J = random_state();
    const double value = liepoisson::functional_value(F, J);
    const auto Fhat = liepoisson::generator_from_functional(F, J).generator;
    pairing_gap = std::max(pairing_gap, std::abs(liepoisson::pairing(J, Fhat) - value) / std::max(1.0, std::abs(value)));
    const auto a = random_generator(), b = random_generator();
    duality = std::max(duality, liepoisson::coadjoint_duality_residual(J, a, b));
  }
  r.at_most("pairing_identity", pairing_gap, 1e-8);
  r.at_most("coadjoint_duality", duality, 1e-7);

  const synchro::GridHamiltonian H(synchro::CanonicalHamiltonian::with_potential(
      ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 0.64 * (1.0 - std::cos(x[0])); })));
  const ScalarField phase = ScalarField::sample(
      g, [](const Eigen::VectorXd& x) { return 0.25 * std::sin(x[0]) + 0.1 * std::cos(2 * x[0]); });
  const ScalarField mu =
      unit_mass(ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 1.0 + 0.4 * std::cos(x[0] + 0.3); }));
  const auto s0 = synchro::SynchronicityState::from_phase(phase, mu, 1.0);
  const auto J0 = liepoisson::EmergenceMomentum::from_synchronicity(s0);
  auto gap = [&](double dt) {
    const auto a = liepoisson::lie_poisson_step(J0, H, dt);
    const auto b = liepoisson::EmergenceMomentum::from_synchronicity(synchro::step(s0, H, dt));
    const double d = (a.density().values() - b.density().values()).cwiseAbs().maxCoeff();
    return std::max(d, (a.momentum_density() - b.momentum_density()).max_abs());
  };
  const double dt = c.get("dt");
  const double coarse = gap(dt), fine = gap(dt / 2);
  r.at_most("synchro_agreement_over_dt2", coarse / (dt * dt), 1.0);
  r.at_least("synchro_agreement_order", std::log2(coarse / fine), 2.0);
}

Eigen::VectorXd tilted_gauge(const spin::SphereGrid& g, double amplitude) {
  return g.sample([amplitude](double t, double p) {
           return Complex(amplitude * (std::cos(t) + 0.6 * std::sin(t) * std::cos(p)));
         })
      .real();
}

void spin_eigen(const ExperimentConfig& c, Recorder& r) {
  const spin::SphereGrid g(c.count("theta_points"), c.count("phi_points"));
  const double hbar = c.get("hbar");
  const Eigen::VectorXd s = tilted_gauge(g, c.get("gauge_amplitude"));
  const auto S = spin::build_S(g, hbar, s);
  const auto up = spin::spin_up(g, s), down = spin::spin_down(g, s);
  const auto half = spin::Sector::HalfInteger;
  auto residual = [](const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); };
  r.at_most("s3_up_residual", residual(S[2].apply(g, up, half) - 0.5 * hbar * up), 1e-7);
  r.at_most("s3_down_residual", residual(S[2].apply(g, down, half) + 0.5 * hbar * down), 1e-7);
  r.at_most("casimir_up_residual", residual(spin::apply_casimir(g, S, up, half) - 0.75 * hbar * hbar * up), 1e-6);
  r.at_most("casimir_down_residual", residual(spin::apply_casimir(g, S, down, half) - 0.75 * hbar * hbar * down),
            1e-6);
  const auto blocks = spin::pauli_reduce(g, S);
  // sigma_1, sigma_2, sigma_3 written out
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;
  const std::array<Eigen::Matrix2cd, 3> sigma{sx, sy, sz};
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) worst = std::max(worst, (blocks[j] - 0.5 * hbar * sigma[j]).cwiseAbs().maxCoeff());
  r.at_most("pauli_reduction", worst, 1e-7);
}

void spin_bell(const ExperimentConfig& c, Recorder& r) {
  auto chsh = [](const spin::DensityMatrix4& rho, const spin::Direction& a, const spin::Direction& ap,
                 const spin::Direction& b, const spin::Direction& bp) {
    return spin::bell_lhs(spin::correlation(rho, a, b), spin::correlation(rho, a, bp), spin::correlation(rho, ap, bp),
                          spin::correlation(rho, ap, b));
  };
  const auto singlet = spin::singlet();
  const double value = chsh(singlet, spin::coplanar_direction(0), spin::coplanar_direction(kPi / 2),
                            spin::coplanar_direction(kPi / 4), spin::coplanar_direction(3 * kPi / 4));
  r.near("singlet_chsh", value, 2 * std::sqrt(2.0), 1e-6);

  Rng rng(c.seed);
  auto qubit = [&] {
    const Complex a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal());
    return Eigen::Vector2cd(a, b).normalized();
  };
  auto direction = [&] {
    const double x = rng.normal(), y = rng.normal(), z = rng.normal();
    return spin::Direction(x, y, z).normalized();
  };
  double worst = 0.0;
  for (long k = 0; k < c.count("samples"); ++k) {
    const auto rho = spin::product_state(qubit(), qubit());
    const auto a = direction(), ap = direction(), b = direction(), bp = direction();
    worst = std::max(worst, chsh(rho, a, ap, b, bp));
  }
  r.at_most("product_state_chsh_max", worst, 2.0 + 1e-9);

  std::vector<double> angles;
  const long m = c.count("sweep_points");
  for (long k = 0; k < m; ++k) angles.push_back(kPi * static_cast<double>(k) / static_cast<double>(m - 1));
  r.result.tables["spin-bell.sweep"] = spin::correlation_sweep(singlet, angles, angles);
}

void thermo_gibbs(const ExperimentConfig& c, Recorder& r) {
  Rng rng(c.seed);
  const long rows = c.count("rows");
  double worst = 0.0;
  for (long trial = 0; trial < c.count("tables"); ++trial) {
    std::vector<thermo::SpectrumRow> table;
    std::vector<double> last(4, -3.0);
    for (long k = 0; k < rows; ++k) {
      const int particles = static_cast<int>(rng.uniform(0.0, 4.0));
      const int degeneracy = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
      last[static_cast<std::size_t>(particles)] += rng.uniform(0.0, 1.5);
      table.push_back({last[static_cast<std::size_t>(particles)], particles, degeneracy});
    }
    const thermo::SpectrumTable t(table);
    const double beta = std::exp(rng.uniform(std::log(c.get("beta_min")), std::log(c.get("beta_max"))));
    const double mu = rng.uniform(-2.0, 2.0);
    const auto state = thermo::maximize_entropy(t, beta, mu).state;
    // Closed-form weights e^{-beta(E - mu N)} / Z.
    Eigen::VectorXd w(rows);
    double z = 0.0;
    for (long k = 0; k < rows; ++k) {
      w[k] = std::exp(-beta * (table[static_cast<std::size_t>(k)].energy - mu * table[static_cast<std::size_t>(k)].particles));
      z += table[static_cast<std::size_t>(k)].degeneracy * w[k];
    }
    w /= z;
    worst = std::max(worst, t.degeneracies().cwiseProduct((state.weights() - w).cwiseAbs()).sum());
  }
  r.at_most("gibbs_l1_distance", worst, 1e-8);

  const double e = c.get("mode_energy"), beta = c.get("beta"), mu = c.get("mu");
  const auto mode = thermo::fermion_mode(e);
  const double occupation = thermo::mean_particles(thermo::maximize_entropy(mode, beta, mu).state, mode);
  r.near("fermi_dirac_occupation", occupation, 1.0 / (std::exp(beta * (e - mu)) + 1.0), 1e-8);

  std::vector<double> energies;
  for (int k = 1; k <= 20; ++k) energies.push_back(0.25 * k);
  r.result.tables["thermo-gibbs.occupations"] = thermo::occupation_sweep(
      {0.5, 1.0, 2.0}, {0.0}, energies,
      {thermo::Statistics::Boson, thermo::Statistics::Fermion, thermo::Statistics::MaxwellBoltzmann});
}

void fluid_euler(const ExperimentConfig& c, Recorder& r) {
  const double courant = c.get("courant_fraction");
  {
    const PeriodicGrid g = PeriodicGrid::cube(2, c.count("points"), 2 * kPi);
    fluids::IncompressibleState2D s(ScalarField::sample(
        g, [](const Eigen::VectorXd& x) { return 2.0 * std::sin(x[0]) * std::sin(x[1]); }));
    const ScalarField w0 = s.omega();
    const double t_end = c.get("t_end");
    const long steps = static_cast<long>(std::ceil(t_end / (courant * fluids::admissible_dt(s))));
    double worst = 0.0;
    for (long k = 1; k <= steps; ++k) {
      s = fluids::euler_step_2d(s, t_end / static_cast<double>(steps));
      worst = std::max(worst, max_abs(s.omega() - w0));
    }
    r.at_most("taylor_green_steadiness", worst, 1e-8);
  }
  const PeriodicGrid g = PeriodicGrid::cube(2, c.count("conservation_points"), 2 * kPi);
  Rng rng(c.seed);
  ScalarField w = band_limited(g, 4, rng);
  w.values().array() -= w.values().mean();
  fluids::IncompressibleState2D s(w);
  const double e0 = fluids::kinetic_energy(s), z0 = fluids::enstrophy(s);
  const double turnover = 1.0 / std::sqrt(s.omega().values().squaredNorm() / static_cast<double>(g.size()));
  const double t_end = c.get("turnovers") * turnover;
  const long steps = static_cast<long>(std::ceil(t_end / (c.get("conservation_courant") * fluids::admissible_dt(s))));
  const double dt = t_end / static_cast<double>(steps);
  std::vector<fluids::Diagnostics> rows{fluids::diagnose(s, 0.0)};
  double energy_drift = 0.0, enstrophy_drift = 0.0;
  for (long k = 1; k <= steps; ++k) {
    s = fluids::euler_step_2d(s, dt);
    energy_drift = std::max(energy_drift, std::abs(fluids::kinetic_energy(s) - e0) / e0);
    enstrophy_drift = std::max(enstrophy_drift, std::abs(fluids::enstrophy(s) - z0) / z0);
    if (k % 50 == 0 || k == steps) rows.push_back(fluids::diagnose(s, static_cast<double>(k) * dt));
  }
  r.at_most("energy_drift", energy_drift, 1e-6);
  r.at_most("enstrophy_drift", enstrophy_drift, 1e-6);
  r.result.tables["fluid-euler.diagnostics"] = fluids::diagnostics_table(rows);
}

void fluid_compressible(const ExperimentConfig& c, Recorder& r) {
  const PeriodicGrid g = PeriodicGrid::cube(2, c.count("points"), 2 * kPi);
  Rng rng(c.seed);
  const double k = c.get("stiffness"), gamma = c.get("gamma"), ent = c.get("entropy_coupling");
  // U = K rho^{gamma - 1} e^{s sigma / rho}
  const fluids::InternalEnergy u{
      [=](double rho, double q) { return k * std::pow(rho, gamma - 1.0) * std::exp(ent * q / rho); },
      [=](double rho, double q) {
        return k * std::exp(ent * q / rho) *
               ((gamma - 1.0) * std::pow(rho, gamma - 2.0) - ent * q * std::pow(rho, gamma - 3.0));
      },
      [=](double rho, double q) { return k * ent * std::pow(rho, gamma - 2.0) * std::exp(ent * q / rho); }};
  auto scaled = [&](double base, double amplitude) {
    const ScalarField f = band_limited(g, 2, rng);
    return ScalarField::constant(g, base) + (amplitude / max_abs(f)) * f;
  };
  const ScalarField rho = scaled(1.0, 0.2);
  const ScalarField sigma = scaled(0.5, 0.1);
  const ScalarField mx = scaled(0.0, 0.1), my = scaled(0.0, 0.1);
  fluids::CompressibleState s(rho, sigma, CovectorField::from_fields({mx, my}), u);
  const double dt = c.get("courant_fraction") * fluids::admissible_dt(s);
  const auto d0 = fluids::diagnose(s, 0.0);
  std::vector<fluids::Diagnostics> rows{d0};
  double mass = 0.0, entropy = 0.0;
  const long steps = c.count("steps");
  for (long n = 1; n <= steps; ++n) {
    s = fluids::compressible_step(s, dt);
    const auto d = fluids::diagnose(s, static_cast<double>(n) * dt);
    mass = std::max(mass, std::abs(d.mass - d0.mass));
    entropy = std::max(entropy, std::abs(d.entropy - d0.entropy));
    if (n % 10 == 0 || n == steps) rows.push_back(d);
  }
  const double per_thousand = 1000.0 / static_cast<double>(steps);
  r.at_most("mass_drift_per_1000_steps", mass * std::max(1.0, per_thousand), 1e-10);
  r.at_most("entropy_drift_per_1000_steps", entropy * std::max(1.0, per_thousand), 1e-10);
  r.result.tables["fluid-compressible.diagnostics"] = fluids::diagnostics_table(rows);
}

using Pipeline = void (*)(const ExperimentConfig&, Recorder&);

struct Entry {
  ExperimentInfo info;
  Pipeline pipeline;
};

ParameterSpec integer(std::string name, double value, double lo, double hi, std::string description) {
  return {std::move(name), value, lo, hi, true, std::move(description)};
}

ParameterSpec real(std::string name, double value, double lo, double hi, std::string description) {
  return {std::move(name), value, lo, hi, false, std::move(description)};
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {{"synchro-conserve", "Phase and emergence-measure transport: momentum map of plane waves, energy and measure drift",
        "momentum map gives p = hbar k; energy and emergence measure are conserved",
        {integer("points", 64, 16, 1024, "grid points on the ring"), real("hbar", 1.0, 1e-3, 10.0, "reduced Planck constant"),
         real("dt", 1e-3, 1e-6, 1e-2, "time step"), integer("steps", 1000, 1, 1e6, "number of steps"),
         real("width", 0.5, 0.1, 2.0, "width of the initial measure bump"),
         integer("sample_every", 10, 1, 1e6, "steps between series rows")}},
       synchro_conserve},
      {{"classical-liouville", "Phase-space density of the oscillator transported over one period against the exact flow",
        "Liouville transport equals transport along the characteristics",
        {integer("points", 128, 32, 512, "points per phase-space axis"), real("dt", 1e-3, 1e-5, 1e-2, "time step"),
         real("periods", 1.0, 0.05, 10.0, "oscillator periods"), real("half_width", 6.0, 2.0, 20.0, "box half width"),
         real("sigma", 0.5, 0.1, 2.0, "initial standard deviation"), real("x0", 1.5, -3.0, 3.0, "initial offset")}},
       classical_liouville},
      {{"quantum-schrodinger", "Harmonic trap: ground energy by diagonalization and coherent-state centroid",
        "Schrodinger dynamics: ground energy hbar omega / 2 and coherent centroid x0 cos(omega t)",
        {integer("points", 128, 32, 512, "grid points for diagonalization"),
         integer("coherent_points", 256, 32, 4096, "grid points for the coherent run"),
         real("length", 32.0, 8.0, 128.0, "box length"), real("hbar", 1.0, 0.1, 4.0, "reduced Planck constant"),
         real("omega", 1.0, 0.1, 4.0, "trap frequency"), real("x0", 2.0, -4.0, 4.0, "initial offset"),
         real("dt", 1e-3, 1e-5, 1e-2, "time step"), real("t_end", kPi, 0.01, 20.0, "final time"),
         integer("sample_every", 100, 1, 1e6, "steps between series rows")}},
       quantum_schrodinger},
      {{"quantum-duality", "Density-matrix evolution against the Schrodinger outer product; Heisenberg picture",
        "quantum Liouville evolution of a pure state equals the Schrodinger outer product",
        {integer("points", 64, 16, 256, "grid points"), real("length", 32.0, 8.0, 128.0, "box length"),
         real("hbar", 1.0, 0.1, 4.0, "reduced Planck constant"), real("x0", 2.0, -4.0, 4.0, "initial offset"),
         real("p0", 0.5, -2.0, 2.0, "initial momentum"), real("t_end", kPi, 0.01, 20.0, "final time"),
         integer("steps", 200, 1, 1e5, "number of steps")}},
       quantum_duality},
      {{"bridge-wigner", "Wigner transform: Gaussian closed form, position and momentum marginals",
        "Wigner marginals reproduce the position and momentum densities",
        {integer("points", 128, 32, 512, "grid points"), real("length", 24.0, 8.0, 64.0, "box length"),
         real("hbar", 1.0, 0.25, 2.0, "reduced Planck constant"), real("sigma", 1.0, 0.5, 2.0, "packet width"),
         real("x0", 0.5, -2.0, 2.0, "packet centre"), real("p0", 0.4, -1.0, 1.0, "packet momentum")}},
       bridge_wigner},
      {{"bridge-madelung", "Continuity and momentum residuals of a coherent packet and their order in dt",
        "Madelung hydrodynamics: continuity and momentum balance with quantum stress",
        {integer("points", 256, 64, 1024, "grid points"), real("length", 32.0, 8.0, 128.0, "box length"),
         real("dt", 1e-3, 1e-5, 1e-2, "time step"), integer("skip_steps", 200, 0, 1e6, "steps before the window"),
         integer("frames", 5, 3, 1000, "frames in the residual window"), real("x0", 2.0, -4.0, 4.0, "packet centre"),
         real("p0", 0.5, -2.0, 2.0, "packet momentum"), real("convergence_dt", 2e-2, 1e-4, 0.1, "coarse step"),
         real("convergence_t", 0.5, 0.05, 5.0, "convergence study end time"),
         real("min_order", 1.95, 0.5, 4.0, "required convergence order")}},
       bridge_madelung},
      {{"bridge-limit", "Wigner function and classical density under a quadratic Hamiltonian; quantum and classical stress",
        "quadratic Hamiltonians move the Wigner function classically",
        {integer("points", 64, 32, 256, "grid points"), real("length", 16.0, 8.0, 64.0, "box length"),
         real("hbar", 1.0, 0.25, 2.0, "reduced Planck constant"), real("x0", 1.0, -2.0, 2.0, "packet centre"),
         real("p0", 0.5, -1.0, 1.0, "packet momentum"), real("t_end", 10.0, 0.01, 20.0, "final time"),
         real("dt", 0.01, 1e-4, 0.1, "time step"), integer("record_every", 10, 1, 1e6, "steps between samples")}},
       bridge_limit},
      {{"liepoisson-core", "Functional generators, coadjoint duality and agreement with the synchronicity step",
        "Lie-Poisson equation on the emergence momentum",
        {integer("points", 64, 16, 512, "grid points"), integer("modes", 3, 1, 8, "modes of the random fields"),
         integer("trials", 4, 1, 1000, "random trials"), real("dt", 0.02, 1e-3, 0.05, "coarse step for agreement")}},
       liepoisson_core},
      {{"spin-eigen", "Spin generators on the sphere: eigenstates, Casimir and Pauli reduction",
        "S3 |+-> = +-hbar/2 |+->, S.S = 3/4 hbar^2, Pauli reduction hbar/2 sigma",
        {integer("theta_points", 16, 16, 64, "Gauss-Legendre nodes"), integer("phi_points", 32, 32, 128, "azimuthal nodes"),
         real("hbar", 1.0, 0.1, 4.0, "reduced Planck constant"), real("gauge_amplitude", 0.3, 0.0, 1.0, "gauge size")}},
       spin_eigen},
      {{"spin-bell", "CHSH combination for the singlet and for random product states",
        "Bell inequality holds for product states and is violated by the singlet",
        {integer("samples", 1000, 1, 1e6, "random product states"),
         integer("sweep_points", 13, 2, 181, "angles in the correlation sweep")}},
       spin_bell},
      {{"thermo-gibbs", "Entropy maximization against closed-form Gibbs weights; single fermion mode",
        "grand-canonical maximum entropy gives Gibbs weights and Fermi-Dirac occupation",
        {integer("tables", 50, 1, 10000, "random spectrum tables"), integer("rows", 10, 1, 200, "rows per table"),
         real("beta_min", 0.1, 1e-3, 100.0, "smallest inverse temperature"),
         real("beta_max", 10.0, 1e-3, 100.0, "largest inverse temperature"),
         real("mode_energy", 1.0, -10.0, 10.0, "fermion mode energy"), real("beta", 1.0, 1e-3, 100.0, "inverse temperature"),
         real("mu", 0.0, -10.0, 10.0, "chemical potential")}},
       thermo_gibbs},
      {{"fluid-euler", "Taylor-Green steadiness and energy/enstrophy conservation of 2D Euler",
        "incompressible Euler flow: steady Taylor-Green vortex, conserved energy and enstrophy",
        {integer("points", 128, 16, 512, "grid points per axis for Taylor-Green"),
         real("t_end", 10.0, 0.01, 100.0, "Taylor-Green final time"),
         real("courant_fraction", 1.0, 0.05, 1.0, "fraction of the CFL step"),
         integer("conservation_points", 64, 16, 256, "grid points per axis for the random flow"),
         real("turnovers", 10.0, 0.1, 100.0, "turnover times"),
         real("conservation_courant", 0.125, 0.05, 1.0, "fraction of the CFL step for the random flow")}},
       fluid_euler},
      {{"fluid-compressible", "Compressible flow with entropy-dependent internal energy: mass and entropy drift",
        "conservation laws of mass and entropy",
        {integer("points", 24, 16, 256, "grid points per axis"), integer("steps", 1000, 1, 1e6, "number of steps"),
         real("courant_fraction", 0.5, 0.05, 1.0, "fraction of the CFL step"),
         real("stiffness", 1.0, 0.1, 10.0, "internal energy constant"), real("gamma", 1.4, 1.05, 3.0, "adiabatic index"),
         real("entropy_coupling", 0.3, 0.0, 1.0, "entropy coupling")}},
       fluid_compressible},
  };
  return entries;
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

RunResult run(const ExperimentConfig& config) {
  for (const auto& e : registry()) {
    if (e.info.name != config.experiment) continue;
    Recorder r{config.experiment, {}, {}};
    e.pipeline(config, r);
    return std::move(r.result);
  }
  throw InvalidInput("unknown experiment '" + config.experiment + "'");
}

}  // namespace protomech::cli

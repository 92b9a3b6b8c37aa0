#include <doctest.h>

#include "protomech/liepoisson/liepoisson.hpp"
#include "protomech/numerics/io.hpp"
#include "protomech/numerics/spectral.hpp"
#include "support/generators.hpp"

#include <cmath>
#include <filesystem>

using namespace protomech;
using namespace protomech::liepoisson;
using testgen::kPi;

namespace {

PeriodicGrid ring(Index n = 64) { return PeriodicGrid::line(n, 2 * kPi, -kPi); }

ScalarField normalized(ScalarField f) {
  f *= 1.0 / numerics::integrate(f);
  return f;
}

CovectorField covector(const ScalarField& f) { return CovectorField::from_fields({f}); }

VectorField vector_from(const std::vector<ScalarField>& fs) { return VectorField::from_fields(fs); }

// rho = (1 + a cos x) / 2pi, p = p0 + b sin x
EmergenceMomentum wavy_state(const PeriodicGrid& g, double a = 0.5, double p0 = 0.3, double b = 0.2) {
  const ScalarField rho = normalized(ScalarField::sample(g, [a](const Eigen::VectorXd& x) { return 1.0 + a * std::cos(x[0]); }));
  const ScalarField p = ScalarField::sample(g, [p0, b](const Eigen::VectorXd& x) { return p0 + b * std::sin(x[0]); });
  return EmergenceMomentum::from_momentum(rho, covector(p));
}

GridHamiltonian free_particle(const PeriodicGrid& g) {
  return GridHamiltonian(synchro::CanonicalHamiltonian::with_potential(ScalarField(g), 1.0));
}

// omega^2 (1 - cos x): the oscillator well that is smooth on the torus
GridHamiltonian torus_oscillator(const PeriodicGrid& g, double omega = 1.0) {
  return GridHamiltonian(synchro::CanonicalHamiltonian::with_potential(
      ScalarField::sample(g, [omega](const Eigen::VectorXd& x) { return omega * omega * (1.0 - std::cos(x[0])); }), 1.0));
}

Generator random_generator(const PeriodicGrid& g, int modes, testgen::Rng& rng) {
  std::vector<ScalarField> comps;
  for (Index a = 0; a < g.dimension(); ++a) comps.push_back(testgen::band_limited(g, modes, rng));
  return Generator(vector_from(comps), testgen::band_limited(g, modes, rng));
}

EmergenceMomentum random_momentum(const PeriodicGrid& g, int modes, testgen::Rng& rng) {
  ScalarField bump = testgen::band_limited(g, modes, rng);
  bump *= 0.3 / bump.values().cwiseAbs().maxCoeff();
  const ScalarField rho = normalized(ScalarField::constant(g, 1.0) + bump);
  std::vector<ScalarField> ps;
  for (Index a = 0; a < g.dimension(); ++a) ps.push_back(testgen::band_limited(g, modes, rng));
  return EmergenceMomentum::from_momentum(rho, CovectorField::from_fields(ps));
}

double max_diff(const EmergenceMomentum& a, const EmergenceMomentum& b) {
  double d = (a.density().values() - b.density().values()).cwiseAbs().maxCoeff();
  return std::max(d, (a.momentum_density() - b.momentum_density()).max_abs());
}

}  // namespace

TEST_SUITE("liepoisson") {

TEST_CASE("bracket is antisymmetric and matches the symbolic commutator") {
  const PeriodicGrid g = ring();
  testgen::Rng rng(11);
  const Generator V = random_generator(g, 5, rng);
  CHECK(bracket(V, V).max_abs() <= 1e-12);

  // a = sin x d_x + cos x, b = (1 + 0.5 cos 2x) d_x + sin 3x
  auto f = [&](auto fn) { return ScalarField::sample(g, [fn](const Eigen::VectorXd& x) { return fn(x[0]); }); };
  const Generator a(vector_from({f([](double x) { return std::sin(x); })}), f([](double x) { return std::cos(x); }));
  const Generator b(vector_from({f([](double x) { return 1.0 + 0.5 * std::cos(2 * x); })}),
                    f([](double x) { return std::sin(3 * x); }));
  const Generator c = bracket(a, b);
  // sin x (-sin 2x) - (1 + 0.5 cos 2x) cos x ; sin x (3 cos 3x) - (1 + 0.5 cos 2x)(-sin x)
  const ScalarField v_exact = f([](double x) { return -std::sin(x) * std::sin(2 * x) - (1 + 0.5 * std::cos(2 * x)) * std::cos(x); });
  const ScalarField u_exact = f([](double x) { return 3 * std::sin(x) * std::cos(3 * x) + (1 + 0.5 * std::cos(2 * x)) * std::sin(x); });
  CHECK((c.v.component(0) - v_exact.values()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((c.U.values() - u_exact.values()).cwiseAbs().maxCoeff() <= 1e-12);

  // near the origin sin x d_x is x d_x, and [d_x, x d_x] = d_x
  const Generator dx(vector_from({ScalarField::constant(g, 1.0)}), ScalarField(g));
  const Generator xdx(vector_from({f([](double x) { return std::sin(x); })}), ScalarField(g));
  const Generator e = bracket(dx, xdx);
  const Index origin = g.size() / 2;
  CHECK(e.v.component(0)[origin] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.U.values().cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(bracket(a, Generator::zero(ring(32))), InvalidInput);
}

TEST_CASE("Jacobi identity holds for band-limited generators") {
  testgen::Rng rng(21);
  for (const PeriodicGrid& g : {ring(64), PeriodicGrid::cube(2, 32, 2 * kPi)}) {
    for (int trial = 0; trial < 3; ++trial) {
      const Generator a = random_generator(g, 3, rng), b = random_generator(g, 3, rng), c = random_generator(g, 3, rng);
      const double scale = a.max_abs() * b.max_abs() * c.max_abs();
      CHECK(jacobi_residual(a, b, c) <= 1e-8 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("coadjoint action is dual to the bracket") {
  testgen::Rng rng(31);
  for (const PeriodicGrid& g : {ring(64), PeriodicGrid::cube(2, 32, 2 * kPi)}) {
    for (int trial = 0; trial < 4; ++trial) {
      const EmergenceMomentum J = random_momentum(g, 4, rng);
      const Generator a = random_generator(g, 4, rng), b = random_generator(g, 4, rng);
      CHECK(coadjoint_duality_residual(J, a, b) <= 1e-7);
      // the sign: the opposite convention would leave twice the pairing
      CHECK(std::abs(pairing(ad_star(a, J), b) + pairing(J, bracket(a, b))) > 1e-3);
    }
  }
}

TEST_CASE("pairing normalizes and vanishes on momentum-free states") {
  const PeriodicGrid g = ring();
  const EmergenceMomentum J = wavy_state(g);
  CHECK(pairing(J, Generator::constant(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  const EmergenceMomentum rest = wavy_state(g, 0.5, 0.0, 0.0);
  testgen::Rng rng(41);
  const Generator G(vector_from({testgen::band_limited(g, 4, rng)}), ScalarField(g));
  CHECK(std::abs(pairing(rest, G)) <= 1e-14);
}

TEST_CASE("generator of a functional: direct formulas") {
  const PeriodicGrid g = ring();
  const EmergenceMomentum J = wavy_state(g);
  const CovectorField p = J.momentum();

  const FunctionalGenerator kin = generator_from_functional(LocalFunctional::hamiltonian(free_particle(g)), J);
  CHECK(kin.masked_points == 0);
  CHECK((kin.generator.v.component(0) - p.component(0)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((kin.generator.U.values() + 0.5 * p.component(0).cwiseProduct(p.component(0))).cwiseAbs().maxCoeff() <= 1e-14);

  const FunctionalGenerator one = generator_from_functional(LocalFunctional::constant(1.0), J);
  CHECK(one.generator.v.max_abs() == 0.0);
  CHECK((one.generator.U.values().array() - 1.0).abs().maxCoeff() <= 1e-15);

  // canonical H with metric, vector potential and potential in 2D; in the
  // form g (p + A)(p + A) + U with g = h / 2 the scalar part is
  // -g p p + g A A + U, and the vector part is dH/dp = h (p + A)
  const PeriodicGrid g2 = PeriodicGrid::cube(2, 16, 2 * kPi);
  testgen::Rng rng(51);
  Eigen::MatrixXd h(2, 2);
  h << 1.3, 0.4, 0.4, 0.8;
  const CovectorField A = CovectorField::from_fields({testgen::band_limited(g2, 2, rng), testgen::band_limited(g2, 2, rng)});
  const ScalarField U = testgen::band_limited(g2, 2, rng);
  const GridHamiltonian H(synchro::CanonicalHamiltonian(h, A, U));
  const EmergenceMomentum J2 = random_momentum(g2, 2, rng);
  const FunctionalGenerator Hhat = generator_from_functional(LocalFunctional::hamiltonian(H), J2);
  const CovectorField p2 = J2.momentum();
  const Eigen::MatrixXd gm = 0.5 * h;
  double dv = 0.0, du = 0.0;
  for (Index i = 0; i < g2.size(); ++i) {
    const Eigen::Vector2d pi = p2.at(i), ai = A.at(i);
    dv = std::max(dv, (Hhat.generator.v.at(i) - h * (pi + ai)).cwiseAbs().maxCoeff());
    du = std::max(du, std::abs(Hhat.generator.U[i] - (-pi.dot(gm * pi) + ai.dot(gm * ai) + U[i])));
  }
  CHECK(dv <= 1e-13);
  CHECK(du <= 1e-13);
}

TEST_CASE("generator of a functional is its derivative, gradient corrections included") {
  // F = p^2/2 + c1 |dp|^2 + c2 p . lap p: first and second derivative orders
  const double c1 = 0.15, c2 = 0.05;
  LocalFunctional F;
  F.value = [&](const MomentumJet& j) {
    double lap = 0.0;
    const Index d = j.p.size();
    for (Index a = 0; a < d; ++a)
      for (Index i = 0; i < d; ++i) lap += j.p[a] * j.ddp[a](i, i);
    return 0.5 * j.p.squaredNorm() + c1 * j.dp.squaredNorm() + c2 * lap;
  };
  F.momentum_partial = [&](const MomentumJet& j) {
    Point out = j.p;
    for (Index a = 0; a < j.p.size(); ++a) out[a] += c2 * j.ddp[a].trace();
    return out;
  };
  F.gradient_partial = [&](const MomentumJet& j) -> Eigen::MatrixXd { return 2.0 * c1 * j.dp; };
  F.hessian_partial = [&](const MomentumJet& j) {
    std::vector<Eigen::MatrixXd> out;
    for (Index a = 0; a < j.p.size(); ++a) out.push_back(c2 * j.p[a] * Eigen::MatrixXd::Identity(j.p.size(), j.p.size()));
    return out;
  };
  CHECK(F.order() == 2);

  testgen::Rng rng(61);
  for (const PeriodicGrid& g : {ring(64), PeriodicGrid::cube(2, 24, 2 * kPi)}) {
    const EmergenceMomentum J = random_momentum(g, 3, rng);
    const Generator Fhat = generator_from_functional(F, J).generator;
    CHECK(pairing(J, Fhat) == doctest::Approx(functional_value(F, J)).epsilon(1e-10));
    // directional derivative along a normalization-preserving perturbation
    ScalarField drho = testgen::band_limited(g, 3, rng);
    drho -= ScalarField::constant(g, numerics::integrate(drho) / g.volume());
    std::vector<ScalarField> dm;
    for (Index a = 0; a < g.dimension(); ++a) dm.push_back(testgen::band_limited(g, 3, rng));
    // sized like the state itself so the difference quotient is accurate
    const double size = J.density().values().cwiseAbs().maxCoeff();
    drho *= size / drho.values().cwiseAbs().maxCoeff();
    for (auto& f : dm) f *= size / f.values().cwiseAbs().maxCoeff();
    const MomentumRate K(CovectorField::from_fields(dm), drho);
    const double eps = 1e-5;
    auto shifted = [&](double s) {
      return EmergenceMomentum(J.momentum_density() + s * K.momentum_density, J.density() + s * K.density);
    };
    const double fd = (functional_value(F, shifted(eps)) - functional_value(F, shifted(-eps))) / (2 * eps);
    const double exact = pairing(K, Fhat);
    CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("vanishing density is masked in the generator") {
  const PeriodicGrid g = ring(32);
  const ScalarField rho = normalized(ScalarField::sample(g, [](const Eigen::VectorXd& x) {
    return std::max(0.0, std::cos(x[0]));
  }));
  const EmergenceMomentum J = EmergenceMomentum::from_momentum(rho, covector(ScalarField::constant(g, 0.4)));
  const FunctionalGenerator fg = generator_from_functional(LocalFunctional::hamiltonian(free_particle(g)), J);
  CHECK(fg.masked_points > 0);
  for (Index i = 0; i < g.size(); ++i)
    if (rho[i] == 0.0) {
      CHECK(fg.generator.v.component(0)[i] == 0.0);
      CHECK(fg.generator.U[i] == 0.0);
    }
}

TEST_CASE("EmergenceMomentum validates normalization and vacuum momentum") {
  const PeriodicGrid g = ring(32);
  const ScalarField rho = ScalarField::constant(g, 1.0 / (2 * kPi));
  CHECK_NOTHROW(EmergenceMomentum(CovectorField(g), rho));
  CHECK_THROWS_AS(EmergenceMomentum(CovectorField(g), 2.0 * rho), InvalidState);
  ScalarField holed = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 1.0 - std::cos(x[0]); });
  holed = normalized(holed);
  CovectorField m = covector(ScalarField::constant(g, 0.1));
  CHECK_THROWS_AS(EmergenceMomentum(m, holed), InvalidState);
  // signed densities are legal
  const ScalarField signed_rho =
      normalized(ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 1.0 + 2.0 * std::cos(x[0]); }));
  CHECK(signed_rho.values().minCoeff() < 0.0);
  CHECK_NOTHROW(EmergenceMomentum::from_momentum(signed_rho, covector(ScalarField::constant(g, 0.2))));
}

TEST_CASE("uniform momentum transports the density rigidly") {
  const PeriodicGrid g = ring(64);
  const double k = 0.7;
  const EmergenceMomentum uniform =
      EmergenceMomentum::from_momentum(ScalarField::constant(g, 1.0 / (2 * kPi)), covector(ScalarField::constant(g, k)));
  const GridHamiltonian H = free_particle(g);
  CHECK(max_diff(lie_poisson_step(uniform, H, 0.05), uniform) <= 1e-14);

  const EmergenceMomentum J = wavy_state(g, 0.5, k, 0.0);
  EmergenceMomentum s = J;
  const double dt = 0.02;
  const int steps = 100;
  for (int n = 0; n < steps; ++n) s = lie_poisson_step(s, H, dt);
  const double t = dt * steps;
  const ScalarField exact = normalized(ScalarField::sample(g, [&](const Eigen::VectorXd& x) { return 1.0 + 0.5 * std::cos(x[0] - k * t); }));
  CHECK((s.density().values() - exact.values()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((s.momentum_density().component(0) - k * exact.values()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("oscillator well: mass over 1e3 steps and energy per unit time") {
  const PeriodicGrid g = ring(64);
  const GridHamiltonian H = torus_oscillator(g);
  EmergenceMomentum J = wavy_state(g, 0.5, 0.0, 0.2);
  const double e0 = energy(J, H);
  const double dt = 1e-3;
  for (int n = 0; n < 1000; ++n) J = lie_poisson_step(J, H, dt);
  CHECK(std::abs(J.total() - 1.0) <= 1e-9);
  CHECK(std::abs(energy(J, H) - e0) <= 1e-6 * 1000 * dt);
}

TEST_CASE("one step agrees with the synchronicity step to O(dt^2)") {
  const PeriodicGrid g = ring(64);
  const GridHamiltonian H = torus_oscillator(g, 0.8);
  const double hbar = 1.0;
  const ScalarField phase = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 0.25 * std::sin(x[0]) + 0.1 * std::cos(2 * x[0]); });
  const ScalarField mu = normalized(ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 1.0 + 0.4 * std::cos(x[0] + 0.3); }));
  const synchro::SynchronicityState s0 = synchro::SynchronicityState::from_phase(phase, mu, hbar);
  const EmergenceMomentum J0 = EmergenceMomentum::from_synchronicity(s0);
  auto gap = [&](double dt) {
    const EmergenceMomentum via_synchro = EmergenceMomentum::from_synchronicity(synchro::step(s0, H, dt));
    return max_diff(lie_poisson_step(J0, H, dt), via_synchro);
  };
  const double coarse = gap(0.02), fine = gap(0.01);
  CHECK(coarse <= 0.02 * 0.02);
  CHECK(fine <= coarse / 3.5);
}

TEST_CASE("custom generator rules") {
  const PeriodicGrid g = ring(64);
  const GridHamiltonian H = torus_oscillator(g);
  const EmergenceMomentum J = wavy_state(g);
  const double dt = 1e-2;

  const UpdateRule coadjoint = [&](const EmergenceMomentum& s) {
    return ad_star(generator_from_functional(LocalFunctional::hamiltonian(H), s).generator, s);
  };
  CHECK(max_diff(custom_generator_step(J, coadjoint, dt), lie_poisson_step(J, H, dt)) <= 1e-12);

  const UpdateRule still = [](const EmergenceMomentum& s) { return MomentumRate::zero(s.grid()); };
  CHECK(max_diff(custom_generator_step(J, still, dt), J) == 0.0);

  const double gamma = 0.8;
  const UpdateRule damping = [gamma](const EmergenceMomentum& s) {
    return MomentumRate(-gamma * s.momentum_density(), ScalarField(s.grid()));
  };
  auto abs_momentum = [](const EmergenceMomentum& s) {
    return numerics::integrate(ScalarField(s.grid(), s.momentum_density().component(0).cwiseAbs()));
  };
  EmergenceMomentum s = J;
  const double m0 = abs_momentum(J);
  for (int n = 0; n < 100; ++n) s = custom_generator_step(s, damping, dt);
  CHECK(std::abs(s.total() - 1.0) <= 1e-12);
  CHECK(std::abs(abs_momentum(s) - m0 * std::exp(-gamma * 100 * dt)) <= 1e-6);

  const UpdateRule wrong_grid = [](const EmergenceMomentum&) { return MomentumRate::zero(ring(32)); };
  CHECK_THROWS_AS(custom_generator_step(J, wrong_grid, dt), InvalidInput);
  const UpdateRule leak = [](const EmergenceMomentum& s) {
    return MomentumRate(CovectorField(s.grid()), ScalarField::constant(s.grid(), 1.0));
  };
  CHECK_THROWS_AS(custom_generator_step(J, leak, dt), InvalidState);
}

TEST_CASE("density sign changes: slow crossings pass, jumps are flagged") {
  const PeriodicGrid g = ring(64);
  const ScalarField rho = normalized(ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 1.0 + 0.9 * std::cos(x[0]); }));
  const EmergenceMomentum J(CovectorField(g), rho);
  const ScalarField cosx = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::cos(x[0]); });
  const double dt = 0.01;
  const UpdateRule jump = [&](const EmergenceMomentum& s) { return MomentumRate(CovectorField(s.grid()), (-3.0 / (2 * kPi * dt)) * cosx); };
  CHECK_THROWS_AS(custom_generator_step(J, jump, dt), IntegrationFault);

  const ScalarField touching = normalized(ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 1.0 + std::cos(x[0]); }));
  const EmergenceMomentum T(CovectorField(g), touching);
  const UpdateRule slow = [&](const EmergenceMomentum& s) { return MomentumRate(CovectorField(s.grid()), 0.1 * cosx); };
  EmergenceMomentum s = T;
  for (int n = 0; n < 5; ++n) s = custom_generator_step(s, slow, dt);
  CHECK(s.density().values().minCoeff() < 0.0);
}

TEST_CASE("CFL violations are rejected") {
  const PeriodicGrid g = ring(64);
  const EmergenceMomentum J = wavy_state(g, 0.5, 2.0, 0.0);
  const GridHamiltonian H = free_particle(g);
  const double limit = admissible_dt(J, H);
  CHECK(limit == doctest::Approx(0.5 * g.axis(0).spacing() / 2.0));
  CHECK_NOTHROW(lie_poisson_step(J, H, 0.9 * limit));
  CHECK_THROWS_AS(lie_poisson_step(J, H, 1.1 * limit), StepSizeError);
  CHECK_THROWS_AS(lie_poisson_step(J, H, -1.0), InvalidInput);
}

TEST_CASE("momentum snapshot CSV columns") {
  const PeriodicGrid g = ring(16);
  const EmergenceMomentum J = wavy_state(g);
  const auto path = std::filesystem::temp_directory_path() / "protomech_lp_snapshot.csv";
  write_momentum(path, J);
  const numerics::CsvTable t = numerics::read_csv(path);
  CHECK(t.columns == std::vector<std::string>{"x", "rho", "rho_p"});
  CHECK(t.rows.size() == 16);
  CHECK(t.column("rho_p")[3] == J.momentum_density().component(0)[3]);
  std::filesystem::remove(path);
}

}

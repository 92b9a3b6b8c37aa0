#include <doctest.h>

#include "protomech/numerics/io.hpp"
#include "protomech/numerics/spectral.hpp"
#include "protomech/quantum/quantum.hpp"
#include "support/generators.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <filesystem>

using namespace protomech;
using namespace protomech::quantum;
using testgen::kPi;

namespace {

const Complex kI(0.0, 1.0);

ComplexField gaussian_packet(const PeriodicGrid& g, double x0, double sigma, double p0, double hbar) {
  return ComplexField::sample(g, [=](const Eigen::VectorXd& x) {
    const double u = (x[0] - x0) / sigma;
    return std::pow(kPi * sigma * sigma, -0.25) * std::exp(-0.5 * u * u) * std::polar(1.0, p0 * (x[0] - x0) / hbar);
  });
}

ScalarField trap(const PeriodicGrid& g, double center) {
  return ScalarField::sample(g, [=](const Eigen::VectorXd& x) { return 0.5 * (x[0] - center) * (x[0] - center); });
}

// Box of length 32 around the origin: 16 standard deviations each side for sigma = 1.
PeriodicGrid wide_line(Index n) { return PeriodicGrid::line(n, 32.0, -16.0); }

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double expectation(const WaveFunction& psi, const Observable& f) {
  const Values<Complex> fpsi = f.apply(psi.values.values());
  return (psi.values.values().dot(fpsi) * psi.grid().cell_volume()).real();
}

}  // namespace

TEST_SUITE("quantum") {

TEST_CASE("free Hamiltonian spectrum is hbar^2 k^2 / 2 over the grid modes") {
  const PeriodicGrid g = PeriodicGrid::line(32, 2 * kPi);
  for (double hbar : {1.0, 0.6}) {
    const Observable h = build_hamiltonian(CanonicalHamiltonian::with_potential(ScalarField(g)), hbar);
    const Eigen::VectorXd ev = sorted_eigenvalues(h.matrix());
    const Eigen::VectorXd k = g.wavenumbers(0, false);
    std::vector<double> expected;
    for (Index m = 0; m < k.size(); ++m) expected.push_back(0.5 * hbar * hbar * k[m] * k[m]);
    std::sort(expected.begin(), expected.end());
    for (Index m = 0; m < k.size(); ++m) CHECK(std::abs(ev[m] - expected[static_cast<std::size_t>(m)]) <= 1e-10);
  }
}

TEST_CASE("harmonic ground energy from dense diagonalization") {
  const PeriodicGrid g = wide_line(128);
  const Observable h = build_hamiltonian(CanonicalHamiltonian::with_potential(trap(g, 0.0)), 1.0);
  const Eigen::VectorXd ev = sorted_eigenvalues(h.matrix());
  CHECK(std::abs(ev[0] - 0.5) <= 1e-4);
  CHECK(std::abs(ev[1] - 1.5) <= 1e-4);
}

TEST_CASE("constant gauge shift moves every mode to (hbar k + a)^2 / 2") {
  const PeriodicGrid g = PeriodicGrid::line(16, 2 * kPi);
  const double a = 0.3;
  numerics::CovectorField A(g);
  A.component(0).setConstant(a);
  const CanonicalHamiltonian ch(Eigen::MatrixXd::Identity(1, 1), A, ScalarField(g));
  const Observable h = build_hamiltonian(ch, 1.0);
  const Eigen::VectorXd ev = sorted_eigenvalues(h.matrix());
  const Eigen::VectorXd k = g.wavenumbers(0, false);
  std::vector<double> expected;
  for (Index m = 0; m < k.size(); ++m) expected.push_back(0.5 * (k[m] + a) * (k[m] + a));
  std::sort(expected.begin(), expected.end());
  for (Index m = 0; m < k.size(); ++m) CHECK(std::abs(ev[m] - expected[static_cast<std::size_t>(m)]) <= 1e-10);
}

TEST_CASE("varying vector potential gives a Hermitian operator whose dense and applied forms agree") {
  testgen::Rng rng(21);
  const PeriodicGrid g = PeriodicGrid::cube(2, 8, 2 * kPi);
  const numerics::CovectorField A = numerics::CovectorField::from_fields(
      {testgen::band_limited(g, 2, rng), testgen::band_limited(g, 2, rng)});
  Eigen::MatrixXd metric(2, 2);
  metric << 1.0, 0.2, 0.2, 0.7;
  const CanonicalHamiltonian ch(metric, A, testgen::band_limited(g, 2, rng));
  const Observable h = build_hamiltonian(ch, 0.8);
  CHECK(h.degree() == 2);
  CHECK_FALSE(h.is_split());
  const Eigen::MatrixXcd m = h.matrix();
  CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * m.cwiseAbs().maxCoeff());
  const ComplexField psi = testgen::band_limited_complex(g, 3, rng);
  CHECK((m * psi.values() - h.apply(psi.values())).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("non-symmetric metric is a configuration error") {
  const PeriodicGrid g = PeriodicGrid::cube(2, 8, 1.0);
  Eigen::MatrixXd metric(2, 2);
  metric << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(CanonicalHamiltonian(metric, numerics::CovectorField(g), ScalarField(g)), ConfigurationError);
}

TEST_CASE("free plane wave acquires the exact phase") {
  const PeriodicGrid g = PeriodicGrid::line(32, 2 * kPi);
  const double hbar = 0.7, t = 1.3;
  const Observable h = build_hamiltonian(CanonicalHamiltonian::with_potential(ScalarField(g)), hbar);
  for (int k : {-5, 0, 3, 9}) {
    const ComplexField wave = ComplexField::sample(g, [k](const Eigen::VectorXd& x) {
      return std::polar(1.0 / std::sqrt(2 * kPi), k * x[0]);
    });
    WaveFunction psi(wave, hbar);
    const Propagator u(h, t / 10);
    for (int n = 0; n < 10; ++n) psi = schrodinger_step(psi, u);
    const Complex phase = std::exp(-kI * hbar * double(k * k) * t / 2.0);
    CHECK((psi.values.values() - phase * wave.values()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("coherent state centroid follows x0 cos t") {
  const PeriodicGrid g = wide_line(256);
  const WaveFunction psi0(gaussian_packet(g, 2.0, 1.0, 0.0, 1.0), 1.0);
  const Observable h = build_hamiltonian(CanonicalHamiltonian::with_potential(trap(g, 0.0)), 1.0);
  const Observable x = Observable::position(g, 1.0);
  const double dt = 1e-3;
  const Propagator u(h, dt);
  WaveFunction psi = psi0;
  double worst = 0.0;
  for (int n = 1; n <= 3142; ++n) {
    psi = schrodinger_step(psi, u);
    if (n % 100 == 0) worst = std::max(worst, std::abs(expectation(psi, x) - 2.0 * std::cos(n * dt)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("norm is preserved over ten thousand steps") {
  const PeriodicGrid g = wide_line(128);
  WaveFunction psi(gaussian_packet(g, 1.0, 1.0, 0.5, 1.0), 1.0);
  const Propagator u(build_hamiltonian(CanonicalHamiltonian::with_potential(trap(g, 0.0)), 1.0), 0.01);
  for (int n = 0; n < 10000; ++n) psi = schrodinger_step(psi, u);
  CHECK(std::abs(1.0 - psi.norm()) <= 1e-10);
}

TEST_CASE("wave function rejects bad normalization and parameters") {
  const PeriodicGrid g = wide_line(64);
  ComplexField f = gaussian_packet(g, 0.0, 1.0, 0.0, 1.0);
  f *= Complex(1.01);
  CHECK_THROWS_AS(WaveFunction(f, 1.0), InvalidState);
  CHECK_NOTHROW(WaveFunction::normalized(f, 1.0));
  CHECK_THROWS_AS(WaveFunction::normalized(f, -1.0), InvalidInput);
  CHECK_THROWS_AS(WaveFunction::normalized(ComplexField(g), 1.0), InvalidInput);
}

TEST_CASE("density matrix invariants") {
  const PeriodicGrid g = wide_line(64);
  const WaveFunction a(gaussian_packet(g, -2.0, 1.0, 0.0, 1.0), 1.0);
  const WaveFunction b(gaussian_packet(g, 2.0, 1.0, 0.0, 1.0), 1.0);
  const DensityMatrix pure = DensityMatrix::pure(a);
  CHECK(std::abs(pure.trace() - 1.0) <= 1e-12);
  CHECK(pure.spectrum().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::MatrixXcd skew = pure.entries();
  skew(0, 1) += Complex(0.0, 1e-3);
  CHECK_THROWS_AS(DensityMatrix(g, skew), InvalidState);
  CHECK_THROWS_AS(DensityMatrix(g, 2.0 * pure.entries()), InvalidState);
  CHECK_THROWS_AS(DensityMatrix::mixture({1.5, -0.5}, {a, b}), InvalidInput);
  CHECK_THROWS_AS(DensityMatrix(g, 1.5 * pure.entries() - 0.5 * DensityMatrix::pure(b).entries()), InvalidState);
  const DensityMatrix signed_mix = DensityMatrix::mixture({1.5, -0.5}, {a, b}, true);
  CHECK(signed_mix.is_signed());
  CHECK(signed_mix.spectrum().minCoeff() < 0.0);
  CHECK_THROWS_AS(DensityMatrix(PeriodicGrid::line(1024, 1.0), Eigen::MatrixXcd::Identity(1024, 1024) / 1024.0),
                  ConfigurationError);
}

TEST_CASE("pure density matrix evolves as the Schrodinger outer product") {
  const PeriodicGrid g = wide_line(64);
  WaveFunction psi(gaussian_packet(g, 2.0, 1.0, 0.5, 1.0), 1.0);
  DensityMatrix rho = DensityMatrix::pure(psi);
  const Propagator u(build_hamiltonian(CanonicalHamiltonian::with_potential(trap(g, 0.0)), 1.0), kPi / 200);
  for (int n = 0; n < 200; ++n) {
    psi = schrodinger_step(psi, u);
    rho = liouville_step_quantum(rho, u);
  }
  CHECK((rho.entries() - DensityMatrix::pure(psi).entries()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("pure-state pictures agree on degree-two observables along the harmonic benchmark") {
  const PeriodicGrid g = wide_line(64);
  WaveFunction psi(gaussian_packet(g, 1.5, 1.0, -0.5, 1.0), 1.0);
  DensityMatrix rho = DensityMatrix::pure(psi);
  const Observable h = build_hamiltonian(CanonicalHamiltonian::with_potential(trap(g, 0.0)), 1.0);
  const Propagator u(h, 0.05);
  Observable xp(g, 1.0);
  xp.add_term(ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 0.5 * x[0]; }), {0});
  const std::vector<Observable> obs{Observable::position(g, 1.0), Observable::momentum(g, 1.0),
                                    Observable::momentum(g, 1.0, 0, 2), xp, h};
  std::vector<Eigen::MatrixXcd> mats;
  for (const auto& o : obs) mats.push_back(o.matrix());
  double worst = 0.0;
  for (int n = 0; n < 40; ++n) {
    psi = schrodinger_step(psi, u);
    rho = liouville_step_quantum(rho, u);
    for (std::size_t k = 0; k < obs.size(); ++k)
      worst = std::max(worst, std::abs(rho.expectation(mats[k]) - expectation(psi, obs[k])));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("thermal states: exact commutant for split-free H, O(dt^2) drift under Strang splitting") {
  auto thermal_of = [](const PeriodicGrid& g, const Observable& h) {
    const Eigen::MatrixXcd hm = h.matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (hm + hm.adjoint()));
    Eigen::VectorXd w = (-es.eigenvalues().array()).exp();
    w /= w.sum();
    return DensityMatrix(g, es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
  };
  const PeriodicGrid g = wide_line(64);
  const Observable free = build_hamiltonian(CanonicalHamiltonian::with_potential(ScalarField(g)), 1.0);
  const DensityMatrix free_thermal = thermal_of(g, free);
  DensityMatrix rho = free_thermal;
  const Propagator uf(free, 1e-2);
  for (int n = 0; n < 1000; ++n) rho = liouville_step_quantum(rho, uf);
  CHECK((rho.entries() - free_thermal.entries()).cwiseAbs().maxCoeff() <= 1e-9);

  // The split propagator is exp(-i H' dt) with H' = H + O(dt^2), so a state
  // commuting with H drifts at second order.
  const Observable h = build_hamiltonian(CanonicalHamiltonian::with_potential(trap(g, 0.0)), 1.0);
  const DensityMatrix thermal = thermal_of(g, h);
  double drift[2];
  for (int r = 0; r < 2; ++r) {
    const double dt = 1e-2 / (1 << r);
    const Propagator u(h, dt);
    DensityMatrix s = thermal;
    for (int n = 0; n < (10 << r); ++n) s = liouville_step_quantum(s, u);
    drift[r] = (s.entries() - thermal.entries()).cwiseAbs().maxCoeff();
  }
  CHECK(drift[1] <= 1e-7);
  CHECK(drift[0] / drift[1] >= 3.5);
}

TEST_CASE("spectrum, trace and Hermiticity are invariant under the quantum Liouville step") {
  const PeriodicGrid g = wide_line(64);
  const Observable h = build_hamiltonian(CanonicalHamiltonian::with_potential(trap(g, 0.0)), 1.0);
  const WaveFunction a(gaussian_packet(g, -2.0, 1.0, 0.3, 1.0), 1.0);
  const WaveFunction b(gaussian_packet(g, 2.0, 0.8, 0.0, 1.0), 1.0);
  DensityMatrix mix = DensityMatrix::mixture({0.7, 0.3}, {a, b});
  const Eigen::VectorXd before = mix.spectrum();
  const Propagator v(h, 0.01);
  for (int n = 0; n < 1000; ++n) mix = liouville_step_quantum(mix, v);
  CHECK((mix.spectrum() - before).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(std::abs(mix.trace() - 1.0) <= 1e-9);
  CHECK(mix.hermiticity_defect() <= 1e-9);
}

TEST_CASE("Ehrenfest: centroid velocity equals mean momentum over mass") {
  const PeriodicGrid g = wide_line(128);
  const double mass = 2.0, dt = 1e-3;
  const ScalarField u = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 0.1 * x[0] * x[0] + 0.02 * std::pow(x[0], 4) / 8; });
  const Observable h = build_hamiltonian(CanonicalHamiltonian::with_potential(u, mass), 1.0);
  const Propagator step(h, dt);
  WaveFunction psi(gaussian_packet(g, 1.0, 1.0, 0.4, 1.0), 1.0, mass);
  const Observable x = Observable::position(g, 1.0), p = Observable::momentum(g, 1.0);
  std::vector<WaveFunction> frames{psi};
  for (int n = 0; n < 2; ++n) frames.push_back(schrodinger_step(frames.back(), step));
  const double velocity = (expectation(frames[2], x) - expectation(frames[0], x)) / (2 * dt);
  CHECK(std::abs(velocity - expectation(frames[1], p) / mass) <= 1e-5);
}

TEST_CASE("Heisenberg and Schrodinger pictures give the same expectations") {
  const PeriodicGrid g = wide_line(64);
  const Observable h = build_hamiltonian(CanonicalHamiltonian::with_potential(trap(g, 0.0)), 1.0);
  const DensityMatrix rho = DensityMatrix::pure(WaveFunction(gaussian_packet(g, 1.0, 1.0, 0.2, 1.0), 1.0));
  CHECK(heisenberg_expectation_check(rho, h, Observable::position(g, 1.0), kPi) <= 1e-8);
  CHECK(heisenberg_expectation_check(rho, h, h, 0.7) <= 1e-10);
  CHECK(heisenberg_expectation_check(rho, h, h, 17.0) <= 1e-10);
  const Observable free = build_hamiltonian(CanonicalHamiltonian::with_potential(ScalarField(g)), 1.0);
  CHECK(heisenberg_expectation_check(rho, free, Observable::momentum(g, 1.0, 0, 2), 2.0) <= 1e-10);
}

TEST_CASE("momentum commutator with multiplication is hbar / i times the gradient") {
  const PeriodicGrid g = PeriodicGrid::line(32, 2 * kPi);
  CHECK(commutation_check(g, ScalarField::constant(g, 2.5), 1.0) <= 1e-12);
  CHECK(commutation_check(g, ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::sin(x[0]); }), 0.5) <=
        1e-10);
  testgen::Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const PeriodicGrid g2 = PeriodicGrid::cube(2, 16, 3.0);
    CHECK(commutation_check(g2, testgen::band_limited(g2, 2, rng), 1.3) <= 1e-9);
    CHECK(commutation_check(g, testgen::band_limited(g, 4, rng), 1.0) <= 1e-9);
  }
}

TEST_CASE("commutator matches a direct matrix evaluation") {
  testgen::Rng rng(4);
  const PeriodicGrid g = PeriodicGrid::line(32, 2 * kPi);
  const ScalarField f = testgen::band_limited(g, 4, rng);
  const Eigen::MatrixXcd p = Observable::momentum(g, 1.0).matrix();
  const Eigen::MatrixXcd fm = f.values().cast<Complex>().asDiagonal();
  const Eigen::MatrixXcd lhs = p * fm - fm * p;
  const ScalarField df = numerics::spectral_derivative(f, 0);
  for (int k = -7; k <= 7; ++k) {
    const Values<Complex> probe =
        ComplexField::sample(g, [k](const Eigen::VectorXd& x) { return std::polar(1.0, k * x[0]); }).values();
    const Values<Complex> rhs = -kI * df.values().cast<Complex>().cwiseProduct(probe);
    CHECK((lhs * probe - rhs).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("observable expectations match their Wigner integrals") {
  const PeriodicGrid g = PeriodicGrid::line(64, 20.0, -10.0);
  const PeriodicGrid fine = PeriodicGrid::line(128, 20.0, -10.0);
  const double sigma = 1.0, hbar = 1.0;
  const DensityMatrix rho = DensityMatrix::pure(WaveFunction(gaussian_packet(g, 0.0, sigma, 0.0, hbar), hbar));
  CHECK(duality_check(rho, Observable::identity(g, hbar)) <= 1e-10);
  CHECK(std::abs(rho.expectation(Observable::momentum(g, hbar).matrix())) <= 1e-8);
  CHECK(duality_check(rho, Observable::momentum(g, hbar)) <= 1e-8);
  const Observable p2 = Observable::momentum(g, hbar, 0, 2);
  CHECK(duality_check(rho, p2) <= 1e-6);
  CHECK(std::abs(rho.expectation(p2.matrix()).real() - hbar * hbar / (2 * sigma * sigma)) <= 1e-6);

  const DensityMatrix moving = DensityMatrix::pure(WaveFunction(gaussian_packet(fine, 1.0, sigma, 0.7, hbar), hbar));
  Observable mixed(fine, hbar);
  mixed.add_term(ScalarField::sample(fine, [](const Eigen::VectorXd& x) { return std::exp(-x[0] * x[0] / 8); }), {0, 0});
  mixed.add_term(ScalarField::sample(fine, [](const Eigen::VectorXd& x) { return 0.3 * x[0]; }), {0});
  CHECK(duality_check(moving, mixed) <= 1e-6);

  Observable cubic(g, hbar);
  cubic.add_term(ScalarField::constant(g, 0.5), {0, 0, 0});
  CHECK_THROWS_AS(duality_check(rho, cubic), InvalidInput);
}

TEST_CASE("wave functions and density matrices serialize as CSV") {
  const PeriodicGrid g = wide_line(16);
  const WaveFunction psi = WaveFunction::normalized(gaussian_packet(g, 0.0, 2.0, 0.1, 1.0), 1.0);
  const auto dir = std::filesystem::temp_directory_path() / "protomech_quantum_test";
  std::filesystem::create_directories(dir);
  write_wavefunction(dir / "psi.csv", psi);
  const numerics::CsvTable t = numerics::read_csv(dir / "psi.csv");
  CHECK(t.rows.size() == 16);
  CHECK(t.column("re")[5] == psi.values[5].real());
  write_density_matrix(dir / "rho.csv", DensityMatrix::pure(psi));
  CHECK(numerics::read_csv(dir / "rho.csv").rows.size() == 256);
  std::filesystem::remove_all(dir);
}

}

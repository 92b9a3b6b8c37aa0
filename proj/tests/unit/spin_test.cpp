#include <doctest.h>

#include "protomech/spin/spin.hpp"
#include "support/generators.hpp"

#include <cmath>
#include <filesystem>

using namespace protomech;
using namespace protomech::spin;
using testgen::kPi;

namespace {

const Complex kI{0.0, 1.0};

Eigen::VectorXd tilted_gauge(const SphereGrid& g) {
  return g.sample([](double t, double p) { return Complex(0.3 * std::cos(t) + 0.2 * std::sin(t) * std::cos(p)); })
      .real();
}

double max_abs(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }

Eigen::Vector2cd random_qubit(testgen::Rng& rng) {
  Eigen::Vector2cd v(Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal()));
  return v.normalized();
}

Direction random_direction(testgen::Rng& rng) {
  return Direction(rng.normal(), rng.normal(), rng.normal()).normalized();
}

}  // namespace

TEST_SUITE("spin") {

TEST_CASE("sphere quadrature integrates the area and low harmonics exactly") {
  const SphereGrid g(16, 32);
  CHECK(std::abs(g.weights().sum() - 4 * kPi) < 1e-10);
  CHECK(g.theta().minCoeff() > 0.0);
  CHECK(g.theta().maxCoeff() < kPi);
  for (int l = 0; l <= 4; ++l)
    for (int m = -l; m <= l; ++m)
      for (int l2 = 0; l2 <= 4; ++l2)
        for (int m2 = -l2; m2 <= l2; ++m2) {
          const Complex ip = g.inner(spherical_harmonic(g, l, m), spherical_harmonic(g, l2, m2));
          CHECK(std::abs(ip - ((l == l2 && m == m2) ? 1.0 : 0.0)) < 1e-12);
        }
  CHECK_THROWS_AS(SphereGrid(15, 32), InvalidInput);
  CHECK_THROWS_AS(SphereGrid(16, 31), InvalidInput);
}

TEST_CASE("angular derivatives are exact on both sectors") {
  const SphereGrid g(18, 36);
  const auto f = g.sample([](double t, double p) {
    return Complex(std::sin(t) * std::cos(p) * std::cos(t), std::pow(std::sin(t), 2) * std::sin(2 * p));
  });
  const auto df_t = g.sample([](double t, double p) {
    return Complex(std::cos(2 * t) * std::cos(p), std::sin(2 * t) * std::sin(2 * p));
  });
  const auto df_p = g.sample([](double t, double p) {
    return Complex(-std::sin(t) * std::sin(p) * std::cos(t),
                   2 * std::pow(std::sin(t), 2) * std::cos(2 * p));
  });
  CHECK(max_abs(g.d_theta(f, Sector::Integer) - df_t) < 1e-11);
  CHECK(max_abs(g.d_phi(f, Sector::Integer) - df_p) < 1e-11);

  // e^{3i phi / 2} cos(theta / 2) sin(theta)
  const auto h = g.sample([](double t, double p) { return std::exp(1.5 * kI * p) * std::cos(t / 2) * std::sin(t); });
  const auto dh_t = g.sample([](double t, double p) {
    return std::exp(1.5 * kI * p) * (-0.5 * std::sin(t / 2) * std::sin(t) + std::cos(t / 2) * std::cos(t));
  });
  CHECK(max_abs(g.d_theta(h, Sector::HalfInteger) - dh_t) < 1e-11);
  CHECK(max_abs(g.d_phi(h, Sector::HalfInteger) - 1.5 * kI * h) < 1e-11);
}

TEST_CASE("orbital generators act on spherical harmonics with the textbook eigenvalues") {
  const SphereGrid g(16, 32);
  for (double hbar : {1.0, 0.7}) {
    const auto L = build_L(g, hbar);
    for (int l = 0; l <= 4; ++l)
      for (int m = -l; m <= l; ++m) {
        const auto y = spherical_harmonic(g, l, m);
        CHECK(max_abs(L[2].apply(g, y, Sector::Integer) - hbar * m * y) < 1e-8);
        CHECK(max_abs(apply_casimir(g, L, y, Sector::Integer) - hbar * hbar * l * (l + 1) * y) < 1e-6);
      }
  }
}

TEST_CASE("orbital generators close the su(2) algebra and are Hermitian on the resolved basis") {
  const SphereGrid g(16, 32);
  const double hbar = 0.7;
  const auto L = build_L(g, hbar);
  const auto basis = harmonic_basis(g, 4);
  std::array<Eigen::MatrixXcd, 3> M;
  for (int j = 0; j < 3; ++j) M[j] = galerkin_matrix(g, L[j], basis, Sector::Integer);
  for (int j = 0; j < 3; ++j) {
    const int a = (j + 1) % 3;
    const int b = (j + 2) % 3;
    CHECK((M[a] * M[b] - M[b] * M[a] - kI * hbar * M[j]).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((M[j] - M[j].adjoint()).cwiseAbs().maxCoeff() < AngularOperator::kHermitianTolerance);
    CHECK(hermiticity_defect(g, L[j], basis, Sector::Integer) < AngularOperator::kHermitianTolerance);
  }
  // on grid functions directly: the commutator identity holds column by column
  const Eigen::MatrixXcd G1 = L[0].matrix(g, Sector::Integer);
  const Eigen::MatrixXcd G2 = L[1].matrix(g, Sector::Integer);
  const Eigen::MatrixXcd G3 = L[2].matrix(g, Sector::Integer);
  for (const auto& y : basis) CHECK(max_abs(G1 * (G2 * y) - G2 * (G1 * y) - kI * hbar * (G3 * y)) < 1e-7);
  CHECK_THROWS_AS(harmonic_basis(g, 8), InvalidInput);
}

TEST_CASE("spin generators have the half-integer eigenstates") {
  const SphereGrid g(16, 32);
  for (double hbar : {1.0, 0.7}) {
    for (bool gauged : {false, true}) {
      const Eigen::VectorXd s = gauged ? tilted_gauge(g) : Eigen::VectorXd::Zero(g.size());
      const auto S = build_S(g, hbar, s);
      const auto up = spin_up(g, s);
      const auto down = spin_down(g, s);
      CHECK(std::abs(g.norm(up) - 1.0) < 1e-12);
      CHECK(std::abs(g.norm(down) - 1.0) < 1e-12);
      CHECK(max_abs(S[2].apply(g, up, Sector::HalfInteger) - 0.5 * hbar * up) < 1e-7);
      CHECK(max_abs(S[2].apply(g, down, Sector::HalfInteger) + 0.5 * hbar * down) < 1e-7);
      CHECK(max_abs(apply_casimir(g, S, up, Sector::HalfInteger) - 0.75 * hbar * hbar * up) < 1e-6);
      CHECK(max_abs(apply_casimir(g, S, down, Sector::HalfInteger) - 0.75 * hbar * hbar * down) < 1e-6);
    }
  }
}

TEST_CASE("half-integer family with l = 1 has total spin 3/2") {
  const SphereGrid g(16, 32);
  const double hbar = 0.7;
  const Eigen::VectorXd s = tilted_gauge(g);
  const auto S = build_S(g, hbar, s);
  const int l = 1;
  for (int m = -l - 1; m <= l; ++m) {
    const auto f = half_integer_state(g, l, m, s);
    CHECK(std::abs(g.norm(f) - 1.0) < 1e-12);
    CHECK(max_abs(apply_casimir(g, S, f, Sector::HalfInteger) - hbar * hbar * (l + 0.5) * (l + 1.5) * f) < 1e-5);
    CHECK(max_abs(S[2].apply(g, f, Sector::HalfInteger) - hbar * (m + 0.5) * f) < 1e-7);
  }
  // l = 0 reproduces the spin-1/2 pair
  CHECK(std::abs(std::abs(g.inner(half_integer_state(g, 0, 0, s), spin_up(g, s))) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(g.inner(half_integer_state(g, 0, -1, s), spin_down(g, s))) - 1.0) < 1e-12);
  CHECK_THROWS_AS(half_integer_state(g, 1, 2, s), InvalidInput);
}

TEST_CASE("gauge-corrected spin generators are Hermitian") {
  const SphereGrid g(16, 32);
  const Eigen::VectorXd s = tilted_gauge(g);
  const auto S = build_S(g, 0.7, s);
  std::vector<Eigen::VectorXcd> probes;
  for (int l = 0; l <= 3; ++l)
    for (int m = -l - 1; m <= l; ++m) probes.push_back(half_integer_state(g, l, m, s));
  for (const auto& op : S) CHECK(hermiticity_defect(g, op, probes, Sector::HalfInteger) < 1e-8);
}

TEST_CASE("Pauli reduction gives hbar/2 sigma and is gauge invariant") {
  const SphereGrid g(16, 32);
  const double hbar = 0.7;
  const auto sigma = pauli_matrices();
  const Eigen::VectorXd s = tilted_gauge(g);
  const auto blocks = pauli_reduce(g, build_S(g, hbar, s));
  for (int j = 0; j < 3; ++j) CHECK((blocks[j] - 0.5 * hbar * sigma[j]).cwiseAbs().maxCoeff() < 1e-7);

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Eigen::Matrix2cd si = blocks[i] / (0.5 * hbar);
      const Eigen::Matrix2cd sj = blocks[j] / (0.5 * hbar);
      const Eigen::Matrix2cd expected = (i == j ? 2.0 : 0.0) * Eigen::Matrix2cd::Identity();
      CHECK((si * sj + sj * si - expected).cwiseAbs().maxCoeff() < 1e-6);
      if (i != j) {
        const int k = 3 - i - j;
        const double eps = ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
        CHECK((blocks[i] * blocks[j] - blocks[j] * blocks[i] - eps * kI * hbar * blocks[k]).cwiseAbs().maxCoeff() <
              1e-7);
      }
    }

  const Eigen::VectorXd shifted = s.array() + 1.3;
  const auto moved = pauli_reduce(g, build_S(g, hbar, shifted));
  for (int j = 0; j < 3; ++j) CHECK((moved[j] - blocks[j]).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("spinor states are normalized combinations of the declared basis") {
  const SphereGrid g(16, 32);
  const Eigen::VectorXd s = Eigen::VectorXd::Zero(g.size());
  Eigen::VectorXcd c(2);
  c << 0.6, Complex(0.0, 0.8);
  const SpinorState psi(Family::HalfInteger, {{0, 0}, {0, -1}}, c);
  const auto values = psi.evaluate(g, s);
  CHECK(std::abs(g.norm(values) - 1.0) < 1e-10);
  CHECK(std::abs(g.inner(spin_down(g, s), values) - Complex(0.0, 0.8)) < 1e-12);
  CHECK(psi.sector() == Sector::HalfInteger);

  const SpinorState y(Family::Harmonic, {{2, -1}}, Eigen::VectorXcd::Ones(1));
  CHECK(max_abs(y.evaluate(g, s) - spherical_harmonic(g, 2, -1)) < 1e-14);

  CHECK_THROWS_AS(SpinorState(Family::Harmonic, {{1, 0}}, Eigen::VectorXcd::Constant(1, 0.5)), InvalidState);
  CHECK_THROWS_AS(SpinorState(Family::Harmonic, {{1, 2}}, Eigen::VectorXcd::Ones(1)), InvalidInput);
  CHECK_THROWS_AS(SpinorState(Family::Harmonic, {{1, 0}, {1, 0}}, c), InvalidInput);
}

TEST_CASE("correlation of the singlet and of product states") {
  const auto rho = singlet();
  const Direction z(0, 0, 1);
  const Direction x(1, 0, 0);
  CHECK(correlation(rho, z, z) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(correlation(rho, z, x)) < 1e-12);
  for (double a : {0.0, 0.4, 1.9})
    for (double b : {0.3, 2.2})
      CHECK(std::abs(correlation(rho, coplanar_direction(a), coplanar_direction(b)) + std::cos(a - b)) < 1e-12);

  const auto up_up = product_state(Eigen::Vector2cd(1, 0), Eigen::Vector2cd(1, 0));
  CHECK(correlation(up_up, z, z) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(correlation(rho, Direction(1, 1, 0), z), InvalidInput);
  DensityMatrix4 bad = rho;
  bad(0, 0) += 0.1;
  CHECK_THROWS_AS(correlation(bad, z, z), InvalidState);
}

TEST_CASE("Bell combination separates product states from the singlet") {
  auto lhs = [](const DensityMatrix4& rho, const Direction& a, const Direction& ap, const Direction& b,
                const Direction& bp) {
    return bell_lhs(correlation(rho, a, b), correlation(rho, a, bp), correlation(rho, ap, bp), correlation(rho, ap, b));
  };
  const double singlet_value = lhs(singlet(), coplanar_direction(0), coplanar_direction(kPi / 2),
                                   coplanar_direction(kPi / 4), coplanar_direction(3 * kPi / 4));
  CHECK(std::abs(singlet_value - 2 * std::sqrt(2.0)) < 1e-12);

  testgen::Rng rng(41);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rho = product_state(random_qubit(rng), random_qubit(rng));
    worst = std::max(worst, lhs(rho, random_direction(rng), random_direction(rng), random_direction(rng),
                                random_direction(rng)));
  }
  CHECK(worst <= 2.0 + 1e-12);
  CHECK(worst < singlet_value);

  for (double p : {-1.0, -0.3, 0.0, 0.8, 1.0}) CHECK(bell_lhs(p, p, p, p) == doctest::Approx(2 * std::abs(p)));
}

TEST_CASE("correlation sweep writes one row per angle pair") {
  const std::vector<double> alphas = {0.0, kPi / 2};
  const std::vector<double> betas = {0.0, kPi / 4, kPi};
  const auto table = correlation_sweep(singlet(), alphas, betas);
  REQUIRE(table.rows.size() == 6);
  CHECK(table.columns == std::vector<std::string>{"alpha", "beta", "P"});
  for (const auto& row : table.rows) CHECK(std::abs(row[2] + std::cos(row[0] - row[1])) < 1e-12);

  const auto path = std::filesystem::temp_directory_path() / "protomech_spin_sweep.csv";
  numerics::write_csv(path, table);
  const auto back = numerics::read_csv(path);
  CHECK(back.rows.size() == 6);
  std::filesystem::remove(path);
}

}  // TEST_SUITE

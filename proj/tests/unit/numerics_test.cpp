#include <doctest.h>

#include "protomech/numerics/io.hpp"
#include "protomech/numerics/spectral.hpp"
#include "support/generators.hpp"

#include <filesystem>

using namespace protomech;
using namespace protomech::numerics;
using testgen::kPi;

TEST_SUITE("numerics") {

TEST_CASE("grid rejects too few points and bad lengths") {
  CHECK_THROWS_AS(PeriodicGrid::line(4, 1.0), InvalidInput);
  CHECK_THROWS_AS(PeriodicGrid::line(16, 0.0), InvalidInput);
  CHECK_THROWS_AS(PeriodicGrid::line(16, -1.0), InvalidInput);
  const PeriodicGrid g = PeriodicGrid::cube(2, 16, 2.0);
  CHECK(g.size() == 256);
  CHECK(g.axis(1).spacing() == doctest::Approx(0.125));
  CHECK(g.stride(1) == 1);
  CHECK(g.stride(0) == 16);
}

TEST_CASE("gradient of a constant is zero") {
  const PeriodicGrid g = PeriodicGrid::cube(2, 16, 2 * kPi);
  const CovectorField d = spectral_gradient(ScalarField::constant(g, 3.7));
  CHECK(d.max_abs() == 0.0);
}

TEST_CASE("gradient of sin is cos on 64 points") {
  const PeriodicGrid g = PeriodicGrid::line(64, 2 * kPi);
  const ScalarField f = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::sin(x[0]); });
  const CovectorField d = spectral_gradient(f);
  double err = 0.0;
  for (Index i = 0; i < g.size(); ++i) err = std::max(err, std::abs(d.component(0)[i] - std::cos(g.coordinate(i, 0))));
  CHECK(err <= 1e-12);
}

TEST_CASE("gradient of a Gaussian agrees with fourth-order differences") {
  // Difference between spectral and 4th-order stencil should fall ~16x per
  // halving of the spacing, down to the stencil's truncation error.
  double previous = 0.0;
  for (Index n : {64, 128, 256}) {
    // Box wide enough that the periodic images of the Gaussian are below round-off.
    const PeriodicGrid g = PeriodicGrid::line(n, 4 * kPi);
    const ScalarField f = ScalarField::sample(
        g, [](const Eigen::VectorXd& x) { return std::exp(-(x[0] - 2 * kPi) * (x[0] - 2 * kPi)); });
    const CovectorField d = spectral_gradient(f);
    const double h = g.axis(0).spacing();
    double err = 0.0;
    for (Index i = 0; i < n; ++i) {
      auto at = [&](Index k) { return f[((i + k) % n + n) % n]; };
      const double fd = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
      err = std::max(err, std::abs(fd - d.component(0)[i]));
    }
    CHECK(err <= 2.0 * std::pow(h, 4));
    if (previous > 0.0) CHECK(previous / err > 12.0);
    previous = err;
  }
}

TEST_CASE("gradient rejects non-finite input") {
  const PeriodicGrid g = PeriodicGrid::line(16, 1.0);
  ScalarField f(g);
  f[3] = std::nan("");
  CHECK_THROWS_AS(spectral_gradient(f), InvalidInput);
}

TEST_CASE("integrate constants, periodic means and a Gaussian bump") {
  const PeriodicGrid g = PeriodicGrid::cube(2, 16, 3.0);
  CHECK(integrate(ScalarField::constant(g, 1.0)) == doctest::Approx(9.0).epsilon(1e-14));
  const PeriodicGrid l = PeriodicGrid::line(64, 2 * kPi);
  const ScalarField s = ScalarField::sample(l, [](const Eigen::VectorXd& x) { return std::sin(x[0]); });
  CHECK(std::abs(integrate(s)) <= 1e-14);

  auto bump = [](double x) { return std::exp(-4.0 * (x - 3.0) * (x - 3.0)); };
  const PeriodicGrid b = PeriodicGrid::line(128, 6.0);
  const ScalarField fb = ScalarField::sample(b, [&](const Eigen::VectorXd& x) { return bump(x[0]); });
  const double oracle = testgen::adaptive_simpson(bump, 0.0, 6.0, 1e-13);
  CHECK(std::abs(integrate(fb) - oracle) <= 1e-10);
}

TEST_CASE("integral of a gradient component vanishes") {
  testgen::Rng rng(11);
  const PeriodicGrid g = PeriodicGrid::cube(2, 32, 2 * kPi);
  const ScalarField f = testgen::band_limited(g, 8, rng);
  const CovectorField d = spectral_gradient(f);
  for (Index a = 0; a < 2; ++a) CHECK(std::abs(integrate(d.component_field(a))) <= 1e-12);
}

TEST_CASE("transform round trip, impulse and single modes") {
  testgen::Rng rng(5);
  const PeriodicGrid g = PeriodicGrid::cube(2, 16, 1.0);
  ComplexField f(g);
  for (Index i = 0; i < g.size(); ++i) f[i] = Complex(rng.normal(), rng.normal());
  const ComplexField back = inverse_transform(forward_transform(f));
  CHECK((back.values() - f.values()).norm() / f.values().norm() <= 1e-12);

  const PeriodicGrid l = PeriodicGrid::line(32, 2 * kPi);
  ComplexField impulse(l);
  impulse[0] = 1.0;
  const ComplexField spec = forward_transform(impulse);
  for (Index i = 0; i < l.size(); ++i) CHECK(std::abs(spec[i]) == doctest::Approx(1.0 / 32));

  for (int k = -15; k <= 15; ++k) {
    const ComplexField wave =
        ComplexField::sample(l, [k](const Eigen::VectorXd& x) { return std::polar(1.0, k * x[0]); });
    const ComplexField c = forward_transform(wave);
    const Index slot = k >= 0 ? k : 32 + k;
    for (Index i = 0; i < 32; ++i) CHECK(std::abs(c[i] - (i == slot ? 1.0 : 0.0)) <= 1e-13);
  }
}

TEST_CASE("Parseval") {
  testgen::Rng rng(7);
  const PeriodicGrid g = PeriodicGrid::cube(2, 16, 2.5);
  const ComplexField f = testgen::band_limited_complex(g, 7, rng);
  const double direct = integrate(ScalarField(g, f.values().cwiseAbs2()));
  CHECK(std::abs(direct - spectral_energy(f)) <= 1e-10 * direct);
}

TEST_CASE("shift_lines translates band-limited data exactly") {
  const PeriodicGrid g = PeriodicGrid::line(32, 2 * kPi);
  const ScalarField f = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::cos(3 * x[0]) + std::sin(x[0]); });
  const ScalarField s = shift_lines(f, 0, [](Index) { return 0.3; });
  for (Index i = 0; i < g.size(); ++i) {
    const double x = g.coordinate(i, 0) - 0.3;
    CHECK(std::abs(s[i] - (std::cos(3 * x) + std::sin(x))) <= 1e-12);
  }
}

TEST_CASE("interpolant reproduces band-limited values and gradients off the grid") {
  testgen::Rng rng(3);
  const PeriodicGrid g = PeriodicGrid::cube(2, 16, 2 * kPi);
  const ScalarField f = ScalarField::sample(
      g, [](const Eigen::VectorXd& x) { return std::sin(x[0]) * std::cos(2 * x[1]) + 0.5 * std::cos(x[0] - x[1]); });
  const TrigInterpolant interp(f);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x(2);
    x << rng.uniform(0, 6), rng.uniform(0, 6);
    const double exact = std::sin(x[0]) * std::cos(2 * x[1]) + 0.5 * std::cos(x[0] - x[1]);
    CHECK(std::abs(interp(x) - exact) <= 1e-12);
    const Eigen::VectorXcd grad = interp.gradient(x);
    CHECK(std::abs(grad[0] - (std::cos(x[0]) * std::cos(2 * x[1]) - 0.5 * std::sin(x[0] - x[1]))) <= 1e-12);
  }
}

TEST_CASE("two-thirds dealiasing removes only high modes") {
  const PeriodicGrid g = PeriodicGrid::line(24, 2 * kPi);
  const ScalarField f = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::cos(8 * x[0]) + std::cos(9 * x[0]); });
  const ScalarField d = dealias_two_thirds(f);
  for (Index i = 0; i < g.size(); ++i) CHECK(std::abs(d[i] - std::cos(8 * g.coordinate(i, 0))) <= 1e-12);
}

TEST_CASE("field snapshots round-trip bit for bit") {
  testgen::Rng rng(9);
  const PeriodicGrid g({Axis{8, 1.0, -0.5}, Axis{12, 2.0, 0.0}});
  const ScalarField f = testgen::band_limited(g, 3, rng);
  const auto dir = std::filesystem::temp_directory_path() / "protomech_numerics_test";
  std::filesystem::create_directories(dir);
  write_field_snapshot(dir / "snap", g, {{"value", f.values()}});
  const FieldSnapshot back = read_field_snapshot(dir / "snap");
  CHECK(back.grid == g);
  CHECK((back.value("value") - f.values()).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove_all(dir);
}

}

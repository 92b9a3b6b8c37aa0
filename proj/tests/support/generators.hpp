#pragma once

#include "protomech/numerics/field.hpp"
#include "protomech/numerics/spectral.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace testgen {

using protomech::numerics::Complex;
using protomech::numerics::ComplexField;
using protomech::numerics::Index;
using protomech::numerics::PeriodicGrid;
using protomech::numerics::ScalarField;

inline constexpr double kPi = std::numbers::pi;

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
};

/// Real field with random coefficients on modes |m| <= max_mode along every axis.
inline ScalarField band_limited(const PeriodicGrid& grid, int max_mode, Rng& rng) {
  ComplexField c(grid);
  for (Index i = 0; i < grid.size(); ++i) {
    bool keep = true;
    for (Index a = 0; a < grid.dimension(); ++a) {
      const Index n = grid.axis(a).points;
      const Index m = grid.index_along(i, a);
      const Index mode = m <= n / 2 ? m : n - m;
      if (mode > max_mode) keep = false;
    }
    if (keep) c[i] = Complex(rng.normal(), rng.normal());
  }
  const ComplexField f = protomech::numerics::inverse_transform(c);
  return protomech::numerics::real_part(f);
}

inline ComplexField band_limited_complex(const PeriodicGrid& grid, int max_mode, Rng& rng) {
  const ScalarField re = band_limited(grid, max_mode, rng);
  const ScalarField im = band_limited(grid, max_mode, rng);
  ComplexField f(grid);
  for (Index i = 0; i < grid.size(); ++i) f[i] = Complex(re[i], im[i]);
  return f;
}

/// Adaptive Simpson quadrature on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 40) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
          return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, 0.5 * eps, d - 1) + rec(mid, hi, fmid, frm, fhi, right, 0.5 * eps, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

}  // namespace testgen

#include "protomech/numerics/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace protomech::numerics {

namespace {

Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

void require_finite(const ScalarField& f, const char* where) {
  if (!f.all_finite()) throw InvalidInput(std::string(where) + ": non-finite values");
}
void require_finite(const ComplexField& f, const char* where) {
  if (!f.all_finite()) throw InvalidInput(std::string(where) + ": non-finite values");
}

Eigen::VectorXcd derivative_symbol(const PeriodicGrid& grid, Index axis, int order) {
  const Eigen::VectorXd k = grid.wavenumbers(axis, order % 2 == 1);
  Eigen::VectorXcd sym(k.size());
  const Complex ik_unit(0.0, 1.0);
  for (Index m = 0; m < k.size(); ++m) sym[m] = std::pow(ik_unit * k[m], order);
  return sym;
}

Values<Complex> differentiate(const Values<Complex>& v, const PeriodicGrid& grid, Index axis, int order) {
  if (order < 0) throw InvalidInput("spectral_derivative: negative order");
  Values<Complex> out = v;
  if (order == 0) return out;
  const Eigen::VectorXcd sym = derivative_symbol(grid, axis, order);
  for_each_line(out, grid, axis, [&](Index, Eigen::VectorXcd& line) {
    fft_forward(line);
    line.array() *= sym.array();
    fft_inverse(line);
  });
  return out;
}

Values<Complex> shift_values(const Values<Complex>& v, const PeriodicGrid& grid, Index axis,
                             const std::function<double(Index)>& shift) {
  Values<Complex> out = v;
  const Eigen::VectorXd k = grid.wavenumbers(axis, false);
  for_each_line(out, grid, axis, [&](Index start, Eigen::VectorXcd& line) {
    const double s = shift(start);
    if (s == 0.0) return;
    fft_forward(line);
    const Index n = line.size();
    // phases e^{-i k_m s} by recurrence from the fundamental
    const Complex w = n > 1 ? std::polar(1.0, -k[1] * s) : Complex(1.0);
    Complex phase = 1.0;
    for (Index m = 1; 2 * m < n; ++m) {
      phase = m % 32 == 0 ? std::polar(1.0, -k[m] * s) : phase * w;
      line[m] *= phase;
      line[n - m] *= std::conj(phase);
    }
    // Nyquist: average of the +/- branches keeps real data real.
    if (n % 2 == 0) line[n / 2] *= std::cos(k[n / 2] * s);
    fft_inverse(line);
  });
  return out;
}

Values<Complex> filter_two_thirds(const Values<Complex>& v, const PeriodicGrid& grid) {
  Values<Complex> c = v;
  for (Index a = 0; a < grid.dimension(); ++a) {
    const Index n = grid.axis(a).points;
    for_each_line(c, grid, a, [&](Index, Eigen::VectorXcd& line) {
      fft_forward(line);
      for (Index m = 0; m < n; ++m) {
        const Index mode = m <= n / 2 ? m : n - m;
        if (3 * mode > n) line[m] = 0.0;
      }
      fft_inverse(line);
    });
  }
  return c;
}

}  // namespace

void fft_forward(Eigen::VectorXcd& line) {
  Eigen::VectorXcd out(line.size());
  engine().fwd(out.data(), line.data(), line.size());
  line.swap(out);
}

void fft_inverse(Eigen::VectorXcd& line) {
  Eigen::VectorXcd out(line.size());
  engine().inv(out.data(), line.data(), line.size());
  out /= static_cast<double>(line.size());
  line.swap(out);
}

void for_each_line(Values<Complex>& data, const PeriodicGrid& grid, Index axis,
                   const std::function<void(Index, Eigen::VectorXcd&)>& fn) {
  const Index n = grid.axis(axis).points;
  const Index stride = grid.stride(axis);
  const Index total = grid.size();
  Eigen::VectorXcd line(n);
  // Line starts are the flat indices whose coordinate along `axis` is zero.
  const Index block = stride * n;
  for (Index outer = 0; outer < total; outer += block) {
    for (Index inner = 0; inner < stride; ++inner) {
      const Index start = outer + inner;
      for (Index j = 0; j < n; ++j) line[j] = data[start + j * stride];
      fn(start, line);
      for (Index j = 0; j < n; ++j) data[start + j * stride] = line[j];
    }
  }
}

ComplexField forward_transform(const ComplexField& f) {
  require_finite(f, "forward_transform");
  Values<Complex> c = f.values();
  for (Index a = 0; a < f.grid().dimension(); ++a) {
    const double n = static_cast<double>(f.grid().axis(a).points);
    for_each_line(c, f.grid(), a, [n](Index, Eigen::VectorXcd& line) {
      fft_forward(line);
      line /= n;
    });
  }
  return ComplexField(f.grid(), std::move(c));
}

ComplexField inverse_transform(const ComplexField& coefficients) {
  Values<Complex> v = coefficients.values();
  for (Index a = 0; a < coefficients.grid().dimension(); ++a) {
    const double n = static_cast<double>(coefficients.grid().axis(a).points);
    for_each_line(v, coefficients.grid(), a, [n](Index, Eigen::VectorXcd& line) {
      fft_inverse(line);
      line *= n;
    });
  }
  return ComplexField(coefficients.grid(), std::move(v));
}

ScalarField spectral_derivative(const ScalarField& f, Index axis, int order) {
  require_finite(f, "spectral_derivative");
  Values<Complex> v = differentiate(f.values().cast<Complex>(), f.grid(), axis, order);
  return ScalarField(f.grid(), v.real());
}

ComplexField spectral_derivative(const ComplexField& f, Index axis, int order) {
  require_finite(f, "spectral_derivative");
  return ComplexField(f.grid(), differentiate(f.values(), f.grid(), axis, order));
}

CovectorField spectral_gradient(const ScalarField& f) {
  require_finite(f, "spectral_gradient");
  CovectorField g(f.grid());
  for (Index a = 0; a < f.grid().dimension(); ++a) g.component(a) = spectral_derivative(f, a).values();
  return g;
}

ComplexCovectorField spectral_gradient(const ComplexField& f) {
  require_finite(f, "spectral_gradient");
  ComplexCovectorField g(f.grid());
  for (Index a = 0; a < f.grid().dimension(); ++a) g.component(a) = spectral_derivative(f, a).values();
  return g;
}

ScalarField divergence(const VectorField& flux) {
  ScalarField d(flux.grid());
  for (Index a = 0; a < flux.dimension(); ++a)
    d.values() += spectral_derivative(flux.component_field(a), a).values();
  return d;
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField d(f.grid());
  for (Index a = 0; a < f.grid().dimension(); ++a) d.values() += spectral_derivative(f, a, 2).values();
  return d;
}

ScalarField inverse_laplacian(const ScalarField& f) {
  ComplexField c = forward_transform(to_complex(f));
  const PeriodicGrid& g = c.grid();
  std::vector<Eigen::VectorXd> k;
  for (Index a = 0; a < g.dimension(); ++a) k.push_back(g.wavenumbers(a, false));
  for (Index i = 0; i < g.size(); ++i) {
    double k2 = 0.0;
    for (Index a = 0; a < g.dimension(); ++a) {
      const double ka = k[static_cast<std::size_t>(a)][g.index_along(i, a)];
      k2 += ka * ka;
    }
    c[i] = k2 == 0.0 ? Complex(0.0) : -c[i] / k2;
  }
  return real_part(inverse_transform(c));
}

double integrate(const ScalarField& f) {
  require_finite(f, "integrate");
  return f.values().sum() * f.grid().cell_volume();
}

Complex integrate(const ComplexField& f) {
  require_finite(f, "integrate");
  return f.values().sum() * f.grid().cell_volume();
}

double spectral_energy(const ComplexField& f) {
  return forward_transform(f).values().squaredNorm() * f.grid().volume();
}

ScalarField dealias_two_thirds(const ScalarField& f) {
  return ScalarField(f.grid(), filter_two_thirds(f.values().cast<Complex>(), f.grid()).real());
}

ComplexField dealias_two_thirds(const ComplexField& f) {
  return ComplexField(f.grid(), filter_two_thirds(f.values(), f.grid()));
}

ScalarField shift_lines(const ScalarField& f, Index axis, const std::function<double(Index)>& shift) {
  return ScalarField(f.grid(), shift_values(f.values().cast<Complex>(), f.grid(), axis, shift).real());
}

ComplexField shift_lines(const ComplexField& f, Index axis, const std::function<double(Index)>& shift) {
  return ComplexField(f.grid(), shift_values(f.values(), f.grid(), axis, shift));
}

TrigInterpolant::TrigInterpolant(const ComplexField& f)
    : grid_(f.grid()), coefficients_(forward_transform(f)) {}

Complex TrigInterpolant::operator()(const Eigen::VectorXd& x) const { return evaluate<false>(x, nullptr); }

Eigen::VectorXcd TrigInterpolant::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(grid_.dimension());
  evaluate<true>(x, &g);
  return g;
}

template <bool WithGradient>
Complex TrigInterpolant::evaluate(const Eigen::VectorXd& x, Eigen::VectorXcd* grad) const {
  const Index d = grid_.dimension();
  if (x.size() != d) throw InvalidInput("TrigInterpolant: point dimension mismatch");
  // Per-axis basis values e^{i k (x - lower)} with the Nyquist mode as a cosine.
  std::vector<Eigen::VectorXcd> basis(static_cast<std::size_t>(d));
  std::vector<Eigen::VectorXcd> dbasis(static_cast<std::size_t>(d));
  for (Index a = 0; a < d; ++a) {
    const Axis& ax = grid_.axis(a);
    const Eigen::VectorXd k = grid_.wavenumbers(a, false);
    const double rel = x[a] - ax.lower;
    auto& b = basis[static_cast<std::size_t>(a)];
    auto& db = dbasis[static_cast<std::size_t>(a)];
    b.resize(ax.points);
    db.resize(ax.points);
    for (Index m = 0; m < ax.points; ++m) {
      if (ax.points % 2 == 0 && m == ax.points / 2) {
        b[m] = std::cos(k[m] * rel);
        db[m] = -k[m] * std::sin(k[m] * rel);
      } else {
        b[m] = std::polar(1.0, k[m] * rel);
        db[m] = Complex(0.0, k[m]) * b[m];
      }
    }
  }
  Complex value = 0.0;
  for (Index i = 0; i < grid_.size(); ++i) {
    const Complex c = coefficients_[i];
    if (c == Complex(0.0)) continue;
    Complex prod = c;
    for (Index a = 0; a < d; ++a) prod *= basis[static_cast<std::size_t>(a)][grid_.index_along(i, a)];
    value += prod;
    if constexpr (WithGradient) {
      for (Index a = 0; a < d; ++a) {
        Complex term = c;
        for (Index b = 0; b < d; ++b) {
          const Index m = grid_.index_along(i, b);
          term *= (a == b) ? dbasis[static_cast<std::size_t>(b)][m] : basis[static_cast<std::size_t>(b)][m];
        }
        (*grad)[a] += term;
      }
    }
  }
  return value;
}

}  // namespace protomech::numerics

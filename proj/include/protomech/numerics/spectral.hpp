#pragma once

#include "protomech/numerics/field.hpp"

#include <functional>

namespace protomech::numerics {

/// Fourier coefficients c_m = (1/N) sum_j f_j exp(-i k_m (x_j - lower)),
/// stored in FFT order on the same grid shape. A pure mode exp(i k x) maps to a
/// single coefficient of unit magnitude.
ComplexField forward_transform(const ComplexField& f);
ComplexField inverse_transform(const ComplexField& coefficients);

/// Exact derivative of the trigonometric interpolant along one axis.
ScalarField spectral_derivative(const ScalarField& f, Index axis, int order = 1);
ComplexField spectral_derivative(const ComplexField& f, Index axis, int order = 1);

/// Gradient of the trigonometric interpolant; rejects non-finite input.
CovectorField spectral_gradient(const ScalarField& f);
ComplexCovectorField spectral_gradient(const ComplexField& f);

/// Divergence of a (contravariant) flux, sum_a d_a F^a.
ScalarField divergence(const VectorField& flux);
ScalarField laplacian(const ScalarField& f);
/// Zero-mean solution u of lap(u) = f - mean(f).
ScalarField inverse_laplacian(const ScalarField& f);

/// Trapezoid rule on the torus: sum f * cell volume.
double integrate(const ScalarField& f);
Complex integrate(const ComplexField& f);

/// Parseval partner of integrate(|f|^2): volume * sum |c_m|^2.
double spectral_energy(const ComplexField& f);

/// Zeroes every mode with |m| > N/3 along any axis.
ScalarField dealias_two_thirds(const ScalarField& f);
ComplexField dealias_two_thirds(const ComplexField& f);

/// Translates every line along `axis` by its own displacement:
/// g(x) = f(x - shift(line)), evaluated exactly on the trigonometric
/// interpolant. `shift` receives the flat index of the first point of a line.
ScalarField shift_lines(const ScalarField& f, Index axis, const std::function<double(Index)>& shift);
ComplexField shift_lines(const ComplexField& f, Index axis, const std::function<double(Index)>& shift);

/// Evaluates the trigonometric interpolant of a field at arbitrary points.
/// The Nyquist mode is split symmetrically so real data interpolate to real
/// values.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const ComplexField& f);
  explicit TrigInterpolant(const ScalarField& f) : TrigInterpolant(to_complex(f)) {}

  Complex operator()(const Eigen::VectorXd& x) const;
  /// Gradient of the interpolant at x.
  Eigen::VectorXcd gradient(const Eigen::VectorXd& x) const;

 private:
  template <bool WithGradient>
  Complex evaluate(const Eigen::VectorXd& x, Eigen::VectorXcd* grad) const;

  PeriodicGrid grid_;
  ComplexField coefficients_;
};

/// Applies `fn(line)` to every 1D line along `axis`. The line is passed as a
/// contiguous complex vector and written back afterwards.
void for_each_line(Values<Complex>& data, const PeriodicGrid& grid, Index axis,
                   const std::function<void(Index start, Eigen::VectorXcd& line)>& fn);

/// In-place 1D transforms of a contiguous buffer; forward is unscaled,
/// inverse divides by n.
void fft_forward(Eigen::VectorXcd& line);
void fft_inverse(Eigen::VectorXcd& line);

}  // namespace protomech::numerics

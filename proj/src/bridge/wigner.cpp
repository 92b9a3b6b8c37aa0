#include "protomech/bridge/wigner.hpp"

#include "protomech/numerics/io.hpp"
#include "protomech/numerics/spectral.hpp"
#include "protomech/quantum/quantum.hpp"

#include <cmath>

namespace protomech::bridge {

namespace {

void require_line(const PeriodicGrid& g) {
  if (g.dimension() != 1) throw InvalidInput("wigner_transform: one-dimensional grids only");
}

bool high_mode(Index m, Index n) {
  const Index s = m <= n / 2 ? m : n - m;
  return 4 * s >= n;
}

// a(m) = rho(j - m, j + m) for m in [-N, N), zero outside the grid; returns
// (1/(pi hbar)) sum_m a(m) exp(2 pi i n m / 2N) for n in [-N, N).
template <typename Entry>
void fill_wigner(ScalarField& w, Index n, double hbar, Entry&& entry) {
  Eigen::VectorXcd line(2 * n);
  for (Index j = 0; j < n; ++j) {
    line.setZero();
    for (Index m = -n; m < n; ++m) {
      const Index a = j - m, b = j + m;
      if (a < 0 || a >= n || b < 0 || b >= n) continue;
      line[(m + 2 * n) % (2 * n)] = entry(a, b);
    }
    numerics::fft_inverse(line);
    for (Index q = 0; q < 2 * n; ++q) {
      const Index slot = (q - n + 2 * n) % (2 * n);
      w[j * 2 * n + q] = static_cast<double>(2 * n) * line[slot].real() / (M_PI * hbar);
    }
  }
}

}  // namespace

double WignerField::mass() const { return numerics::integrate(values); }

ScalarField WignerField::position_marginal() const {
  const PeriodicGrid& g = grid();
  const Index np = g.axis(1).points;
  ScalarField out(PeriodicGrid({g.axis(0)}));
  for (Index i = 0; i < g.size(); ++i) out[i / np] += values[i] * g.axis(1).spacing();
  return out;
}

Eigen::VectorXd WignerField::momentum_marginal() const {
  const PeriodicGrid& g = grid();
  const Index np = g.axis(1).points;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(np);
  for (Index i = 0; i < g.size(); ++i) out[i % np] += values[i] * g.axis(0).spacing();
  return out;
}

PeriodicGrid wigner_grid(const PeriodicGrid& x_grid, double hbar) {
  require_line(x_grid);
  if (!(hbar > 0.0)) throw InvalidInput("wigner_grid: hbar must be positive");
  const numerics::Axis& x = x_grid.axis(0);
  const double dp = M_PI * hbar / (2.0 * x.length);
  return PeriodicGrid({x, numerics::Axis{2 * x.points, 2.0 * static_cast<double>(x.points) * dp,
                                         -static_cast<double>(x.points) * dp}});
}

WignerField wigner_transform(const quantum::WaveFunction& psi) {
  require_line(psi.grid());
  if (std::abs(psi.norm() - 1.0) > quantum::WaveFunction::kNormTolerance)
    throw InvalidState("wigner_transform: state is not normalized");
  const Index n = psi.grid().size();
  const numerics::ComplexField c = numerics::forward_transform(psi.values);
  double tail = 0.0, total = 0.0;
  for (Index m = 0; m < n; ++m) {
    total += std::norm(c[m]);
    if (high_mode(m, n)) tail += std::norm(c[m]);
  }
  if (tail > kBandLimitTolerance * total)
    throw InvalidInput("wigner_transform: state is not band-limited to half the Nyquist wavenumber");
  ScalarField w(wigner_grid(psi.grid(), psi.hbar));
  const double h = psi.grid().cell_volume();
  fill_wigner(w, n, psi.hbar, [&](Index a, Index b) { return h * psi.values[a] * std::conj(psi.values[b]); });
  return WignerField{std::move(w), psi.hbar};
}

WignerField wigner_transform(const quantum::DensityMatrix& rho, double hbar) {
  require_line(rho.grid());
  const Index n = rho.dim();
  // Diagonal of F rho F^dagger in the Fourier basis.
  Eigen::MatrixXcd x = rho.entries();
  for (Index j = 0; j < n; ++j) {
    Eigen::VectorXcd col = x.col(j);
    numerics::fft_forward(col);
    x.col(j) = col;
  }
  Eigen::MatrixXcd y = x.adjoint();
  double tail = 0.0, total = 0.0;
  for (Index m = 0; m < n; ++m) {
    Eigen::VectorXcd col = y.col(m);
    numerics::fft_forward(col);
    const double d = std::abs(col[m]);
    total += d;
    if (high_mode(m, n)) tail += d;
  }
  if (tail > kBandLimitTolerance * total)
    throw InvalidInput("wigner_transform: density matrix is not band-limited to half the Nyquist wavenumber");
  ScalarField w(wigner_grid(rho.grid(), hbar));
  fill_wigner(w, n, hbar, [&](Index a, Index b) { return rho.entries()(a, b); });
  return WignerField{std::move(w), hbar};
}

void write_wigner(const std::filesystem::path& stem, const WignerField& w) {
  numerics::write_field_snapshot(stem, w.grid(), {{"W", w.values.values()}}, numerics::PointLabels::Coordinate,
                                 {"x", "p"});
}

}  // namespace protomech::bridge

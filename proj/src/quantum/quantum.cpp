#include "protomech/quantum/quantum.hpp"

#include "protomech/bridge/wigner.hpp"
#include "protomech/numerics/io.hpp"
#include "protomech/numerics/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace protomech::quantum {

namespace {

const Complex kI(0.0, 1.0);

void require_dense(const PeriodicGrid& grid, const char* where) {
  if (grid.size() > kDenseLimit)
    throw ConfigurationError(std::string(where) + ": grid has " + std::to_string(grid.size()) +
                             " points, dense limit is " + std::to_string(kDenseLimit));
}

// -i hbar d/dx_axis with the Nyquist mode dropped.
Values<Complex> momentum_apply(const Values<Complex>& v, const PeriodicGrid& grid, Index axis, double hbar) {
  ComplexField d = numerics::spectral_derivative(ComplexField(grid, v), axis, 1);
  return -kI * hbar * d.values();
}

Eigen::VectorXd mode_momentum(const PeriodicGrid& grid, const std::vector<Eigen::VectorXd>& k, Index m, double hbar) {
  Eigen::VectorXd p(grid.dimension());
  for (Index a = 0; a < grid.dimension(); ++a) p[a] = hbar * k[static_cast<std::size_t>(a)][grid.index_along(m, a)];
  return p;
}

std::vector<Eigen::VectorXd> all_wavenumbers(const PeriodicGrid& grid) {
  std::vector<Eigen::VectorXd> k;
  for (Index a = 0; a < grid.dimension(); ++a) k.push_back(grid.wavenumbers(a, false));
  return k;
}

double matrix_hermiticity(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

WaveFunction::WaveFunction(ComplexField v, double h, double m) : values(std::move(v)), hbar(h), mass(m) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidInput("WaveFunction: hbar must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidInput("WaveFunction: mass must be positive");
  if (!values.all_finite()) throw InvalidInput("WaveFunction: non-finite values");
  if (std::abs(norm() - 1.0) > kNormTolerance)
    throw InvalidState("WaveFunction: norm is " + numerics::format_double(norm()) + ", expected 1");
}

WaveFunction WaveFunction::normalized(ComplexField v, double h, double m) {
  const double n = numerics::integrate(ScalarField(v.grid(), v.values().cwiseAbs2()));
  if (!(n > 0.0)) throw InvalidInput("WaveFunction: zero state cannot be normalized");
  v *= Complex(1.0 / std::sqrt(n));
  return WaveFunction(std::move(v), h, m);
}

double WaveFunction::norm() const {
  return numerics::integrate(ScalarField(values.grid(), values.values().cwiseAbs2()));
}

DensityMatrix::DensityMatrix(PeriodicGrid grid, Eigen::MatrixXcd entries, bool is_signed)
    : grid_(std::move(grid)), entries_(std::move(entries)), signed_(is_signed) {
  require_dense(grid_, "DensityMatrix");
  if (entries_.rows() != grid_.size() || entries_.cols() != grid_.size())
    throw InvalidInput("DensityMatrix: matrix must be square with one row per grid point");
  if (!entries_.real().allFinite() || !entries_.imag().allFinite())
    throw InvalidInput("DensityMatrix: non-finite entries");
  const double scale = 1.0 + entries_.cwiseAbs().maxCoeff();
  if (hermiticity_defect() > 1e-10 * scale) throw InvalidState("DensityMatrix: not Hermitian");
  if (std::abs(trace() - 1.0) > 1e-9) throw InvalidState("DensityMatrix: trace is not 1");
  if (!signed_) {
    const double lowest = spectrum().minCoeff();
    if (lowest < -1e-9)
      throw InvalidState("DensityMatrix: negative eigenvalue " + numerics::format_double(lowest) +
                         " in an unsigned density matrix");
  }
}

DensityMatrix DensityMatrix::pure(const WaveFunction& psi) {
  const Values<Complex>& v = psi.values.values();
  return DensityMatrix(psi.grid(), psi.grid().cell_volume() * v * v.adjoint());
}

DensityMatrix DensityMatrix::mixture(const std::vector<double>& weights, const std::vector<WaveFunction>& states,
                                     bool is_signed) {
  if (weights.size() != states.size() || states.empty())
    throw InvalidInput("DensityMatrix::mixture: need one weight per state");
  const PeriodicGrid& g = states.front().grid();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(g.size(), g.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    require_same_grid(g, states[k].grid(), "DensityMatrix::mixture");
    if (!is_signed && weights[k] < 0.0) throw InvalidInput("DensityMatrix::mixture: negative weight");
    const Values<Complex>& v = states[k].values.values();
    m += weights[k] * g.cell_volume() * v * v.adjoint();
  }
  return DensityMatrix(g, std::move(m), is_signed);
}

double DensityMatrix::hermiticity_defect() const { return matrix_hermiticity(entries_); }

Eigen::VectorXd DensityMatrix::spectrum() const {
  const Eigen::MatrixXcd sym = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Observable::Observable(PeriodicGrid grid, double hbar) : grid_(std::move(grid)), hbar_(hbar) {
  if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) throw InvalidInput("Observable: hbar must be positive");
}

Observable Observable::identity(const PeriodicGrid& grid, double hbar) {
  Observable o(grid, hbar);
  o.add_term(ScalarField::constant(grid, 0.5), {});
  return o;
}

Observable Observable::multiplication(const ScalarField& f, double hbar) {
  Observable o(f.grid(), hbar);
  o.add_term(0.5 * f, {});
  return o;
}

Observable Observable::position(const PeriodicGrid& grid, double hbar, Index axis) {
  if (axis < 0 || axis >= grid.dimension()) throw InvalidInput("Observable::position: bad axis");
  return multiplication(ScalarField::sample(grid, [axis](const Eigen::VectorXd& x) { return x[axis]; }), hbar);
}

Observable Observable::momentum(const PeriodicGrid& grid, double hbar, Index axis, int power) {
  if (axis < 0 || axis >= grid.dimension()) throw InvalidInput("Observable::momentum: bad axis");
  if (power < 0) throw InvalidInput("Observable::momentum: negative power");
  Observable o(grid, hbar);
  o.add_term(ScalarField::constant(grid, 0.5), std::vector<Index>(static_cast<std::size_t>(power), axis));
  return o;
}

Observable& Observable::add_term(ScalarField coefficient, std::vector<Index> axes) {
  require_same_grid(grid_, coefficient.grid(), "Observable::add_term");
  if (!coefficient.all_finite()) throw InvalidInput("Observable::add_term: non-finite coefficient");
  for (Index a : axes)
    if (a < 0 || a >= grid_.dimension()) throw InvalidInput("Observable::add_term: bad axis");
  curvature_.push_back(axes.size() == 2 ? numerics::spectral_derivative(
                                             numerics::spectral_derivative(coefficient, axes[0]), axes[1])
                                       : ScalarField());
  terms_.push_back(ObservableTerm{std::move(coefficient), std::move(axes)});
  return *this;
}

Observable& Observable::set_symbol(Symbol symbol, int degree) {
  symbol_ = std::move(symbol);
  symbol_degree_ = degree;
  return *this;
}

int Observable::degree() const {
  int d = symbol_ ? symbol_degree_ : 0;
  for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.axes.size()));
  return d;
}

bool Observable::is_split() const {
  for (const auto& t : terms_)
    if (!t.axes.empty()) return false;
  return true;
}

ScalarField Observable::potential() const {
  ScalarField v(grid_);
  for (const auto& t : terms_)
    if (t.axes.empty()) v += 2.0 * t.coefficient;
  return v;
}

Values<Complex> Observable::apply(const Values<Complex>& psi) const {
  if (psi.size() != grid_.size()) throw InvalidInput("Observable::apply: state size does not match grid");
  Values<Complex> out = Values<Complex>::Zero(psi.size());
  if (symbol_) {
    ComplexField c = numerics::forward_transform(ComplexField(grid_, psi));
    const auto k = all_wavenumbers(grid_);
    for (Index m = 0; m < grid_.size(); ++m) c[m] *= symbol_(mode_momentum(grid_, k, m, hbar_));
    out += numerics::inverse_transform(c).values();
  }
  for (const auto& t : terms_) {
    const Values<Complex> f = t.coefficient.values().cast<Complex>();
    Values<Complex> right = psi;
    Values<Complex> left = f.cwiseProduct(psi);
    for (Index a : t.axes) {
      right = momentum_apply(right, grid_, a, hbar_);
      left = momentum_apply(left, grid_, a, hbar_);
    }
    out += f.cwiseProduct(right) + left;
  }
  return out;
}

Eigen::MatrixXcd Observable::matrix() const {
  require_dense(grid_, "Observable::matrix");
  const Index n = grid_.size();
  Eigen::MatrixXcd m(n, n);
  for (Index j = 0; j < n; ++j) {
    Values<Complex> e = Values<Complex>::Zero(n);
    e[j] = 1.0;
    m.col(j) = apply(e);
  }
  return m;
}

double Observable::weyl_symbol(Index flat, const Eigen::VectorXd& p) const {
  if (degree() > 2) throw InvalidInput("Observable::weyl_symbol: only degree <= 2 is supported");
  if (p.size() != grid_.dimension()) throw InvalidInput("Observable::weyl_symbol: momentum dimension mismatch");
  double s = symbol_ ? symbol_(p) : 0.0;
  for (std::size_t n = 0; n < terms_.size(); ++n) {
    const ObservableTerm& t = terms_[n];
    const double f = t.coefficient[flat];
    switch (t.axes.size()) {
      case 0:
        s += 2.0 * f;
        break;
      case 1:
        s += 2.0 * f * p[t.axes[0]];
        break;
      default:
        s += 2.0 * f * p[t.axes[0]] * p[t.axes[1]] - 0.5 * hbar_ * hbar_ * curvature_[n][flat];
    }
  }
  return s;
}

Observable build_hamiltonian(const CanonicalHamiltonian& h, double hbar) {
  const PeriodicGrid& g = h.grid();
  const Index d = g.dimension();
  Observable o(g, hbar);
  if (h.has_constant_vector_potential(1e-14)) {
    const Eigen::VectorXd a = h.vector_potential.at(0);
    const Eigen::MatrixXd metric = h.metric;
    o.set_symbol(
        [a, metric](const Eigen::VectorXd& p) {
          const Eigen::VectorXd q = p + a;
          return 0.5 * q.dot(metric * q);
        },
        2);
    o.add_term(0.5 * h.scalar_potential, {});
    return o;
  }
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (h.metric(i, j) != 0.0) o.add_term(ScalarField::constant(g, 0.25 * h.metric(i, j)), {i, j});
  ScalarField scalar = h.scalar_potential;
  for (Index i = 0; i < d; ++i) {
    ScalarField c(g);
    for (Index j = 0; j < d; ++j) c.values() += 0.5 * h.metric(i, j) * h.vector_potential.component(j);
    o.add_term(c, {i});
  }
  for (Index pt = 0; pt < g.size(); ++pt) {
    const Eigen::VectorXd a = h.vector_potential.at(pt);
    scalar[pt] += 0.5 * a.dot(h.metric * a);
  }
  o.add_term(0.5 * scalar, {});
  return o;
}

Eigen::MatrixXcd exact_propagator(const Observable& h, double t) {
  const Eigen::MatrixXcd m = h.matrix();
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if (matrix_hermiticity(m) > 1e-9 * scale) throw InvalidInput("exact_propagator: Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  if (es.info() != Eigen::Success) throw ConvergenceError("exact_propagator: eigensolver failed");
  Eigen::VectorXcd phase(m.rows());
  for (Index k = 0; k < m.rows(); ++k) phase[k] = std::exp(-kI * es.eigenvalues()[k] * t / h.hbar());
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

Propagator::Propagator(const Observable& h, double dt) : grid_(h.grid()), dt_(dt) {
  if (!std::isfinite(dt)) throw InvalidInput("Propagator: non-finite time step");
  if (!h.is_split()) {
    dense_ = exact_propagator(h, dt);
    return;
  }
  const ScalarField v = h.potential();
  half_potential_.resize(grid_.size());
  for (Index i = 0; i < grid_.size(); ++i) half_potential_[i] = std::exp(-kI * v[i] * (0.5 * dt / h.hbar()));
  kinetic_ = Values<Complex>::Ones(grid_.size());
  if (h.symbol()) {
    const auto k = all_wavenumbers(grid_);
    for (Index m = 0; m < grid_.size(); ++m)
      kinetic_[m] = std::exp(-kI * h.symbol()(mode_momentum(grid_, k, m, h.hbar())) * (dt / h.hbar()));
  }
}

Values<Complex> Propagator::apply(const Values<Complex>& psi) const {
  if (psi.size() != grid_.size()) throw InvalidInput("Propagator::apply: state size does not match grid");
  if (dense_) return *dense_ * psi;
  ComplexField c = numerics::forward_transform(ComplexField(grid_, half_potential_.cwiseProduct(psi)));
  c.values() = c.values().cwiseProduct(kinetic_);
  return half_potential_.cwiseProduct(numerics::inverse_transform(c).values());
}

Eigen::MatrixXcd Propagator::conjugate(const Eigen::MatrixXcd& m) const {
  if (dense_) return *dense_ * m * dense_->adjoint();
  Eigen::MatrixXcd a(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) a.col(j) = apply(m.col(j));
  const Eigen::MatrixXcd at = a.adjoint();
  Eigen::MatrixXcd b(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) b.col(j) = apply(at.col(j));
  return b.adjoint();
}

WaveFunction schrodinger_step(const WaveFunction& psi, const Propagator& u) {
  ComplexField next(psi.grid(), u.apply(psi.values.values()));
  const double before = psi.norm();
  const double after = numerics::integrate(ScalarField(next.grid(), next.values().cwiseAbs2()));
  if (std::abs(after - before) > 1e-8)
    throw IntegrationFault("schrodinger_step: norm drifted by " + numerics::format_double(after - before));
  return WaveFunction(std::move(next), psi.hbar, psi.mass);
}

WaveFunction schrodinger_step(const WaveFunction& psi, const Observable& h, double dt) {
  return schrodinger_step(psi, Propagator(h, dt));
}

DensityMatrix liouville_step_quantum(const DensityMatrix& rho, const Propagator& u) {
  Eigen::MatrixXcd next = u.conjugate(rho.entries());
  const Complex drift = next.trace() - rho.trace();
  if (std::abs(drift) > 1e-8)
    throw IntegrationFault("liouville_step_quantum: trace drifted by " + numerics::format_double(std::abs(drift)));
  next = 0.5 * (next + next.adjoint()).eval();
  return DensityMatrix(rho.grid(), std::move(next), rho.is_signed());
}

DensityMatrix liouville_step_quantum(const DensityMatrix& rho, const Observable& h, double dt) {
  return liouville_step_quantum(rho, Propagator(h, dt));
}

double heisenberg_expectation_check(const DensityMatrix& rho0, const Observable& h, const Observable& f, double t) {
  require_same_grid(rho0.grid(), h.grid(), "heisenberg_expectation_check");
  require_same_grid(rho0.grid(), f.grid(), "heisenberg_expectation_check");
  const Eigen::MatrixXcd u = exact_propagator(h, t);
  const Eigen::MatrixXcd fm = f.matrix();
  const Complex heisenberg = rho0.expectation(u.adjoint() * fm * u);
  const Complex schrodinger = (u * rho0.entries() * u.adjoint() * fm).trace();
  return std::abs(heisenberg - schrodinger);
}

double commutation_check(const PeriodicGrid& grid, const ScalarField& f, double hbar) {
  require_same_grid(grid, f.grid(), "commutation_check");
  const Index d = grid.dimension();
  std::vector<Index> limit(static_cast<std::size_t>(d));
  Index probes = 1;
  for (Index a = 0; a < d; ++a) {
    limit[static_cast<std::size_t>(a)] = (grid.axis(a).points + 3) / 4 - 1;
    probes *= 2 * limit[static_cast<std::size_t>(a)] + 1;
  }
  const Values<Complex> fc = f.values().cast<Complex>();
  std::vector<Values<Complex>> df;
  for (Index a = 0; a < d; ++a) df.push_back(numerics::spectral_derivative(f, a).values().cast<Complex>());

  double worst = 0.0;
  for (Index n = 0; n < probes; ++n) {
    Eigen::VectorXd k(d);
    Index rest = n;
    for (Index a = d - 1; a >= 0; --a) {
      const Index span = 2 * limit[static_cast<std::size_t>(a)] + 1;
      const Index m = rest % span - limit[static_cast<std::size_t>(a)];
      rest /= span;
      k[a] = 2.0 * M_PI * static_cast<double>(m) / grid.axis(a).length;
    }
    const ComplexField probe = ComplexField::sample(grid, [&](const Eigen::VectorXd& x) {
      double phase = 0.0;
      for (Index a = 0; a < d; ++a) phase += k[a] * (x[a] - grid.axis(a).lower);
      return std::polar(1.0, phase);
    });
    const Values<Complex>& psi = probe.values();
    for (Index a = 0; a < d; ++a) {
      const Values<Complex> lhs =
          momentum_apply(fc.cwiseProduct(psi), grid, a, hbar) - fc.cwiseProduct(momentum_apply(psi, grid, a, hbar));
      const Values<Complex> rhs = -kI * hbar * df[static_cast<std::size_t>(a)].cwiseProduct(psi);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double duality_check(const DensityMatrix& rho, const Observable& f) {
  require_same_grid(rho.grid(), f.grid(), "duality_check");
  if (rho.grid().dimension() != 1) throw InvalidInput("duality_check: one-dimensional grids only");
  if (f.degree() > 2) throw InvalidInput("duality_check: observable degree exceeds 2");
  const Complex operator_side = rho.expectation(f.matrix());
  const bridge::WignerField w = bridge::wigner_transform(rho, f.hbar());
  const PeriodicGrid& pg = w.values.grid();
  const Index np = pg.axis(1).points;
  double phase_side = 0.0;
  Eigen::VectorXd p(1);
  for (Index i = 0; i < pg.size(); ++i) {
    p[0] = pg.coordinate(i, 1);
    phase_side += w.values[i] * f.weyl_symbol(i / np, p);
  }
  phase_side *= pg.cell_volume();
  return std::abs(operator_side - phase_side);
}

void write_wavefunction(const std::filesystem::path& path, const WaveFunction& psi) {
  numerics::CsvTable t;
  t.columns = {"index", "re", "im"};
  for (Index i = 0; i < psi.values.size(); ++i)
    t.add_row({static_cast<double>(i), psi.values[i].real(), psi.values[i].imag()});
  numerics::write_csv(path, t);
}

void write_density_matrix(const std::filesystem::path& path, const DensityMatrix& rho) {
  numerics::CsvTable t;
  t.columns = {"i", "j", "re", "im"};
  for (Index i = 0; i < rho.dim(); ++i)
    for (Index j = 0; j < rho.dim(); ++j)
      t.add_row({static_cast<double>(i), static_cast<double>(j), rho.entries()(i, j).real(),
                 rho.entries()(i, j).imag()});
  numerics::write_csv(path, t);
}

}  // namespace protomech::quantum

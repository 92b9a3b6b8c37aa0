#include "protomech/spin/spin.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <string>

namespace protomech::spin {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

// Gauss-Legendre nodes and weights on [-1, 1] from the Jacobi matrix.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(Index n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Index k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Eigen::VectorXd weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
  return {solver.eigenvalues(), weights};
}

// Differentiation matrix B' B^{-1} of a basis sampled at the nodes.
Eigen::MatrixXd differentiation(const Eigen::VectorXd& theta, double offset, bool cosine) {
  const Index n = theta.size();
  Eigen::MatrixXd basis(n, n);
  Eigen::MatrixXd derivative(n, n);
  for (Index j = 0; j < n; ++j) {
    // the sine family without offset starts at frequency 1
    const double k = j + offset + ((!cosine && offset == 0.0) ? 1.0 : 0.0);
    for (Index i = 0; i < n; ++i) {
      if (cosine) {
        basis(i, j) = std::cos(k * theta(i));
        derivative(i, j) = -k * std::sin(k * theta(i));
      } else {
        basis(i, j) = std::sin(k * theta(i));
        derivative(i, j) = k * std::cos(k * theta(i));
      }
    }
  }
  return basis.transpose().fullPivLu().solve(derivative.transpose()).transpose();
}

void check_size(const SphereGrid& grid, const Eigen::VectorXcd& f) {
  if (f.size() != grid.size()) throw InvalidInput("sphere function size does not match the grid");
  if (!f.allFinite()) throw InvalidInput("sphere function has non-finite values");
}

void check_gauge(const SphereGrid& grid, const Eigen::VectorXd& gauge) {
  if (gauge.size() != grid.size()) throw InvalidInput("gauge size does not match the grid");
  if (!gauge.allFinite()) throw InvalidInput("gauge has non-finite values");
}

// e^{-is} e^{i sign phi / 2} (cos or sin)(theta / 2), unnormalized.
Eigen::VectorXcd half_angle(const SphereGrid& grid, int sign, bool cosine, const Eigen::VectorXd& gauge) {
  check_gauge(grid, gauge);
  Eigen::VectorXcd out(grid.size());
  for (Index t = 0; t < grid.theta_count(); ++t) {
    const double th = grid.theta()(t) / 2.0;
    const double polar = cosine ? std::cos(th) : std::sin(th);
    for (Index p = 0; p < grid.phi_count(); ++p) {
      const Index i = grid.index(t, p);
      out(i) = polar * std::exp(kI * (0.5 * sign * grid.phi()(p) - gauge(i)));
    }
  }
  return out;
}

}  // namespace

SphereGrid::SphereGrid(Index theta_count, Index phi_count) {
  if (theta_count < kMinTheta) throw InvalidInput("sphere grid needs at least 16 theta nodes");
  if (phi_count < kMinPhi) throw InvalidInput("sphere grid needs at least 32 phi nodes");
  auto [x, w] = gauss_legendre(theta_count);
  // ascending theta means descending cos(theta)
  theta_.resize(theta_count);
  Eigen::VectorXd theta_weights(theta_count);
  for (Index t = 0; t < theta_count; ++t) {
    theta_(t) = std::acos(x(theta_count - 1 - t));
    theta_weights(t) = w(theta_count - 1 - t);
  }
  phi_.resize(phi_count);
  for (Index p = 0; p < phi_count; ++p) phi_(p) = 2.0 * kPi * p / phi_count;
  weights_.resize(size());
  for (Index t = 0; t < theta_count; ++t)
    for (Index p = 0; p < phi_count; ++p) weights_(index(t, p)) = theta_weights(t) * 2.0 * kPi / phi_count;

  theta_matrices_[0] = differentiation(theta_, 0.0, true);
  theta_matrices_[1] = differentiation(theta_, 0.0, false);
  theta_matrices_[2] = differentiation(theta_, 0.5, true);
  theta_matrices_[3] = differentiation(theta_, 0.5, false);
}

Eigen::VectorXcd SphereGrid::sample(const std::function<Complex(double, double)>& f) const {
  Eigen::VectorXcd out(size());
  for (Index t = 0; t < theta_count(); ++t)
    for (Index p = 0; p < phi_count(); ++p) out(index(t, p)) = f(theta_(t), phi_(p));
  return out;
}

Complex SphereGrid::integrate(const Eigen::VectorXcd& f) const {
  check_size(*this, f);
  return (weights_.cast<Complex>().array() * f.array()).sum();
}

Complex SphereGrid::inner(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) const {
  check_size(*this, f);
  check_size(*this, g);
  return (weights_.cast<Complex>().array() * f.array().conjugate() * g.array()).sum();
}

double SphereGrid::norm(const Eigen::VectorXcd& f) const { return std::sqrt(inner(f, f).real()); }

long SphereGrid::signed_mode(Index q) const {
  const Index n = phi_count();
  return static_cast<long>(q < (n + 1) / 2 ? q : q - n);
}

const Eigen::MatrixXd& SphereGrid::theta_matrix(long q, Sector sector) const {
  const bool even = q % 2 == 0;
  if (sector == Sector::Integer) return theta_matrices_[even ? 0 : 1];
  return theta_matrices_[even ? 2 : 3];
}

Eigen::MatrixXcd SphereGrid::to_modes(const Eigen::VectorXcd& f, Sector sector) const {
  check_size(*this, f);
  const Index nt = theta_count();
  const Index np = phi_count();
  Eigen::MatrixXcd modes(nt, np);
  Eigen::VectorXcd row(np);
  Eigen::VectorXcd spectrum(np);
  for (Index t = 0; t < nt; ++t) {
    for (Index p = 0; p < np; ++p) {
      row(p) = f(index(t, p));
      if (sector == Sector::HalfInteger) row(p) *= std::exp(-0.5 * kI * phi_(p));
    }
    engine().fwd(spectrum, row);
    modes.row(t) = spectrum.transpose() / static_cast<double>(np);
  }
  return modes;
}

Eigen::VectorXcd SphereGrid::from_modes(const Eigen::MatrixXcd& modes, Sector sector) const {
  const Index nt = theta_count();
  const Index np = phi_count();
  Eigen::VectorXcd out(size());
  Eigen::VectorXcd row(np);
  Eigen::VectorXcd spectrum(np);
  for (Index t = 0; t < nt; ++t) {
    spectrum = modes.row(t).transpose();
    engine().inv(row, spectrum);
    for (Index p = 0; p < np; ++p) {
      Complex v = row(p);
      if (sector == Sector::HalfInteger) v *= std::exp(0.5 * kI * phi_(p));
      out(index(t, p)) = v;
    }
  }
  return out;
}

Eigen::VectorXcd SphereGrid::d_phi(const Eigen::VectorXcd& f, Sector sector) const {
  Eigen::MatrixXcd modes = to_modes(f, sector);
  const Index np = phi_count();
  for (Index q = 0; q < np; ++q) {
    const long k = signed_mode(q);
    double wavenumber = static_cast<double>(k);
    if (sector == Sector::HalfInteger)
      wavenumber += 0.5;
    else if (np % 2 == 0 && q == np / 2)
      wavenumber = 0.0;
    modes.col(q) *= kI * wavenumber;
  }
  return from_modes(modes, sector);
}

Eigen::VectorXcd SphereGrid::d_theta(const Eigen::VectorXcd& f, Sector sector) const {
  Eigen::MatrixXcd modes = to_modes(f, sector);
  for (Index q = 0; q < phi_count(); ++q)
    modes.col(q) = theta_matrix(signed_mode(q), sector).cast<Complex>() * modes.col(q);
  return from_modes(modes, sector);
}

Eigen::VectorXcd AngularOperator::apply(const SphereGrid& grid, const Eigen::VectorXcd& f, Sector sector) const {
  check_size(grid, f);
  if (theta_coefficient.size() != grid.size() || phi_coefficient.size() != grid.size() ||
      multiplier.size() != grid.size())
    throw InvalidInput("operator was built on a different grid");
  const Eigen::VectorXcd derivative = theta_coefficient.cast<Complex>().cwiseProduct(grid.d_theta(f, sector)) +
                                      phi_coefficient.cast<Complex>().cwiseProduct(grid.d_phi(f, sector));
  return (hbar / kI) * derivative + multiplier.cwiseProduct(f);
}

Eigen::MatrixXcd AngularOperator::matrix(const SphereGrid& grid, Sector sector) const {
  const Index n = grid.size();
  Eigen::MatrixXcd out(n, n);
  Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(n);
  for (Index j = 0; j < n; ++j) {
    unit(j) = 1.0;
    out.col(j) = apply(grid, unit, sector);
    unit(j) = 0.0;
  }
  return out;
}

OperatorTriple build_L(const SphereGrid& grid, double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidInput("hbar must be positive");
  const Index n = grid.size();
  OperatorTriple ops;
  for (auto& op : ops) {
    op.theta_coefficient = Eigen::VectorXd::Zero(n);
    op.phi_coefficient = Eigen::VectorXd::Zero(n);
    op.multiplier = Eigen::VectorXcd::Zero(n);
    op.gauge = Eigen::VectorXd::Zero(n);
    op.hbar = hbar;
  }
  for (Index t = 0; t < grid.theta_count(); ++t) {
    const double cot = 1.0 / std::tan(grid.theta()(t));
    for (Index p = 0; p < grid.phi_count(); ++p) {
      const Index i = grid.index(t, p);
      const double c = std::cos(grid.phi()(p));
      const double s = std::sin(grid.phi()(p));
      ops[0].theta_coefficient(i) = -s;
      ops[0].phi_coefficient(i) = -cot * c;
      ops[1].theta_coefficient(i) = c;
      ops[1].phi_coefficient(i) = -cot * s;
      ops[2].phi_coefficient(i) = 1.0;
    }
  }
  return ops;
}

OperatorTriple build_S(const SphereGrid& grid, double hbar, const Eigen::VectorXd& gauge) {
  check_gauge(grid, gauge);
  OperatorTriple ops = build_L(grid, hbar);
  const Eigen::VectorXcd s = gauge.cast<Complex>();
  const Eigen::VectorXd ds_theta = grid.d_theta(s, Sector::Integer).real();
  const Eigen::VectorXd ds_phi = grid.d_phi(s, Sector::Integer).real();
  for (Index t = 0; t < grid.theta_count(); ++t) {
    const double inv_sin = 1.0 / std::sin(grid.theta()(t));
    for (Index p = 0; p < grid.phi_count(); ++p) {
      const Index i = grid.index(t, p);
      const double spin[3] = {0.5 * hbar * std::cos(grid.phi()(p)) * inv_sin,
                              0.5 * hbar * std::sin(grid.phi()(p)) * inv_sin, 0.0};
      for (int j = 0; j < 3; ++j) {
        const double gauge_term =
            hbar * (ops[j].theta_coefficient(i) * ds_theta(i) + ops[j].phi_coefficient(i) * ds_phi(i));
        ops[j].multiplier(i) = spin[j] + gauge_term;
      }
    }
  }
  for (auto& op : ops) op.gauge = gauge;
  return ops;
}

OperatorTriple build_S(const SphereGrid& grid, double hbar) {
  return build_S(grid, hbar, Eigen::VectorXd::Zero(grid.size()));
}

Eigen::VectorXcd apply_casimir(const SphereGrid& grid, const OperatorTriple& ops, const Eigen::VectorXcd& f,
                               Sector sector) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(f.size());
  for (const auto& op : ops) out += op.apply(grid, op.apply(grid, f, sector), sector);
  return out;
}

double hermiticity_defect(const SphereGrid& grid, const AngularOperator& op, const std::vector<Eigen::VectorXcd>& probes,
                          Sector sector) {
  std::vector<Eigen::VectorXcd> images;
  double scale = 0.0;
  for (const auto& f : probes) {
    images.push_back(op.apply(grid, f, sector));
    scale = std::max(scale, grid.norm(images.back()) * grid.norm(f));
  }
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t a = 0; a < probes.size(); ++a)
    for (std::size_t b = 0; b < probes.size(); ++b)
      worst = std::max(worst, std::abs(grid.inner(probes[a], images[b]) - grid.inner(images[a], probes[b])));
  return worst / scale;
}

Eigen::MatrixXcd galerkin_matrix(const SphereGrid& grid, const AngularOperator& op,
                                 const std::vector<Eigen::VectorXcd>& basis, Sector sector) {
  const Index n = static_cast<Index>(basis.size());
  Eigen::MatrixXcd out(n, n);
  for (Index b = 0; b < n; ++b) {
    const Eigen::VectorXcd image = op.apply(grid, basis[b], sector);
    for (Index a = 0; a < n; ++a) out(a, b) = grid.inner(basis[a], image);
  }
  return out;
}

std::vector<Eigen::VectorXcd> harmonic_basis(const SphereGrid& grid, int max_l) {
  if (2 * max_l + 2 > grid.theta_count()) throw InvalidInput("grid cannot resolve the requested harmonic degree");
  std::vector<Eigen::VectorXcd> out;
  for (int l = 0; l <= max_l; ++l)
    for (int m = -l; m <= l; ++m) out.push_back(spherical_harmonic(grid, l, m));
  return out;
}

Eigen::VectorXcd spherical_harmonic(const SphereGrid& grid, int l, int m) {
  if (l < 0 || std::abs(m) > l) throw InvalidInput("spherical harmonic needs |m| <= l");
  const unsigned am = static_cast<unsigned>(std::abs(m));
  Eigen::VectorXcd out(grid.size());
  for (Index t = 0; t < grid.theta_count(); ++t) {
    const double polar = std::sph_legendre(static_cast<unsigned>(l), am, grid.theta()(t));
    for (Index p = 0; p < grid.phi_count(); ++p) {
      Complex y = polar * std::exp(kI * (static_cast<double>(am) * grid.phi()(p)));
      if (m < 0) y = ((am % 2 == 0) ? 1.0 : -1.0) * std::conj(y);
      out(grid.index(t, p)) = y;
    }
  }
  return out;
}

Eigen::VectorXcd spin_up(const SphereGrid& grid, const Eigen::VectorXd& gauge) {
  return half_angle(grid, 1, true, gauge) / std::sqrt(2.0 * kPi);
}

Eigen::VectorXcd spin_down(const SphereGrid& grid, const Eigen::VectorXd& gauge) {
  return half_angle(grid, -1, false, gauge) / std::sqrt(2.0 * kPi);
}

Eigen::VectorXcd half_integer_state(const SphereGrid& grid, int l, int m, const Eigen::VectorXd& gauge) {
  if (l < 0 || m < -l - 1 || m > l) throw InvalidInput("half-integer state needs -l - 1 <= m <= l");
  const double denom = 2.0 * l + 1.0;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(grid.size());
  if (m >= -l) {
    out += std::sqrt((l + m + 1) / denom) *
           half_angle(grid, 1, true, gauge).cwiseProduct(spherical_harmonic(grid, l, m));
  }
  if (m + 1 <= l) {
    out += std::sqrt((l - m) / denom) *
           half_angle(grid, -1, false, gauge).cwiseProduct(spherical_harmonic(grid, l, m + 1));
  }
  return out / grid.norm(out);
}

SpinorState::SpinorState(Family family_, std::vector<BasisLabel> labels_, Eigen::VectorXcd coefficients_)
    : family(family_), labels(std::move(labels_)), coefficients(std::move(coefficients_)) {
  if (static_cast<Index>(labels.size()) != coefficients.size())
    throw InvalidInput("spinor state needs one coefficient per basis label");
  if (!coefficients.allFinite()) throw InvalidInput("spinor coefficients must be finite");
  for (std::size_t a = 0; a < labels.size(); ++a) {
    const auto& label = labels[a];
    const bool ok = family == Family::Harmonic ? (label.l >= 0 && std::abs(label.m) <= label.l)
                                               : (label.l >= 0 && label.m >= -label.l - 1 && label.m <= label.l);
    if (!ok) throw InvalidInput("spinor basis label out of range");
    for (std::size_t b = 0; b < a; ++b)
      if (labels[b].l == label.l && labels[b].m == label.m) throw InvalidInput("spinor basis labels repeat");
  }
  if (std::abs(coefficients.norm() - 1.0) > kNormTolerance) throw InvalidState("spinor state is not normalized");
}

Eigen::VectorXcd SpinorState::evaluate(const SphereGrid& grid, const Eigen::VectorXd& gauge) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(grid.size());
  for (std::size_t a = 0; a < labels.size(); ++a) {
    const auto& label = labels[a];
    out += coefficients(static_cast<Index>(a)) * (family == Family::Harmonic
                                                      ? spherical_harmonic(grid, label.l, label.m)
                                                      : half_integer_state(grid, label.l, label.m, gauge));
  }
  return out;
}

std::array<Eigen::Matrix2cd, 3> pauli_reduce(const SphereGrid& grid, const OperatorTriple& s_ops) {
  const Eigen::VectorXd& gauge = s_ops[0].gauge;
  const std::array<Eigen::VectorXcd, 2> basis = {spin_up(grid, gauge), spin_down(grid, gauge)};
  Eigen::Matrix2cd gram;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) gram(a, b) = grid.inner(basis[a], basis[b]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(gram);
  const Eigen::Vector2d ev = solver.eigenvalues();
  if (!(ev(0) > 0.0) || ev(1) / ev(0) > kGramConditionLimit)
    throw InvalidState("spin basis Gram matrix is ill-conditioned");
  const Eigen::Matrix2cd inv_sqrt = solver.operatorInverseSqrt();

  std::array<Eigen::Matrix2cd, 3> blocks;
  for (int j = 0; j < 3; ++j) {
    std::array<Eigen::VectorXcd, 2> images = {s_ops[j].apply(grid, basis[0], Sector::HalfInteger),
                                              s_ops[j].apply(grid, basis[1], Sector::HalfInteger)};
    Eigen::Matrix2cd m;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m(a, b) = grid.inner(basis[a], images[b]);
    blocks[j] = inv_sqrt * m * inv_sqrt;
  }
  return blocks;
}

std::array<Eigen::Matrix2cd, 3> pauli_matrices() {
  Eigen::Matrix2cd s1;
  s1 << 0.0, 1.0, 1.0, 0.0;
  Eigen::Matrix2cd s2;
  s2 << 0.0, -kI, kI, 0.0;
  Eigen::Matrix2cd s3;
  s3 << 1.0, 0.0, 0.0, -1.0;
  return {s1, s2, s3};
}

DensityMatrix4 singlet() {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  return psi * psi.adjoint();
}

DensityMatrix4 product_state(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  if (std::abs(a.norm() - 1.0) > 1e-12 || std::abs(b.norm() - 1.0) > 1e-12)
    throw InvalidInput("product state factors must be normalized");
  Eigen::Vector4cd psi;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) psi(2 * i + j) = a(i) * b(j);
  return psi * psi.adjoint();
}

namespace {

Eigen::Matrix2cd along(const Direction& d) {
  const auto s = pauli_matrices();
  return d(0) * s[0] + d(1) * s[1] + d(2) * s[2];
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace

double correlation(const DensityMatrix4& rho, const Direction& alpha, const Direction& beta) {
  if (!alpha.allFinite() || !beta.allFinite() || std::abs(alpha.norm() - 1.0) > kDirectionTolerance ||
      std::abs(beta.norm() - 1.0) > kDirectionTolerance)
    throw InvalidInput("correlation directions must be unit vectors");
  if (!rho.allFinite() || (rho - rho.adjoint()).norm() > 1e-12 || std::abs(rho.trace() - 1.0) > 1e-12)
    throw InvalidState("correlation needs a Hermitian unit-trace density matrix");
  return (rho * kron(along(alpha), along(beta))).trace().real();
}

double bell_lhs(double p_ab, double p_ab_prime, double p_a_prime_b_prime, double p_a_prime_b) {
  return std::abs(p_ab - p_ab_prime) + std::abs(p_a_prime_b_prime + p_a_prime_b);
}

Direction coplanar_direction(double angle) { return Direction(std::sin(angle), 0.0, std::cos(angle)); }

numerics::CsvTable correlation_sweep(const DensityMatrix4& rho, const std::vector<double>& alpha_angles,
                                     const std::vector<double>& beta_angles) {
  numerics::CsvTable table;
  table.columns = {"alpha", "beta", "P"};
  for (double a : alpha_angles)
    for (double b : beta_angles)
      table.add_row({a, b, correlation(rho, coplanar_direction(a), coplanar_direction(b))});
  return table;
}

}  // namespace protomech::spin

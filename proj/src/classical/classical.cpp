#include "protomech/classical/classical.hpp"

#include "protomech/numerics/io.hpp"
#include "protomech/numerics/spectral.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace protomech::classical {

PeriodicGrid phase_grid(const std::vector<Axis>& x_axes, const std::vector<Axis>& p_axes) {
  if (x_axes.size() != p_axes.size()) throw InvalidInput("phase_grid: need one momentum axis per position axis");
  std::vector<Axis> all = x_axes;
  all.insert(all.end(), p_axes.begin(), p_axes.end());
  return PeriodicGrid(std::move(all));
}

Axis momentum_box(double mean, double sigma, Index points, double sigmas) {
  if (!(sigma > 0.0)) throw InvalidInput("momentum_box: sigma must be positive");
  return Axis{points, 2.0 * sigmas * sigma, mean - sigmas * sigma};
}

namespace {

double edge_mass(const ScalarField& values, Index config_dim) {
  const PeriodicGrid& g = values.grid();
  double edge = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    bool near = false;
    for (Index a = config_dim; a < g.dimension(); ++a) {
      const Index j = g.index_along(i, a);
      const Index n = g.axis(a).points;
      if (j < PhaseSpacePDF::kBoundaryCells || j >= n - PhaseSpacePDF::kBoundaryCells) near = true;
    }
    if (near) edge += std::abs(values[i]);
  }
  return edge * g.cell_volume();
}

}  // namespace

PhaseSpacePDF::PhaseSpacePDF(ScalarField values, Index config_dim)
    : values_(std::move(values)), config_dim_(config_dim) {
  if (config_dim_ < 1 || 2 * config_dim_ != values_.grid().dimension())
    throw InvalidInput("PhaseSpacePDF: grid must have 2 * config_dim axes");
  if (!values_.all_finite()) throw InvalidInput("PhaseSpacePDF: non-finite values");
  const double peak = values_.values().maxCoeff();
  if (values_.values().minCoeff() < -1e-8 * peak) throw InvalidState("PhaseSpacePDF: negative density");
  if (std::abs(mass() - 1.0) > 1e-8) throw InvalidState("PhaseSpacePDF: mass is not 1");
}

PhaseSpacePDF PhaseSpacePDF::normalized(ScalarField values, Index config_dim) {
  const double m = numerics::integrate(values);
  if (!(m > 0.0)) throw InvalidInput("PhaseSpacePDF: total mass must be positive");
  values *= 1.0 / m;
  return PhaseSpacePDF(std::move(values), config_dim);
}

PhaseSpacePDF PhaseSpacePDF::gaussian(const PeriodicGrid& grid, const Point& mean_x, const Point& mean_p,
                                      const Point& sigma_x, const Point& sigma_p) {
  const Index d = grid.dimension() / 2;
  if (mean_x.size() != d || mean_p.size() != d || sigma_x.size() != d || sigma_p.size() != d)
    throw InvalidInput("PhaseSpacePDF::gaussian: parameter dimension mismatch");
  Point sx = sigma_x, sp = sigma_p;
  for (Index a = 0; a < d; ++a) {
    sx[a] = std::max(sx[a], 1.5 * grid.axis(a).spacing());
    sp[a] = std::max(sp[a], 1.5 * grid.axis(d + a).spacing());
  }
  ScalarField v = ScalarField::sample(grid, [&](const Eigen::VectorXd& z) {
    double e = 0.0;
    for (Index a = 0; a < d; ++a) {
      const double u = (z[a] - mean_x[a]) / sx[a];
      const double w = (z[d + a] - mean_p[a]) / sp[a];
      e += 0.5 * (u * u + w * w);
    }
    return std::exp(-e);
  });
  return normalized(std::move(v), d);
}

Point PhaseSpacePDF::position(Index flat) const { return grid().point(flat).head(config_dim_); }
Point PhaseSpacePDF::momentum(Index flat) const { return grid().point(flat).tail(config_dim_); }

double PhaseSpacePDF::mass() const { return numerics::integrate(values_); }

double PhaseSpacePDF::boundary_mass() const { return edge_mass(values_, config_dim_); }

namespace {

void require_dims(const TrajectoryState& s) {
  if (s.q.size() != s.p.size() || s.q.size() == 0) throw InvalidInput("canonical_step: q and p dimensions differ");
  if (!s.q.allFinite() || !s.p.allFinite()) throw InvalidInput("canonical_step: non-finite state");
}

// Implicit midpoint with a signed step; symmetric, so -dt inverts +dt.
TrajectoryState midpoint(const TrajectoryState& s, const GeneralHamiltonian& h, double dt) {
  Point q1 = s.q, p1 = s.p;
  for (int it = 0; it < 100; ++it) {
    const Point qm = 0.5 * (s.q + q1);
    const Point pm = 0.5 * (s.p + p1);
    const Point qn = s.q + dt * h.momentum_partial(qm, pm);
    const Point pn = s.p - dt * h.position_partial(qm, pm);
    const double change = std::max((qn - q1).cwiseAbs().maxCoeff(), (pn - p1).cwiseAbs().maxCoeff());
    q1 = qn;
    p1 = pn;
    if (change <= 1e-15 * (1.0 + std::max(q1.cwiseAbs().maxCoeff(), p1.cwiseAbs().maxCoeff())))
      return {q1, p1, s.t + dt};
  }
  throw ConvergenceError("canonical_step: implicit midpoint iteration did not converge");
}

// Periodic cubic Lagrange weights for fractional offset u in [0, 1) at
// stencil offsets -1, 0, 1, 2.
std::array<double, 4> cubic_weights(double u) {
  return {-u * (u - 1.0) * (u - 2.0) / 6.0, (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
          -(u + 1.0) * u * (u - 2.0) / 2.0, (u + 1.0) * u * (u - 1.0) / 6.0};
}

double cubic_interpolate(const ScalarField& f, const Eigen::VectorXd& z) {
  const PeriodicGrid& g = f.grid();
  const Index d = g.dimension();
  std::vector<Index> base(static_cast<std::size_t>(d));
  std::vector<std::array<double, 4>> w(static_cast<std::size_t>(d));
  for (Index a = 0; a < d; ++a) {
    const Axis& ax = g.axis(a);
    const double s = (z[a] - ax.lower) / ax.spacing();
    const double fl = std::floor(s);
    base[static_cast<std::size_t>(a)] = static_cast<Index>(fl);
    w[static_cast<std::size_t>(a)] = cubic_weights(s - fl);
  }
  double total = 0.0;
  const Index corners = Index(1) << (2 * d);
  for (Index c = 0; c < corners; ++c) {
    double weight = 1.0;
    Index flat = 0;
    for (Index a = 0; a < d; ++a) {
      const Index o = (c >> (2 * a)) & 3;
      const Index n = g.axis(a).points;
      const Index j = ((base[static_cast<std::size_t>(a)] + o - 1) % n + n) % n;
      weight *= w[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)];
      flat += j * g.stride(a);
    }
    total += weight * f[flat];
  }
  return total;
}

void check_courant(const PhaseSpacePDF& pdf, double dt, const std::function<double(Index, Index)>& speed) {
  const PeriodicGrid& g = pdf.grid();
  double limit = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < g.dimension(); ++a) {
    double vmax = 0.0;
    for (Index i = 0; i < g.size(); ++i) vmax = std::max(vmax, std::abs(speed(i, a)));
    if (vmax > 0.0) limit = std::min(limit, g.axis(a).spacing() / vmax);
  }
  if (dt > limit) throw StepSizeError("liouville_step: CFL violated", limit);
}

// Same limit for flows that translate whole lines: `shift` gives the
// displacement per unit time of the line starting at a flat index.
void check_line_courant(const PeriodicGrid& g, Index axis, double dt, const std::function<double(Index)>& shift) {
  const Index n = g.axis(axis).points;
  const Index stride = g.stride(axis);
  double vmax = 0.0;
  for (Index outer = 0; outer < g.size(); outer += stride * n)
    for (Index inner = 0; inner < stride; ++inner) vmax = std::max(vmax, std::abs(shift(outer + inner)));
  if (dt * vmax > g.axis(axis).spacing()) throw StepSizeError("liouville_step: CFL violated", g.axis(axis).spacing() / vmax);
}

PhaseSpacePDF finish(ScalarField values, const PhaseSpacePDF& before) {
  const double edge = edge_mass(values, before.config_dim());
  if (edge > PhaseSpacePDF::kTruncationTolerance)
    throw TruncationError("liouville_step: mass " + std::to_string(edge) + " reached the momentum boundary");
  return PhaseSpacePDF(std::move(values), before.config_dim());
}

}  // namespace

TrajectoryState canonical_step(const TrajectoryState& s, const SeparableHamiltonian& h, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("canonical_step: dt must be positive");
  require_dims(s);
  const Point ph = s.p - 0.5 * dt * h.potential_gradient(s.q);
  const Point q1 = s.q + dt * h.kinetic_gradient(ph);
  const Point p1 = ph - 0.5 * dt * h.potential_gradient(q1);
  return {q1, p1, s.t + dt};
}

TrajectoryState canonical_step(const TrajectoryState& s, const GeneralHamiltonian& h, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("canonical_step: dt must be positive");
  if (!h.has_analytic_partials())
    throw ConfigurationError("canonical_step: non-separable Hamiltonian needs analytic partials");
  require_dims(s);
  return midpoint(s, h, dt);
}

PhaseSpacePDF liouville_step(const PhaseSpacePDF& pdf, const SeparableHamiltonian& h, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("liouville_step: dt must be positive");
  const Index d = pdf.config_dim();
  for (Index a = 0; a < d; ++a) {
    check_line_courant(pdf.grid(), a, dt, [&](Index i) { return h.kinetic_gradient(pdf.momentum(i))[a]; });
    check_line_courant(pdf.grid(), d + a, dt, [&](Index i) { return h.potential_gradient(pdf.position(i))[a]; });
  }

  // The split flows move whole lines rigidly: a kick translates each momentum
  // line by -dV/dx * t, a drift each position line by dT/dp * t.
  auto kick = [&](const ScalarField& f, double t) {
    ScalarField out = f;
    for (Index a = 0; a < d; ++a)
      out = numerics::shift_lines(out, d + a, [&](Index start) { return -t * h.potential_gradient(pdf.position(start))[a]; });
    return out;
  };
  auto drift = [&](const ScalarField& f, double t) {
    ScalarField out = f;
    for (Index a = 0; a < d; ++a)
      out = numerics::shift_lines(out, a, [&](Index start) { return t * h.kinetic_gradient(pdf.momentum(start))[a]; });
    return out;
  };
  ScalarField v = kick(drift(kick(pdf.values(), 0.5 * dt), dt), 0.5 * dt);
  return finish(std::move(v), pdf);
}

PhaseSpacePDF liouville_step(const PhaseSpacePDF& pdf, const GeneralHamiltonian& h, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("liouville_step: dt must be positive");
  if (!h.has_analytic_partials())
    throw ConfigurationError("liouville_step: non-separable Hamiltonian needs analytic partials");
  const PeriodicGrid& g = pdf.grid();
  const Index d = pdf.config_dim();
  check_courant(pdf, dt, [&](Index i, Index a) {
    const Point x = pdf.position(i), p = pdf.momentum(i);
    return a < d ? h.momentum_partial(x, p)[a] : h.position_partial(x, p)[a - d];
  });
  ScalarField out(g);
  for (Index i = 0; i < g.size(); ++i) {
    const TrajectoryState back = midpoint({pdf.position(i), pdf.momentum(i), 0.0}, h, -dt);
    Eigen::VectorXd z(2 * d);
    z << back.q, back.p;
    out[i] = cubic_interpolate(pdf.values(), z);
  }
  // Cubic interpolation undershoots in the tails and is not conservative:
  // clip the undershoot and rescale to the incoming mass.
  out.values() = out.values().cwiseMax(0.0);
  out *= pdf.mass() / numerics::integrate(out);
  return finish(std::move(out), pdf);
}

ScalarField poisson_bracket(const ScalarField& a, const ScalarField& b, Index config_dim) {
  numerics::require_same_grid(a.grid(), b.grid(), "poisson_bracket");
  if (2 * config_dim != a.grid().dimension()) throw InvalidInput("poisson_bracket: grid is not a phase space");
  ScalarField out(a.grid());
  for (Index j = 0; j < config_dim; ++j) {
    const ScalarField ax = numerics::spectral_derivative(a, j), ap = numerics::spectral_derivative(a, config_dim + j);
    const ScalarField bx = numerics::spectral_derivative(b, j), bp = numerics::spectral_derivative(b, config_dim + j);
    out.values() += ap.values().cwiseProduct(bx.values()) - bp.values().cwiseProduct(ax.values());
  }
  return out;
}

ScalarField poisson_bracket(const PhaseFunction& a, const PhaseFunction& b, const PeriodicGrid& grid,
                            Index config_dim) {
  if (2 * config_dim != grid.dimension()) throw InvalidInput("poisson_bracket: grid is not a phase space");
  ScalarField out(grid);
  for (Index i = 0; i < grid.size(); ++i) {
    const Eigen::VectorXd z = grid.point(i);
    const Point x = z.head(config_dim), p = z.tail(config_dim);
    out[i] = a.momentum_partial(x, p).dot(b.position_partial(x, p)) -
             b.momentum_partial(x, p).dot(a.position_partial(x, p));
  }
  return out;
}

double check_charge_invariance(const PhaseFunction& h, const PhaseFunction& q, const PeriodicGrid& grid,
                               Index config_dim) {
  return poisson_bracket(h, q, grid, config_dim).values().cwiseAbs().maxCoeff();
}

double expectation(const PhaseSpacePDF& pdf, const ScalarField& f) {
  numerics::require_same_grid(pdf.grid(), f.grid(), "expectation");
  return numerics::integrate(numerics::pointwise_product(pdf.values(), f));
}

double expectation(const PhaseSpacePDF& pdf, const std::function<double(const Point&, const Point&)>& f) {
  return expectation(pdf, sample_phase(pdf.grid(), pdf.config_dim(), f));
}

ScalarField sample_phase(const PeriodicGrid& grid, Index config_dim,
                         const std::function<double(const Point&, const Point&)>& f) {
  return ScalarField::sample(grid, [&](const Eigen::VectorXd& z) {
    return f(z.head(config_dim), z.tail(config_dim));
  });
}

void write_pdf(const std::filesystem::path& stem, const PhaseSpacePDF& pdf) {
  std::vector<std::string> names;
  for (Index a = 0; a < pdf.config_dim(); ++a) names.push_back("x" + std::to_string(a));
  for (Index a = 0; a < pdf.config_dim(); ++a) names.push_back("p" + std::to_string(a));
  numerics::write_field_snapshot(stem, pdf.grid(), {{"rho", pdf.values().values()}},
                                 numerics::PointLabels::Coordinate, names);
}

void write_trajectory(const std::filesystem::path& path, const std::vector<TrajectoryState>& states,
                      const std::function<double(const Point&, const Point&)>& h) {
  numerics::CsvTable t;
  if (states.empty()) throw InvalidInput("write_trajectory: no states");
  const Index d = states.front().q.size();
  t.columns.push_back("t");
  for (Index a = 0; a < d; ++a) t.columns.push_back("q" + std::to_string(a));
  for (Index a = 0; a < d; ++a) t.columns.push_back("p" + std::to_string(a));
  t.columns.push_back("H");
  for (const auto& s : states) {
    std::vector<double> row{s.t};
    for (Index a = 0; a < d; ++a) row.push_back(s.q[a]);
    for (Index a = 0; a < d; ++a) row.push_back(s.p[a]);
    row.push_back(h(s.q, s.p));
    t.add_row(std::move(row));
  }
  numerics::write_csv(path, t);
}

}  // namespace protomech::classical

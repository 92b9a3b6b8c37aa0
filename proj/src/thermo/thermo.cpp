#include "protomech/thermo/thermo.hpp"

#include <cmath>
#include <string>

namespace protomech::thermo {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be positive and finite");
}

void check_mu(double mu) {
  if (!std::isfinite(mu)) throw InvalidInput("mu must be finite");
}

void check_match(const GrandState& state, const SpectrumTable& table) {
  if (static_cast<std::size_t>(state.weights().size()) != table.size())
    throw InvalidInput("grand state and spectrum table differ in size");
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double top = v.maxCoeff();
  return top + std::log((v.array() - top).exp().sum());
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

SpectrumTable::SpectrumTable(std::vector<SpectrumRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw InvalidInput("spectrum table is empty");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (!std::isfinite(r.energy)) throw InvalidInput("spectrum energy must be finite");
    if (r.particles < 0) throw InvalidInput("particle number must be non-negative");
    if (r.degeneracy < 1) throw InvalidInput("degeneracy must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (rows_[j].particles == r.particles && rows_[j].energy > r.energy)
        throw InvalidInput("energies must ascend within each particle number");
  }
}

Eigen::VectorXd SpectrumTable::grand_energies(double mu) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) out(static_cast<Eigen::Index>(i)) = rows_[i].energy - mu * rows_[i].particles;
  return out;
}

Eigen::VectorXd SpectrumTable::degeneracies() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) out(static_cast<Eigen::Index>(i)) = rows_[i].degeneracy;
  return out;
}

Eigen::VectorXd SpectrumTable::particle_numbers() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) out(static_cast<Eigen::Index>(i)) = rows_[i].particles;
  return out;
}

SpectrumTable fermion_mode(double energy) { return SpectrumTable({{0.0, 0, 1}, {energy, 1, 1}}); }

SpectrumTable boson_mode(double energy, int max_particles) {
  if (max_particles < 1) throw InvalidInput("boson mode needs at least one excited row");
  std::vector<SpectrumRow> rows;
  for (int n = 0; n <= max_particles; ++n) rows.push_back({n * energy, n, 1});
  return SpectrumTable(std::move(rows));
}

double boson_truncation_error(double energy, double beta, double mu, int max_particles) {
  check_beta(beta);
  if (!(energy > mu)) throw DomainError("boson occupation diverges for E <= mu", {});
  const double tail = std::exp(-beta * (energy - mu) * (max_particles + 1));
  return (max_particles + 1) * tail / (1.0 - tail);
}

GrandState::GrandState(const SpectrumTable& table, Eigen::VectorXd weights, double beta, double mu)
    : weights_(std::move(weights)), beta_(beta), mu_(mu) {
  check_beta(beta_);
  check_mu(mu_);
  if (static_cast<std::size_t>(weights_.size()) != table.size())
    throw InvalidInput("grand state and spectrum table differ in size");
  if (!weights_.allFinite()) throw InvalidInput("grand state weights must be finite");
  if (weights_.minCoeff() < 0.0) throw InvalidState("grand state weights must be non-negative");
  if (std::abs(table.degeneracies().dot(weights_) - 1.0) > kNormTolerance)
    throw InvalidState("grand state weights are not normalized");
}

double grand_potential(const GrandState& state, const SpectrumTable& table) {
  check_match(state, table);
  const Eigen::VectorXd& w = state.weights();
  const Eigen::VectorXd g = table.degeneracies();
  const Eigen::VectorXd a = table.grand_energies(state.mu());
  double entropy_term = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) entropy_term += g(i) * xlogx(w(i));
  const double total = g.dot(w);
  return entropy_term / state.beta() + g.cwiseProduct(w).dot(a) + (total - 1.0) / state.beta();
}

double entropy(const GrandState& state, const SpectrumTable& table) {
  check_match(state, table);
  const Eigen::VectorXd g = table.degeneracies();
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) s -= g(i) * xlogx(state.weights()(i));
  return s;
}

double mean_particles(const GrandState& state, const SpectrumTable& table) {
  check_match(state, table);
  return table.degeneracies().cwiseProduct(state.weights()).dot(table.particle_numbers());
}

GrandState gibbs_state(const SpectrumTable& table, double beta, double mu) {
  check_beta(beta);
  check_mu(mu);
  const Eigen::VectorXd exponent = -beta * table.grand_energies(mu);
  const double log_z = log_sum_exp(exponent + table.degeneracies().array().log().matrix());
  return GrandState(table, (exponent.array() - log_z).exp().matrix(), beta, mu);
}

EntropyResult maximize_entropy(const SpectrumTable& table, double beta, double mu, const EntropyOptions& options) {
  check_beta(beta);
  check_mu(mu);
  if (!(options.step > 0.0 && options.step <= 1.0)) throw InvalidInput("entropy step must lie in (0, 1]");
  const Eigen::VectorXd scaled = beta * table.grand_energies(mu);
  const Eigen::VectorXd log_g = table.degeneracies().array().log();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(scaled.size());
  for (int it = 0; it <= options.max_iterations; ++it) {
    const double log_total = log_sum_exp(u + log_g);
    // beta dOmega/drho per row; stationary when constant across rows
    const Eigen::VectorXd gradient = (u.array() - log_total + 1.0).matrix() + scaled;
    const double spread = gradient.maxCoeff() - gradient.minCoeff();
    if (spread <= options.gradient_tolerance) {
      Eigen::VectorXd w = (u.array() - log_total).exp();
      w /= table.degeneracies().dot(w);
      return {GrandState(table, std::move(w), beta, mu), it, spread};
    }
    u -= options.step * (gradient.array() - gradient.mean()).matrix();
  }
  throw ConvergenceError("entropy maximization did not converge");
}

double occupation(double mode_energy, double beta, double mu, Statistics statistics) {
  check_beta(beta);
  check_mu(mu);
  if (!std::isfinite(mode_energy)) throw InvalidInput("mode energy must be finite");
  const double x = beta * (mode_energy - mu);
  switch (statistics) {
    case Statistics::Boson:
      if (!(x > 0.0)) throw DomainError("boson occupation diverges for E <= mu", {});
      return 1.0 / std::expm1(x);
    case Statistics::Fermion:
      return 1.0 / (std::exp(x) + 1.0);
    case Statistics::MaxwellBoltzmann:
      return std::exp(-x);
  }
  throw InvalidInput("unknown statistics");
}

numerics::CsvTable occupation_sweep(const std::vector<double>& betas, const std::vector<double>& mus,
                                    const std::vector<double>& energies, const std::vector<Statistics>& statistics) {
  numerics::CsvTable table;
  table.columns = {"beta", "mu", "E", "statistics", "n"};
  for (double beta : betas)
    for (double mu : mus)
      for (double e : energies)
        for (Statistics s : statistics) {
          if (s == Statistics::Boson && !(e > mu)) continue;
          table.add_row({beta, mu, e, static_cast<double>(static_cast<int>(s)), occupation(e, beta, mu, s)});
        }
  return table;
}

}  // namespace protomech::thermo

#pragma once

#include "protomech/errors.hpp"
#include "protomech/numerics/io.hpp"

#include <Eigen/Dense>

#include <vector>

namespace protomech::thermo {

struct SpectrumRow {
  double energy = 0.0;
  int particles = 0;
  int degeneracy = 1;
};

/// Eigenpairs |E, N> with degeneracies. Energies ascend within each N.
class SpectrumTable {
 public:
  explicit SpectrumTable(std::vector<SpectrumRow> rows);

  const std::vector<SpectrumRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// E - mu N per row.
  Eigen::VectorXd grand_energies(double mu) const;
  Eigen::VectorXd degeneracies() const;
  Eigen::VectorXd particle_numbers() const;

 private:
  std::vector<SpectrumRow> rows_;
};

/// Rows (0, 0) and (E, 1).
SpectrumTable fermion_mode(double energy);
/// Rows (n E, n) for n = 0..max_particles.
SpectrumTable boson_mode(double energy, int max_particles);
/// Exact occupation lost by truncating a bosonic mode at max_particles:
/// (M + 1) x^{M+1} / (1 - x^{M+1}) with x = e^{-beta (E - mu)}.
double boson_truncation_error(double energy, double beta, double mu, int max_particles);

/// Per-row weights with sum(weight * degeneracy) = 1.
class GrandState {
 public:
  static constexpr double kNormTolerance = 1e-10;

  /// Throws InvalidState for negative or unnormalized weights.
  GrandState(const SpectrumTable& table, Eigen::VectorXd weights, double beta, double mu);

  const Eigen::VectorXd& weights() const { return weights_; }
  double beta() const { return beta_; }
  double mu() const { return mu_; }

 private:
  Eigen::VectorXd weights_;
  double beta_;
  double mu_;
};

/// beta^{-1} <rho ln rho> + <rho H> - mu <rho N> + beta^{-1} (<rho> - 1),
/// with 0 ln 0 = 0. Throws InvalidInput on a table size mismatch.
double grand_potential(const GrandState& state, const SpectrumTable& table);

/// -<rho ln rho>.
double entropy(const GrandState& state, const SpectrumTable& table);

/// <rho N>.
double mean_particles(const GrandState& state, const SpectrumTable& table);

/// Closed form e^{beta Omega} e^{-beta (E - mu N)}.
GrandState gibbs_state(const SpectrumTable& table, double beta, double mu);

struct EntropyOptions {
  int max_iterations = 100000;
  /// Bound on the spread of beta dOmega/drho across rows.
  double gradient_tolerance = 1e-10;
  /// Mirror-descent step in log-weight coordinates, in (0, 1].
  double step = 0.5;
};

struct EntropyResult {
  GrandState state;
  int iterations = 0;
  double gradient_norm = 0.0;
};

/// Minimizes the grand potential over normalized weights by gradient descent
/// in log-weight coordinates. Throws ConvergenceError if the gradient bound
/// is not met within max_iterations.
EntropyResult maximize_entropy(const SpectrumTable& table, double beta, double mu, const EntropyOptions& options = {});

enum class Statistics { Boson, Fermion, MaxwellBoltzmann };

/// 1 / (e^{beta (E - mu)} -+ 1) or e^{-beta (E - mu)}. Throws DomainError for
/// a boson with E <= mu.
double occupation(double mode_energy, double beta, double mu, Statistics statistics);

/// Columns beta, mu, E, statistics (0 boson, 1 fermion, 2 Maxwell-Boltzmann),
/// n. Boson points with E <= mu are left out.
numerics::CsvTable occupation_sweep(const std::vector<double>& betas, const std::vector<double>& mus,
                                    const std::vector<double>& energies, const std::vector<Statistics>& statistics);

}  // namespace protomech::thermo

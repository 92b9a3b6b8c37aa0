#pragma once

#include "protomech/errors.hpp"
#include "protomech/numerics/io.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace protomech::cli {

/// A numeric config key with its default and admissible closed interval.
struct ParameterSpec {
  std::string name;
  double default_value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool integer = false;
  std::string description;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  /// Short statement of the result the experiment certifies.
  std::string anchor;
  std::vector<ParameterSpec> parameters;
};

/// Static registry in a fixed order.
const std::vector<ExperimentInfo>& experiments();
/// Throws InvalidInput for an unknown name.
const ExperimentInfo& find_experiment(const std::string& name);

/// Keys accepted in every config besides the experiment parameters.
inline constexpr const char* kExperimentKey = "experiment";
inline constexpr const char* kSeedKey = "seed";
inline constexpr const char* kOutputKey = "output";

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, double> parameters;
  std::uint64_t seed = 1;
  std::filesystem::path output;

  /// Every parameter at its default.
  static ExperimentConfig defaults(const std::string& experiment);

  /// Parses a JSON object. Throws ConfigurationError naming the line for
  /// malformed JSON and the field for unknown keys, wrong types and values
  /// outside the declared bounds. An "experiment" key, when present, must
  /// match `experiment`.
  static ExperimentConfig from_json(const std::string& text, const std::string& experiment);
  static ExperimentConfig load(const std::filesystem::path& path, const std::string& experiment);

  double get(const std::string& name) const;
  long count(const std::string& name) const { return static_cast<long>(get(name)); }
};

/// One measured quantity. pass is recomputed from the value and the
/// admissible interval [lower, upper]; NaN never passes.
class ResultRecord {
 public:
  /// |value| <= tolerance.
  static ResultRecord at_most(std::string experiment, std::string metric, double value, double tolerance);
  /// |value - target| <= tolerance.
  static ResultRecord near(std::string experiment, std::string metric, double value, double target, double tolerance);
  /// value >= bound.
  static ResultRecord at_least(std::string experiment, std::string metric, double value, double bound);

  const std::string& experiment() const { return experiment_; }
  const std::string& metric() const { return metric_; }
  double value() const { return value_; }
  double target() const { return target_; }
  double tolerance() const { return tolerance_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool pass() const;

  double wall_time = 0.0;

 private:
  ResultRecord(std::string experiment, std::string metric, double value, double target, double tolerance, double lower,
               double upper);

  std::string experiment_;
  std::string metric_;
  double value_ = 0.0;
  double target_ = 0.0;
  double tolerance_ = 0.0;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

struct RunResult {
  std::vector<ResultRecord> records;
  /// Series data keyed by file stem.
  std::map<std::string, numerics::CsvTable> tables;

  bool all_pass() const;
};

/// Runs the experiment's pipeline. Nothing is written.
RunResult run(const ExperimentConfig& config);

/// Writes <experiment>.records.jsonl, <experiment>.records.csv and one CSV per
/// series table into `dir`, creating it. The CSV carries no timing, so it is
/// byte-identical across runs with the same config and seed.
void write_outputs(const std::filesystem::path& dir, const std::string& experiment, const RunResult& result);

/// One JSON object per line.
std::string records_jsonl(const std::vector<ResultRecord>& records);
/// Columns experiment, metric, value, target, tolerance, lower, upper, pass.
std::string records_csv(const std::vector<ResultRecord>& records);
/// Human-readable summary table.
std::string summary_table(const std::vector<ResultRecord>& records);
/// Name, description and anchor of every experiment.
std::string list_table();

/// Worker count from PROTOMECH_THREADS, capped at `jobs` and at least 1.
/// Unset means hardware concurrency.
unsigned thread_budget(std::size_t jobs);

}  // namespace protomech::cli

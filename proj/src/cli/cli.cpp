#include "protomech/cli/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace protomech::cli {

namespace {

using nlohmann::json;

const ParameterSpec* find_parameter(const ExperimentInfo& info, const std::string& name) {
  for (const auto& p : info.parameters)
    if (p.name == name) return &p;
  return nullptr;
}

std::string short_number(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

std::string bounds_text(const ParameterSpec& p) {
  return "[" + short_number(p.lower) + ", " + short_number(p.upper) + "]";
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
}

}  // namespace

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : experiments())
    if (e.name == name) return e;
  throw InvalidInput("unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
  const ExperimentInfo& info = find_experiment(experiment);
  ExperimentConfig c;
  c.experiment = experiment;
  for (const auto& p : info.parameters) c.parameters[p.name] = p.default_value;
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text, const std::string& experiment) {
  const ExperimentInfo& info = find_experiment(experiment);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigurationError("config must be a JSON object");

  ExperimentConfig c = defaults(experiment);
  for (const auto& [key, value] : doc.items()) {
    if (key == kExperimentKey) {
      if (!value.is_string() || value.get<std::string>() != experiment)
        throw ConfigurationError("field 'experiment': config is for '" + value.dump() + "', not '" + experiment + "'");
      continue;
    }
    if (key == kSeedKey) {
      if (!value.is_number_unsigned()) throw ConfigurationError("field 'seed': expected a non-negative integer");
      c.seed = value.get<std::uint64_t>();
      continue;
    }
    if (key == kOutputKey) {
      if (!value.is_string()) throw ConfigurationError("field 'output': expected a path string");
      c.output = value.get<std::string>();
      continue;
    }
    const ParameterSpec* p = find_parameter(info, key);
    if (p == nullptr) throw ConfigurationError("field '" + key + "': unknown key for experiment '" + experiment + "'");
    if (!value.is_number()) throw ConfigurationError("field '" + key + "': expected a number");
    const double v = value.get<double>();
    if (p->integer && (!value.is_number_integer() && v != std::floor(v)))
      throw ConfigurationError("field '" + key + "': expected an integer");
    if (!std::isfinite(v) || v < p->lower || v > p->upper)
      throw ConfigurationError("field '" + key + "': value " + short_number(v) + " outside " +
                               bounds_text(*p));
    c.parameters[key] = v;
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path, const std::string& experiment) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_json(text.str(), experiment);
}

double ExperimentConfig::get(const std::string& name) const {
  const auto it = parameters.find(name);
  if (it == parameters.end()) throw ConfigurationError("missing parameter '" + name + "'");
  return it->second;
}

ResultRecord::ResultRecord(std::string experiment, std::string metric, double value, double target, double tolerance,
                           double lower, double upper)
    : experiment_(std::move(experiment)),
      metric_(std::move(metric)),
      value_(value),
      target_(target),
      tolerance_(tolerance),
      lower_(lower),
      upper_(upper) {}

ResultRecord ResultRecord::at_most(std::string experiment, std::string metric, double value, double tolerance) {
  return ResultRecord(std::move(experiment), std::move(metric), std::abs(value), 0.0, tolerance, 0.0, tolerance);
}

ResultRecord ResultRecord::near(std::string experiment, std::string metric, double value, double target,
                                double tolerance) {
  return ResultRecord(std::move(experiment), std::move(metric), value, target, tolerance, target - tolerance,
                      target + tolerance);
}

ResultRecord ResultRecord::at_least(std::string experiment, std::string metric, double value, double bound) {
  return ResultRecord(std::move(experiment), std::move(metric), value, bound, 0.0, bound,
                      std::numeric_limits<double>::infinity());
}

bool ResultRecord::pass() const { return value_ >= lower_ && value_ <= upper_; }

bool RunResult::all_pass() const {
  return !records.empty() && std::all_of(records.begin(), records.end(), [](const ResultRecord& r) { return r.pass(); });
}

std::string records_jsonl(const std::vector<ResultRecord>& records) {
  std::string out;
  auto number = [](double v) -> json { return std::isfinite(v) ? json(v) : json(numerics::format_double(v)); };
  for (const auto& r : records) {
    json j;
    j["experiment"] = r.experiment();
    j["metric"] = r.metric();
    j["value"] = number(r.value());
    j["target"] = number(r.target());
    j["tolerance"] = number(r.tolerance());
    j["lower"] = number(r.lower());
    j["upper"] = number(r.upper());
    j["pass"] = r.pass();
    j["wall_time"] = r.wall_time;
    out += j.dump() + "\n";
  }
  return out;
}

std::string records_csv(const std::vector<ResultRecord>& records) {
  std::string out = "experiment,metric,value,target,tolerance,lower,upper,pass\n";
  for (const auto& r : records) {
    out += r.experiment() + "," + r.metric() + "," + numerics::format_double(r.value()) + "," +
           numerics::format_double(r.target()) + "," + numerics::format_double(r.tolerance()) + "," +
           numerics::format_double(r.lower()) + "," + numerics::format_double(r.upper()) + "," +
           (r.pass() ? "1" : "0") + "\n";
  }
  return out;
}

std::string summary_table(const std::vector<ResultRecord>& records) {
  std::ostringstream out;
  out << std::left << std::setw(20) << "experiment" << std::setw(36) << "metric" << std::setw(14) << "value"
      << std::setw(24) << "admissible" << std::setw(6) << "pass" << "time_s\n";
  for (const auto& r : records) {
    std::ostringstream range;
    range << std::setprecision(4) << "[" << r.lower() << ", " << r.upper() << "]";
    out << std::left << std::setw(20) << r.experiment() << std::setw(36) << r.metric() << std::setw(14)
        << std::setprecision(6) << r.value() << std::setw(24) << range.str() << std::setw(6)
        << (r.pass() ? "yes" : "NO") << std::fixed << std::setprecision(2) << r.wall_time << std::defaultfloat << "\n";
  }
  return out.str();
}

std::string list_table() {
  std::ostringstream out;
  out << std::left << std::setw(22) << "name" << "description | anchor\n";
  for (const auto& e : experiments()) out << std::left << std::setw(22) << e.name << e.description << " | " << e.anchor << "\n";
  return out.str();
}

void write_outputs(const std::filesystem::path& dir, const std::string& experiment, const RunResult& result) {
  std::filesystem::create_directories(dir);
  write_text(dir / (experiment + ".records.jsonl"), records_jsonl(result.records));
  write_text(dir / (experiment + ".records.csv"), records_csv(result.records));
  for (const auto& [stem, table] : result.tables) numerics::write_csv(dir / (stem + ".csv"), table);
}

unsigned thread_budget(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PROTOMECH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigurationError("PROTOMECH_THREADS must be a positive integer");
    cap = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::clamp<std::size_t>(jobs, 1, cap));
}

}  // namespace protomech::cli

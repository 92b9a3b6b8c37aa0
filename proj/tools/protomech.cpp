#include "protomech/cli/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <iostream>
#include <optional>
#include <thread>

namespace {

using protomech::cli::ExperimentConfig;
using protomech::cli::RunResult;

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

int run_all(const std::filesystem::path& out, std::optional<std::uint64_t> seed) {
  const auto& infos = protomech::cli::experiments();
  std::vector<ExperimentConfig> configs;
  for (const auto& e : infos) {
    configs.push_back(ExperimentConfig::defaults(e.name));
    if (seed) configs.back().seed = *seed;
  }
  std::vector<std::optional<RunResult>> results(configs.size());
  std::vector<std::string> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = protomech::cli::run(configs[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned threads = protomech::cli::thread_budget(configs.size());
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  bool ok = true;
  std::vector<protomech::cli::ResultRecord> all;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!results[i]) {
      std::cerr << configs[i].experiment << ": " << errors[i] << "\n";
      ok = false;
      continue;
    }
    protomech::cli::write_outputs(out, configs[i].experiment, *results[i]);
    ok = ok && results[i]->all_pass();
    all.insert(all.end(), results[i]->records.begin(), results[i]->records.end());
  }
  std::cout << protomech::cli::summary_table(all);
  return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric-mechanics experiment runner"};
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("experiment", experiment, "experiment name, 'list' or 'all'")->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized sweeps");
  CLI11_PARSE(app, argc, argv);

  try {
    if (experiment == "list") {
      std::cout << protomech::cli::list_table();
      return 0;
    }
    if (experiment == "all") {
      if (!config_path.empty()) throw protomech::ConfigurationError("'all' runs every experiment at its defaults");
      return run_all(out_dir.empty() ? "protomech-out" : out_dir, seed);
    }
    ExperimentConfig config = config_path.empty() ? ExperimentConfig::defaults(experiment)
                                                   : ExperimentConfig::load(config_path, experiment);
    if (seed) config.seed = *seed;
    std::filesystem::path out = out_dir.empty() ? config.output : std::filesystem::path(out_dir);
    if (out.empty()) out = "protomech-out";
    const RunResult result = protomech::cli::run(config);
    protomech::cli::write_outputs(out, experiment, result);
    std::cout << protomech::cli::summary_table(result.records);
    return result.all_pass() ? 0 : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

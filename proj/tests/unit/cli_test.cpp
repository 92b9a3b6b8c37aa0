#include <doctest.h>

#include "protomech/cli/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace protomech;
using namespace protomech::cli;

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const std::string& text, const std::string& experiment) {
  try {
    ExperimentConfig::from_json(text, experiment);
  } catch (const ConfigurationError& e) {
    return e.what();
  }
  return {};
}

const ResultRecord& record(const RunResult& r, const std::string& metric) {
  for (const auto& rec : r.records)
    if (rec.metric() == metric) return rec;
  throw InvalidInput("missing metric " + metric);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("registry lists thirteen uniquely named experiments with anchors") {
  const auto& list = experiments();
  CHECK(list.size() == 13);
  std::set<std::string> names;
  for (const auto& e : list) {
    names.insert(e.name);
    CHECK(!e.anchor.empty());
    CHECK(!e.description.empty());
    for (const auto& p : e.parameters) {
      CHECK(p.lower <= p.default_value);
      CHECK(p.default_value <= p.upper);
    }
  }
  CHECK(names.size() == 13);
  for (const char* n : {"synchro-conserve", "classical-liouville", "quantum-schrodinger", "quantum-duality",
                        "bridge-wigner", "bridge-madelung", "bridge-limit", "liepoisson-core", "spin-eigen",
                        "spin-bell", "thermo-gibbs", "fluid-euler", "fluid-compressible"})
    CHECK(names.count(n) == 1);
  const std::string table = list_table();
  for (const auto& e : list) CHECK(table.find(e.name) != std::string::npos);
  CHECK_THROWS_AS(find_experiment("nope"), InvalidInput);
}

TEST_CASE("config parsing applies overrides and keeps defaults elsewhere") {
  const auto c = ExperimentConfig::from_json(R"({"experiment": "synchro-conserve", "dt": 5e-4, "steps": 20,
                                                 "seed": 9, "output": "runs/x"})",
                                             "synchro-conserve");
  CHECK(c.get("dt") == 5e-4);
  CHECK(c.count("steps") == 20);
  CHECK(c.get("points") == ExperimentConfig::defaults("synchro-conserve").get("points"));
  CHECK(c.seed == 9);
  CHECK(c.output == std::filesystem::path("runs/x"));
}

TEST_CASE("invalid configs are rejected with field or line diagnostics") {
  CHECK(config_error(R"({"dt": -0.001})", "synchro-conserve").find("field 'dt'") != std::string::npos);
  CHECK(config_error(R"({"dt": 1e-3, "bogus": 1})", "synchro-conserve").find("field 'bogus'") != std::string::npos);
  CHECK(config_error(R"({"steps": 2.5})", "synchro-conserve").find("field 'steps'") != std::string::npos);
  CHECK(config_error(R"({"dt": "small"})", "synchro-conserve").find("field 'dt'") != std::string::npos);
  CHECK(config_error(R"({"seed": -3})", "spin-bell").find("field 'seed'") != std::string::npos);
  CHECK(config_error(R"({"experiment": "spin-bell"})", "spin-eigen").find("field 'experiment'") != std::string::npos);
  CHECK(config_error("{\n  \"dt\": 1e-3,\n  \"steps\" 4\n}", "synchro-conserve").find("line 3") != std::string::npos);
  CHECK(config_error("[1, 2]", "synchro-conserve").find("object") != std::string::npos);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json", "spin-bell"), ConfigurationError);
}

TEST_CASE("result records compute their pass flag") {
  CHECK(ResultRecord::at_most("e", "m", -1e-9, 1e-8).pass());
  CHECK(!ResultRecord::at_most("e", "m", 2e-8, 1e-8).pass());
  CHECK(!ResultRecord::at_most("e", "m", std::nan(""), 1e-8).pass());
  CHECK(ResultRecord::near("e", "m", 2.0000005, 2.0, 1e-6).pass());
  CHECK(!ResultRecord::near("e", "m", 1.99999, 2.0, 1e-6).pass());
  CHECK(ResultRecord::at_least("e", "m", 2.1, 2.0).pass());
  CHECK(!ResultRecord::at_least("e", "m", 1.9, 2.0).pass());
  RunResult empty;
  CHECK(!empty.all_pass());
}

TEST_CASE("spin-bell default config certifies the singlet violation") {
  const RunResult r = run(ExperimentConfig::defaults("spin-bell"));
  const auto& chsh = record(r, "singlet_chsh");
  CHECK(std::abs(chsh.value() - 2.8284) <= 1e-4);
  CHECK(std::abs(chsh.value() - 2 * std::sqrt(2.0)) <= 1e-6);
  CHECK(chsh.pass());
  CHECK(record(r, "product_state_chsh_max").value() <= 2.0 + 1e-9);
  CHECK(r.all_pass());
}

TEST_CASE("classical-liouville default config meets the equivalence bound") {
  const RunResult r = run(ExperimentConfig::defaults("classical-liouville"));
  CHECK(record(r, "liouville_linf_error").value() <= 1e-3);
  CHECK(r.all_pass());
}

TEST_CASE("identical config and seed give byte-identical CSV output") {
  const auto base = std::filesystem::temp_directory_path() / "protomech_cli_determinism";
  std::filesystem::remove_all(base);
  auto c = ExperimentConfig::defaults("thermo-gibbs");
  c.seed = 77;
  c.parameters["tables"] = 5;
  write_outputs(base / "a", c.experiment, run(c));
  write_outputs(base / "b", c.experiment, run(c));
  for (const char* f : {"thermo-gibbs.records.csv", "thermo-gibbs.occupations.csv"}) {
    REQUIRE(std::filesystem::exists(base / "a" / f));
    CHECK(read_text(base / "a" / f) == read_text(base / "b" / f));
  }
  const std::string jsonl = read_text(base / "a" / "thermo-gibbs.records.jsonl");
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 2);
  CHECK(jsonl.find("\"wall_time\"") != std::string::npos);

  auto other = c;
  other.seed = 78;
  write_outputs(base / "c", c.experiment, run(other));
  CHECK(read_text(base / "a" / "thermo-gibbs.records.csv") != read_text(base / "c" / "thermo-gibbs.records.csv"));
  std::filesystem::remove_all(base);
}

TEST_CASE("thread budget honours the environment cap") {
  ::setenv("PROTOMECH_THREADS", "3", 1);
  CHECK(thread_budget(13) == 3);
  CHECK(thread_budget(2) == 2);
  CHECK(thread_budget(0) == 1);
  ::setenv("PROTOMECH_THREADS", "zero", 1);
  CHECK_THROWS_AS(thread_budget(4), ConfigurationError);
  ::unsetenv("PROTOMECH_THREADS");
  CHECK(thread_budget(1) == 1);
}

}  // TEST_SUITE

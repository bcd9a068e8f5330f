/*
 * Copyright 2026 The Driftwise Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command line front end: `driftwise run` and `driftwise verify`.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "driftwise/experiments.hpp"

namespace {

using driftwise::experiment::Json;

int run(const std::string& config_path, const std::string& experiment,
        const std::vector<std::string>& overrides, const std::string& out,
        const std::string& seed) {
  Json json;
  {
    std::ifstream in(config_path);
    if (!in) {
      throw driftwise::ConfigError("cannot open config file '" + config_path +
                                   "'");
    }
    try {
      json = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw driftwise::ConfigError("config file '" + config_path +
                                   "' is not valid JSON: " + e.what());
    }
  }
  for (const auto& o : overrides) {
    driftwise::experiment::apply_override(json, o);
  }
  if (!experiment.empty()) json["experiment"] = experiment;
  if (!seed.empty()) json["seed"] = std::stoull(seed);
  if (!out.empty()) json["out"] = out;

  const auto config = driftwise::experiment::config_from_json(json);
  const auto summary = driftwise::experiment::run_and_write(config);
  std::cout << "wrote results to " << config.out << "\n";
  if (summary.contains("normalized_error")) {
    std::cout << summary["normalized_error"].dump(2) << "\n";
  }
  return 0;
}

int verify(std::uint64_t seed) {
  const auto checks = driftwise::experiment::run_verification(seed);
  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail
              << "\n";
    failed += !c.passed;
  }
  std::cout << (checks.size() - failed) << "/" << checks.size()
            << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental permutation feature importance on data streams"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a config");
  std::string config_path;
  std::string experiment;
  std::string out;
  std::string seed;
  std::vector<std::string> overrides;
  run_cmd->add_option("--config", config_path, "JSON config file")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--experiment", experiment, "Experiment to run")
      ->check(CLI::IsMember(
          {"A", "B", "C", "theory-bias", "theory-variance"}));
  run_cmd->add_option("--seed", seed, "Base seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--set", overrides,
                      "Override a config value, e.g. --set alpha=0.01");

  auto* verify_cmd =
      app.add_subcommand("verify", "Check the estimators against exact results");
  std::uint64_t verify_seed = 7;
  verify_cmd->add_option("--seed", verify_seed, "Base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(config_path, experiment, overrides, out, seed);
    if (*verify_cmd) return verify(verify_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

// Copyright 2026 The kpnn-forest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line driver: kpnn-forest run|validate|list-experiments.

#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kpnn/config.hpp"
#include "kpnn/error.hpp"
#include "kpnn/experiments.hpp"
#include "kpnn/replication.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int list_experiments() {
  for (const kpnn::ExperimentInfo& e : kpnn::experiment_catalog()) {
    std::printf("%-18s %s\n", e.name, e.summary);
  }
  return 0;
}

int validate(const std::string& path, const std::vector<std::string>& overrides) {
  const kpnn::ExperimentConfig config = kpnn::load_config(path, overrides);
  const auto findings = kpnn::validate_config(config);
  bool errors = false;
  for (const kpnn::Finding& f : findings) {
    const bool err = f.level == kpnn::Finding::Level::kError;
    errors = errors || err;
    std::printf("%s: %s\n", err ? "error" : "warning", f.message.c_str());
  }
  std::printf("experiment: %s\n", kpnn::experiment_name(config.kind).c_str());
  std::printf("estimated cost: %.3g sampled points\n", kpnn::estimated_cost_points(config));
  std::printf("findings: %zu\n", findings.size());
  return errors ? kExitInvalid : 0;
}

int run(const std::string& path, const std::vector<std::string>& overrides,
        std::size_t workers) {
  const kpnn::ExperimentConfig config = kpnn::load_config(path, overrides);
  for (const kpnn::Finding& f : kpnn::validate_config(config)) {
    if (f.level == kpnn::Finding::Level::kWarning) {
      std::fprintf(stderr, "warning: %s\n", f.message.c_str());
    }
  }
  if (workers == 0) workers = kpnn::default_workers();
  const auto start = std::chrono::steady_clock::now();
  const kpnn::ExperimentResult result = kpnn::run_experiment(config, workers);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  kpnn::write_artifacts(config, result, wall, workers);
  for (const std::string& note : result.notes) std::fprintf(stderr, "note: %s\n", note.c_str());
  std::printf("%s: %zu rows written to %s (%.1f s)\n",
              kpnn::experiment_name(config.kind).c_str(), result.table.rows.size(),
              config.output.c_str(), wall);
  if (!result.numerical_failures.empty()) {
    for (const std::string& f : result.numerical_failures) {
      std::fprintf(stderr, "numerical failure: %s\n", f.c_str());
    }
    return kExitNumerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-PNN forest Monte Carlo experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  std::size_t workers = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
  run_cmd->add_option("config", config_path, "INI config file")->required();
  run_cmd->add_option("--set", overrides, "override a key, e.g. --set grid.n=1e3,1e4");
  run_cmd->add_option("-o,--output", output, "output directory (overrides experiment.output)");
  run_cmd->add_option("-w,--workers", workers,
                      "worker threads (default: KPNN_WORKERS or hardware parallelism)");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check a config without running it");
  validate_cmd->add_option("config", config_path, "INI config file")->required();
  validate_cmd->add_option("--set", overrides, "override a key");

  app.add_subcommand("list-experiments", "list the available experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (!output.empty()) overrides.push_back("experiment.output=" + output);
    if (app.got_subcommand("list-experiments")) return list_experiments();
    if (app.got_subcommand("validate")) return validate(config_path, overrides);
    return run(config_path, overrides, workers);
  } catch (const kpnn::InvalidArgument& e) {
    std::fprintf(stderr, "invalid config: %s\n", e.what());
    return kExitInvalid;
  } catch (const kpnn::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const kpnn::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

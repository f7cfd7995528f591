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


#ifndef KPNN_CONFIG_HPP_
#define KPNN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kpnn/forest.hpp"
#include "kpnn/process.hpp"

namespace kpnn {

enum class ExperimentKind {
  kCltRate,
  kPnnCount,
  kBiasDecay,
  kTailCalibration,
  kConcentration,
  kLowerBoundFit,
  kAssumptionAudit,
};

struct ExperimentInfo {
  ExperimentKind kind;
  const char* name;
  const char* summary;
};

const std::vector<ExperimentInfo>& experiment_catalog();
ExperimentKind experiment_from_name(const std::string& name);
std::string experiment_name(ExperimentKind kind);

/// Fully resolved experiment description. Built from an INI file whose
/// sections are [experiment], [model], [grid], [forest], [stabilization]
/// and [output]; every key has a default.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kPnnCount;
  std::uint64_t seed = 1;
  std::size_t reps = 100;
  std::string output = "results";

  Model model;
  std::vector<double> intensities{1000.0};
  std::vector<std::size_t> ks{1};
  std::vector<Point> x0s;
  SamplingMode sampling = SamplingMode::kPoisson;

  WeightScheme scheme;

  // tail-calibration
  std::size_t cases = 20;
  std::size_t draws = 20000;
  std::size_t max_k = 10;
  // lower-bound-fit
  double t = 1.0;
  double alpha = 1.0;
  std::size_t outer_samples = 20000;
  std::size_t inner_samples = 64;
  // assumption-audit
  std::size_t instances = 500;
  std::size_t max_points = 200;

  bool plot = false;
  std::size_t rect_grid = 41;
  std::size_t bootstrap = 200;

  // Every key with its effective value, "section.key" -> text.
  std::map<std::string, std::string> resolved;
};

/// Parses INI text. `overrides` are "section.key=value" strings applied on
/// top of the file. Unknown sections or keys, malformed values and
/// out-of-range parameters raise InvalidArgument.
ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides = {});
/// Reads and parses a file; an unreadable file raises IoError.
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

struct Finding {
  enum class Level { kWarning, kError } level;
  std::string message;
};

/// Static checks that need no simulation: limits of the distance
/// estimators, hypotheses of the individual checks, and budget.
std::vector<Finding> validate_config(const ExperimentConfig& config);

/// Rough number of sampled points the experiment will generate.
double estimated_cost_points(const ExperimentConfig& config);

}  // namespace kpnn

#endif  // KPNN_CONFIG_HPP_

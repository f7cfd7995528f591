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


#ifndef KPNN_EXPERIMENTS_HPP_
#define KPNN_EXPERIMENTS_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "kpnn/config.hpp"

namespace kpnn {

inline constexpr const char* kVersion = "0.1.0";

/// Numeric table with a fixed column list; one row per grid cell.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
  double at(std::size_t row, const std::string& name) const {
    return rows.at(row).at(column(name));
  }
};

struct PlotSpec {
  std::string x;
  std::string y;
  std::string series;  // column splitting the rows into lines; may be empty
  bool log_x = false;
  std::string title;
};

struct ExperimentResult {
  ResultTable table;
  std::map<std::string, double> summary;
  std::vector<std::string> notes;
  // Estimates that could not be produced (reported as nan in the table).
  std::vector<std::string> numerical_failures;
  PlotSpec plot;
};

/// Fixed column list of an experiment's results.csv.
std::vector<std::string> result_columns(ExperimentKind kind);

/// Runs the configured experiment. `workers` = 0 picks default_workers().
/// The result does not depend on the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers = 0);

/// CSV text with a header row; numbers carry 17 significant digits.
std::string format_csv(const ResultTable& table);

/// Static line chart of the table.
std::string render_svg(const ResultTable& table, const PlotSpec& spec);

/// Writes results.csv, meta.json and (if enabled) plot.svg into
/// config.output. Raises IoError on any write failure.
void write_artifacts(const ExperimentConfig& config, const ExperimentResult& result,
                     double wall_seconds, std::size_t workers);

}  // namespace kpnn

#endif  // KPNN_EXPERIMENTS_HPP_

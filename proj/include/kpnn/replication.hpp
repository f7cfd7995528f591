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

#ifndef KPNN_REPLICATION_HPP_
#define KPNN_REPLICATION_HPP_

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "kpnn/forest.hpp"
#include "kpnn/process.hpp"

namespace kpnn {

/// Description of a Monte Carlo experiment over an (n, k) grid.
struct ReplicationPlan {
  Model model;
  std::vector<double> intensities;
  std::vector<std::size_t> ks;
  std::vector<Point> x0s;
  std::size_t reps = 2;
  WeightScheme scheme;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::kPoisson;
  // Skip marks and predictions; only voting-set sizes are produced.
  bool positions_only = false;

  void validate() const;

  // Replication r of intensity n_index draws its sample from this stream.
  SeedSpec sample_seed(std::size_t n_index, std::size_t rep) const {
    return {derive_seed(seed, n_index), rep};
  }
};

/// Per-replication outputs for one (n, k) cell; rows are replications in
/// stream order.
struct RawMatrix {
  double n = 0.0;
  std::size_t k = 0;
  std::size_t reps = 0;
  std::size_t m = 0;
  std::vector<double> predictions;  // reps x m
  std::vector<std::size_t> L;       // reps x m
  std::vector<double> sum_sq_weights;
  std::vector<char> empty_process;  // per replication

  double prediction(std::size_t r, std::size_t j) const { return predictions[r * m + j]; }
  std::size_t voters(std::size_t r, std::size_t j) const { return L[r * m + j]; }
  std::vector<double> prediction_column(std::size_t j) const;
  std::vector<std::size_t> L_column(std::size_t j) const;
  Eigen::MatrixXd prediction_matrix() const;
  std::size_t empty_count() const;
};

/// Worker count from KPNN_WORKERS, else hardware concurrency (at least 1).
std::size_t default_workers();

/// Runs fn(i) for i in [0, count) on `workers` threads. Each index is handled
/// exactly once; the first exception thrown is rethrown on the caller.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

/// All k values of the plan at intensity index n_index, sharing one sample
/// per replication. Output is independent of `workers`.
std::vector<RawMatrix> run_replications_all_k(const ReplicationPlan& plan,
                                              std::size_t n_index,
                                              std::size_t workers = 0);

RawMatrix run_replications(const ReplicationPlan& plan, std::size_t n_index,
                           std::size_t k, std::size_t workers = 0);

/// Every (n, k) cell, n-major.
std::vector<RawMatrix> run_grid(const ReplicationPlan& plan, std::size_t workers = 0);

}  // namespace kpnn

#endif  // KPNN_REPLICATION_HPP_

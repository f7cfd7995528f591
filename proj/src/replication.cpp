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

#include "kpnn/replication.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

#include "kpnn/error.hpp"

namespace kpnn {

void ReplicationPlan::validate() const {
  model.validate();
  scheme.validate();
  if (reps < 2) throw InvalidArgument("plan: reps must be at least 2");
  if (intensities.empty() || ks.empty() || x0s.empty()) {
    throw InvalidArgument("plan: intensity, k and test-point grids must be nonempty");
  }
  for (double n : intensities) {
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("plan: intensities must be positive");
  }
  for (std::size_t k : ks) {
    if (k == 0) throw InvalidArgument("plan: k must be positive");
  }
  for (const Point& p : x0s) {
    if (p.dim() != model.dim()) throw InvalidArgument("plan: test point dimension mismatch");
  }
}

std::vector<double> RawMatrix::prediction_column(std::size_t j) const {
  std::vector<double> out(reps);
  for (std::size_t r = 0; r < reps; ++r) out[r] = prediction(r, j);
  return out;
}

std::vector<std::size_t> RawMatrix::L_column(std::size_t j) const {
  std::vector<std::size_t> out(reps);
  for (std::size_t r = 0; r < reps; ++r) out[r] = voters(r, j);
  return out;
}

Eigen::MatrixXd RawMatrix::prediction_matrix() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(reps), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t j = 0; j < m; ++j) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = prediction(r, j);
    }
  }
  return out;
}

std::size_t RawMatrix::empty_count() const {
  return static_cast<std::size_t>(std::count(empty_process.begin(), empty_process.end(), 1));
}

std::size_t default_workers() {
  if (const char* env = std::getenv("KPNN_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = default_workers();
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<RawMatrix> run_replications_all_k(const ReplicationPlan& plan,
                                              std::size_t n_index, std::size_t workers) {
  plan.validate();
  if (n_index >= plan.intensities.size()) {
    throw InvalidArgument("run_replications: intensity index out of range");
  }
  const double n = plan.intensities[n_index];
  const std::size_t m = plan.x0s.size();
  std::vector<RawMatrix> cells(plan.ks.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    RawMatrix& cell = cells[c];
    cell.n = n;
    cell.k = plan.ks[c];
    cell.reps = plan.reps;
    cell.m = m;
    cell.predictions.assign(plan.reps * m, 0.0);
    cell.L.assign(plan.reps * m, 0);
    cell.sum_sq_weights.assign(plan.reps * m, 0.0);
    cell.empty_process.assign(plan.reps, 0);
  }
  parallel_for(plan.reps, workers, [&](std::size_t r) {
    const SeedSpec seed = plan.sample_seed(n_index, r);
    if (plan.positions_only) {
      const PointConfig config =
          sample_poisson_config(n, plan.model.density, seed, plan.mode);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        cells[c].empty_process[r] = config.empty() ? 1 : 0;
        for (std::size_t j = 0; j < m; ++j) {
          cells[c].L[r * m + j] = kpnn_set_fast(config, plan.x0s[j], cells[c].k).size();
        }
      }
      return;
    }
    const MarkedSample sample = sample_marked(n, plan.model, seed, plan.mode);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto preds = predict_multi(sample, plan.x0s, cells[c].k, plan.scheme);
      cells[c].empty_process[r] = sample.empty() ? 1 : 0;
      for (std::size_t j = 0; j < m; ++j) {
        cells[c].predictions[r * m + j] = preds[j].value;
        cells[c].L[r * m + j] = preds[j].L();
        cells[c].sum_sq_weights[r * m + j] = preds[j].sum_sq_weights();
      }
    }
  });
  return cells;
}

RawMatrix run_replications(const ReplicationPlan& plan, std::size_t n_index,
                           std::size_t k, std::size_t workers) {
  ReplicationPlan one = plan;
  one.ks = {k};
  return std::move(run_replications_all_k(one, n_index, workers).front());
}

std::vector<RawMatrix> run_grid(const ReplicationPlan& plan, std::size_t workers) {
  std::vector<RawMatrix> out;
  for (std::size_t i = 0; i < plan.intensities.size(); ++i) {
    auto cells = run_replications_all_k(plan, i, workers);
    for (auto& c : cells) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace kpnn

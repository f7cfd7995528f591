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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kpnn/config.hpp"
#include "kpnn/experiments.hpp"
#include "kpnn/geometry.hpp"
#include "kpnn/stabilization.hpp"

namespace {

using namespace kpnn;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ExperimentConfig load(const std::string& name, const std::vector<std::string>& overrides = {}) {
  return load_config(std::string(KPNN_CONFIG_DIR) + "/" + name + ".ini", overrides);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

// Random configuration, optionally on a coarse lattice so that ties between
// coordinates and with x0 occur often.
PointConfig lattice_or_uniform(std::mt19937_64& rng, std::size_t n, std::size_t d, int grid) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> g(0, grid);
  std::vector<double> flat(n * d);
  for (double& v : flat) v = grid > 0 ? static_cast<double>(g(rng)) / grid : u(rng);
  return PointConfig(d, std::move(flat));
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20261019);
  std::size_t cases = 0, mismatches = 0;
  auto check = [&](const PointConfig& c, const Point& x0, std::size_t k) {
    ++cases;
    if (kpnn_set_fast(c, x0, k) != kpnn_set(c, x0, k)) ++mismatches;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng() % 4;
    const std::size_t n = 1 + rng() % 500;
    const std::size_t k = 1 + rng() % 12;
    const int grid = trial % 3 == 0 ? 2 + static_cast<int>(rng() % 6) : 0;
    const PointConfig c = lattice_or_uniform(rng, n, d, grid);
    Point x0{lattice_or_uniform(rng, 1, d, grid).flat()};
    if (trial % 7 == 0 && n > 0) x0 = Point(c[rng() % n]);
    check(c, x0, k);
  }
  const std::size_t random_cases = cases;
  // Every size up to 12, every dimension and k, on lattices and in general
  // position, with x0 on a lattice node or a sample point.
  for (std::size_t n = 0; n <= 12; ++n) {
    for (std::size_t d = 1; d <= 4; ++d) {
      for (int rep = 0; rep < 6; ++rep) {
        const int grid = rep < 4 ? 1 + rep : 0;
        const PointConfig c = lattice_or_uniform(rng, n, d, grid);
        Point x0{lattice_or_uniform(rng, 1, d, grid).flat()};
        if (rep == 5 && n > 0) x0 = Point(c[rng() % n]);
        for (std::size_t k = 1; k <= 12; ++k) check(c, x0, k);
      }
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0,
          fmt("%.0f randomized + %.0f small-n cases, %.0f mismatches, %.1f s", random_cases,
              cases - random_cases, mismatches, secs)};
}

Outcome l_moment_scaling() {
  const ExperimentResult r = run_experiment(load("pnn-count"));
  const double slope = r.summary.at("slope_k1_x0");
  return {std::abs(slope - 4.0) <= 0.15 * 4.0,
          fmt("slope of E[L] vs log n = %.3f (target 4 +/- 0.6)", slope)};
}

Outcome membership_calibration() {
  const ExperimentResult r = run_experiment(load("tail-calibration"));
  const double within = r.summary.at("within_3se");
  const double cases = r.summary.at("cases");
  return {cases == 20 && within >= 18,
          fmt("%.0f/%.0f cases within 3 SE", within, cases)};
}

Outcome tail_dominance() {
  std::size_t violations = 0, points = 0;
  for (std::size_t k = 1; k <= 50; ++k) {
    for (int i = 0; i <= 5000; ++i) {
      const double lambda = 0.01 * i;
      ++points;
      if (tail_bound_lambda(lambda, k) < poisson_cdf_psi(lambda, k)) ++violations;
    }
  }
  return {violations == 0, fmt("%.0f violations on %.0f grid points", violations, points)};
}

struct CltBatch {
  double dk_small = 0, dk_large = 0, rect_large = 0;
  std::string csv;
};

CltBatch clt_batch(std::uint64_t seed, std::size_t workers) {
  const ExperimentConfig c = load("clt-rate", {"experiment.seed=" + std::to_string(seed)});
  const ExperimentResult r = run_experiment(c, workers);
  CltBatch b;
  for (std::size_t i = 0; i < r.table.rows.size(); ++i) {
    const double n = r.table.at(i, "n");
    if (n == 1e3) b.dk_small = r.table.at(i, "d_k");
    if (n == 1e5) {
      b.dk_large = r.table.at(i, "d_k");
      b.rect_large = r.table.at(i, "rect_k");
    }
  }
  b.csv = format_csv(r.table);
  return b;
}

constexpr std::uint64_t kCltSeed = 20261019;

Outcome clt_decay(CltBatch& first) {
  std::vector<CltBatch> batches;
  batches.push_back(clt_batch(kCltSeed, 1));
  batches.push_back(clt_batch(kCltSeed + 1, 0));
  batches.push_back(clt_batch(kCltSeed + 2, 0));
  first = batches.front();
  int decays = 0, small = 0, rect = 0;
  std::string detail;
  for (const CltBatch& b : batches) {
    decays += b.dk_large < b.dk_small;
    small += b.dk_large < 0.05;
    rect += b.rect_large < 0.08;  // false for nan
    detail += fmt("[d_K %.4f -> %.4f, rect %.4f] ", b.dk_small, b.dk_large, b.rect_large);
  }
  detail += fmt("decay %.0f/3, d_K<0.05 %.0f/3, rect<0.08 %.0f/3", decays, small, rect);
  return {decays >= 2 && small >= 2 && rect >= 2, detail};
}

Outcome bias_decay() {
  bool ok = true;
  std::string detail;
  const ExperimentResult sine = run_experiment(load("bias-decay"));
  const ResultTable& t = sine.table;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.at(i, "n") != 1e3) continue;
    for (std::size_t j = 0; j < t.rows.size(); ++j) {
      if (t.at(j, "n") != 1e5 || t.at(j, "k") != t.at(i, "k") ||
          t.at(j, "x0_index") != t.at(i, "x0_index")) {
        continue;
      }
      const double gap = t.at(i, "bias") - t.at(j, "bias");
      const double se = std::hypot(t.at(i, "bias_se"), t.at(j, "bias_se"));
      ok = ok && gap > 3.0 * se;
      detail += fmt("k=%.0f: %.4f -> %.4f (gap %.1f SE); ", t.at(i, "k"), t.at(i, "bias"),
                    t.at(j, "bias"), gap / se);
    }
  }
  const ExperimentResult flat =
      run_experiment(load("bias-decay", {"model.r0=constant", "model.constant=1.5"}));
  double worst = 0.0;
  for (std::size_t i = 0; i < flat.table.rows.size(); ++i) {
    worst = std::max(worst, flat.table.at(i, "bias") / flat.table.at(i, "bias_se"));
  }
  ok = ok && worst <= 3.0;
  detail += fmt("constant mean: max |bias|/SE = %.2f", worst);
  return {ok, detail};
}

Outcome variance_floor() {
  const ExperimentResult r =
      run_experiment(load("bias-decay", {"model.r0=constant", "model.sigma=1", "grid.n=1e4,1e5",
                                         "experiment.reps=3000", "output.plot=false"}));
  std::size_t pass = 0;
  double worst = INFINITY;
  for (std::size_t i = 0; i < r.table.rows.size(); ++i) {
    pass += r.table.at(i, "floor_pass") != 0.0;
    worst = std::min(worst, r.table.at(i, "floor_ratio"));
  }
  return {pass == r.table.rows.size() && pass == 6,
          fmt("%.0f/%.0f cells with Var >= 0.9 sigma^2/E[L], smallest ratio %.3f", pass,
              r.table.rows.size(), worst)};
}

Outcome concentration() {
  const ExperimentResult r = run_experiment(load("concentration", {"grid.n=1e5"}));
  const double frac = r.table.at(0, "fraction");
  return {r.table.at(0, "skipped") == 0.0 && frac < 0.01,
          fmt("P(L <= E[L]/2) = %.4f at n=1e5, k=11, E[L] = %.1f", frac,
              r.table.at(0, "mean_L"))};
}

Outcome lower_bound_exponent() {
  const ExperimentResult r = run_experiment(load("lower-bound-fit"));
  const double e = r.summary.at("exponent");
  return {std::abs(e - 2.0) <= 0.3, fmt("fitted exponent %.3f (target 2 +/- 0.3)", e)};
}

Outcome assumption_audit() {
  const ExperimentResult r = run_experiment(load("assumption-audit"));
  const double v = r.summary.at("r1_violations") + r.summary.at("r3_violations") +
                   r.summary.at("r4_violations");
  return {r.summary.at("instances") == 500 && v == 0,
          fmt("%.0f instances, %.0f counterexamples", r.summary.at("instances"), v)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const CltBatch& first) {
  const ExperimentConfig c = load("clt-rate", {"experiment.seed=" + std::to_string(kCltSeed)});
  const fs::path root = fs::temp_directory_path() / "kpnn-acceptance";
  std::vector<std::string> files;
  for (std::size_t workers : {4u, 16u}) {
    ExperimentConfig cw = c;
    cw.output = (root / ("w" + std::to_string(workers))).string();
    fs::remove_all(cw.output);
    write_artifacts(cw, run_experiment(cw, workers), 0.0, workers);
    files.push_back(slurp(fs::path(cw.output) / "results.csv"));
  }
  const bool same = !first.csv.empty() && files[0] == first.csv && files[1] == first.csv;
  return {same, std::string("results.csv for workers 1, 4, 16 ") +
                    (same ? "identical" : "DIFFERENT") +
                    fmt(" (%.0f bytes)", static_cast<double>(first.csv.size()))};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };
  CltBatch first;
  report(1, "oracle equivalence", oracle_equivalence);
  report(2, "L-moment scaling", l_moment_scaling);
  report(3, "membership calibration", membership_calibration);
  report(4, "tail-bound dominance", tail_dominance);
  report(5, "CLT decay", [&] { return clt_decay(first); });
  report(6, "bias decay", bias_decay);
  report(7, "variance floor", variance_floor);
  report(8, "concentration", concentration);
  report(9, "lower-bound exponent", lower_bound_exponent);
  report(10, "assumption audit", assumption_audit);
  report(11, "determinism", [&] { return determinism(first); });
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

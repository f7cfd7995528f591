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

#ifndef KPNN_CHECKS_HPP_
#define KPNN_CHECKS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kpnn {

struct LMoments {
  double mean = 0.0;
  double se = 0.0;
  double variance = 0.0;
  double ratio = 0.0;        // mean / (k * log(n)^(d-1))
  double recip_mean = 0.0;   // E[1/L] over replications with L > 0
  double recip_se = 0.0;
  double recip_product = 0.0;  // E[1/L] * E[L]
  std::vector<double> quantiles;  // at 0.05, 0.25, 0.5, 0.75, 0.95
};

/// Moments of the voting-set size. Requires at least 30 replications.
LMoments estimate_L_moments(std::span<const std::size_t> L, double n, std::size_t k,
                            std::size_t d);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares of y on x.
LinearFit ols_fit(std::span<const double> x, std::span<const double> y);

struct BiasEstimate {
  double bias = 0.0;         // |mean - r0|
  double signed_bias = 0.0;  // mean - r0
  double se = 0.0;
};

BiasEstimate estimate_bias(std::span<const double> predictions, double r0_at_x0);

struct VarianceFloor {
  double variance = 0.0;
  double variance_se = 0.0;
  double floor = 0.0;  // sigma^2 / E[L]
  double mean_L = 0.0;
  bool pass = false;   // variance >= 0.9 * floor
};

/// Compares the prediction variance with sigma^2 / E[L], the Jensen lower
/// bound for the uniform-weight estimator.
VarianceFloor variance_floor_check(std::span<const double> predictions,
                                   double min_noise_variance,
                                   std::span<const std::size_t> L);

struct Concentration {
  double fraction = 0.0;  // P(L <= E[L] / 2)
  double se = 0.0;
  double mean_L = 0.0;
  bool skipped = false;
  std::string notice;
};

/// Empirical lower-tail mass of L at half its mean. Skipped with a notice
/// when k < 11 or E[L] < 2.
Concentration concentration_check(std::span<const std::size_t> L, std::size_t k);

struct LowerBoundOptions {
  std::size_t dim = 2;
  std::size_t outer_samples = 20000;
  std::size_t inner_samples = 64;
  std::uint64_t seed = 0x10b;
};

struct LowerBoundFit {
  std::vector<double> estimates;  // one per k
  std::vector<double> std_errors;
  double exponent = 0.0;          // slope of log estimate vs log k
};

/// Monte Carlo estimate of
///   n * int ( n * int 1{y in Rect(0, x)} psi(n, k, 0, x)^alpha dx )^t dy
/// for the uniform density on [0, 1]^d, at each k, followed by a log-log fit.
/// Log-uniform importance sampling on both integrals; the same random
/// numbers are reused for every k.
LowerBoundFit lower_bound_exponent_fit(double n, std::span<const std::size_t> ks,
                                       double t, double alpha,
                                       const LowerBoundOptions& opts = {});

double lower_bound_integral(double n, std::size_t k, double t, double alpha,
                            const LowerBoundOptions& opts, double* std_error = nullptr);

}  // namespace kpnn

#endif  // KPNN_CHECKS_HPP_

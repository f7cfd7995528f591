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

#ifndef KPNN_DISTANCES_HPP_
#define KPNN_DISTANCES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kpnn {

double std_normal_cdf(double z);

/// Unbiased sample covariance of the rows of `data` (reps x m).
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data);

struct Standardized {
  Eigen::MatrixXd data;          // rows Sigma^{-1/2} (r - mean r)
  bool ridge_applied = false;
  double min_eigenvalue = 0.0;   // of the covariance before any ridge
};

/// Whitens the rows of `data` with the symmetric inverse square root of
/// `cov`. A covariance whose smallest eigenvalue falls below
/// 1e-10 * trace / m gets that ridge added to the diagonal and the result is
/// flagged. A zero or materially indefinite covariance cannot be repaired
/// and raises NumericalError.
Standardized standardize(const Eigen::MatrixXd& data, const Eigen::MatrixXd& cov);

/// Kolmogorov distance between the empirical law of `samples` and the
/// standard normal, exact for the empirical measure.
double ecdf_kolmogorov(std::span<const double> samples);

/// Standard error of ecdf_kolmogorov on (x - mean)/sd standardized data,
/// by a deterministic nonparametric bootstrap.
double kolmogorov_bootstrap_se(std::span<const double> raw, std::size_t resamples,
                               std::uint64_t seed);

/// (x - mean) / sd with the unbiased sd.
std::vector<double> standardize_1d(std::span<const double> raw);

constexpr std::size_t kMaxRectDim = 4;
constexpr std::size_t kMaxRectGrid = 41;

/// Largest |ECDF(t) - Phi_m(t)| over lower orthants (-inf, t] with t on a
/// g^m grid spanning [-range, range] per axis. Expects data already
/// standardized to identity covariance.
double multivariate_rect_kolmogorov(const Eigen::MatrixXd& standardized,
                                    std::size_t grid, double range = 3.0);

/// Standardizes with the sample covariance first; refuses (NumericalError)
/// when that needed a ridge, because the rank-deficient direction makes the
/// comparison with Phi_m meaningless.
double standardized_rect_kolmogorov(const Eigen::MatrixXd& data, std::size_t grid,
                                    double range = 3.0);

}  // namespace kpnn

#endif  // KPNN_DISTANCES_HPP_

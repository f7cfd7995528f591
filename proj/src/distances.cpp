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

#include "kpnn/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kpnn/error.hpp"
#include "kpnn/rng.hpp"

namespace kpnn {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) throw InvalidArgument("sample_covariance: need at least two rows");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(data.rows() - 1);
  return 0.5 * (cov + cov.transpose());
}

Standardized standardize(const Eigen::MatrixXd& data, const Eigen::MatrixXd& cov) {
  const auto m = cov.rows();
  if (m == 0 || cov.cols() != m || data.cols() != m) {
    throw InvalidArgument("standardize: covariance shape does not match data");
  }
  const double trace = cov.trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) {
    throw NumericalError("standardize: covariance has zero trace; nothing to whiten");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("standardize: eigensolver failed");
  Standardized out;
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  const double ridge = 1e-10 * trace / static_cast<double>(m);
  if (out.min_eigenvalue < -1e-6 * trace / static_cast<double>(m)) {
    throw NumericalError("standardize: covariance is not positive semidefinite");
  }
  Eigen::VectorXd values = eig.eigenvalues();
  if (out.min_eigenvalue < ridge) {
    out.ridge_applied = true;
    values.array() += ridge;
  }
  const Eigen::MatrixXd inv_sqrt = eig.eigenvectors() *
                                   values.cwiseSqrt().cwiseInverse().asDiagonal() *
                                   eig.eigenvectors().transpose();
  const Eigen::RowVectorXd mean = data.colwise().mean();
  out.data = (data.rowwise() - mean) * inv_sqrt;
  return out;
}

double ecdf_kolmogorov(std::span<const double> samples) {
  if (samples.size() < 100) {
    throw InvalidArgument("ecdf_kolmogorov: needs at least 100 samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = std_normal_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<double> standardize_1d(std::span<const double> raw) {
  if (raw.size() < 2) throw InvalidArgument("standardize_1d: need at least two samples");
  const double n = static_cast<double>(raw.size());
  const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : raw) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw NumericalError("standardize_1d: zero variance");
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - mean) / sd;
  return out;
}

double kolmogorov_bootstrap_se(std::span<const double> raw, std::size_t resamples,
                               std::uint64_t seed) {
  if (resamples < 2) return 0.0;
  CounterEngine eng(SeedSpec{seed, 0}, Lane::kAux);
  std::vector<double> draw(raw.size());
  double mean = 0.0, m2 = 0.0;
  for (std::size_t b = 0; b < resamples; ++b) {
    for (double& v : draw) {
      auto idx = static_cast<std::size_t>(eng.uniform01() * static_cast<double>(raw.size()));
      v = raw[std::min(idx, raw.size() - 1)];
    }
    double dk = 0.0;
    try {
      dk = ecdf_kolmogorov(standardize_1d(draw));
    } catch (const NumericalError&) {
      dk = 0.5;
    }
    const double delta = dk - mean;
    mean += delta / static_cast<double>(b + 1);
    m2 += delta * (dk - mean);
  }
  return std::sqrt(m2 / static_cast<double>(resamples - 1));
}

double multivariate_rect_kolmogorov(const Eigen::MatrixXd& z, std::size_t grid,
                                    double range) {
  const auto m = static_cast<std::size_t>(z.cols());
  if (m == 0 || m > kMaxRectDim) {
    throw InvalidArgument("multivariate_rect_kolmogorov: dimension must be 1.." +
                          std::to_string(kMaxRectDim) + " (grid is g^m)");
  }
  if (grid == 0 || grid > kMaxRectGrid) {
    throw InvalidArgument("multivariate_rect_kolmogorov: grid must be 1.." +
                          std::to_string(kMaxRectGrid));
  }
  if (z.rows() == 0) throw InvalidArgument("multivariate_rect_kolmogorov: no samples");
  std::vector<double> t(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    t[j] = grid == 1 ? 0.0
                     : -range + 2.0 * range * static_cast<double>(j) /
                                    static_cast<double>(grid - 1);
  }
  // Histogram over cells indexed by the first grid point >= each coordinate.
  const std::size_t side = grid + 1;
  std::size_t cells = 1;
  for (std::size_t c = 0; c < m; ++c) cells *= side;
  std::vector<double> hist(cells, 0.0);
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    std::size_t cell = 0;
    for (std::size_t c = m; c-- > 0;) {
      const double v = z(r, static_cast<Eigen::Index>(c));
      const auto idx =
          static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), v) - t.begin());
      cell = cell * side + idx;
    }
    hist[cell] += 1.0;
  }
  // Inclusive prefix sums along every axis.
  std::size_t stride = 1;
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      if ((cell / stride) % side != 0) hist[cell] += hist[cell - stride];
    }
    stride *= side;
  }
  std::vector<double> phi(grid);
  for (std::size_t j = 0; j < grid; ++j) phi[j] = std_normal_cdf(t[j]);
  const double n = static_cast<double>(z.rows());
  double worst = 0.0;
  std::vector<std::size_t> j(m, 0);
  while (true) {
    std::size_t cell = 0;
    double p = 1.0;
    for (std::size_t c = m; c-- > 0;) {
      cell = cell * side + j[c];
      p *= phi[j[c]];
    }
    worst = std::max(worst, std::abs(hist[cell] / n - p));
    std::size_t c = 0;
    while (c < m && ++j[c] == grid) j[c++] = 0;
    if (c == m) break;
  }
  return worst;
}

double standardized_rect_kolmogorov(const Eigen::MatrixXd& data, std::size_t grid,
                                    double range) {
  const Standardized s = standardize(data, sample_covariance(data));
  if (s.ridge_applied) {
    throw NumericalError(
        "standardized_rect_kolmogorov: covariance is singular (ridge needed); "
        "no Gaussian comparison is reported");
  }
  return multivariate_rect_kolmogorov(s.data, grid, range);
}

}  // namespace kpnn

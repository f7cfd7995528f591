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

#ifndef KPNN_STABILIZATION_HPP_
#define KPNN_STABILIZATION_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kpnn/geometry.hpp"
#include "kpnn/process.hpp"

namespace kpnn {

/// P(Poi(lambda) < k). Summed in log space around the largest term, so it
/// stays accurate when e^{-lambda} underflows.
double poisson_cdf_psi(double lambda, std::size_t k);

/// Region on which the k-PNN score of a configuration point is determined:
/// Rect(x0, x) (times the mark space, left implicit) or nothing.
class StabilizationRegion {
 public:
  static StabilizationRegion empty_region() { return StabilizationRegion(); }
  static StabilizationRegion box(HyperRect r) { return StabilizationRegion(std::move(r)); }

  bool is_empty() const { return empty_; }
  const HyperRect& rect() const { return rect_; }
  bool contains(Coords y) const { return !empty_ && rect_.contains(y); }
  // Set inclusion of regions.
  bool subset_of(const StabilizationRegion& other) const;

 private:
  StabilizationRegion() = default;
  explicit StabilizationRegion(HyperRect r) : empty_(false), rect_(std::move(r)) {}

  bool empty_ = true;
  HyperRect rect_;
};

StabilizationRegion region_of(const PointConfig& config, Coords x0, std::size_t i,
                              std::size_t k);
/// Point-valued variant; throws InvalidArgument if x is not in the config.
StabilizationRegion region_of(const PointConfig& config, Coords x0, Coords x,
                              std::size_t k);

/// Poisson intensity of Rect(x0, x): n times its mass.
double rect_lambda(const DensitySpec& density, double n, Coords x0, Coords x);

/// Probability that y lies in the region of x when x is added to a Poisson
/// sample of intensity n.
double membership_prob(const DensitySpec& density, double n, Coords x0, Coords x,
                       Coords y, std::size_t k);

/// e * sum_{j<k} exp(-lambda / (j + 2)), an upper bound on P(Poi(lambda) < k).
double tail_bound_lambda(double lambda, std::size_t k);
double tail_bound(const DensitySpec& density, double n, Coords x0, Coords x,
                  std::size_t k);

enum class PhiKind {
  kOne,
  kAbsMomentProxy,  // 1 + |x|_2
};

double phi_value(PhiKind phi, Coords x);

enum class IntegrationMethod { kClosedForm, kQuadrature, kMonteCarlo };

struct CValue {
  double value = 0.0;
  double std_error = 0.0;  // nonzero only for Monte Carlo
  IntegrationMethod method = IntegrationMethod::kClosedForm;
};

struct CFunctionOptions {
  double rel_tol = 1e-6;
  std::size_t mc_samples = 200000;
  std::uint64_t mc_seed = 0x5eed;
  bool force_quadrature = false;  // skip the closed form (for cross-checks)
};

/// s * integral over x with y in Rect(x0, x) of
///   exp(-alpha * s * mass(Rect(x, x0))) * phi(x) * g(x) dx.
/// Closed form for the uniform density in one dimension with phi = 1,
/// adaptive quadrature for d <= 2, Monte Carlo with a standard error above.
CValue c_function(const DensitySpec& density, PhiKind phi, double alpha, double s,
                  Coords x0, Coords y, const CFunctionOptions& opts = {});

struct AssumptionReport {
  std::size_t points_checked = 0;
  std::size_t r1_violations = 0;
  std::size_t r3_violations = 0;
  std::size_t r4_violations = 0;
  std::size_t collapsed_regions = 0;  // rect -> empty after adding the probe
  std::vector<std::string> findings;

  bool all_hold() const {
    return r1_violations == 0 && r3_violations == 0 && r4_violations == 0;
  }
};

/// Exhaustive check, over every configuration point, of the region
/// properties of the k-PNN membership score:
///  R1  the score computed on the configuration restricted to the region
///      equals the full score;
///  R3  adding the probe can only shrink the region;
///  R4  a region with nonzero restriction stays nonzero after adding a probe
///      outside it.
AssumptionReport check_assumptions(const PointConfig& config, Coords x0,
                                   std::size_t k, Coords probe);

}  // namespace kpnn

#endif  // KPNN_STABILIZATION_HPP_

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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kpnn/error.hpp"
#include "kpnn/stabilization.hpp"
#include "test_util.hpp"

namespace kpnn {
namespace {

using testing::random_config;
using testing::random_point;

double psi_direct(double lambda, std::size_t k) {
  double term = std::exp(-lambda), sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    sum += term;
    term *= lambda / static_cast<double>(j + 1);
  }
  return sum;
}

TEST(Psi, Examples) {
  EXPECT_EQ(poisson_cdf_psi(0.0, 1), 1.0);
  EXPECT_EQ(poisson_cdf_psi(0.0, 17), 1.0);
  EXPECT_NEAR(poisson_cdf_psi(1.0, 1), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(poisson_cdf_psi(2.0, 3), 5.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(poisson_cdf_psi(1.0, 1), 0.367879, 1e-6);
  EXPECT_NEAR(poisson_cdf_psi(2.0, 3), 0.676676, 1e-6);
}

TEST(Psi, MatchesDirectSum) {
  for (double lambda : {0.01, 0.5, 1.0, 3.7, 10.0, 42.0, 150.0, 400.0, 699.0}) {
    for (std::size_t k : {1u, 2u, 5u, 20u, 100u, 500u, 1000u}) {
      const double direct = psi_direct(lambda, k);
      EXPECT_NEAR(poisson_cdf_psi(lambda, k), direct, 1e-12) << lambda << " " << k;
    }
  }
}

TEST(Psi, MatchesRegularizedGamma) {
  // P(Poi(lambda) < k) = Q(k, lambda).
  for (double lambda : {0.3, 7.0, 90.0, 800.0, 5000.0, 1e5}) {
    for (std::size_t k : {1u, 3u, 50u, 900u, 5100u}) {
      const double ref = boost::math::gamma_q(static_cast<double>(k), lambda);
      const double got = poisson_cdf_psi(lambda, k);
      if (ref > 1e-290) {
        EXPECT_NEAR(got / ref, 1.0, 1e-10) << lambda << " " << k;
      } else {
        EXPECT_LT(got, 1e-280);
      }
    }
  }
}

TEST(Psi, Monotone) {
  for (std::size_t k = 1; k <= 30; ++k) {
    double prev = 1.0;
    for (double lambda = 0.0; lambda <= 60.0; lambda += 0.25) {
      const double v = poisson_cdf_psi(lambda, k);
      EXPECT_LE(v, prev + 1e-15);
      EXPECT_GE(poisson_cdf_psi(lambda, k + 1), v - 1e-15);
      prev = v;
    }
  }
}

TEST(Psi, RejectsBadArguments) {
  EXPECT_THROW(poisson_cdf_psi(-1.0, 1), InvalidArgument);
  EXPECT_THROW(poisson_cdf_psi(1.0, 0), InvalidArgument);
}

TEST(RegionOf, SinglePointHasBoxRegion) {
  const PointConfig c = PointConfig::from_points(2, {Point{0.7, 0.2}});
  const StabilizationRegion r = region_of(c, Point{0.5, 0.5}, Point{0.7, 0.2}, 1);
  ASSERT_FALSE(r.is_empty());
  EXPECT_EQ(r.rect().lo, (Point{0.5, 0.2}));
  EXPECT_EQ(r.rect().hi, (Point{0.7, 0.5}));
}

TEST(RegionOf, PackedBoxIsEmpty) {
  const PointConfig c = PointConfig::from_points(
      2, {Point{0.9, 0.9}, Point{0.6, 0.6}, Point{0.7, 0.8}, Point{0.8, 0.65}});
  EXPECT_TRUE(region_of(c, Point{0.5, 0.5}, 0, 3).is_empty());
  EXPECT_FALSE(region_of(c, Point{0.5, 0.5}, 0, 4).is_empty());
}

TEST(RegionOf, AbsentPointThrows) {
  const PointConfig c = PointConfig::from_points(1, {Point{0.1}});
  EXPECT_THROW(region_of(c, Point{0.0}, Point{0.2}, 1), InvalidArgument);
}

TEST(RegionOf, NonemptyIffKpnn) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const PointConfig c = random_config(rng, 30, d, trial % 2 ? 3 : 0);
    const Point x0 = random_point(rng, d);
    const std::size_t k = 1 + trial % 4;
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_EQ(!region_of(c, x0, i, k).is_empty(), is_kpnn(c, x0, i, k));
    }
  }
}

TEST(MembershipProb, Examples) {
  const DensitySpec u = DensitySpec::unit_cube(2);
  EXPECT_EQ(membership_prob(u, 100, Point{0, 0}, Point{0.1, 0.1}, Point{0.2, 0.05}, 1), 0.0);
  EXPECT_NEAR(membership_prob(u, 100, Point{0, 0}, Point{0.1, 0.1}, Point{0.05, 0.05}, 1),
              std::exp(-1.0), 1e-14);
}

TEST(TailBound, Examples) {
  EXPECT_NEAR(tail_bound_lambda(3.0, 1), std::exp(1.0) * std::exp(-1.5), 1e-15);
  EXPECT_NEAR(tail_bound_lambda(0.0, 7), std::exp(1.0) * 7.0, 1e-13);
  const DensitySpec u = DensitySpec::unit_cube(2);
  EXPECT_NEAR(tail_bound(u, 100, Point{0, 0}, Point{0.1, 0.1}, 1), std::exp(0.5), 1e-14);
}

TEST(TailBound, DominatesPsiOnGrid) {
  std::size_t violations = 0;
  for (std::size_t k = 1; k <= 50; ++k) {
    for (int i = 0; i <= 500; ++i) {
      const double lambda = 0.1 * i;
      if (tail_bound_lambda(lambda, k) < poisson_cdf_psi(lambda, k)) ++violations;
    }
  }
  EXPECT_EQ(violations, 0u);
}

TEST(CFunction, UniformClosedFormExample) {
  const DensitySpec u = DensitySpec::unit_cube(1);
  for (double s : {0.5, 3.0, 40.0}) {
    for (double y : {0.0, 0.1, 0.5, 0.99}) {
      const CValue c = c_function(u, PhiKind::kOne, 1.0, s, Point{0.0}, Point{y});
      EXPECT_EQ(c.method, IntegrationMethod::kClosedForm);
      EXPECT_NEAR(c.value, std::exp(-s * y) - std::exp(-s), 1e-14);
    }
  }
}

TEST(CFunction, ClosedFormAgreesWithQuadrature) {
  const DensitySpec g = DensitySpec::uniform_box({-1.0}, {3.0});
  CFunctionOptions quad;
  quad.force_quadrature = true;
  for (double x0 : {-1.0, 0.3, 3.0}) {
    for (double y : {-0.8, 0.3, 0.9, 2.5}) {
      const CValue a = c_function(g, PhiKind::kOne, 0.7, 5.0, Point{x0}, Point{y});
      const CValue b = c_function(g, PhiKind::kOne, 0.7, 5.0, Point{x0}, Point{y}, quad);
      EXPECT_EQ(b.method, IntegrationMethod::kQuadrature);
      EXPECT_NEAR(a.value, b.value, 1e-6 * std::max(1.0, std::abs(a.value)));
    }
  }
}

TEST(CFunction, ScalingIdentity) {
  const std::vector<DensitySpec> densities = {
      DensitySpec::unit_cube(1),
      DensitySpec::unit_cube(2),
      DensitySpec::truncated_gaussian({0.4, 0.5}, {0.3, 0.2}, {0, 0}, {1, 1}),
      DensitySpec::product_beta(2.0, 3.0, {0}, {1}),
      DensitySpec::unit_cube(3),
  };
  for (const DensitySpec& g : densities) {
    const std::size_t d = g.dim();
    const Point x0(std::vector<double>(d, 0.3));
    const Point y(std::vector<double>(d, 0.45));
    CFunctionOptions opts;
    opts.mc_samples = 20000;
    for (PhiKind phi : {PhiKind::kOne, PhiKind::kAbsMomentProxy}) {
      for (double alpha : {0.5, 2.0, 7.0}) {
        const double s = 12.0;
        const double lhs = c_function(g, phi, alpha, s, x0, y, opts).value;
        const double rhs = c_function(g, phi, 1.0, alpha * s, x0, y, opts).value / alpha;
        EXPECT_NEAR(lhs, rhs, 1e-8 * std::abs(rhs)) << g.name();
      }
    }
  }
}

TEST(CFunction, ZeroOutsideEveryRect) {
  const DensitySpec u = DensitySpec::unit_cube(2);
  EXPECT_EQ(c_function(u, PhiKind::kOne, 1.0, 3.0, Point{0.5, 0.5}, Point{1.5, 0.7}).value, 0.0);
  EXPECT_EQ(c_function(DensitySpec::unit_cube(1), PhiKind::kOne, 1.0, 3.0, Point{0.0}, Point{-0.5}).value, 0.0);
}

TEST(CFunction, MonteCarloInThreeDimensions) {
  // For y = x0 = 0 on the unit cube the integral reduces to
  //   s * int_0^1 exp(-s u) (log u)^2 / 2 du
  // because the product of three uniforms has density (log u)^2 / 2.
  // With u = exp(-v) the integrand is smooth on [0, inf).
  const double s = 4.0;
  auto f = [&](double v) { return std::exp(-s * std::exp(-v) - v) * v * v / 2.0; };
  const double exact = s * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                               f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
  CFunctionOptions opts;
  opts.mc_samples = 200000;
  const CValue c = c_function(DensitySpec::unit_cube(3), PhiKind::kOne, 1.0, s,
                              Point{0, 0, 0}, Point{0, 0, 0}, opts);
  EXPECT_EQ(c.method, IntegrationMethod::kMonteCarlo);
  EXPECT_GT(c.std_error, 0.0);
  EXPECT_NEAR(c.value, exact, 4.0 * c.std_error);
}

TEST(CFunction, TwoDimensionalUniformAgainstInnerClosedForm) {
  // x0 = 0, y = (1/2, 1/2): the integral over x2 in [1/2, 1] of
  // exp(-s x1 x2) is elementary, leaving a smooth integral over x1.
  const double s = 9.0;
  auto f = [&](double x1) {
    return (std::exp(-0.5 * s * x1) - std::exp(-s * x1)) / (s * x1);
  };
  const double exact =
      s * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.5, 1.0, 15, 1e-13);
  const CValue c =
      c_function(DensitySpec::unit_cube(2), PhiKind::kOne, 1.0, s, Point{0, 0}, Point{0.5, 0.5});
  EXPECT_EQ(c.method, IntegrationMethod::kQuadrature);
  EXPECT_NEAR(c.value, exact, 1e-6 * exact);
}

TEST(CheckAssumptions, ProbeOutsideLeavesRegionsAlone) {
  std::mt19937_64 rng(3);
  const PointConfig c = random_config(rng, 40, 2);
  const AssumptionReport rep = check_assumptions(c, Point{0.5, 0.5}, 2, Point{5.0, 5.0});
  EXPECT_TRUE(rep.all_hold());
  EXPECT_EQ(rep.collapsed_regions, 0u);
  EXPECT_EQ(rep.points_checked, 40u);
}

TEST(CheckAssumptions, ProbeInsideCollapsesRegion) {
  const PointConfig c = PointConfig::from_points(2, {Point{0.9, 0.9}});
  const AssumptionReport rep = check_assumptions(c, Point{0.5, 0.5}, 1, Point{0.7, 0.7});
  EXPECT_TRUE(rep.all_hold());
  EXPECT_EQ(rep.collapsed_regions, 1u);
}

TEST(CheckAssumptions, RandomInstancesHold) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const int grid = trial % 4 == 0 ? 3 : 0;
    const PointConfig c = random_config(rng, 1 + rng() % 60, d, grid);
    const AssumptionReport rep = check_assumptions(c, random_point(rng, d, grid),
                                                   1 + trial % 5, random_point(rng, d, grid));
    EXPECT_TRUE(rep.all_hold()) << (rep.findings.empty() ? "" : rep.findings.front());
  }
}

}  // namespace
}  // namespace kpnn

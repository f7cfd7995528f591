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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kpnn/checks.hpp"
#include "kpnn/distances.hpp"
#include "kpnn/error.hpp"
#include "kpnn/replication.hpp"
#include "kpnn/stabilization.hpp"

namespace kpnn {
namespace {

double kolmogorov_reference(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (double t : x) {
    std::size_t le = 0, lt = 0;
    for (double v : x) {
      le += v <= t;
      lt += v < t;
    }
    const double f = std_normal_cdf(t);
    d = std::max({d, std::abs(le / n - f), std::abs(lt / n - f)});
  }
  return d;
}

TEST(Kolmogorov, MatchesQuadraticReference) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int set = 0; set < 200; ++set) {
    std::vector<double> x(100 + set);
    for (double& v : x) v = set % 3 == 0 ? std::round(z(rng) * 4) / 4 : 0.8 * z(rng) + 0.1;
    EXPECT_NEAR(ecdf_kolmogorov(x), kolmogorov_reference(x), 1e-12);
  }
}

TEST(Kolmogorov, DegenerateAndPerfectSamples) {
  EXPECT_NEAR(ecdf_kolmogorov(std::vector<double>(200, 0.0)), 0.5, 1e-15);
  // Midpoint quantiles sit exactly 1/(2N) from the normal CDF.
  const std::size_t n = 400;
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lo = -10, hi = 10;
    const double p = (i + 0.5) / n;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (std_normal_cdf(mid) < p ? lo : hi) = mid;
    }
    q[i] = 0.5 * (lo + hi);
  }
  EXPECT_NEAR(ecdf_kolmogorov(q), 0.5 / n, 1e-12);
  EXPECT_THROW(ecdf_kolmogorov(std::vector<double>(50, 0.0)), InvalidArgument);
}

TEST(Kolmogorov, WithinDkwBandForNormalSamples) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 1.0);
  int outside = 0;
  for (int set = 0; set < 50; ++set) {
    std::vector<double> x(2000);
    for (double& v : x) v = z(rng);
    // P(d > eps) <= 2 exp(-2 N eps^2) = 0.001
    if (ecdf_kolmogorov(x) > std::sqrt(std::log(2.0 / 0.001) / (2.0 * 2000))) ++outside;
  }
  EXPECT_LE(outside, 1);
}

TEST(Kolmogorov, BootstrapSeIsDeterministicAndSmall) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z(3.0, 2.0);
  std::vector<double> x(1000);
  for (double& v : x) v = z(rng);
  const double a = kolmogorov_bootstrap_se(x, 200, 9);
  EXPECT_EQ(a, kolmogorov_bootstrap_se(x, 200, 9));
  EXPECT_GT(a, 0.002);
  EXPECT_LT(a, 0.02);
}

TEST(Standardize, OneDimension) {
  Eigen::MatrixXd data(4, 1);
  data << 1, 3, 5, 7;
  const Standardized s = standardize(data, sample_covariance(data));
  EXPECT_FALSE(s.ridge_applied);
  EXPECT_NEAR(s.data(0, 0), -3.0 / std::sqrt(20.0 / 3.0), 1e-12);
  EXPECT_NEAR(s.data.col(0).sum(), 0.0, 1e-12);
}

TEST(Standardize, WhitenedCovarianceIsIdentity) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 1.0);
  const int reps = 5000;
  Eigen::MatrixXd data(reps, 3);
  for (int r = 0; r < reps; ++r) {
    const double a = z(rng), b = z(rng), c = z(rng);
    data.row(r) << 2 * a + 1, a + 0.5 * b, -a + b + 3 * c;
  }
  const Standardized s = standardize(data, sample_covariance(data));
  const Eigen::MatrixXd cov = sample_covariance(s.data);
  EXPECT_LT((cov - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 5.0 / std::sqrt(reps));
}

TEST(Standardize, RidgeAndRefusal) {
  Eigen::MatrixXd data(300, 2);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int r = 0; r < 300; ++r) {
    const double a = z(rng);
    data.row(r) << a, 2 * a;
  }
  const Standardized s = standardize(data, sample_covariance(data));
  EXPECT_TRUE(s.ridge_applied);
  EXPECT_THROW(standardized_rect_kolmogorov(data, 21), NumericalError);
  EXPECT_THROW(standardize(data, Eigen::MatrixXd::Zero(2, 2)), NumericalError);
}

TEST(RectKolmogorov, IndependentNormalsAreClose) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd data(10000, 2);
  for (int r = 0; r < data.rows(); ++r) data.row(r) << z(rng), 0.5 * z(rng) + 2.0;
  EXPECT_LT(standardized_rect_kolmogorov(data, 41), 0.03);
  Eigen::MatrixXd skew = data.array().exp();
  EXPECT_GT(standardized_rect_kolmogorov(skew, 41), 0.05);
  EXPECT_THROW(multivariate_rect_kolmogorov(data, 42), InvalidArgument);
}

TEST(LMoments, KnownSample) {
  std::vector<std::size_t> L(40);
  for (std::size_t i = 0; i < L.size(); ++i) L[i] = i % 2 ? 2 : 4;
  const LMoments m = estimate_L_moments(L, 100.0, 1, 2);
  EXPECT_DOUBLE_EQ(m.mean, 3.0);
  EXPECT_NEAR(m.variance, 40.0 / 39.0, 1e-12);
  EXPECT_NEAR(m.ratio, 3.0 / std::log(100.0), 1e-12);
  EXPECT_NEAR(m.recip_mean, 0.375, 1e-15);
  EXPECT_NEAR(m.recip_product, 1.125, 1e-12);
  EXPECT_THROW(estimate_L_moments(std::span(L).first(29), 100.0, 1, 2), InvalidArgument);
}

ReplicationPlan small_plan(std::size_t d) {
  ReplicationPlan plan;
  plan.model.density = DensitySpec::unit_cube(d);
  plan.model.regression = RegressionSpec::smooth_sine(1.0, 2.0, 0.5);
  plan.intensities = {500.0};
  plan.ks = {1, 3};
  plan.x0s = {Point(std::vector<double>(d, 0.5)), Point(std::vector<double>(d, 0.2))};
  plan.reps = 60;
  plan.seed = 77;
  return plan;
}

TEST(Replication, OneDimensionalVotingSetIsBounded) {
  const ReplicationPlan plan = small_plan(1);
  for (const RawMatrix& raw : run_replications_all_k(plan, 0, 2)) {
    for (std::size_t v : raw.L) EXPECT_LE(v, 2 * raw.k);
  }
}

TEST(Replication, ReciprocalProductWithinJensenRange) {
  ReplicationPlan plan = small_plan(2);
  plan.positions_only = true;
  plan.reps = 200;
  const RawMatrix raw = run_replications(plan, 0, 3, 2);
  const auto L = raw.L_column(0);
  const LMoments m = estimate_L_moments(L, 500.0, 3, 2);
  EXPECT_GE(m.recip_product, 1.0);
  EXPECT_LE(m.recip_product, 3.0);
}

TEST(Replication, WorkerCountDoesNotChangeResults) {
  const ReplicationPlan plan = small_plan(2);
  const auto a = run_replications_all_k(plan, 0, 1);
  for (std::size_t w : {2u, 3u, 8u}) {
    const auto b = run_replications_all_k(plan, 0, w);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].predictions, b[i].predictions);
      EXPECT_EQ(a[i].L, b[i].L);
    }
  }
}

TEST(Replication, RowMatchesStandaloneComputation) {
  const ReplicationPlan plan = small_plan(2);
  const RawMatrix raw = run_replications(plan, 0, 3, 2);
  for (std::size_t r : {0u, 17u, 59u}) {
    const MarkedSample s = sample_marked(500.0, plan.model, plan.sample_seed(0, r));
    const auto preds = predict_multi(s, plan.x0s, 3, plan.scheme);
    for (std::size_t j = 0; j < plan.x0s.size(); ++j) {
      EXPECT_EQ(raw.prediction(r, j), preds[j].value);
      EXPECT_EQ(raw.voters(r, j), preds[j].L());
    }
  }
}

TEST(Replication, ExceptionsPropagate) {
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw NumericalError("boom");
               }),
               NumericalError);
}

TEST(Checks, OrdinaryLeastSquares) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {3, 5, 7, 9, 11};
  const LinearFit f = ols_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-12);
  EXPECT_THROW(ols_fit(std::vector<double>{1, 1}, std::vector<double>{0, 1}), InvalidArgument);
}

TEST(Checks, BiasOfConstantPredictions) {
  const BiasEstimate b = estimate_bias(std::vector<double>(10, 1.25), 1.0);
  EXPECT_DOUBLE_EQ(b.bias, 0.25);
  EXPECT_DOUBLE_EQ(b.signed_bias, 0.25);
  EXPECT_EQ(b.se, 0.0);
}

TEST(Checks, VarianceFloorWithoutNoise) {
  const std::vector<double> p = {1, 1, 1, 1};
  const std::vector<std::size_t> L = {2, 3, 4, 5};
  const VarianceFloor v = variance_floor_check(p, 0.0, L);
  EXPECT_EQ(v.floor, 0.0);
  EXPECT_TRUE(v.pass);
  const VarianceFloor w = variance_floor_check(p, 1.0, L);
  EXPECT_NEAR(w.floor, 1.0 / 3.5, 1e-15);
  EXPECT_FALSE(w.pass);
}

TEST(Checks, ConcentrationSkipsSmallK) {
  const std::vector<std::size_t> L(50, 10);
  EXPECT_TRUE(concentration_check(L, 4).skipped);
  EXPECT_FALSE(concentration_check(L, 11).skipped);
  EXPECT_EQ(concentration_check(L, 11).fraction, 0.0);
  EXPECT_TRUE(concentration_check(std::vector<std::size_t>(50, 1), 12).skipped);
}

double lower_bound_exact(double n, std::size_t k, double alpha = 1.0) {
  // Uniform on the unit square with t = 1: the volume of a box with a
  // corner at the origin has density -log u. Substituting u = exp(-v):
  auto f = [&](double v) { return v * std::exp(-2.0 * v) * std::pow(poisson_cdf_psi(n * std::exp(-v), k), alpha); };
  return n * n *
         boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
             f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-10);
}

TEST(LowerBound, AgreesWithOneDimensionalReduction) {
  LowerBoundOptions opts;
  opts.outer_samples = 20000;
  for (std::size_t k : {4u, 16u}) {
    for (double alpha : {1.0, 3.0}) {
      double se = 0.0;
      const double est = lower_bound_integral(1e3, k, 1.0, alpha, opts, &se);
      EXPECT_NEAR(est, lower_bound_exact(1e3, k, alpha), 4.0 * se + 1e-3 * est) << k;
    }
  }
}

TEST(LowerBound, MonotoneInKAndAlpha) {
  const std::vector<std::size_t> ks = {2, 4, 8, 16};
  LowerBoundOptions opts;
  opts.outer_samples = 4000;
  const LowerBoundFit fit = lower_bound_exponent_fit(1e3, ks, 1.0, 1.0, opts);
  for (std::size_t i = 1; i < ks.size(); ++i) EXPECT_GT(fit.estimates[i], fit.estimates[i - 1]);
  EXPECT_GT(fit.exponent, 1.0);
  EXPECT_LT(fit.exponent, 2.5);
  double prev = fit.estimates[1];
  for (double alpha : {2.0, 8.0, 200.0}) {
    const double v = lower_bound_integral(1e3, 4, 1.0, alpha, opts);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_THROW(lower_bound_integral(10.0, 21, 1.0, 1.0, opts), InvalidArgument);
}

}  // namespace
}  // namespace kpnn

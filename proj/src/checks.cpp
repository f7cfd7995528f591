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

#include "kpnn/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kpnn/error.hpp"
#include "kpnn/rng.hpp"
#include "kpnn/stabilization.hpp"

namespace kpnn {
namespace {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased
};

template <typename T>
MeanVar mean_var(std::span<const T> v) {
  MeanVar out;
  double m2 = 0.0;
  std::size_t i = 0;
  for (const T& raw : v) {
    const double x = static_cast<double>(raw);
    ++i;
    const double delta = x - out.mean;
    out.mean += delta / static_cast<double>(i);
    m2 += delta * (x - out.mean);
  }
  out.var = i > 1 ? m2 / static_cast<double>(i - 1) : 0.0;
  return out;
}

double quantile_sorted(const std::vector<double>& s, double p) {
  const double h = (static_cast<double>(s.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

LMoments estimate_L_moments(std::span<const std::size_t> L, double n, std::size_t k,
                            std::size_t d) {
  if (L.size() < 30) throw InvalidArgument("estimate_L_moments: needs at least 30 replications");
  if (k == 0 || d == 0 || !(n > 1.0)) {
    throw InvalidArgument("estimate_L_moments: need k, d >= 1 and n > 1");
  }
  LMoments out;
  const MeanVar mv = mean_var(L);
  out.mean = mv.mean;
  out.variance = mv.var;
  out.se = std::sqrt(mv.var / static_cast<double>(L.size()));
  out.ratio = mv.mean / (static_cast<double>(k) *
                         std::pow(std::log(n), static_cast<double>(d) - 1.0));
  std::vector<double> recip;
  recip.reserve(L.size());
  for (std::size_t v : L) {
    if (v > 0) recip.push_back(1.0 / static_cast<double>(v));
  }
  if (!recip.empty()) {
    const MeanVar rv = mean_var(std::span<const double>(recip));
    out.recip_mean = rv.mean;
    out.recip_se = std::sqrt(rv.var / static_cast<double>(recip.size()));
    out.recip_product = rv.mean * mv.mean;
  }
  std::vector<double> sorted(L.begin(), L.end());
  std::sort(sorted.begin(), sorted.end());
  for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) out.quantiles.push_back(quantile_sorted(sorted, p));
  return out;
}

LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("ols_fit: need at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("ols_fit: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      rss += e * e;
    }
    fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

BiasEstimate estimate_bias(std::span<const double> predictions, double r0_at_x0) {
  if (predictions.size() < 2) throw InvalidArgument("estimate_bias: need two predictions");
  const MeanVar mv = mean_var(predictions);
  BiasEstimate out;
  out.signed_bias = mv.mean - r0_at_x0;
  out.bias = std::abs(out.signed_bias);
  out.se = std::sqrt(mv.var / static_cast<double>(predictions.size()));
  return out;
}

VarianceFloor variance_floor_check(std::span<const double> predictions,
                                   double min_noise_variance,
                                   std::span<const std::size_t> L) {
  if (predictions.size() < 2 || L.empty()) {
    throw InvalidArgument("variance_floor_check: need predictions and voting-set sizes");
  }
  VarianceFloor out;
  const MeanVar mv = mean_var(predictions);
  out.variance = mv.var;
  double m4 = 0.0;
  for (double p : predictions) m4 += std::pow(p - mv.mean, 4);
  m4 /= static_cast<double>(predictions.size());
  out.variance_se = std::sqrt(std::max(m4 - mv.var * mv.var, 0.0) /
                              static_cast<double>(predictions.size()));
  out.mean_L = mean_var(L).mean;
  out.floor = out.mean_L > 0.0 ? min_noise_variance / out.mean_L : 0.0;
  out.pass = out.variance >= 0.9 * out.floor;
  return out;
}

Concentration concentration_check(std::span<const std::size_t> L, std::size_t k) {
  Concentration out;
  if (L.empty()) throw InvalidArgument("concentration_check: no samples");
  out.mean_L = mean_var(L).mean;
  if (k < 11) {
    out.skipped = true;
    out.notice = "k < 11: outside the regime of the uniform-weight concentration bound";
    return out;
  }
  if (out.mean_L < 2.0) {
    out.skipped = true;
    out.notice = "E[L] < 2: the half-mean threshold is vacuous";
    return out;
  }
  std::size_t below = 0;
  for (std::size_t v : L) {
    if (static_cast<double>(v) <= out.mean_L / 2.0) ++below;
  }
  const double n = static_cast<double>(L.size());
  out.fraction = static_cast<double>(below) / n;
  out.se = std::sqrt(out.fraction * (1.0 - out.fraction) / n);
  return out;
}

double lower_bound_integral(double n, std::size_t k, double t, double alpha,
                            const LowerBoundOptions& opts, double* std_error) {
  if (!(n > 0.0) || !(t > 0.0) || !(alpha > 0.0) || k == 0) {
    throw InvalidArgument("lower_bound_integral: n, t, alpha, k must be positive");
  }
  if (static_cast<double>(k) > 2.0 * n) {
    throw InvalidArgument("lower_bound_integral: requires k <= 2n");
  }
  if (opts.dim == 0 || opts.outer_samples < 2 || opts.inner_samples == 0) {
    throw InvalidArgument("lower_bound_integral: bad sampling options");
  }
  const std::size_t d = opts.dim;
  // Outer coordinates are log-uniform on [e^-span, 1]; the neglected corner
  // is below e^-12 relative to the integral.
  const double span = std::log(std::max(n, 2.0)) +
                      t * std::log(std::max(std::log(std::max(n, 2.0)), 1.0)) + 12.0;
  CounterEngine eng(SeedSpec{opts.seed, 0}, Lane::kAux);
  std::vector<double> y(d);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t o = 0; o < opts.outer_samples; ++o) {
    double wy = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      y[i] = std::exp(-span * eng.uniform01());
      wy *= span * y[i];
    }
    double inner = 0.0;
    for (std::size_t s = 0; s < opts.inner_samples; ++s) {
      double vol = 1.0, wx = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double ly = std::log(y[i]);
        const double xi = std::exp(ly * eng.uniform01());
        vol *= xi;
        wx *= -ly * xi;
      }
      inner += std::pow(poisson_cdf_psi(n * vol, k), alpha) * wx;
    }
    inner /= static_cast<double>(opts.inner_samples);
    const double v = wy * std::pow(n * inner, t);
    const double delta = v - mean;
    mean += delta / static_cast<double>(o + 1);
    m2 += delta * (v - mean);
  }
  const double outer = static_cast<double>(opts.outer_samples);
  if (std_error) *std_error = n * std::sqrt(m2 / (outer - 1.0) / outer);
  return n * mean;
}

LowerBoundFit lower_bound_exponent_fit(double n, std::span<const std::size_t> ks,
                                       double t, double alpha,
                                       const LowerBoundOptions& opts) {
  if (ks.size() < 2) throw InvalidArgument("lower_bound_exponent_fit: need two k values");
  LowerBoundFit fit;
  std::vector<double> lx, ly;
  for (std::size_t k : ks) {
    double se = 0.0;
    const double v = lower_bound_integral(n, k, t, alpha, opts, &se);
    fit.estimates.push_back(v);
    fit.std_errors.push_back(se);
    if (!(v > 0.0)) throw NumericalError("lower_bound_exponent_fit: nonpositive estimate");
    lx.push_back(std::log(static_cast<double>(k)));
    ly.push_back(std::log(v));
  }
  fit.exponent = ols_fit(lx, ly).slope;
  return fit;
}

}  // namespace kpnn

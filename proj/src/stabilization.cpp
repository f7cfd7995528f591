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

#include "kpnn/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kpnn/error.hpp"

namespace kpnn {
namespace {

void require_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidArgument(std::string(what) + ": dimension mismatch");
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Mass of Rect(x0, x) from the marginal CDFs; avoids building a HyperRect.
double box_mass(const DensitySpec& density, Coords x0, Coords x) {
  double m = 1.0;
  for (std::size_t i = 0; i < x.size() && m > 0.0; ++i) {
    const double a = density.marginal_cdf(i, std::min(x0[i], x[i]));
    const double b = density.marginal_cdf(i, std::max(x0[i], x[i]));
    m *= std::max(b - a, 0.0);
  }
  return m;
}

struct Interval {
  double lo;
  double hi;
};

// Coordinate ranges of x (within the support) for which y lies in Rect(x0, x).
std::vector<std::vector<Interval>> c_domain(const DensitySpec& density, Coords x0,
                                            Coords y) {
  const std::size_t d = density.dim();
  std::vector<std::vector<Interval>> dom(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double a = density.lo[i], b = density.hi[i];
    auto push = [&](double lo, double hi) {
      lo = std::max(lo, a);
      hi = std::min(hi, b);
      if (lo < hi) dom[i].push_back({lo, hi});
    };
    if (y[i] > x0[i]) {
      push(y[i], b);
    } else if (y[i] < x0[i]) {
      push(a, y[i]);
    } else {
      push(a, x0[i]);
      push(x0[i], b);
    }
  }
  return dom;
}

}  // namespace

double poisson_cdf_psi(double lambda, std::size_t k) {
  if (!(lambda >= 0.0)) throw InvalidArgument("psi: lambda must be nonnegative");
  if (k == 0) throw InvalidArgument("psi: k must be positive");
  if (lambda == 0.0) return 1.0;
  if (std::isinf(lambda)) return 0.0;
  const std::size_t last = k - 1;
  const double mode = std::floor(lambda);
  const std::size_t anchor =
      mode >= static_cast<double>(last) ? last : static_cast<std::size_t>(mode);
  const double log_anchor = -lambda + static_cast<double>(anchor) * std::log(lambda) -
                            std::lgamma(static_cast<double>(anchor) + 1.0);
  // Terms relative to the anchor term decrease monotonically on both sides.
  CompensatedSum sum;
  sum.add(1.0);
  constexpr double kCut = 1e-20;
  double t = 1.0;
  for (std::size_t j = anchor; j < last; ++j) {
    t *= lambda / static_cast<double>(j + 1);
    sum.add(t);
    if (t < kCut) break;
  }
  t = 1.0;
  for (std::size_t j = anchor; j > 0; --j) {
    t *= static_cast<double>(j) / lambda;
    sum.add(t);
    if (t < kCut) break;
  }
  const double log_psi = log_anchor + std::log(sum.value());
  return std::clamp(std::exp(log_psi), 0.0, 1.0);
}

bool StabilizationRegion::subset_of(const StabilizationRegion& other) const {
  if (empty_) return true;
  if (other.empty_) return false;
  for (std::size_t i = 0; i < rect_.dim(); ++i) {
    if (rect_.lo[i] < other.rect_.lo[i] || rect_.hi[i] > other.rect_.hi[i]) return false;
  }
  return true;
}

StabilizationRegion region_of(const PointConfig& config, Coords x0, std::size_t i,
                              std::size_t k) {
  require_dim(config.dim(), x0.size(), "region_of");
  if (k == 0) throw InvalidArgument("region_of: k must be positive");
  if (i >= config.size()) throw InvalidArgument("region_of: point is not in the configuration");
  if (count_in_rect_of(config, x0, i) < k) {
    return StabilizationRegion::box(rect_between(x0, config[i]));
  }
  return StabilizationRegion::empty_region();
}

StabilizationRegion region_of(const PointConfig& config, Coords x0, Coords x,
                              std::size_t k) {
  require_dim(config.dim(), x.size(), "region_of");
  for (std::size_t j = 0; j < config.size(); ++j) {
    const Coords p = config[j];
    if (std::equal(p.begin(), p.end(), x.begin(), x.end())) {
      return region_of(config, x0, j, k);
    }
  }
  throw InvalidArgument("region_of: point is not in the configuration");
}

double rect_lambda(const DensitySpec& density, double n, Coords x0, Coords x) {
  require_dim(density.dim(), x0.size(), "rect_lambda");
  require_dim(density.dim(), x.size(), "rect_lambda");
  return n * rect_mass(density, rect_between(x0, x));
}

double membership_prob(const DensitySpec& density, double n, Coords x0, Coords x,
                       Coords y, std::size_t k) {
  require_dim(density.dim(), y.size(), "membership_prob");
  const double lambda = rect_lambda(density, n, x0, x);
  if (!in_rect_between(x0, x, y)) return 0.0;
  return poisson_cdf_psi(lambda, k);
}

double tail_bound_lambda(double lambda, std::size_t k) {
  if (!(lambda >= 0.0)) throw InvalidArgument("tail_bound: lambda must be nonnegative");
  if (k == 0) throw InvalidArgument("tail_bound: k must be positive");
  CompensatedSum sum;
  for (std::size_t j = 0; j < k; ++j) {
    sum.add(std::exp(-lambda / static_cast<double>(j + 2)));
  }
  return std::exp(1.0) * sum.value();
}

double tail_bound(const DensitySpec& density, double n, Coords x0, Coords x,
                  std::size_t k) {
  return tail_bound_lambda(rect_lambda(density, n, x0, x), k);
}

double phi_value(PhiKind phi, Coords x) {
  if (phi == PhiKind::kOne) return 1.0;
  double ss = 0.0;
  for (double c : x) ss += c * c;
  return 1.0 + std::sqrt(ss);
}

CValue c_function(const DensitySpec& density, PhiKind phi, double alpha, double s,
                  Coords x0, Coords y, const CFunctionOptions& opts) {
  density.validate();
  require_dim(density.dim(), x0.size(), "c_function");
  require_dim(density.dim(), y.size(), "c_function");
  if (!(alpha > 0.0) || !(s > 0.0)) {
    throw InvalidArgument("c_function: alpha and s must be positive");
  }
  const std::size_t d = density.dim();
  const double rate = alpha * s;

  // Uniform density on an interval containing x0, phi = 1.
  if (!opts.force_quadrature && d == 1 && phi == PhiKind::kOne &&
      density.kind == DensityKind::kUniformBox && x0[0] >= density.lo[0] &&
      x0[0] <= density.hi[0]) {
    const double a = density.lo[0], b = density.hi[0], w = b - a;
    const double up = std::exp(-rate * (b - x0[0]) / w);
    const double down = std::exp(-rate * (x0[0] - a) / w);
    CValue out;
    if (y[0] > x0[0]) {
      out.value = y[0] <= b ? (std::exp(-rate * (y[0] - x0[0]) / w) - up) / alpha : 0.0;
    } else if (y[0] < x0[0]) {
      out.value = y[0] >= a ? (std::exp(-rate * (x0[0] - y[0]) / w) - down) / alpha : 0.0;
    } else {
      out.value = ((1.0 - up) + (1.0 - down)) / alpha;
    }
    return out;
  }

  const auto domain = c_domain(density, x0, y);
  for (const auto& axis : domain) {
    if (axis.empty()) return CValue{0.0, 0.0, d <= 2 ? IntegrationMethod::kQuadrature
                                                     : IntegrationMethod::kMonteCarlo};
  }
  std::vector<double> x(d);
  auto integrand = [&]() {
    const double g = density.pdf(x);
    if (g == 0.0) return 0.0;
    return s * std::exp(-rate * box_mass(density, x0, x)) * phi_value(phi, x) * g;
  };

  if (d <= 2) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err_total = 0.0;
    std::function<double(std::size_t)> nest = [&](std::size_t axis) -> double {
      double acc = 0.0;
      for (const Interval& iv : domain[axis]) {
        auto f = [&](double t) {
          x[axis] = t;
          return axis + 1 == d ? integrand() : nest(axis + 1);
        };
        double err = 0.0;
        acc += Rule::integrate(f, iv.lo, iv.hi, 20, opts.rel_tol * 1e-3, &err);
        if (axis == 0) err_total += err;
      }
      return acc;
    };
    const double value = nest(0);
    if (!(err_total <= opts.rel_tol * std::abs(value)) && err_total > 1e-300) {
      std::ostringstream os;
      os << "c_function: quadrature error estimate " << err_total
         << " exceeds relative tolerance at value " << value;
      throw NumericalError(os.str());
    }
    return CValue{value, 0.0, IntegrationMethod::kQuadrature};
  }

  // d >= 3: uniform sampling over the product of domain intervals.
  std::vector<double> total_len(d, 0.0);
  double volume = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (const Interval& iv : domain[i]) total_len[i] += iv.hi - iv.lo;
    volume *= total_len[i];
  }
  CounterEngine eng(SeedSpec{opts.mc_seed, 0}, Lane::kAux);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < opts.mc_samples; ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      double u = eng.uniform01() * total_len[i];
      for (const Interval& iv : domain[i]) {
        const double len = iv.hi - iv.lo;
        if (u <= len) {
          x[i] = iv.lo + u;
          break;
        }
        u -= len;
      }
    }
    const double v = integrand() * volume;
    const double delta = v - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(opts.mc_samples);
  const double se = opts.mc_samples > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
  return CValue{mean, se, IntegrationMethod::kMonteCarlo};
}

AssumptionReport check_assumptions(const PointConfig& config, Coords x0,
                                   std::size_t k, Coords probe) {
  require_dim(config.dim(), x0.size(), "check_assumptions");
  require_dim(config.dim(), probe.size(), "check_assumptions");
  AssumptionReport rep;
  PointConfig grown = config;
  grown.push_back(probe);
  for (std::size_t i = 0; i < config.size(); ++i) {
    ++rep.points_checked;
    const StabilizationRegion region = region_of(config, x0, i, k);
    const bool full_score = is_kpnn(config, x0, i, k);

    // R1: restrict to the region. The point itself is kept when the region
    // is a box; an empty region leaves an empty configuration, whose score
    // for x is zero.
    bool restricted_score = false;
    if (!region.is_empty()) {
      IndexSet inside;
      std::size_t self_pos = 0;
      for (std::size_t j = 0; j < config.size(); ++j) {
        if (region.contains(config[j])) {
          if (j == i) self_pos = inside.size();
          inside.push_back(j);
        }
      }
      restricted_score = is_kpnn(config.subset(inside), x0, self_pos, k);
    }
    if (restricted_score != full_score) {
      ++rep.r1_violations;
      rep.findings.push_back("R1 fails at point " + std::to_string(i));
    }

    // R3: adding the probe shrinks the region.
    const StabilizationRegion after = region_of(grown, x0, i, k);
    if (!after.subset_of(region)) {
      ++rep.r3_violations;
      rep.findings.push_back("R3 fails at point " + std::to_string(i));
    }
    if (!region.is_empty() && after.is_empty()) ++rep.collapsed_regions;

    // R4: a probe outside a nonempty region leaves it nonempty.
    if (!region.is_empty() && !region.contains(probe) && after.is_empty()) {
      ++rep.r4_violations;
      rep.findings.push_back("R4 fails at point " + std::to_string(i));
    }
  }
  return rep;
}

}  // namespace kpnn

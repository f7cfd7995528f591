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

#include "kpnn/process.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "kpnn/error.hpp"

namespace kpnn {
namespace {

const boost::math::normal kStdNormal;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void check_box(const std::vector<double>& lo, const std::vector<double>& hi) {
  if (lo.empty()) throw InvalidArgument("density: dimension must be positive");
  if (lo.size() != hi.size()) throw InvalidArgument("density: box bounds differ in length");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(std::isfinite(lo[i]) && std::isfinite(hi[i]) && lo[i] < hi[i])) {
      throw InvalidArgument("density: support box needs finite lo < hi");
    }
  }
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- density

DensitySpec DensitySpec::uniform_box(std::vector<double> lo, std::vector<double> hi) {
  DensitySpec d;
  d.kind = DensityKind::kUniformBox;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  d.validate();
  return d;
}

DensitySpec DensitySpec::unit_cube(std::size_t dim) {
  return uniform_box(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

DensitySpec DensitySpec::truncated_gaussian(std::vector<double> mean,
                                            std::vector<double> sd,
                                            std::vector<double> lo,
                                            std::vector<double> hi) {
  DensitySpec d;
  d.kind = DensityKind::kTruncatedGaussian;
  d.mean = std::move(mean);
  d.sd = std::move(sd);
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  d.validate();
  return d;
}

DensitySpec DensitySpec::product_beta(double a, double b, std::vector<double> lo,
                                      std::vector<double> hi) {
  DensitySpec d;
  d.kind = DensityKind::kProductBeta;
  d.beta_a = a;
  d.beta_b = b;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  d.validate();
  return d;
}

void DensitySpec::validate() const {
  check_box(lo, hi);
  switch (kind) {
    case DensityKind::kUniformBox:
      break;
    case DensityKind::kTruncatedGaussian:
      if (mean.size() != dim() || sd.size() != dim()) {
        throw InvalidArgument("truncated-gaussian: mean/sd length must equal dim");
      }
      for (std::size_t i = 0; i < dim(); ++i) {
        if (!(sd[i] > 0.0) || !std::isfinite(mean[i])) {
          throw InvalidArgument("truncated-gaussian: sd must be positive");
        }
        const double z = std_normal_cdf((hi[i] - mean[i]) / sd[i]) -
                         std_normal_cdf((lo[i] - mean[i]) / sd[i]);
        if (!(z > 1e-300)) throw InvalidArgument("truncated-gaussian: box has no mass");
      }
      break;
    case DensityKind::kProductBeta:
      if (!(beta_a > 0.0 && beta_b > 0.0)) {
        throw InvalidArgument("product-beta: shape parameters must be positive");
      }
      break;
  }
}

double DensitySpec::marginal_cdf(std::size_t i, double t) const {
  if (t <= lo[i]) return 0.0;
  if (t >= hi[i]) return 1.0;
  switch (kind) {
    case DensityKind::kUniformBox:
      return (t - lo[i]) / (hi[i] - lo[i]);
    case DensityKind::kTruncatedGaussian: {
      const double a = std_normal_cdf((lo[i] - mean[i]) / sd[i]);
      const double b = std_normal_cdf((hi[i] - mean[i]) / sd[i]);
      return (std_normal_cdf((t - mean[i]) / sd[i]) - a) / (b - a);
    }
    case DensityKind::kProductBeta:
      return boost::math::ibeta(beta_a, beta_b, (t - lo[i]) / (hi[i] - lo[i]));
  }
  return 0.0;
}

double DensitySpec::marginal_pdf(std::size_t i, double t) const {
  if (t < lo[i] || t > hi[i]) return 0.0;
  const double w = hi[i] - lo[i];
  switch (kind) {
    case DensityKind::kUniformBox:
      return 1.0 / w;
    case DensityKind::kTruncatedGaussian: {
      const double a = std_normal_cdf((lo[i] - mean[i]) / sd[i]);
      const double b = std_normal_cdf((hi[i] - mean[i]) / sd[i]);
      return boost::math::pdf(kStdNormal, (t - mean[i]) / sd[i]) / (sd[i] * (b - a));
    }
    case DensityKind::kProductBeta: {
      const double u = (t - lo[i]) / w;
      if (u <= 0.0 || u >= 1.0) {
        // Boundary values follow the closed-form limit where finite.
        const boost::math::beta_distribution<> law(beta_a, beta_b);
        const double e = u <= 0.0 ? 0.0 : 1.0;
        if ((e == 0.0 && beta_a < 1.0) || (e == 1.0 && beta_b < 1.0)) {
          return std::numeric_limits<double>::infinity();
        }
        return boost::math::pdf(law, e) / w;
      }
      return boost::math::ibeta_derivative(beta_a, beta_b, u) / w;
    }
  }
  return 0.0;
}

double DensitySpec::pdf(Coords x) const {
  if (x.size() != dim()) throw InvalidArgument("density pdf: dimension mismatch");
  double p = 1.0;
  for (std::size_t i = 0; i < dim() && p != 0.0; ++i) p *= marginal_pdf(i, x[i]);
  return p;
}

HyperRect DensitySpec::support() const { return HyperRect{Point(lo), Point(hi)}; }

std::string DensitySpec::name() const {
  std::ostringstream os;
  switch (kind) {
    case DensityKind::kUniformBox:
      os << "uniform-box(lo=" << join(lo) << ";hi=" << join(hi) << ")";
      break;
    case DensityKind::kTruncatedGaussian:
      os << "truncated-gaussian(mean=" << join(mean) << ";sd=" << join(sd)
         << ";lo=" << join(lo) << ";hi=" << join(hi) << ")";
      break;
    case DensityKind::kProductBeta:
      os << "product-beta(a=" << beta_a << ";b=" << beta_b << ";lo=" << join(lo)
         << ";hi=" << join(hi) << ")";
      break;
  }
  return os.str();
}

// ------------------------------------------------------------------ noise

double NoiseSpec::draw(CounterEngine& eng) const {
  switch (kind) {
    case NoiseKind::kGaussian: {
      boost::random::normal_distribution<double> law(0.0, 1.0);
      return law(eng);
    }
    case NoiseKind::kUniform:
      return std::sqrt(3.0) * (2.0 * eng.uniform01() - 1.0);
    case NoiseKind::kRademacher:
      return eng.uniform01() < 0.5 ? -1.0 : 1.0;
  }
  return 0.0;
}

std::string NoiseSpec::name() const {
  switch (kind) {
    case NoiseKind::kGaussian:
      return "gaussian";
    case NoiseKind::kUniform:
      return "uniform";
    case NoiseKind::kRademacher:
      return "rademacher";
  }
  return "?";
}

// ------------------------------------------------------------- regression

RegressionSpec RegressionSpec::constant_mean(double c, double sigma) {
  RegressionSpec r;
  r.mean_kind = MeanKind::kConstant;
  r.constant = c;
  r.sigma = sigma;
  return r;
}

RegressionSpec RegressionSpec::linear_mean(std::vector<double> w, double b, double sigma) {
  RegressionSpec r;
  r.mean_kind = MeanKind::kLinear;
  r.weights = std::move(w);
  r.intercept = b;
  r.sigma = sigma;
  return r;
}

RegressionSpec RegressionSpec::smooth_sine(double amplitude, double frequency,
                                           double sigma) {
  RegressionSpec r;
  r.mean_kind = MeanKind::kSmoothSine;
  r.amplitude = amplitude;
  r.frequency = frequency;
  r.sigma = sigma;
  return r;
}

void RegressionSpec::validate(std::size_t dim) const {
  if (mean_kind == MeanKind::kLinear && weights.size() != dim) {
    throw InvalidArgument("linear r0: weight vector length must equal dim");
  }
  if (scale_kind == ScaleKind::kConstant && !(sigma >= 0.0)) {
    throw InvalidArgument("sigma must be nonnegative");
  }
  if (scale_kind == ScaleKind::kAffineNorm && !(sigma_a >= 0.0 && sigma_b >= 0.0)) {
    throw InvalidArgument("affine-norm sigma needs a, b >= 0");
  }
}

double RegressionSpec::r0(Coords x) const {
  switch (mean_kind) {
    case MeanKind::kConstant:
      return constant;
    case MeanKind::kLinear: {
      double v = intercept;
      for (std::size_t i = 0; i < x.size(); ++i) v += weights[i] * x[i];
      return v;
    }
    case MeanKind::kSmoothSine: {
      double s = 0.0;
      for (double c : x) s += c;
      return amplitude * std::sin(frequency * s);
    }
  }
  return 0.0;
}

double RegressionSpec::scale(Coords x) const {
  if (scale_kind == ScaleKind::kConstant) return sigma;
  double ss = 0.0;
  for (double c : x) ss += c * c;
  return sigma_a + sigma_b * std::sqrt(ss);
}

double RegressionSpec::min_variance(const HyperRect& box) const {
  if (scale_kind == ScaleKind::kConstant) return sigma * sigma;
  // Closest point of the box to the origin minimises the norm.
  double ss = 0.0;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    const double c = std::clamp(0.0, box.lo[i], box.hi[i]);
    ss += c * c;
  }
  const double s = sigma_a + sigma_b * std::sqrt(ss);
  return s * s;
}

std::string RegressionSpec::name() const {
  std::ostringstream os;
  switch (mean_kind) {
    case MeanKind::kConstant:
      os << "constant(" << constant << ")";
      break;
    case MeanKind::kLinear:
      os << "linear(w=" << join(weights) << ";b=" << intercept << ")";
      break;
    case MeanKind::kSmoothSine:
      os << "smooth-sine(A=" << amplitude << ";f=" << frequency << ")";
      break;
  }
  if (scale_kind == ScaleKind::kConstant) {
    os << "+constant-sigma(" << sigma << ")";
  } else {
    os << "+affine-norm-sigma(" << sigma_a << "," << sigma_b << ")";
  }
  return os.str();
}

void Model::validate() const {
  density.validate();
  regression.validate(density.dim());
}

// --------------------------------------------------------------- sampling

void draw_point(const DensitySpec& density, CounterEngine& eng, double* out) {
  const std::size_t d = density.dim();
  switch (density.kind) {
    case DensityKind::kUniformBox:
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = density.lo[i] + (density.hi[i] - density.lo[i]) * eng.uniform01();
      }
      break;
    case DensityKind::kTruncatedGaussian:
      for (std::size_t i = 0; i < d; ++i) {
        const double m = density.mean[i], s = density.sd[i];
        const double a = std_normal_cdf((density.lo[i] - m) / s);
        const double b = std_normal_cdf((density.hi[i] - m) / s);
        double p = a + (b - a) * eng.uniform01();
        p = std::clamp(p, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
        const double x = m + s * boost::math::quantile(kStdNormal, p);
        out[i] = std::clamp(x, density.lo[i], density.hi[i]);
      }
      break;
    case DensityKind::kProductBeta: {
      boost::random::beta_distribution<double> law(density.beta_a, density.beta_b);
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = density.lo[i] + (density.hi[i] - density.lo[i]) * law(eng);
      }
      break;
    }
  }
}

PointConfig sample_poisson_config(double intensity, const DensitySpec& density,
                                  SeedSpec seed, SamplingMode mode) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw InvalidArgument("sample_poisson_config: intensity must be positive");
  }
  density.validate();
  CounterEngine eng(seed, Lane::kPoints);
  std::size_t count = 0;
  if (mode == SamplingMode::kPoisson) {
    boost::random::poisson_distribution<long, double> law(intensity);
    count = static_cast<std::size_t>(law(eng));
  } else {
    count = static_cast<std::size_t>(std::llround(intensity));
  }
  const std::size_t d = density.dim();
  std::vector<double> flat(count * d);
  for (std::size_t j = 0; j < count; ++j) draw_point(density, eng, flat.data() + j * d);
  return PointConfig(d, std::move(flat));
}

MarkedSample sample_marked(double intensity, const Model& model, SeedSpec seed,
                           SamplingMode mode) {
  model.validate();
  MarkedSample s{sample_poisson_config(intensity, model.density, seed, mode), {}, {}, seed};
  const std::size_t n = s.config.size();
  CounterEngine eng(seed, Lane::kMarks);
  s.marks.resize(n);
  s.responses.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Coords x = s.config[j];
    s.marks[j] = model.noise.draw(eng);
    s.responses[j] = model.regression.r0(x) + model.regression.scale(x) * s.marks[j];
  }
  return s;
}

// ------------------------------------------------------------------- mass

double rect_mass(const DensitySpec& density, const HyperRect& rect) {
  if (rect.dim() != density.dim()) throw InvalidArgument("rect_mass: dimension mismatch");
  double mass = 1.0;
  for (std::size_t i = 0; i < density.dim() && mass > 0.0; ++i) {
    const double f = density.marginal_cdf(i, rect.hi[i]) - density.marginal_cdf(i, rect.lo[i]);
    mass *= std::max(f, 0.0);
  }
  return std::clamp(mass, 0.0, 1.0);
}

double rect_mass_quadrature(const DensitySpec& density, const HyperRect& rect,
                            double abs_tol) {
  if (rect.dim() != density.dim()) {
    throw InvalidArgument("rect_mass_quadrature: dimension mismatch");
  }
  const std::size_t d = density.dim();
  std::vector<double> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = std::max(rect.lo[i], density.lo[i]);
    hi[i] = std::min(rect.hi[i], density.hi[i]);
    if (!(lo[i] < hi[i])) return 0.0;
  }
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  std::vector<double> x(d);
  double worst = 0.0;
  std::function<double(std::size_t)> nest = [&](std::size_t axis) -> double {
    auto f = [&](double t) {
      x[axis] = t;
      return axis + 1 == d ? density.pdf(x) : nest(axis + 1);
    };
    double err = 0.0;
    const double v = Rule::integrate(f, lo[axis], hi[axis], 15, 1e-13, &err);
    worst = std::max(worst, err);
    return v;
  };
  const double value = nest(0);
  if (worst > abs_tol) {
    throw NumericalError("rect_mass_quadrature: error estimate " + std::to_string(worst) +
                         " exceeds tolerance");
  }
  return value;
}

}  // namespace kpnn

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

#ifndef KPNN_PROCESS_HPP_
#define KPNN_PROCESS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "kpnn/geometry.hpp"
#include "kpnn/rng.hpp"

namespace kpnn {

enum class DensityKind { kUniformBox, kTruncatedGaussian, kProductBeta };

/// Covariate density from the supported catalog. Every entry is a product of
/// one-dimensional laws on a support box, which is what makes rectangle
/// masses computable in closed form.
struct DensitySpec {
  DensityKind kind = DensityKind::kUniformBox;
  std::vector<double> lo;    // support box
  std::vector<double> hi;
  std::vector<double> mean;  // truncated-gaussian only
  std::vector<double> sd;
  double beta_a = 1.0;       // product-beta only
  double beta_b = 1.0;

  static DensitySpec uniform_box(std::vector<double> lo, std::vector<double> hi);
  static DensitySpec unit_cube(std::size_t dim);
  static DensitySpec truncated_gaussian(std::vector<double> mean,
                                        std::vector<double> sd,
                                        std::vector<double> lo,
                                        std::vector<double> hi);
  static DensitySpec product_beta(double a, double b, std::vector<double> lo,
                                  std::vector<double> hi);

  std::size_t dim() const { return lo.size(); }
  void validate() const;  // throws InvalidArgument
  double pdf(Coords x) const;
  // Marginal CDF of coordinate i.
  double marginal_cdf(std::size_t i, double t) const;
  double marginal_pdf(std::size_t i, double t) const;
  HyperRect support() const;
  std::string name() const;
};

enum class NoiseKind { kGaussian, kUniform, kRademacher };

/// Unit-variance, mean-zero noise law.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::kGaussian;
  double draw(CounterEngine& eng) const;
  std::string name() const;
};

enum class MeanKind { kConstant, kLinear, kSmoothSine };
enum class ScaleKind { kConstant, kAffineNorm };

/// Additive heteroscedastic regression: y = r0(x) + sigma(x) * eps.
struct RegressionSpec {
  MeanKind mean_kind = MeanKind::kConstant;
  double constant = 0.0;          // constant(c)
  std::vector<double> weights;    // linear(w, b)
  double intercept = 0.0;
  double amplitude = 1.0;         // smooth-sine: A * sin(f * sum(x))
  double frequency = 1.0;

  ScaleKind scale_kind = ScaleKind::kConstant;
  double sigma = 1.0;             // constant(sigma)
  double sigma_a = 1.0;           // affine-in-norm: a + b * |x|_2
  double sigma_b = 0.0;

  static RegressionSpec constant_mean(double c, double sigma);
  static RegressionSpec linear_mean(std::vector<double> w, double b, double sigma);
  static RegressionSpec smooth_sine(double amplitude, double frequency, double sigma);

  void validate(std::size_t dim) const;
  double r0(Coords x) const;
  double scale(Coords x) const;
  // Infimum of the noise variance over a box.
  double min_variance(const HyperRect& box) const;
  std::string name() const;
};

struct Model {
  DensitySpec density;
  NoiseSpec noise;
  RegressionSpec regression;

  std::size_t dim() const { return density.dim(); }
  void validate() const;
};

/// Marked Poisson sample: positions, noise marks and responses.
struct MarkedSample {
  PointConfig config;
  std::vector<double> marks;
  std::vector<double> responses;
  SeedSpec seed;

  std::size_t size() const { return config.size(); }
  bool empty() const { return config.empty(); }
};

enum class SamplingMode {
  kPoisson,   // N ~ Poisson(n), then N i.i.d. points
  kBinomial,  // debug: exactly round(n) i.i.d. points
};

/// Draws a point from the density using the supplied engine.
void draw_point(const DensitySpec& density, CounterEngine& eng, double* out);

PointConfig sample_poisson_config(double intensity, const DensitySpec& density,
                                  SeedSpec seed,
                                  SamplingMode mode = SamplingMode::kPoisson);

MarkedSample sample_marked(double intensity, const Model& model, SeedSpec seed,
                           SamplingMode mode = SamplingMode::kPoisson);

/// Probability mass of a closed box under the density.
double rect_mass(const DensitySpec& density, const HyperRect& rect);

/// The same integral by nested adaptive Gauss-Kronrod quadrature of the pdf.
/// Throws NumericalError when the error estimate exceeds `abs_tol`.
double rect_mass_quadrature(const DensitySpec& density, const HyperRect& rect,
                            double abs_tol = 1e-10);

}  // namespace kpnn

#endif  // KPNN_PROCESS_HPP_

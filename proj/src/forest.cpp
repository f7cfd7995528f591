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

#include "kpnn/forest.hpp"

#include <cmath>
#include <sstream>

#include <boost/random/gamma_distribution.hpp>

#include "kpnn/error.hpp"

namespace kpnn {

void WeightScheme::validate() const {
  if (kind == SchemeKind::kDirichlet && !(alpha > 0.0 && std::isfinite(alpha))) {
    throw InvalidArgument("dirichlet scheme: concentration must be positive");
  }
}

std::string WeightScheme::name() const {
  std::ostringstream os;
  switch (kind) {
    case SchemeKind::kUniform:
      os << "uniform";
      break;
    case SchemeKind::kDirichlet:
      os << "dirichlet(" << alpha << ")";
      break;
    case SchemeKind::kSingleVote:
      os << "single-random-vote";
      break;
  }
  return os.str();
}

double Prediction::sum_sq_weights() const {
  double s = 0.0;
  for (double w : weights) s += w * w;
  return s;
}

std::vector<double> draw_weights(const WeightScheme& scheme, std::size_t count,
                                 SeedSpec sample_seed, std::size_t test_index) {
  scheme.validate();
  std::vector<double> w(count, 0.0);
  if (count == 0) return w;
  if (scheme.kind == SchemeKind::kUniform) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(count));
    return w;
  }
  const SeedSpec spec{sample_seed.seed ^ splitmix64(scheme.seed), sample_seed.stream};
  CounterEngine eng(spec, Lane::kScheme, scheme.per_point_streams ? test_index : 0);
  if (scheme.kind == SchemeKind::kSingleVote) {
    auto pick = static_cast<std::size_t>(eng.uniform01() * static_cast<double>(count));
    w[std::min(pick, count - 1)] = 1.0;
    return w;
  }
  boost::random::gamma_distribution<double> law(scheme.alpha, 1.0);
  double total = 0.0;
  for (double& v : w) {
    v = law(eng);
    total += v;
  }
  if (!(total > 0.0)) {
    // Every gamma draw underflowed (tiny alpha): the Dirichlet limit is a
    // vertex of the simplex.
    std::fill(w.begin(), w.end(), 0.0);
    w[0] = 1.0;
    return w;
  }
  for (double& v : w) v /= total;
  return w;
}

Prediction predict_weighted(const MarkedSample& sample, Coords x0, std::size_t k,
                            const WeightScheme& scheme, std::size_t test_index) {
  Prediction p;
  if (sample.empty()) {
    if (x0.size() != sample.config.dim()) {
      throw InvalidArgument("predict: dimension mismatch");
    }
    p.empty_process = true;
    return p;
  }
  p.voters = kpnn_set_fast(sample.config, x0, k);
  p.weights = draw_weights(scheme, p.voters.size(), sample.seed, test_index);
  double v = 0.0;
  for (std::size_t j = 0; j < p.voters.size(); ++j) {
    v += p.weights[j] * sample.responses[p.voters[j]];
  }
  p.value = v;
  return p;
}

Prediction predict_uniform(const MarkedSample& sample, Coords x0, std::size_t k) {
  return predict_weighted(sample, x0, k, WeightScheme::uniform(), 0);
}

std::vector<Prediction> predict_multi(const MarkedSample& sample,
                                      const std::vector<Point>& x0s, std::size_t k,
                                      const WeightScheme& scheme) {
  std::vector<Prediction> out;
  out.reserve(x0s.size());
  for (std::size_t j = 0; j < x0s.size(); ++j) {
    if (x0s[j].dim() != sample.config.dim()) {
      throw InvalidArgument("predict_multi: test points must share the sample dimension");
    }
    out.push_back(predict_weighted(sample, x0s[j], k, scheme, j));
  }
  return out;
}

}  // namespace kpnn

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

#ifndef KPNN_FOREST_HPP_
#define KPNN_FOREST_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kpnn/geometry.hpp"
#include "kpnn/process.hpp"

namespace kpnn {

enum class SchemeKind { kUniform, kDirichlet, kSingleVote };

/// Non-adaptive voting weights over the k-PNN set. Weights are drawn from the
/// scheme's own randomness and the number of voters only; responses are
/// never consulted.
struct WeightScheme {
  SchemeKind kind = SchemeKind::kUniform;
  double alpha = 1.0;  // Dirichlet concentration
  std::uint64_t seed = 0;
  // When false every test point shares one weight stream, so duplicated
  // test points receive identical weights.
  bool per_point_streams = true;

  static WeightScheme uniform() { return {}; }
  static WeightScheme dirichlet(double alpha, std::uint64_t seed) {
    return {SchemeKind::kDirichlet, alpha, seed, true};
  }
  static WeightScheme single_vote(std::uint64_t seed) {
    return {SchemeKind::kSingleVote, 1.0, seed, true};
  }
  void validate() const;
  std::string name() const;
};

struct Prediction {
  double value = 0.0;
  IndexSet voters;
  std::vector<double> weights;  // aligned with voters
  bool empty_process = false;

  std::size_t L() const { return voters.size(); }
  double sum_sq_weights() const;
};

/// Weights for `count` voters at test point `test_index` of the sample drawn
/// with `sample_seed`.
std::vector<double> draw_weights(const WeightScheme& scheme, std::size_t count,
                                 SeedSpec sample_seed, std::size_t test_index);

/// Average response over the k-PNN set of x0. An empty sample predicts 0.
Prediction predict_uniform(const MarkedSample& sample, Coords x0, std::size_t k);

Prediction predict_weighted(const MarkedSample& sample, Coords x0, std::size_t k,
                            const WeightScheme& scheme, std::size_t test_index = 0);

/// Predictions at several test points from one shared sample.
std::vector<Prediction> predict_multi(const MarkedSample& sample,
                                      const std::vector<Point>& x0s, std::size_t k,
                                      const WeightScheme& scheme);

}  // namespace kpnn

#endif  // KPNN_FOREST_HPP_

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
#include <set>

#include "kpnn/rng.hpp"

namespace kpnn {
namespace {

using Block = std::array<std::uint32_t, 4>;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterEngine, ReplaysIdentically) {
  CounterEngine a({42, 7}, Lane::kPoints);
  CounterEngine b({42, 7}, Lane::kPoints);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(CounterEngine, StreamsLanesAndSeedsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed : {1ull, 2ull}) {
    for (std::uint64_t stream : {0ull, 1ull}) {
      for (Lane lane : {Lane::kPoints, Lane::kMarks, Lane::kAux}) {
        CounterEngine e({seed, stream}, lane);
        firsts.insert(e());
      }
    }
  }
  EXPECT_EQ(firsts.size(), 12u);
}

TEST(CounterEngine, SeekMatchesSequentialDraws) {
  CounterEngine seq({9, 3}, Lane::kAux);
  std::vector<std::uint64_t> draws(37);
  for (auto& d : draws) d = seq();
  for (std::uint64_t i : {0ull, 1ull, 2ull, 5ull, 36ull}) {
    CounterEngine e({9, 3}, Lane::kAux);
    e.seek(i);
    EXPECT_EQ(e(), draws[i]) << "index " << i;
    EXPECT_EQ(e.position(), i + 1);
  }
}

TEST(CounterEngine, UniformMomentsAndRange) {
  CounterEngine e({5, 0}, Lane::kPoints);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = e.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(var, 1.0 / 12.0, 2e-3);
}

TEST(DeriveSeed, CellZeroKeepsMaster) {
  EXPECT_EQ(derive_seed(123, 0), 123u);
  EXPECT_NE(derive_seed(123, 1), 123u);
  EXPECT_NE(derive_seed(123, 1), derive_seed(123, 2));
  EXPECT_NE(derive_seed(123, 1), derive_seed(124, 1));
}

}  // namespace
}  // namespace kpnn

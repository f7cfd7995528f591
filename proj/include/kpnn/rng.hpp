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

#ifndef KPNN_RNG_HPP_
#define KPNN_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>

namespace kpnn {

// Philox4x32-10 block function. Maps a 128-bit counter and a 64-bit key to
// 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Identifies one reproducible random stream: a replication, a sample.
struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// Independent purposes drawn from the same (seed, stream) pair.
enum class Lane : std::uint64_t {
  kPoints = 0,
  kMarks = 1,
  kAux = 2,
  kScheme = 16,  // kScheme + test-point index
};

inline std::uint64_t lane_id(Lane lane, std::uint64_t offset = 0) {
  return static_cast<std::uint64_t>(lane) + offset;
}

/// Counter-based generator. The output sequence is a pure function of
/// (seed, stream, lane, draw index); no state is shared between engines.
/// Satisfies UniformRandomBitGenerator so the Boost.Random distributions can
/// consume it.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(SeedSpec spec, std::uint64_t lane);
  CounterEngine(SeedSpec spec, Lane lane, std::uint64_t offset = 0)
      : CounterEngine(spec, lane_id(lane, offset)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Jumps to an absolute 64-bit draw index.
  void seek(std::uint64_t draw_index);
  std::uint64_t position() const { return draws_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::uint64_t draws_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
};

// Seed of grid cell `index` derived from a master seed; cell 0 keeps the
// master seed itself so single-cell plans replay standalone calls.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace kpnn

#endif  // KPNN_RNG_HPP_

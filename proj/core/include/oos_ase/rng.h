// Copyright 2026 The OOS-ASE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OOS_ASE_RNG_H_
#define OOS_ASE_RNG_H_

#include <array>
#include <cstdint>
#include <limits>

namespace oos_ase {

// Philox4x32-10 block function (Salmon et al., Random123). Maps a 128-bit
// counter and 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// A seed plus a substream index. Distinct substreams of one seed never share
// a counter block, so trials can be drawn in any order or on any thread.
struct RngSeed {
  std::uint64_t key = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

enum class StreamPurpose : std::uint8_t {
  kLatents = 1,
  kAdjacency = 2,
  kOosEdges = 3,
};

// Substream for one (trial, group, purpose) triple. group separates e.g. the
// points of an n-grid.
std::uint64_t DeriveStream(std::uint64_t trial, std::uint32_t group,
                           StreamPurpose purpose);

// Counter-mode generator over one substream. Satisfies
// UniformRandomBitGenerator, but callers should prefer NextUniform: the
// standard library distributions are not bit-reproducible across vendors.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(RngSeed seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return NextU64(); }

  std::uint64_t NextU64();
  // Uniform double in [0, 1) with 53 random bits.
  double NextUniform();

 private:
  std::uint32_t NextU32();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace oos_ase

#endif  // OOS_ASE_RNG_H_

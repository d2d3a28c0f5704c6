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

#include "oos_ase/rng.h"

#include <set>

#include <gtest/gtest.h>

namespace oos_ase {
namespace {

using Block = std::array<std::uint32_t, 4>;

// Known-answer vectors published with the Random123 library (Philox4x32-10).
TEST(PhiloxTest, KnownAnswerZeros) {
  EXPECT_EQ(Philox4x32({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(PhiloxTest, KnownAnswerOnes) {
  EXPECT_EQ(Philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(PhiloxTest, KnownAnswerPi) {
  EXPECT_EQ(Philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(DeriveStreamTest, FieldsDoNotOverlap) {
  EXPECT_EQ(DeriveStream(0, 0, StreamPurpose::kLatents), 1u);
  EXPECT_EQ(DeriveStream(1, 2, StreamPurpose::kOosEdges), (1ull << 24) | (2u << 8) | 3u);
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 50; ++t) {
    for (std::uint32_t g = 0; g < 6; ++g) {
      for (auto p : {StreamPurpose::kLatents, StreamPurpose::kAdjacency,
                     StreamPurpose::kOosEdges}) {
        EXPECT_TRUE(seen.insert(DeriveStream(t, g, p)).second);
      }
    }
  }
}

TEST(RandomStreamTest, DrawsComeFromCounterBlocks) {
  const RngSeed seed{0x0123456789abcdefull, 0xfeedull << 32 | 7};
  RandomStream stream(seed);
  const std::array<std::uint32_t, 2> key{0x89abcdefu, 0x01234567u};
  for (std::uint32_t block = 0; block < 3; ++block) {
    const Block b = Philox4x32({block, 0, 7, 0xfeed}, key);
    EXPECT_EQ(stream.NextU64(), (std::uint64_t{b[1]} << 32) | b[0]);
    EXPECT_EQ(stream.NextU64(), (std::uint64_t{b[3]} << 32) | b[2]);
  }
}

TEST(RandomStreamTest, DeterministicAndStreamSeparated) {
  RandomStream a({42, 1}), b({42, 1}), c({42, 2}), d({43, 1});
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    same_c += x == c.NextU64();
    same_d += x == d.NextU64();
  }
  EXPECT_EQ(same_c, 0);
  EXPECT_EQ(same_d, 0);
}

TEST(RandomStreamTest, UniformMoments) {
  RandomStream s({2026, 5});
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.NextUniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  // Standard errors are about 6.5e-4 and 6.7e-4.
  EXPECT_NEAR(sum / n, 0.5, 4e-3);
  EXPECT_NEAR(sum2 / n, 1.0 / 3.0, 4e-3);
}

}  // namespace
}  // namespace oos_ase

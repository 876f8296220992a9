// Copyright 2026 The privgof Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privgof/random.h"

#include <cmath>

namespace privgof {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85;
constexpr int kPhiloxRounds = 10;

inline void MulHiLo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  const uint64_t product = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(product >> 32);
  lo = static_cast<uint32_t>(product);
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline uint64_t Combine(uint32_t hi, uint32_t lo) {
  return (static_cast<uint64_t>(hi) << 32) | lo;
}

}  // namespace

Philox4x32::Counter Philox4x32::Block(Counter ctr, Key key) {
  for (int round = 0; round < kPhiloxRounds; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kPhiloxM0, ctr[0], hi0, lo0);
    MulHiLo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

uint64_t DeriveSeed(uint64_t parent, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t h = SplitMix64(parent);
  h = SplitMix64(h ^ a);
  h = SplitMix64(h ^ (b + 0x632BE59BD9B4E019ULL));
  h = SplitMix64(h ^ (c + 0x8CB92BA72F3D8DD7ULL));
  return h;
}

double UnitLaplaceFromUniform(double u) {
  // Scale b = 1/sqrt(2) gives variance 2 b^2 = 1.
  constexpr double kScale = 0.70710678118654752440;
  if (u < 0.5) return kScale * std::log(2.0 * u);
  return -kScale * std::log(2.0 * (1.0 - u));
}

CounterStream::CounterStream(uint64_t seed)
    : seed_(seed),
      key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)} {}

Philox4x32::Counter CounterStream::MakeCounter(StreamTag tag, uint64_t row,
                                               uint32_t level,
                                               uint32_t block) const {
  // Levels stay below 2^24, tags below 2^8.
  return {block, (level & 0xFFFFFFu) | (static_cast<uint32_t>(tag) << 24),
          static_cast<uint32_t>(row), static_cast<uint32_t>(row >> 32)};
}

double CounterStream::Uniform(StreamTag tag, uint64_t row, uint32_t level,
                              uint32_t column) const {
  const auto out =
      Philox4x32::Block(MakeCounter(tag, row, level, column / 2), key_);
  return (column % 2 == 0) ? OpenUniform(Combine(out[0], out[1]))
                           : OpenUniform(Combine(out[2], out[3]));
}

void CounterStream::FillUnitLaplace(uint64_t row, uint32_t level,
                                    std::span<double> out) const {
  const size_t size = out.size();
  for (size_t column = 0; column < size; column += 2) {
    const auto block = Philox4x32::Block(
        MakeCounter(StreamTag::kNoise, row, level,
                    static_cast<uint32_t>(column / 2)),
        key_);
    out[column] = UnitLaplaceFromUniform(OpenUniform(Combine(block[0], block[1])));
    if (column + 1 < size) {
      out[column + 1] =
          UnitLaplaceFromUniform(OpenUniform(Combine(block[2], block[3])));
    }
  }
}

}  // namespace privgof

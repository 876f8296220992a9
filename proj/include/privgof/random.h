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

#ifndef PRIVGOF_RANDOM_H_
#define PRIVGOF_RANDOM_H_

#include <array>
#include <cstdint>
#include <span>

namespace privgof {

// Philox4x32-10 counter-based generator (Salmon et al., Random123). Every
// output block is a pure function of (key, counter), which is what makes the
// simulation results independent of scheduling and worker count.
class Philox4x32 {
 public:
  using Counter = std::array<uint32_t, 4>;
  using Key = std::array<uint32_t, 2>;

  static Counter Block(Counter counter, Key key);
};

// Mixes a parent seed with up to three indices into a child seed. Used to
// derive per-trial, per-replicate and per-purpose substreams from one master
// seed.
uint64_t DeriveSeed(uint64_t parent, uint64_t a, uint64_t b = 0,
                    uint64_t c = 0);

// Maps 64 random bits to a double in the open interval (0, 1).
inline double OpenUniform(uint64_t bits) {
  // The top midpoint rounds to 1.0; pull it back inside.
  const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  return u < 1.0 ? u : 0x1.fffffffffffffp-1;
}

// Inverse CDF of the unit-variance Laplace law, density
// (1/sqrt(2)) exp(-sqrt(2)|w|). `u` must lie in (0, 1).
double UnitLaplaceFromUniform(double u);

// Stream tags separate independent uses of the same seed.
enum class StreamTag : uint32_t {
  kSample = 1,
  kNoise = 2,
};

// A keyed counter-based source of uniforms. Draws are addressed by
// (tag, row, level, column) rather than consumed sequentially.
class CounterStream {
 public:
  explicit CounterStream(uint64_t seed);

  uint64_t seed() const { return seed_; }

  // Uniform in (0, 1) addressed by (tag, row, level, column).
  double Uniform(StreamTag tag, uint64_t row, uint32_t level,
                 uint32_t column) const;

  // Fills `out` with unit-variance Laplace draws for columns 0..size-1 of
  // (row, level) in the noise stream.
  void FillUnitLaplace(uint64_t row, uint32_t level,
                       std::span<double> out) const;

 private:
  Philox4x32::Counter MakeCounter(StreamTag tag, uint64_t row, uint32_t level,
                                  uint32_t block) const;

  uint64_t seed_;
  Philox4x32::Key key_;
};

}  // namespace privgof

#endif  // PRIVGOF_RANDOM_H_

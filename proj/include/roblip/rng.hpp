// Copyright 2026 The roblip Authors
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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace roblip {

/// xoshiro256** 1.0 (Blackman & Vigna), seeded through splitmix64.
///
/// Every random choice in the library goes through this generator so that
/// subsets, initializations and shuffles are reproducible across compilers
/// and platforms. The standard <random> engines are portable but the
/// distributions are not, so the distributions live here as well.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Rademacher sign, +1 or -1 with equal probability.
  int sign();
  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// One splitmix64 step; also used to mix keys into stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic seed for an independent stream identified by `parts`.
std::uint64_t stream_seed(std::initializer_list<std::uint64_t> parts);

/// First `k` entries of a partial Fisher-Yates shuffle of 0..n-1.
/// Indices are returned in draw order; k <= n.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace roblip

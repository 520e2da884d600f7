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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

// Textbook oracles kept deliberately naive: plain loops, no shared code with
// the library beyond its value types.
namespace oracle_naive {

// (1/2^n) sum_sigma max_a (1/n) sum_i sigma_i a_i by direct enumeration.
inline double rademacher(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.front().size();
  long double total = 0.0L;
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    long double best = -INFINITY;
    for (const auto& v : a) {
      long double s = 0.0L;
      for (std::size_t i = 0; i < n; ++i) s += ((mask >> i) & 1UL) ? -v[i] : v[i];
      best = std::max(best, s / n);
    }
    total += best;
  }
  return static_cast<double>(total / static_cast<long double>(1UL << n));
}

}  // namespace oracle_naive

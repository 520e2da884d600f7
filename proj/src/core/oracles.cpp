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

#include "roblip/oracles.hpp"

#include <algorithm>
#include <functional>
#include <utility>
#include <vector>

#include "roblip/error.hpp"

namespace roblip::oracle {

namespace {

constexpr std::size_t kZoomPoints = 1001;
constexpr int kZoomLevels = 5;
constexpr std::size_t kCandidates = 16;

}  // namespace

double grid_sup_sq_loss(const Predictor& f, double x, double y, double rho, std::size_t points) {
  if (f.input_dim() != 1) throw DimensionError("grid_sup_sq_loss: one-dimensional predictors only");
  auto loss = [&](double z) {
    const double r = f.value(std::span<const double>(&z, 1)) - y;
    return r * r;
  };
  if (rho == 0.0) return loss(x);
  points = std::max<std::size_t>(points, 3);

  const double a = x - rho, b = x + rho;
  auto grid_at = [](double lo, double hi, std::size_t m, std::size_t k) {
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1);
  };
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) g[k] = loss(grid_at(a, b, points, k));
  double best = *std::max_element(g.begin(), g.end());

  // Sampled local maxima, largest first.
  std::vector<std::pair<double, std::size_t>> peaks;
  for (std::size_t k = 0; k < points; ++k) {
    const bool left_ok = k == 0 || g[k] >= g[k - 1];
    const bool right_ok = k + 1 == points || g[k] >= g[k + 1];
    if (left_ok && right_ok) peaks.emplace_back(g[k], k);
  }
  std::sort(peaks.begin(), peaks.end(), std::greater<>());
  if (peaks.size() > kCandidates) peaks.resize(kCandidates);

  for (const auto& [value, k] : peaks) {
    double lo = grid_at(a, b, points, k == 0 ? 0 : k - 1);
    double hi = grid_at(a, b, points, std::min(points - 1, k + 1));
    for (int level = 0; level < kZoomLevels; ++level) {
      std::size_t arg = 0;
      double local = -1.0;
      for (std::size_t j = 0; j < kZoomPoints; ++j) {
        const double v = loss(grid_at(lo, hi, kZoomPoints, j));
        if (v > local) {
          local = v;
          arg = j;
        }
      }
      best = std::max(best, local);
      const double nlo = grid_at(lo, hi, kZoomPoints, arg == 0 ? 0 : arg - 1);
      const double nhi = grid_at(lo, hi, kZoomPoints, std::min(kZoomPoints - 1, arg + 1));
      lo = std::max(nlo, a);
      hi = std::min(nhi, b);
      if (!(hi > lo)) break;
    }
  }
  return best;
}

}  // namespace roblip::oracle

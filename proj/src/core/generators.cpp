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

#include "roblip/generators.hpp"

#include <algorithm>

namespace roblip::gen {

PiecewiseLinear1D random_pwl(Rng& rng, const PwlShape& shape) {
  const std::size_t k = 1 + static_cast<std::size_t>(rng.below(shape.max_breakpoints));
  std::vector<double> knots(k);
  for (auto& t : knots) t = rng.uniform(shape.lo, shape.hi);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::vector<double> values(knots.size());
  values[0] = rng.uniform(-shape.start_value, shape.start_value);
  for (std::size_t i = 1; i < knots.size(); ++i)
    values[i] = values[i - 1] + rng.uniform(-shape.max_slope, shape.max_slope) * (knots[i] - knots[i - 1]);
  const double left = rng.uniform(-shape.max_slope, shape.max_slope);
  const double right = rng.uniform(-shape.max_slope, shape.max_slope);
  return PiecewiseLinear1D(std::move(knots), std::move(values), left, right);
}

PiecewiseLinear1D random_map_through_zero(Rng& rng, double lipschitz, std::size_t max_breakpoints) {
  const std::size_t k = static_cast<std::size_t>(rng.below(max_breakpoints + 1));
  std::vector<double> knots{0.0};
  for (std::size_t i = 0; i < k; ++i) knots.push_back(rng.uniform(-3.0, 3.0));
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  const auto zero = static_cast<std::size_t>(std::find(knots.begin(), knots.end(), 0.0) - knots.begin());
  std::vector<double> values(knots.size(), 0.0);
  for (std::size_t i = zero + 1; i < knots.size(); ++i)
    values[i] = values[i - 1] + rng.uniform(-lipschitz, lipschitz) * (knots[i] - knots[i - 1]);
  for (std::size_t i = zero; i-- > 0;)
    values[i] = values[i + 1] - rng.uniform(-lipschitz, lipschitz) * (knots[i + 1] - knots[i]);
  const double left = rng.uniform(-lipschitz, lipschitz);
  const double right = rng.uniform(-lipschitz, lipschitz);
  return PiecewiseLinear1D(std::move(knots), std::move(values), left, right);
}

CoordMapFamily random_coord_maps(Rng& rng, std::size_t n, double min_lipschitz, double max_lipschitz) {
  CoordMapFamily fam;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = rng.uniform(min_lipschitz, max_lipschitz);
    auto map = random_map_through_zero(rng, l);
    fam.maps.emplace_back([map](double t) { return map(t); });
    fam.lipschitz.push_back(l);
  }
  return fam;
}

VectorSet random_vector_set(Rng& rng, std::size_t dim, std::size_t count, double scale) {
  std::vector<double> flat(dim * count);
  for (auto& v : flat) v = rng.uniform(-scale, scale);
  return VectorSet(dim, std::move(flat));
}

SampleSet random_regression_sample(Rng& rng, std::size_t n, double x_lo, double x_hi) {
  SampleSet s;
  for (std::size_t i = 0; i < n; ++i) s.samples.push_back({{rng.uniform(x_lo, x_hi)}, rng.uniform(-1.0, 1.0)});
  return s;
}

}  // namespace roblip::gen

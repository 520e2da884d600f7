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

#include <cstddef>

#include "roblip/predictor.hpp"
#include "roblip/rademacher.hpp"
#include "roblip/robust_loss.hpp"
#include "roblip/rng.hpp"

// Random instance generators shared by the verification suites and tests.
namespace roblip::gen {

struct PwlShape {
  std::size_t max_breakpoints = 6;
  double lo = -2.0, hi = 2.0;  // breakpoint range
  double max_slope = 5.0;
  double start_value = 1.0;    // first value drawn from [-start_value, start_value]
};

/// Breakpoints uniform in [lo, hi], every segment slope (ends included)
/// uniform in [-max_slope, max_slope].
PiecewiseLinear1D random_pwl(Rng& rng, const PwlShape& shape = {});

/// Piecewise-linear scalar map with phi(0) = 0, at most `max_breakpoints`
/// breakpoints besides 0 and slopes uniform in [-lipschitz, lipschitz].
PiecewiseLinear1D random_map_through_zero(Rng& rng, double lipschitz, std::size_t max_breakpoints = 5);

/// n maps from random_map_through_zero with constants uniform in
/// [min_lipschitz, max_lipschitz]; the declared constant is the slope bound.
CoordMapFamily random_coord_maps(Rng& rng, std::size_t n, double min_lipschitz, double max_lipschitz);

VectorSet random_vector_set(Rng& rng, std::size_t dim, std::size_t count, double scale = 2.0);

/// Inputs uniform in [x_lo, x_hi], labels uniform in [-1, 1].
SampleSet random_regression_sample(Rng& rng, std::size_t n, double x_lo = -2.0, double x_hi = 2.0);

}  // namespace roblip::gen

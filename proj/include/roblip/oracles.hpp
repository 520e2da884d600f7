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

namespace roblip::oracle {

/// sup over z in [x - rho, x + rho] of (f(z) - y)^2 by brute force: a
/// uniform grid of `points` samples, then repeated 1001-point zooms around
/// the best sampled local maxima. Uses only point evaluations of f.
double grid_sup_sq_loss(const Predictor& f, double x, double y, double rho, std::size_t points = 100000);

}  // namespace roblip::oracle

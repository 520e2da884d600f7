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
#include <cstdint>
#include <string>

namespace roblip {

/// One (n, width, seed) cell of the scaling grid.
struct ScalingRecord {
  std::size_t n = 0;
  std::size_t width = 0;
  std::size_t p = 0;
  std::uint64_t seed = 0;
  double L_emp = 0.0;
  int stopped_epoch = 0;
  double best_test_loss = 0.0;
  double final_train_loss = 0.0;
  std::string status = "ok";
};

}  // namespace roblip

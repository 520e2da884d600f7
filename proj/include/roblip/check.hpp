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

#include <string>
#include <vector>

namespace roblip {

/// One side-by-side inequality evaluation: passed iff lhs <= rhs + slack
/// (or |lhs - rhs| <= slack for equalities).
struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool equality = false;
  bool passed = false;

  static InequalityCheck at_most(std::string name, double lhs, double rhs, double slack);
  static InequalityCheck equal(std::string name, double lhs, double rhs, double slack);
};

bool all_passed(const std::vector<InequalityCheck>& checks);

}  // namespace roblip

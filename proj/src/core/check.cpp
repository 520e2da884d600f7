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

#include "roblip/check.hpp"

#include <algorithm>
#include <cmath>

namespace roblip {

InequalityCheck InequalityCheck::at_most(std::string name, double lhs, double rhs, double slack) {
  InequalityCheck c{std::move(name), lhs, rhs, slack, false, false};
  c.passed = lhs <= rhs + slack;
  return c;
}

InequalityCheck InequalityCheck::equal(std::string name, double lhs, double rhs, double slack) {
  InequalityCheck c{std::move(name), lhs, rhs, slack, true, false};
  c.passed = std::fabs(lhs - rhs) <= slack;
  return c;
}

bool all_passed(const std::vector<InequalityCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

}  // namespace roblip

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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "roblip/bounds.hpp"
#include "roblip/lipestimate.hpp"
#include "roblip/scalefit.hpp"
#include "roblip/verify.hpp"

// JSON and text renderings shared by the C API and the command line.
namespace roblip::report {

nlohmann::json to_json(const InequalityCheck& c);
/// Full report when `details` is set, otherwise suite summaries only.
nlohmann::json to_json(const VerifyReport& r, bool details = true);
nlohmann::json to_json(const LipEstimate& e);
nlohmann::json to_json(const FitResult& f);
nlohmann::json to_json(const SliceFit& s);
nlohmann::json to_json(const TheoryComparison& t);

struct BoundsRequest {
  BoundInputs inputs;
  double clean_risk = 0.0;           // R-hat for the gap bound
  std::optional<double> expected_rad;  // for the generalization right-hand side
  double p = 1.0;                    // parameter count for the scaling laws
  std::size_t effective_dim = 10;
};

nlohmann::json bounds_report(const BoundsRequest& req);

struct FitReport {
  FilterResult filter;
  std::optional<SliceFit> slices;
  std::string slices_error;
  std::optional<FitResult> joint;
  std::string joint_error;
  std::optional<TheoryComparison> theory;  // from the joint fit, else the slice fit
};

/// Drops zero estimates, then runs both fits and the theory comparison.
/// Throws InsufficientData when every record is dropped.
FitReport fit_records(const std::vector<ScalingRecord>& records, EffectiveDim d = {});

nlohmann::json to_json(const FitReport& r);
std::string text_table(const FitReport& r);

}  // namespace roblip::report

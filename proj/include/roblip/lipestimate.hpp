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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roblip/check.hpp"
#include "roblip/predictor.hpp"
#include "roblip/scaling_record.hpp"

namespace roblip {

struct LipEstimate {
  double L_emp = 0.0;
  std::vector<double> per_class;
  /// Per class, the pair (i < j) attaining L_c; ties go to the
  /// lexicographically smallest pair.
  std::vector<std::pair<std::size_t, std::size_t>> witness;
  std::uint64_t pairs_skipped = 0;
  std::size_t n = 0;
};

struct LipOptions {
  double duplicate_threshold = 1e-9;  // pairs closer than this are skipped
  unsigned threads = 0;               // 0 = hardware concurrency
  std::size_t block = 48;             // rows per tile side
};

/// Max over unordered pairs and classes of |out_c(i) - out_c(j)| / ||x_i - x_j||_2.
/// `outputs` is n x classes and `x` is n x d, both row-major. The pair
/// space is tiled into blocks scanned in parallel; partial maxima merge by
/// an order-insensitive rule, so results do not depend on the thread count.
LipEstimate pairwise_lip(std::span<const double> outputs, std::size_t classes, std::span<const double> x,
                         std::size_t d, const LipOptions& opts = {});

/// Plain double loop over i < j with the same distance kernel; the
/// reference the blocked scan is tested against.
LipEstimate pairwise_lip_naive(std::span<const double> outputs, std::size_t classes, std::span<const double> x,
                               std::size_t d, double duplicate_threshold = 1e-9);

struct LipLowerBoundReport {
  LipEstimate estimate;
  double lipschitz = 0.0;                 // exact constant of the predictor
  InequalityCheck lower_bound;            // L_emp <= L
  std::optional<InequalityCheck> equality;  // linear predictors with a pair along w
};

/// Evaluates the predictor (raw outputs) on the rows of x and checks that
/// the pairwise estimate never exceeds its exact Lipschitz constant.
LipLowerBoundReport lip_lower_bound_check(const Predictor& f, std::span<const double> x, std::size_t d,
                                          double slack = 1e-10, double equality_tolerance = 1e-9);

struct FilterResult {
  std::vector<ScalingRecord> kept;
  std::vector<ScalingRecord> dropped;
  std::vector<std::string> log;
  bool all_dropped = false;
};

inline constexpr double kZeroEstimateThreshold = 1e-12;

/// Drops records whose L_emp is below the zero threshold (or not finite,
/// or whose status is not "ok"), logging each drop with (n, width).
FilterResult filter_zero_estimates(const std::vector<ScalingRecord>& records,
                                   double threshold = kZeroEstimateThreshold);

}  // namespace roblip

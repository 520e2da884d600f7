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
#include <optional>
#include <string>
#include <vector>

#include "roblip/dataset.hpp"
#include "roblip/scaling_record.hpp"

namespace roblip {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class FitMethod { slices, joint };

/// Exponents of L = C n^alpha p^beta. Quantities that cannot be computed
/// (e.g. beta from a grid with a single p) are NaN with the *_available
/// flag cleared.
struct FitResult {
  FitMethod method = FitMethod::joint;
  double alpha = 0.0, beta = 0.0, log_c = 0.0;
  double stderr_alpha = 0.0, stderr_beta = 0.0;
  Interval ci95_alpha, ci95_beta;
  double p_value_alpha = 1.0, p_value_beta = 1.0;
  std::optional<double> r_squared;  // joint fits only
  std::size_t n_points = 0;
  std::size_t dof = 0;
  bool alpha_available = true;
  bool beta_available = true;
  bool partial() const { return !alpha_available || !beta_available; }
};

/// One simple log-log slope from a slice of the grid with the other
/// variable held fixed.
struct SliceEstimate {
  std::size_t fixed = 0;  // the p (alpha slices) or n (beta slices)
  double exponent = 0.0;
  std::size_t points = 0;
};

struct SliceFit {
  FitResult fit;
  std::vector<SliceEstimate> alpha_slices;  // one per p
  std::vector<SliceEstimate> beta_slices;   // one per n
  std::vector<std::string> log;
};

/// alpha = mean over fixed-p slices of the slope of ln L on ln n, beta the
/// same over fixed-n slices, slices weighted equally. A slice takes part
/// only with at least two distinct values of the varying coordinate. The
/// standard error is the slice standard deviation / sqrt(#slices); intervals
/// and p-values use the t distribution with #slices - 1 degrees of freedom.
/// Throws InsufficientData when neither exponent has a valid slice.
SliceFit fit_slices(const std::vector<ScalingRecord>& records);

/// Ordinary least squares of ln L on (1, ln n, ln p) by Householder QR.
/// Standard errors come from the unbiased residual variance and
/// (X^T X)^-1 = R^-1 R^-T; intervals and two-sided p-values use the t
/// distribution with n_points - 3 degrees of freedom.
/// Throws InsufficientData below 4 points, RankDeficient for collinear designs.
FitResult fit_joint(const std::vector<ScalingRecord>& records);

struct OlsSolution {
  std::vector<double> coef;
  std::vector<double> std_error;
  double rss = 0.0;
  double tss = 0.0;
  std::size_t dof = 0;
};

/// Least squares for a row-major m x k design by Householder QR.
OlsSolution ols_qr(const std::vector<double>& design, std::size_t k, const std::vector<double>& y);

struct LawDistance {
  std::string law;
  double alpha = 0.0, beta = 0.0;
  double alpha_distance = 0.0, beta_distance = 0.0;
};

struct TheoryComparison {
  double alpha = 0.0, beta = 0.0;
  std::vector<LawDistance> laws;  // bubeck, wu
  std::string closer_alpha;
  std::string closer_beta;
};

TheoryComparison compare_to_theory(const FitResult& fit, EffectiveDim d = {});

/// Two-sided 95% t quantile and p-value helpers (Boost.Math).
double t_quantile_975(std::size_t dof);
double t_two_sided_p(double t, std::size_t dof);

}  // namespace roblip

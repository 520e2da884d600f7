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
#include <vector>

#include "roblip/check.hpp"
#include "roblip/predictor.hpp"
#include "roblip/robust_loss.hpp"

namespace roblip {

struct BoundInputs {
  double lipschitz = 1.0;
  double rho = 0.0;
  double sigma = 0.0;       // label-noise level; a free nonnegative input
  double epsilon = 0.0;     // interpolation margin
  double delta_conf = 0.05;
  std::size_t n = 1;

  void validate() const;
};

/// 2 L rho sqrt(clean_risk) + L^2 rho^2, the largest possible excess of the
/// robust over the clean empirical squared error.
double gap_bound(double lipschitz, double rho, double clean_risk);

/// (2 + L rho)^2, uniform bound on the robust squared loss for labels and
/// predictions in [-1, 1].
double a_rho(double lipschitz, double rho);

/// 2 E[R(l_rho o F o S')] + a_rho sqrt(2 ln(2/delta_conf) / n).
double gen_bound_rhs(double expected_rad, double lipschitz, double rho, std::size_t n, double delta_conf);

struct LowerBound {
  double value = 0.0;
  bool vacuous = false;  // value <= 0; reported as-is, never clamped
};

/// gamma/2 - (a_rho/2) sqrt(2 ln(2/delta_conf) / n).
LowerBound rad_lower_bound(double gamma, double lipschitz, double rho, std::size_t n, double delta_conf);

/// rad_lower_bound with gamma = epsilon - (2 L rho sigma + L^2 rho^2).
LowerBound rad_lower_bound_overfit(double epsilon, double lipschitz, double rho, double sigma,
                                   std::size_t n, double delta_conf);

enum class ScalingLaw { bubeck, wu };

struct TheoreticalScaling {
  double value = 0.0;  // up to a constant factor
  double alpha = 0.0;  // exponent of n
  double beta = 0.0;   // exponent of p
};

/// bubeck: sqrt(n d / p), exponents (1/2, -1/2). wu: n^(1/d), exponents (1/d, 0).
TheoreticalScaling theoretical_L(ScalingLaw law, double n, double p, double d);

struct LossReport {
  double clean_train = 0.0;        // mean (f(x_i) - y_i)^2
  double robust_train = 0.0;       // mean robust squared loss
  std::optional<double> robust_test;
  double residual_abs_mean = 0.0;  // mean |f(x_i) - y_i|
  std::size_t n = 0;
  bool robust_exact = false;
};

LossReport loss_report(const Predictor& f, const SampleSet& train, const RobustnessConfig& cfg,
                       const SampleSet* test = nullptr);

struct GapCheck {
  LossReport losses;
  InequalityCheck check;  // robust - clean <= gap_bound(L, rho, clean)
};

/// Uses `lipschitz` if given, else the predictor's own bound; throws
/// InvalidArgument when neither exists or when two sample points already
/// witness a larger slope.
GapCheck check_gap_bound(const Predictor& f, const SampleSet& s, const RobustnessConfig& cfg,
                         std::optional<double> lipschitz = std::nullopt, double slack = 1e-10);

/// Finite distribution over labeled points.
struct FiniteDistribution {
  std::vector<LabeledSample> atoms;
  std::vector<double> probabilities;
};

struct GeneralizationCheckReport {
  std::size_t trials = 0;
  std::size_t held = 0;          // trials with max_f (T - R) <= rhs
  double frequency = 0.0;
  double expected_rad = 0.0;     // exact E_{S'} R(l_rho o F o S')
  double rhs = 0.0;
  double max_gap = 0.0;          // largest max_f (T - R) seen
};

/// Draws `trials` training sets S ~ D^n and counts how often
/// sup_{f in F} (T(f) - R(f)) <= gen_bound_rhs. T is the exact expectation
/// over D, the expected complexity is computed exactly by enumerating
/// multisets of atoms, and robust losses use exact PWL envelopes.
GeneralizationCheckReport finite_class_generalization_check(const std::vector<PiecewiseLinear1D>& fs,
                                                            const FiniteDistribution& dist, std::size_t n,
                                                            double rho, double delta_conf,
                                                            std::size_t trials, std::uint64_t seed);

}  // namespace roblip

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
#include <vector>

#include "roblip/check.hpp"
#include "roblip/predictor.hpp"
#include "roblip/rademacher.hpp"

namespace roblip {

enum class SupMethod { exact_pwl, grid, projected_ascent };

/// Perturbation model: closed l2 ball of radius rho around each input.
struct RobustnessConfig {
  double rho = 0.0;
  SupMethod method = SupMethod::exact_pwl;
  int ascent_steps = 20;
  int restarts = 5;
  double step_size = 0.0;       // 0 selects rho / 10
  std::size_t grid_points = 1001;
  std::uint64_t seed = 0;
  std::size_t output = 0;       // which predictor output is perturbed

  void validate() const;
};

struct LabeledSample {
  std::vector<double> x;
  double y = 0.0;
};

struct SampleSet {
  std::vector<LabeledSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t dim() const { return samples.empty() ? 0 : samples.front().x.size(); }
  /// Non-empty, common input dimension, labels in [-1, 1].
  void validate_regression() const;
};

/// f^-(x) and f^+(x): inf and sup of f over the rho-ball around x.
struct Envelope {
  double lower = 0.0;
  double upper = 0.0;
  SupMethod method = SupMethod::exact_pwl;
  bool certified_exact = false;
};

/// exact_pwl is exact for 1-D piecewise-linear predictors. grid and
/// projected_ascent only evaluate points inside the ball (the center
/// included), so they return an inner approximation:
/// true f^- <= lower <= f(x) <= upper <= true f^+.
Envelope envelope(const Predictor& f, std::span<const double> x, const RobustnessConfig& cfg);

/// max{(f^+ - y)^2, (f^- - y)^2}. Exact with exact envelopes, otherwise a
/// lower bound on the robust squared loss.
double robust_sq_loss(const Predictor& f, const LabeledSample& s, const RobustnessConfig& cfg);

double clean_sq_loss(const Predictor& f, const LabeledSample& s, std::size_t output = 0);

enum class LossKind { eval, clean, robust };

/// One n-vector per predictor: f(x_i), (f(x_i) - y_i)^2 or the robust loss.
VectorSet loss_vectors(const std::vector<const Predictor*>& fs, const SampleSet& s,
                       const RobustnessConfig& cfg, LossKind kind);

/// Rademacher chain for robust squared loss over a finite class F0 of
/// [-1,1]-valued 1-D PWL predictors. F is F0 closed under envelopes
/// (f, f^+, f^- restricted to the sample points). Checks
///   R(l_rho o F0 o S) <= 2 R(l o F o S)
///   R(l o F o S)      <= 4 R(F o S)
///   R(l_rho o F0 o S) <= 8 R(F o S)
/// with exact enumeration on both sides.
std::vector<InequalityCheck> verify_loss_complexity_chain(const std::vector<PiecewiseLinear1D>& fs,
                                                          const SampleSet& s, double rho,
                                                          double slack = 1e-12);

struct EnvelopeLipschitzReport {
  double lipschitz = 0.0;
  double max_upper_slope = 0.0;  // largest |f+(x)-f+(x')| / |x-x'| seen
  double max_lower_slope = 0.0;
  // Probe pair with the largest |delta f+| - L |delta x| (and for f-).
  double worst_upper_change = 0.0, worst_upper_allowance = 0.0;
  double worst_lower_change = 0.0, worst_lower_allowance = 0.0;
  std::size_t violations = 0;
  bool passed = true;
};

/// Checks that the exact envelopes f^+ and f^- are L-Lipschitz on the probe
/// pairs, with L the exact Lipschitz constant of f.
EnvelopeLipschitzReport envelope_lipschitz_check(const PiecewiseLinear1D& f, double rho,
                                                 const std::vector<std::pair<double, double>>& probes,
                                                 double slack = 1e-10);

}  // namespace roblip

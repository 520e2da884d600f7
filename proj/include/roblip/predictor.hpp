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
#include <span>
#include <utility>
#include <vector>

namespace roblip {

class PiecewiseLinear1D;

/// A function R^d -> R^C. Lipschitz metadata is exact for analytic forms and
/// absent for trained networks.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_count() const = 0;
  virtual void evaluate(std::span<const double> x, std::span<double> out) const = 0;
  virtual std::optional<double> lipschitz_bound() const { return std::nullopt; }

  /// Gradient of output `output` at x. The default uses central differences.
  virtual void gradient(std::span<const double> x, std::size_t output, std::span<double> grad) const;

  virtual const PiecewiseLinear1D* as_piecewise_linear() const { return nullptr; }

  double value(std::span<const double> x, std::size_t output = 0) const;
};

/// Continuous piecewise-linear map R -> R given by its values at strictly
/// increasing breakpoints plus a slope for each unbounded end.
class PiecewiseLinear1D final : public Predictor {
 public:
  PiecewiseLinear1D(std::vector<double> breakpoints, std::vector<double> values,
                    double left_slope = 0.0, double right_slope = 0.0);

  static PiecewiseLinear1D constant(double c);
  static PiecewiseLinear1D linear(double slope, double intercept = 0.0);

  double operator()(double t) const;

  std::size_t input_dim() const override { return 1; }
  std::size_t output_count() const override { return 1; }
  void evaluate(std::span<const double> x, std::span<double> out) const override;
  std::optional<double> lipschitz_bound() const override { return lipschitz_; }
  void gradient(std::span<const double> x, std::size_t output, std::span<double> grad) const override;
  const PiecewiseLinear1D* as_piecewise_linear() const override { return this; }

  /// Largest absolute segment slope, ends included.
  double lipschitz() const noexcept { return lipschitz_; }
  const std::vector<double>& breakpoints() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double left_slope() const noexcept { return left_slope_; }
  double right_slope() const noexcept { return right_slope_; }

  /// Exact infimum and supremum over the real line (may be infinite).
  std::pair<double, double> range() const;

  /// max(lo, min(hi, f)). Crossing points become breakpoints so the result is
  /// again piecewise linear; its Lipschitz constant is recomputed.
  PiecewiseLinear1D clamped(double lo, double hi) const;

  /// Exact min and max of f over the closed interval [a, b].
  std::pair<double, double> extrema_on(double a, double b) const;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  double left_slope_;
  double right_slope_;
  double lipschitz_ = 0.0;
};

/// f(x) = c on R^d.
class ConstantPredictor final : public Predictor {
 public:
  ConstantPredictor(std::size_t dim, double c) : dim_(dim), c_(c) {}
  std::size_t input_dim() const override { return dim_; }
  std::size_t output_count() const override { return 1; }
  void evaluate(std::span<const double>, std::span<double> out) const override { out[0] = c_; }
  std::optional<double> lipschitz_bound() const override { return 0.0; }
  void gradient(std::span<const double>, std::size_t, std::span<double> grad) const override;

 private:
  std::size_t dim_;
  double c_;
};

/// f(x) = <w, x> + b, Lipschitz constant ||w||_2.
class LinearPredictor final : public Predictor {
 public:
  explicit LinearPredictor(std::vector<double> weights, double bias = 0.0);
  std::size_t input_dim() const override { return w_.size(); }
  std::size_t output_count() const override { return 1; }
  void evaluate(std::span<const double> x, std::span<double> out) const override;
  std::optional<double> lipschitz_bound() const override { return norm_; }
  void gradient(std::span<const double> x, std::size_t output, std::span<double> grad) const override;

 private:
  std::vector<double> w_;
  double b_;
  double norm_;
};

}  // namespace roblip

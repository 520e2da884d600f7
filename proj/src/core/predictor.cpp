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

#include "roblip/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roblip/error.hpp"

namespace roblip {

void Predictor::gradient(std::span<const double> x, std::size_t output, std::span<double> grad) const {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> out(output_count());
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double h = 1e-6 * std::max(1.0, std::fabs(x[k]));
    probe[k] = x[k] + h;
    evaluate(probe, out);
    const double up = out[output];
    probe[k] = x[k] - h;
    evaluate(probe, out);
    grad[k] = (up - out[output]) / (2.0 * h);
    probe[k] = x[k];
  }
}

double Predictor::value(std::span<const double> x, std::size_t output) const {
  if (x.size() != input_dim()) throw DimensionError("Predictor: input dimension mismatch");
  if (output >= output_count()) throw DimensionError("Predictor: output index out of range");
  std::vector<double> out(output_count());
  evaluate(x, out);
  return out[output];
}

PiecewiseLinear1D::PiecewiseLinear1D(std::vector<double> breakpoints, std::vector<double> values,
                                     double left_slope, double right_slope)
    : knots_(std::move(breakpoints)),
      values_(std::move(values)),
      left_slope_(left_slope),
      right_slope_(right_slope) {
  if (knots_.empty()) throw InvalidArgument("PiecewiseLinear1D: needs at least one breakpoint");
  if (knots_.size() != values_.size())
    throw DimensionError("PiecewiseLinear1D: breakpoint and value counts differ");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i]))
      throw InvalidArgument("PiecewiseLinear1D: non-finite breakpoint or value");
    if (i > 0 && !(knots_[i] > knots_[i - 1]))
      throw InvalidArgument("PiecewiseLinear1D: breakpoints must be strictly increasing");
  }
  lipschitz_ = std::max(std::fabs(left_slope_), std::fabs(right_slope_));
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
    lipschitz_ = std::max(lipschitz_, std::fabs((values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i])));
}

PiecewiseLinear1D PiecewiseLinear1D::constant(double c) { return PiecewiseLinear1D({0.0}, {c}, 0.0, 0.0); }

PiecewiseLinear1D PiecewiseLinear1D::linear(double slope, double intercept) {
  return PiecewiseLinear1D({0.0}, {intercept}, slope, slope);
}

double PiecewiseLinear1D::operator()(double t) const {
  if (t <= knots_.front()) return values_.front() + left_slope_ * (t - knots_.front());
  if (t >= knots_.back()) return values_.back() + right_slope_ * (t - knots_.back());
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double w = (t - knots_[k]) / (knots_[k + 1] - knots_[k]);
  return values_[k] + (values_[k + 1] - values_[k]) * w;
}

void PiecewiseLinear1D::evaluate(std::span<const double> x, std::span<double> out) const {
  out[0] = (*this)(x[0]);
}

void PiecewiseLinear1D::gradient(std::span<const double> x, std::size_t, std::span<double> grad) const {
  const double t = x[0];
  if (t < knots_.front()) {
    grad[0] = left_slope_;
  } else if (t >= knots_.back()) {
    grad[0] = right_slope_;
  } else {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    grad[0] = (values_[k + 1] - values_[k]) / (knots_[k + 1] - knots_[k]);
  }
}

std::pair<double, double> PiecewiseLinear1D::range() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double lo = *std::min_element(values_.begin(), values_.end());
  double hi = *std::max_element(values_.begin(), values_.end());
  if (left_slope_ > 0.0) lo = -inf;
  if (left_slope_ < 0.0) hi = inf;
  if (right_slope_ > 0.0) hi = inf;
  if (right_slope_ < 0.0) lo = -inf;
  return {lo, hi};
}

PiecewiseLinear1D PiecewiseLinear1D::clamped(double lo, double hi) const {
  if (!(lo <= hi)) throw InvalidArgument("PiecewiseLinear1D::clamped: lo > hi");
  std::vector<double> knots = knots_;
  auto add_crossings = [&](double t0, double v0, double slope, double t_lo, double t_hi) {
    if (slope == 0.0) return;
    for (double level : {lo, hi}) {
      const double t = t0 + (level - v0) / slope;
      if (t > t_lo && t < t_hi) knots.push_back(t);
    }
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  add_crossings(knots_.front(), values_.front(), left_slope_, -inf, knots_.front());
  add_crossings(knots_.back(), values_.back(), right_slope_, knots_.back(), inf);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double slope = (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
    add_crossings(knots_[i], values_[i], slope, knots_[i], knots_[i + 1]);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::vector<double> values;
  values.reserve(knots.size());
  for (double t : knots) values.push_back(std::clamp((*this)(t), lo, hi));
  // Any non-flat end eventually leaves [lo, hi] and is flat after clamping;
  // the crossing point was added above.
  return PiecewiseLinear1D(std::move(knots), std::move(values), 0.0, 0.0);
}

std::pair<double, double> PiecewiseLinear1D::extrema_on(double a, double b) const {
  if (a > b) std::swap(a, b);
  double lo = std::min((*this)(a), (*this)(b));
  double hi = std::max((*this)(a), (*this)(b));
  auto first = std::upper_bound(knots_.begin(), knots_.end(), a);
  for (auto it = first; it != knots_.end() && *it < b; ++it) {
    const double v = values_[static_cast<std::size_t>(it - knots_.begin())];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

void ConstantPredictor::gradient(std::span<const double>, std::size_t, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
}

LinearPredictor::LinearPredictor(std::vector<double> weights, double bias) : w_(std::move(weights)), b_(bias) {
  if (w_.empty()) throw InvalidArgument("LinearPredictor: empty weight vector");
  double ss = 0.0;
  for (double v : w_) ss += v * v;
  norm_ = std::sqrt(ss);
}

void LinearPredictor::evaluate(std::span<const double> x, std::span<double> out) const {
  double s = b_;
  for (std::size_t i = 0; i < w_.size(); ++i) s += w_[i] * x[i];
  out[0] = s;
}

void LinearPredictor::gradient(std::span<const double>, std::size_t, std::span<double> grad) const {
  std::copy(w_.begin(), w_.end(), grad.begin());
}

}  // namespace roblip

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

#include "roblip/robust_loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roblip/error.hpp"
#include "roblip/rng.hpp"

namespace roblip {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Random point in the l2 ball of radius rho (on the sphere when `surface`).
void random_in_ball(Rng& rng, double rho, bool surface, std::span<double> out) {
  double nrm = 0.0;
  do {
    for (auto& v : out) v = rng.normal();
    nrm = norm2(out);
  } while (nrm == 0.0);
  const double d = static_cast<double>(out.size());
  const double r = surface ? rho : rho * std::pow(rng.uniform(), 1.0 / d);
  for (auto& v : out) v *= r / nrm;
}

void project_to_ball(std::span<double> delta, double rho) {
  const double nrm = norm2(delta);
  if (nrm > rho) {
    for (auto& v : delta) v *= rho / nrm;
  }
}

Envelope envelope_grid(const Predictor& f, std::span<const double> x, const RobustnessConfig& cfg) {
  const std::size_t d = x.size();
  Envelope env;
  env.method = SupMethod::grid;
  env.lower = env.upper = f.value(x, cfg.output);
  std::vector<double> z(x.begin(), x.end());
  auto visit = [&] {
    const double v = f.value(z, cfg.output);
    env.lower = std::min(env.lower, v);
    env.upper = std::max(env.upper, v);
  };
  if (d == 1) {
    const std::size_t m = std::max<std::size_t>(cfg.grid_points, 2);
    for (std::size_t k = 0; k < m; ++k) {
      z[0] = x[0] - cfg.rho + 2.0 * cfg.rho * static_cast<double>(k) / static_cast<double>(m - 1);
      visit();
    }
    return env;
  }
  Rng rng(cfg.seed);
  std::vector<double> delta(d);
  for (std::size_t k = 0; k < cfg.grid_points; ++k) {
    random_in_ball(rng, cfg.rho, k % 2 == 0, delta);
    for (std::size_t i = 0; i < d; ++i) z[i] = x[i] + delta[i];
    visit();
  }
  return env;
}

// Best value of direction * f over normalized-gradient ascent iterates.
double ascend(const Predictor& f, std::span<const double> x, const RobustnessConfig& cfg, double direction) {
  const std::size_t d = x.size();
  const double step = cfg.step_size > 0.0 ? cfg.step_size : cfg.rho / 10.0;
  Rng rng(stream_seed({cfg.seed, direction > 0 ? 1ULL : 2ULL}));
  std::vector<double> delta(d), z(d), grad(d);
  double best = direction * f.value(x, cfg.output);
  for (int r = 0; r < cfg.restarts; ++r) {
    if (r == 0)
      std::fill(delta.begin(), delta.end(), 0.0);
    else
      random_in_ball(rng, cfg.rho, false, delta);
    for (int t = 0; t <= cfg.ascent_steps; ++t) {
      for (std::size_t i = 0; i < d; ++i) z[i] = x[i] + delta[i];
      best = std::max(best, direction * f.value(z, cfg.output));
      if (t == cfg.ascent_steps) break;
      f.gradient(z, cfg.output, grad);
      const double g = norm2(grad);
      if (!(g > 0.0) || !std::isfinite(g)) break;
      for (std::size_t i = 0; i < d; ++i) delta[i] += direction * step * grad[i] / g;
      project_to_ball(delta, cfg.rho);
    }
  }
  return best;
}

}  // namespace

void RobustnessConfig::validate() const {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InvalidArgument("RobustnessConfig: rho must be >= 0");
  if (method == SupMethod::projected_ascent && (ascent_steps <= 0 || restarts <= 0 || step_size < 0.0))
    throw InvalidArgument("RobustnessConfig: ascent steps, restarts and step size must be positive");
  if (method == SupMethod::grid && grid_points == 0)
    throw InvalidArgument("RobustnessConfig: grid needs at least one point");
}

void SampleSet::validate_regression() const {
  if (samples.empty()) throw InvalidArgument("SampleSet: needs at least one sample");
  const std::size_t d = samples.front().x.size();
  for (const auto& s : samples) {
    if (s.x.size() != d) throw DimensionError("SampleSet: samples differ in input dimension");
    if (!(s.y >= -1.0 && s.y <= 1.0)) throw InvalidArgument("SampleSet: regression labels must lie in [-1, 1]");
  }
}

Envelope envelope(const Predictor& f, std::span<const double> x, const RobustnessConfig& cfg) {
  cfg.validate();
  if (x.size() != f.input_dim()) throw DimensionError("envelope: input dimension mismatch");
  if (cfg.output >= f.output_count()) throw DimensionError("envelope: output index out of range");

  switch (cfg.method) {
    case SupMethod::exact_pwl: {
      const PiecewiseLinear1D* pwl = f.as_piecewise_linear();
      if (pwl == nullptr)
        throw Unsupported("envelope: exact_pwl requires a one-dimensional piecewise-linear predictor");
      const auto [lo, hi] = pwl->extrema_on(x[0] - cfg.rho, x[0] + cfg.rho);
      return Envelope{lo, hi, SupMethod::exact_pwl, true};
    }
    case SupMethod::grid:
      return envelope_grid(f, x, cfg);
    case SupMethod::projected_ascent: {
      Envelope env;
      env.method = SupMethod::projected_ascent;
      if (cfg.rho == 0.0) {
        env.lower = env.upper = f.value(x, cfg.output);
        return env;
      }
      env.upper = ascend(f, x, cfg, 1.0);
      env.lower = -ascend(f, x, cfg, -1.0);
      return env;
    }
  }
  throw InvalidArgument("envelope: unknown method");
}

double robust_sq_loss(const Predictor& f, const LabeledSample& s, const RobustnessConfig& cfg) {
  const Envelope env = envelope(f, s.x, cfg);
  const double up = env.upper - s.y, lo = env.lower - s.y;
  return std::max(up * up, lo * lo);
}

double clean_sq_loss(const Predictor& f, const LabeledSample& s, std::size_t output) {
  const double r = f.value(s.x, output) - s.y;
  return r * r;
}

VectorSet loss_vectors(const std::vector<const Predictor*>& fs, const SampleSet& s,
                       const RobustnessConfig& cfg, LossKind kind) {
  if (fs.empty()) throw InvalidArgument("loss_vectors: needs at least one predictor");
  if (s.size() == 0) throw InvalidArgument("loss_vectors: empty sample");
  const std::size_t d = fs.front()->input_dim();
  for (const Predictor* f : fs)
    if (f->input_dim() != d) throw DimensionError("loss_vectors: predictors differ in input dimension");
  for (const auto& smp : s.samples)
    if (smp.x.size() != d) throw DimensionError("loss_vectors: sample dimension does not match predictors");

  std::vector<double> flat;
  flat.reserve(fs.size() * s.size());
  for (const Predictor* f : fs) {
    for (const auto& smp : s.samples) {
      switch (kind) {
        case LossKind::eval: flat.push_back(f->value(smp.x, cfg.output)); break;
        case LossKind::clean: flat.push_back(clean_sq_loss(*f, smp, cfg.output)); break;
        case LossKind::robust: flat.push_back(robust_sq_loss(*f, smp, cfg)); break;
      }
    }
  }
  return VectorSet(s.size(), std::move(flat));
}

std::vector<InequalityCheck> verify_loss_complexity_chain(const std::vector<PiecewiseLinear1D>& fs,
                                                          const SampleSet& s, double rho, double slack) {
  if (fs.empty()) throw InvalidArgument("verify_loss_complexity_chain: empty predictor class");
  s.validate_regression();
  if (s.dim() != 1) throw DimensionError("verify_loss_complexity_chain: samples must be one-dimensional");
  for (const auto& f : fs) {
    const auto [lo, hi] = f.range();
    if (lo < -1.0 || hi > 1.0)
      throw InvalidArgument("verify_loss_complexity_chain: predictor range leaves [-1, 1]");
  }

  RobustnessConfig cfg;
  cfg.rho = rho;
  cfg.method = SupMethod::exact_pwl;
  const std::size_t n = s.size();

  // Rows of F o S for F = F0 + {f^+} + {f^-}, and the robust losses of F0.
  std::vector<double> eval_rows, robust_rows;
  eval_rows.reserve(3 * fs.size() * n);
  std::vector<double> upper_rows, lower_rows;
  for (const auto& f : fs) {
    for (const auto& smp : s.samples) {
      const Envelope env = envelope(f, smp.x, cfg);
      eval_rows.push_back(f(smp.x[0]));
      upper_rows.push_back(env.upper);
      lower_rows.push_back(env.lower);
      const double up = env.upper - smp.y, lo = env.lower - smp.y;
      robust_rows.push_back(std::max(up * up, lo * lo));
    }
  }
  eval_rows.insert(eval_rows.end(), upper_rows.begin(), upper_rows.end());
  eval_rows.insert(eval_rows.end(), lower_rows.begin(), lower_rows.end());

  std::vector<double> clean_rows(eval_rows.size());
  for (std::size_t k = 0; k < eval_rows.size(); ++k) {
    const double r = eval_rows[k] - s.samples[k % n].y;
    clean_rows[k] = r * r;
  }

  const double r_robust = rad_exact(VectorSet(n, std::move(robust_rows))).value;
  const double r_clean = rad_exact(VectorSet(n, std::move(clean_rows))).value;
  const double r_eval = rad_exact(VectorSet(n, std::move(eval_rows))).value;

  return {
      InequalityCheck::at_most("robust_vs_clean_2x", r_robust, 2.0 * r_clean, slack),
      InequalityCheck::at_most("clean_vs_eval_4x", r_clean, 4.0 * r_eval, slack),
      InequalityCheck::at_most("robust_vs_eval_8x", r_robust, 8.0 * r_eval, slack),
  };
}

EnvelopeLipschitzReport envelope_lipschitz_check(const PiecewiseLinear1D& f, double rho,
                                                 const std::vector<std::pair<double, double>>& probes,
                                                 double slack) {
  RobustnessConfig cfg;
  cfg.rho = rho;
  cfg.method = SupMethod::exact_pwl;
  EnvelopeLipschitzReport rep;
  rep.lipschitz = f.lipschitz();
  bool first = true;
  for (const auto& [u, v] : probes) {
    const Envelope eu = envelope(f, std::span<const double>(&u, 1), cfg);
    const Envelope ev = envelope(f, std::span<const double>(&v, 1), cfg);
    const double dist = std::fabs(u - v);
    const double du = std::fabs(eu.upper - ev.upper);
    const double dl = std::fabs(eu.lower - ev.lower);
    if (dist > 0.0) {
      rep.max_upper_slope = std::max(rep.max_upper_slope, du / dist);
      rep.max_lower_slope = std::max(rep.max_lower_slope, dl / dist);
    }
    const double allowance = rep.lipschitz * dist;
    if (du - allowance > rep.worst_upper_change - rep.worst_upper_allowance || first) {
      rep.worst_upper_change = du;
      rep.worst_upper_allowance = allowance;
    }
    if (dl - allowance > rep.worst_lower_change - rep.worst_lower_allowance || first) {
      rep.worst_lower_change = dl;
      rep.worst_lower_allowance = allowance;
    }
    first = false;
    const double bound = allowance + slack;
    if (du > bound) ++rep.violations;
    if (dl > bound) ++rep.violations;
  }
  rep.passed = rep.violations == 0;
  return rep;
}

}  // namespace roblip

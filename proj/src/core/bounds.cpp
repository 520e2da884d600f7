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

#include "roblip/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "roblip/error.hpp"
#include "roblip/rademacher.hpp"
#include "roblip/rng.hpp"

namespace roblip {

namespace {

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be a finite value >= 0");
}

void require_confidence(double delta_conf) {
  if (!(delta_conf > 0.0 && delta_conf < 1.0)) throw InvalidArgument("delta_conf must lie strictly in (0, 1)");
}

double concentration_term(std::size_t n, double delta_conf) {
  if (n == 0) throw InvalidArgument("n must be positive");
  require_confidence(delta_conf);
  return std::sqrt(2.0 * std::log(2.0 / delta_conf) / static_cast<double>(n));
}

}  // namespace

void BoundInputs::validate() const {
  require_nonnegative(lipschitz, "lipschitz");
  require_nonnegative(rho, "rho");
  require_nonnegative(sigma, "sigma");
  require_nonnegative(epsilon, "epsilon");
  require_confidence(delta_conf);
  if (n == 0) throw InvalidArgument("n must be positive");
}

double gap_bound(double lipschitz, double rho, double clean_risk) {
  require_nonnegative(lipschitz, "lipschitz");
  require_nonnegative(rho, "rho");
  require_nonnegative(clean_risk, "clean risk");
  const double lr = lipschitz * rho;
  return 2.0 * lr * std::sqrt(clean_risk) + lr * lr;
}

double a_rho(double lipschitz, double rho) {
  require_nonnegative(lipschitz, "lipschitz");
  require_nonnegative(rho, "rho");
  const double b = 2.0 + lipschitz * rho;
  return b * b;
}

double gen_bound_rhs(double expected_rad, double lipschitz, double rho, std::size_t n, double delta_conf) {
  require_nonnegative(expected_rad, "expected Rademacher complexity");
  return 2.0 * expected_rad + a_rho(lipschitz, rho) * concentration_term(n, delta_conf);
}

LowerBound rad_lower_bound(double gamma, double lipschitz, double rho, std::size_t n, double delta_conf) {
  const double v = gamma / 2.0 - a_rho(lipschitz, rho) / 2.0 * concentration_term(n, delta_conf);
  return {v, v <= 0.0};
}

LowerBound rad_lower_bound_overfit(double epsilon, double lipschitz, double rho, double sigma,
                                   std::size_t n, double delta_conf) {
  require_nonnegative(sigma, "sigma");
  const double lr = lipschitz * rho;
  return rad_lower_bound(epsilon - (2.0 * lr * sigma + lr * lr), lipschitz, rho, n, delta_conf);
}

TheoreticalScaling theoretical_L(ScalingLaw law, double n, double p, double d) {
  if (!(n > 0.0 && p > 0.0 && d > 0.0)) throw InvalidArgument("theoretical_L: n, p and d must be positive");
  switch (law) {
    case ScalingLaw::bubeck: return {std::sqrt(n * d / p), 0.5, -0.5};
    case ScalingLaw::wu: return {std::pow(n, 1.0 / d), 1.0 / d, 0.0};
  }
  throw InvalidArgument("theoretical_L: unknown law");
}

LossReport loss_report(const Predictor& f, const SampleSet& train, const RobustnessConfig& cfg,
                       const SampleSet* test) {
  if (train.size() == 0) throw InvalidArgument("loss_report: empty training sample");
  LossReport rep;
  rep.n = train.size();
  rep.robust_exact = cfg.method == SupMethod::exact_pwl;
  const double n = static_cast<double>(train.size());
  for (const auto& s : train.samples) {
    const double r = f.value(s.x, cfg.output) - s.y;
    rep.clean_train += r * r / n;
    rep.residual_abs_mean += std::fabs(r) / n;
    rep.robust_train += robust_sq_loss(f, s, cfg) / n;
  }
  if (test != nullptr && test->size() > 0) {
    double t = 0.0;
    for (const auto& s : test->samples) t += robust_sq_loss(f, s, cfg);
    rep.robust_test = t / static_cast<double>(test->size());
  }
  return rep;
}

GapCheck check_gap_bound(const Predictor& f, const SampleSet& s, const RobustnessConfig& cfg,
                         std::optional<double> lipschitz, double slack) {
  const std::optional<double> l = lipschitz ? lipschitz : f.lipschitz_bound();
  if (!l) throw InvalidArgument("check_gap_bound: Lipschitz metadata missing");
  // Any pair of sample inputs is a probe of the declared constant.
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < s.samples[i].x.size(); ++k) {
        const double diff = s.samples[i].x[k] - s.samples[j].x[k];
        dist += diff * diff;
      }
      dist = std::sqrt(dist);
      if (dist == 0.0) continue;
      const double slope =
          std::fabs(f.value(s.samples[i].x, cfg.output) - f.value(s.samples[j].x, cfg.output)) / dist;
      if (slope > *l * (1.0 + 1e-9) + 1e-12)
        throw InvalidArgument("check_gap_bound: sample pair witnesses a slope above the declared Lipschitz constant");
    }
  }
  GapCheck out;
  out.losses = loss_report(f, s, cfg);
  out.check = InequalityCheck::at_most("robust_clean_gap", out.losses.robust_train - out.losses.clean_train,
                                       gap_bound(*l, cfg.rho, out.losses.clean_train), slack);
  return out;
}

GeneralizationCheckReport finite_class_generalization_check(const std::vector<PiecewiseLinear1D>& fs,
                                                            const FiniteDistribution& dist, std::size_t n,
                                                            double rho, double delta_conf,
                                                            std::size_t trials, std::uint64_t seed) {
  const std::size_t m = dist.atoms.size();
  if (fs.empty() || m == 0 || n == 0 || trials == 0)
    throw InvalidArgument("finite_class_generalization_check: empty class, domain, sample or trial count");
  if (dist.probabilities.size() != m) throw DimensionError("finite_class_generalization_check: probability count");
  if (n > kExactRadCutoff) throw CutoffExceeded("finite_class_generalization_check: n above exact cutoff");
  SampleSet domain{dist.atoms};
  domain.validate_regression();

  RobustnessConfig cfg;
  cfg.rho = rho;
  cfg.method = SupMethod::exact_pwl;

  double lipschitz = 0.0;
  std::vector<std::vector<double>> loss(fs.size(), std::vector<double>(m));
  std::vector<double> risk(fs.size(), 0.0);
  for (std::size_t f = 0; f < fs.size(); ++f) {
    const auto [lo, hi] = fs[f].range();
    if (lo < -1.0 || hi > 1.0) throw InvalidArgument("finite_class_generalization_check: predictor range leaves [-1, 1]");
    lipschitz = std::max(lipschitz, fs[f].lipschitz());
    for (std::size_t a = 0; a < m; ++a) {
      loss[f][a] = robust_sq_loss(fs[f], dist.atoms[a], cfg);
      risk[f] += dist.probabilities[a] * loss[f][a];
    }
  }

  // E over S' ~ D^n: R is invariant under permuting the sample, so enumerate
  // multisets (atom counts) with multinomial weights.
  std::vector<std::size_t> counts(m, 0);
  double expected = 0.0;
  std::vector<double> log_fact(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));
  std::function<void(std::size_t, std::size_t)> enumerate = [&](std::size_t atom, std::size_t left) {
    if (atom + 1 == m) {
      counts[atom] = left;
      double log_w = log_fact[n];
      for (std::size_t a = 0; a < m; ++a) {
        if (counts[a] == 0) continue;
        if (dist.probabilities[a] == 0.0) return;
        log_w += static_cast<double>(counts[a]) * std::log(dist.probabilities[a]) - log_fact[counts[a]];
      }
      std::vector<double> flat;
      flat.reserve(fs.size() * n);
      for (std::size_t f = 0; f < fs.size(); ++f)
        for (std::size_t a = 0; a < m; ++a) flat.insert(flat.end(), counts[a], loss[f][a]);
      expected += std::exp(log_w) * rad_exact(VectorSet(n, std::move(flat))).value;
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[atom] = c;
      enumerate(atom + 1, left - c);
    }
  };
  enumerate(0, n);

  GeneralizationCheckReport rep;
  rep.trials = trials;
  rep.expected_rad = expected;
  rep.rhs = gen_bound_rhs(expected, lipschitz, rho, n, delta_conf);
  rep.max_gap = -std::numeric_limits<double>::infinity();

  std::vector<double> cdf(m);
  double acc = 0.0;
  for (std::size_t a = 0; a < m; ++a) cdf[a] = (acc += dist.probabilities[a]);
  Rng rng(seed);
  std::vector<std::size_t> draw(n);
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& a : draw) {
      const double u = rng.uniform() * acc;
      a = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      a = std::min(a, m - 1);
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < fs.size(); ++f) {
      double r = 0.0;
      for (std::size_t a : draw) r += loss[f][a];
      worst = std::max(worst, risk[f] - r / static_cast<double>(n));
    }
    rep.max_gap = std::max(rep.max_gap, worst);
    if (worst <= rep.rhs) ++rep.held;
  }
  rep.frequency = static_cast<double>(rep.held) / static_cast<double>(trials);
  return rep;
}

}  // namespace roblip

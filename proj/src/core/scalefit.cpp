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

#include "roblip/scalefit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "roblip/bounds.hpp"
#include "roblip/error.hpp"

namespace roblip {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Slope of ordinary least squares of y on x with intercept.
double simple_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / m;
    my += y[i] / m;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

struct Summary {
  double mean = kNaN, std_error = kNaN, lo = kNaN, hi = kNaN, p_value = kNaN;
};

Summary summarize(const std::vector<SliceEstimate>& slices) {
  Summary s;
  if (slices.empty()) return s;
  const double k = static_cast<double>(slices.size());
  s.mean = 0.0;
  for (const auto& e : slices) s.mean += e.exponent / k;
  if (slices.size() < 2) return s;
  double ss = 0.0;
  for (const auto& e : slices) ss += (e.exponent - s.mean) * (e.exponent - s.mean);
  s.std_error = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
  const std::size_t dof = slices.size() - 1;
  const double half = t_quantile_975(dof) * s.std_error;
  s.lo = s.mean - half;
  s.hi = s.mean + half;
  s.p_value = s.std_error > 0.0 ? t_two_sided_p(s.mean / s.std_error, dof) : (s.mean == 0.0 ? 1.0 : 0.0);
  return s;
}

// Slices keyed by `fixed`, slope of ln L against ln of the varying coordinate.
std::vector<SliceEstimate> slice_slopes(const std::vector<ScalingRecord>& records, bool fix_p,
                                        std::vector<std::string>& log) {
  std::map<std::size_t, std::vector<const ScalingRecord*>> groups;
  for (const auto& r : records) groups[fix_p ? r.p : r.n].push_back(&r);
  std::vector<SliceEstimate> out;
  for (const auto& [key, members] : groups) {
    std::vector<double> x, y;
    std::set<std::size_t> distinct;
    for (const ScalingRecord* r : members) {
      const std::size_t v = fix_p ? r->n : r->p;
      distinct.insert(v);
      x.push_back(std::log(static_cast<double>(v)));
      y.push_back(std::log(r->L_emp));
    }
    if (distinct.size() < 2) {
      log.push_back(std::string(fix_p ? "alpha" : "beta") + " slice " + (fix_p ? "p=" : "n=") +
                    std::to_string(key) + " excluded: fewer than two distinct " + (fix_p ? "n" : "p") +
                    " values");
      continue;
    }
    out.push_back({key, simple_slope(x, y), members.size()});
  }
  return out;
}

void require_positive(const std::vector<ScalingRecord>& records) {
  for (const auto& r : records)
    if (!(r.L_emp > 0.0) || !std::isfinite(r.L_emp) || r.n == 0 || r.p == 0)
      throw InvalidArgument("scaling fit: records need L_emp > 0 and n, p >= 1 (filter zeros first)");
}

}  // namespace

double t_quantile_975(std::size_t dof) {
  if (dof == 0) return kNaN;
  return boost::math::quantile(boost::math::students_t(static_cast<double>(dof)), 0.975);
}

double t_two_sided_p(double t, std::size_t dof) {
  if (dof == 0 || std::isnan(t)) return kNaN;
  if (std::isinf(t)) return 0.0;
  return 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(static_cast<double>(dof)), std::fabs(t)));
}

SliceFit fit_slices(const std::vector<ScalingRecord>& records) {
  require_positive(records);
  SliceFit out;
  out.alpha_slices = slice_slopes(records, true, out.log);
  out.beta_slices = slice_slopes(records, false, out.log);
  if (out.alpha_slices.empty() && out.beta_slices.empty())
    throw InsufficientData("fit_slices: no slice has two distinct values of its varying coordinate");

  FitResult& f = out.fit;
  f.method = FitMethod::slices;
  f.n_points = records.size();
  const Summary a = summarize(out.alpha_slices);
  const Summary b = summarize(out.beta_slices);
  f.alpha_available = !out.alpha_slices.empty();
  f.beta_available = !out.beta_slices.empty();
  f.alpha = a.mean;
  f.beta = b.mean;
  f.stderr_alpha = a.std_error;
  f.stderr_beta = b.std_error;
  f.ci95_alpha = {a.lo, a.hi};
  f.ci95_beta = {b.lo, b.hi};
  f.p_value_alpha = a.p_value;
  f.p_value_beta = b.p_value;
  f.log_c = kNaN;
  if (!f.alpha_available) out.log.push_back("alpha unavailable: no valid fixed-p slice");
  if (!f.beta_available) out.log.push_back("beta unavailable: no valid fixed-n slice");
  return out;
}

OlsSolution ols_qr(const std::vector<double>& design, std::size_t k, const std::vector<double>& y) {
  const std::size_t m = y.size();
  if (k == 0 || design.size() != m * k) throw DimensionError("ols_qr: design shape mismatch");
  if (m <= k) throw InsufficientData("ols_qr: needs more rows than columns");

  // Column-major working copy; Householder reflections applied to A and y.
  std::vector<double> a(m * k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) a[j * m + i] = design[i * k + j];
  std::vector<double> qty = y;
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::fabs(v));

  for (std::size_t j = 0; j < k; ++j) {
    double* col = a.data() + j * m;
    double norm = 0.0;
    for (std::size_t i = j; i < m; ++i) norm += col[i] * col[i];
    norm = std::sqrt(norm);
    if (norm <= 1e-12 * std::max(scale, 1.0) * std::sqrt(static_cast<double>(m)))
      throw RankDeficient("ols_qr: design matrix is rank deficient");
    const double alpha = col[j] > 0.0 ? -norm : norm;
    std::vector<double> v(col + j, col + m);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double e : v) vnorm2 += e * e;
    auto reflect = [&](double* target) {
      double dot = 0.0;
      for (std::size_t i = j; i < m; ++i) dot += v[i - j] * target[i];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < m; ++i) target[i] -= f * v[i - j];
    };
    for (std::size_t c = j; c < k; ++c) reflect(a.data() + c * m);
    reflect(qty.data());
  }
  for (std::size_t j = 0; j < k; ++j)
    if (std::fabs(a[j * m + j]) <= 1e-10 * std::max(scale, 1.0))
      throw RankDeficient("ols_qr: design matrix is rank deficient");

  auto r = [&](std::size_t i, std::size_t j) { return a[j * m + i]; };
  OlsSolution sol;
  sol.coef.assign(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double s = qty[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= r(i, j) * sol.coef[j];
    sol.coef[i] = s / r(i, i);
  }
  for (std::size_t i = k; i < m; ++i) sol.rss += qty[i] * qty[i];
  double my = 0.0;
  for (double v : y) my += v / static_cast<double>(m);
  for (double v : y) sol.tss += (v - my) * (v - my);
  sol.dof = m - k;

  // R^-1 (upper triangular), then diag(R^-1 R^-T) = squared row norms of R^-1.
  std::vector<double> rinv(k * k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    rinv[c * k + c] = 1.0 / r(c, c);
    for (std::size_t i = c; i-- > 0;) {
      double s = 0.0;
      for (std::size_t j = i + 1; j <= c; ++j) s += r(i, j) * rinv[j * k + c];
      rinv[i * k + c] = -s / r(i, i);
    }
  }
  const double sigma2 = sol.rss / static_cast<double>(sol.dof);
  sol.std_error.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (std::size_t j = i; j < k; ++j) s += rinv[i * k + j] * rinv[i * k + j];
    sol.std_error[i] = std::sqrt(sigma2 * s);
  }
  return sol;
}

FitResult fit_joint(const std::vector<ScalingRecord>& records) {
  require_positive(records);
  if (records.size() < 4) throw InsufficientData("fit_joint: needs at least 4 records");
  std::vector<double> design, y;
  for (const auto& r : records) {
    design.insert(design.end(), {1.0, std::log(static_cast<double>(r.n)), std::log(static_cast<double>(r.p))});
    y.push_back(std::log(r.L_emp));
  }
  const OlsSolution sol = ols_qr(design, 3, y);

  FitResult f;
  f.method = FitMethod::joint;
  f.n_points = records.size();
  f.dof = sol.dof;
  f.log_c = sol.coef[0];
  f.alpha = sol.coef[1];
  f.beta = sol.coef[2];
  f.stderr_alpha = sol.std_error[1];
  f.stderr_beta = sol.std_error[2];
  const double t = t_quantile_975(sol.dof);
  f.ci95_alpha = {f.alpha - t * f.stderr_alpha, f.alpha + t * f.stderr_alpha};
  f.ci95_beta = {f.beta - t * f.stderr_beta, f.beta + t * f.stderr_beta};
  auto pval = [&](double coef, double se) {
    return se > 0.0 ? t_two_sided_p(coef / se, sol.dof) : (coef == 0.0 ? 1.0 : 0.0);
  };
  f.p_value_alpha = pval(f.alpha, f.stderr_alpha);
  f.p_value_beta = pval(f.beta, f.stderr_beta);
  f.r_squared = sol.tss > 0.0 ? std::clamp(1.0 - sol.rss / sol.tss, 0.0, 1.0) : 1.0;
  return f;
}

TheoryComparison compare_to_theory(const FitResult& fit, EffectiveDim d) {
  if (d.d == 0) throw InvalidArgument("compare_to_theory: effective dimension must be positive");
  TheoryComparison out;
  out.alpha = fit.alpha;
  out.beta = fit.beta;
  for (auto [law, name] : {std::pair{ScalingLaw::bubeck, "bubeck"}, std::pair{ScalingLaw::wu, "wu"}}) {
    const TheoreticalScaling t = theoretical_L(law, 1.0, 1.0, static_cast<double>(d.d));
    out.laws.push_back({name, t.alpha, t.beta, std::fabs(fit.alpha - t.alpha), std::fabs(fit.beta - t.beta)});
  }
  auto closer = [](double bubeck, double wu) {
    if (std::isnan(bubeck) || std::isnan(wu)) return std::string("unavailable");
    return bubeck < wu ? std::string("bubeck") : wu < bubeck ? std::string("wu") : std::string("tie");
  };
  out.closer_alpha = closer(out.laws[0].alpha_distance, out.laws[1].alpha_distance);
  out.closer_beta = closer(out.laws[0].beta_distance, out.laws[1].beta_distance);
  return out;
}

}  // namespace roblip

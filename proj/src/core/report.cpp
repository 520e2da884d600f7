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

#include "roblip/report.hpp"

#include <cmath>
#include <cstdio>

#include "roblip/error.hpp"

using nlohmann::json;

namespace roblip::report {

namespace {

// NaN and infinities have no JSON literal.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json interval(const Interval& i) { return json::array({num(i.lo), num(i.hi)}); }

}  // namespace

json to_json(const InequalityCheck& c) {
  return {{"name", c.name},   {"lhs", num(c.lhs)},           {"rhs", num(c.rhs)},
          {"slack", c.slack}, {"relation", c.equality ? "==" : "<="}, {"passed", c.passed}};
}

json to_json(const VerifyReport& r, bool details) {
  json suites = json::array();
  for (const auto& s : r.suites) {
    json js = {{"name", s.name}, {"trials", s.trials}, {"violations", s.violations}};
    if (details) {
      json trials = json::array();
      for (const auto& t : s.records) {
        json checks = json::array();
        for (const auto& c : t.checks) checks.push_back(to_json(c));
        trials.push_back({{"trial", t.trial}, {"checks", checks}});
      }
      js["records"] = std::move(trials);
    }
    suites.push_back(std::move(js));
  }
  json by_check = json::object();
  for (const auto& [name, v] : r.violations_by_check()) by_check[name] = v;
  return {{"seed", r.options.seed},
          {"trials", r.options.trials},
          {"max_dim", r.options.max_dim},
          {"max_set_size", r.options.max_set_size},
          {"grid_points", r.options.grid_points},
          {"understate_lipschitz", r.options.understate_lipschitz},
          {"violations", r.violations()},
          {"violations_by_check", by_check},
          {"passed", r.passed()},
          {"seconds", r.seconds},
          {"suites", suites}};
}

json to_json(const LipEstimate& e) {
  json w = json::array();
  for (const auto& [i, j] : e.witness) w.push_back({i, j});
  json pc = json::array();
  for (double v : e.per_class) pc.push_back(num(v));
  return {{"L_emp", num(e.L_emp)}, {"per_class", pc}, {"witness", w}, {"pairs_skipped", e.pairs_skipped}, {"n", e.n}};
}

json to_json(const FitResult& f) {
  json j = {{"method", f.method == FitMethod::joint ? "joint" : "slices"},
            {"n_points", f.n_points},
            {"dof", f.dof},
            {"log_c", num(f.log_c)},
            {"partial", f.partial()}};
  if (f.alpha_available) {
    j["alpha"] = {{"estimate", num(f.alpha)},
                  {"stderr", num(f.stderr_alpha)},
                  {"ci95", interval(f.ci95_alpha)},
                  {"p_value", num(f.p_value_alpha)}};
  } else {
    j["alpha"] = nullptr;
  }
  if (f.beta_available) {
    j["beta"] = {{"estimate", num(f.beta)},
                 {"stderr", num(f.stderr_beta)},
                 {"ci95", interval(f.ci95_beta)},
                 {"p_value", num(f.p_value_beta)}};
  } else {
    j["beta"] = nullptr;
  }
  j["r_squared"] = f.r_squared ? num(*f.r_squared) : json(nullptr);
  return j;
}

json to_json(const SliceFit& s) {
  auto slices = [](const std::vector<SliceEstimate>& v, const char* fixed) {
    json a = json::array();
    for (const auto& e : v) a.push_back({{fixed, e.fixed}, {"exponent", num(e.exponent)}, {"points", e.points}});
    return a;
  };
  return {{"fit", to_json(s.fit)},
          {"alpha_slices", slices(s.alpha_slices, "p")},
          {"beta_slices", slices(s.beta_slices, "n")},
          {"log", s.log}};
}

json to_json(const TheoryComparison& t) {
  json laws = json::array();
  for (const auto& l : t.laws)
    laws.push_back({{"law", l.law},
                    {"alpha", l.alpha},
                    {"beta", l.beta},
                    {"alpha_distance", num(l.alpha_distance)},
                    {"beta_distance", num(l.beta_distance)}});
  return {{"alpha", num(t.alpha)},
          {"beta", num(t.beta)},
          {"laws", laws},
          {"closer_alpha", t.closer_alpha},
          {"closer_beta", t.closer_beta}};
}

json bounds_report(const BoundsRequest& req) {
  const BoundInputs& in = req.inputs;
  in.validate();
  if (!(req.clean_risk >= 0.0)) throw InvalidArgument("bounds: clean risk must be >= 0");
  if (!(req.p >= 1.0) || req.effective_dim < 1) throw InvalidArgument("bounds: p and d must be >= 1");
  const auto lower = rad_lower_bound_overfit(in.epsilon, in.lipschitz, in.rho, in.sigma, in.n, in.delta_conf);
  const double gamma = in.epsilon - (2.0 * in.lipschitz * in.rho * in.sigma + in.lipschitz * in.lipschitz * in.rho * in.rho);
  json laws = json::object();
  for (auto [law, name] : {std::pair{ScalingLaw::bubeck, "bubeck"}, std::pair{ScalingLaw::wu, "wu"}}) {
    const auto t = theoretical_L(law, static_cast<double>(in.n), req.p, static_cast<double>(req.effective_dim));
    laws[name] = {{"value", num(t.value)}, {"alpha", t.alpha}, {"beta", t.beta}};
  }
  json j = {{"inputs",
             {{"lipschitz", in.lipschitz},
              {"rho", in.rho},
              {"sigma", in.sigma},
              {"epsilon", in.epsilon},
              {"delta_conf", in.delta_conf},
              {"n", in.n},
              {"clean_risk", req.clean_risk},
              {"p", req.p},
              {"d", req.effective_dim}}},
            {"gap_bound", num(gap_bound(in.lipschitz, in.rho, req.clean_risk))},
            {"a_rho", num(a_rho(in.lipschitz, in.rho))},
            {"gamma", num(gamma)},
            {"rad_lower_bound", {{"value", num(lower.value)}, {"vacuous", lower.vacuous}}},
            {"theoretical_L", laws}};
  if (req.expected_rad) {
    j["inputs"]["expected_rad"] = *req.expected_rad;
    j["gen_bound_rhs"] = num(gen_bound_rhs(*req.expected_rad, in.lipschitz, in.rho, in.n, in.delta_conf));
  } else {
    j["gen_bound_rhs"] = nullptr;
  }
  return j;
}

FitReport fit_records(const std::vector<ScalingRecord>& records, EffectiveDim d) {
  FitReport r;
  r.filter = filter_zero_estimates(records);
  if (r.filter.all_dropped || r.filter.kept.empty())
    throw InsufficientData("fit: all records dropped by the zero-estimate filter");
  try {
    r.slices = fit_slices(r.filter.kept);
  } catch (const Error& e) {
    r.slices_error = e.what();
  }
  try {
    r.joint = fit_joint(r.filter.kept);
  } catch (const Error& e) {
    r.joint_error = e.what();
  }
  if (r.joint) {
    r.theory = compare_to_theory(*r.joint, d);
  } else if (r.slices && !r.slices->fit.partial()) {
    r.theory = compare_to_theory(r.slices->fit, d);
  }
  if (!r.slices && !r.joint) throw InsufficientData("fit: " + r.joint_error);
  return r;
}

json to_json(const FitReport& r) {
  json dropped = json::array();
  for (const auto& s : r.filter.log) dropped.push_back(s);
  json j = {{"records_kept", r.filter.kept.size()},
            {"records_dropped", r.filter.dropped.size()},
            {"drop_log", dropped}};
  j["slices"] = r.slices ? to_json(*r.slices) : json{{"error", r.slices_error}};
  j["joint"] = r.joint ? to_json(*r.joint) : json{{"error", r.joint_error}};
  j["theory"] = r.theory ? to_json(*r.theory) : json(nullptr);
  return j;
}

std::string text_table(const FitReport& r) {
  std::string out;
  char buf[256];
  auto line = [&](const char* label, const std::optional<FitResult>& f) {
    if (!f) {
      std::snprintf(buf, sizeof buf, "%-8s  (unavailable)\n", label);
      out += buf;
      return;
    }
    auto cell = [&](bool ok, double est, double se, const Interval& ci) {
      char c[96];
      if (!ok) return std::string("           n/a                      ");
      std::snprintf(c, sizeof c, "%9.4f +- %-7.4f [%7.4f, %7.4f]", est, se, ci.lo, ci.hi);
      return std::string(c);
    };
    std::snprintf(buf, sizeof buf, "%-8s  %s  %s  %s\n", label,
                  cell(f->alpha_available, f->alpha, f->stderr_alpha, f->ci95_alpha).c_str(),
                  cell(f->beta_available, f->beta, f->stderr_beta, f->ci95_beta).c_str(),
                  f->r_squared ? std::to_string(*f->r_squared).c_str() : "-");
    out += buf;
  };
  std::snprintf(buf, sizeof buf, "records: %zu kept, %zu dropped\n", r.filter.kept.size(), r.filter.dropped.size());
  out += buf;
  out += "method    alpha (est +- stderr [95% CI])         beta (est +- stderr [95% CI])          R^2\n";
  line("slices", r.slices ? std::optional<FitResult>(r.slices->fit) : std::nullopt);
  line("joint", r.joint);
  if (r.theory) {
    out += "\nlaw       alpha   beta    |d alpha|  |d beta|\n";
    for (const auto& l : r.theory->laws) {
      std::snprintf(buf, sizeof buf, "%-8s  %6.3f  %6.3f  %9.4f  %8.4f\n", l.law.c_str(), l.alpha, l.beta,
                    l.alpha_distance, l.beta_distance);
      out += buf;
    }
    out += "closer in alpha: " + r.theory->closer_alpha + ", closer in beta: " + r.theory->closer_beta + "\n";
  }
  return out;
}

}  // namespace roblip::report

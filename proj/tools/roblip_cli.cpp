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

// roblip command line: verify, run-grid, lipschitz, fit, bounds.
// Talks to the library only through the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "roblip/roblip.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> jobs;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Base seed");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--jobs", c.jobs, "Parallel workers")->check(CLI::PositiveNumber);
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  json j = json::parse(in);
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
  return j;
}

// Usage errors are input problems; everything else from the library is too,
// except verification failures, which callers report themselves.
int library_error(roblip_status s) {
  std::fprintf(stderr, "error: %s: %s\n", roblip_status_string(s), roblip_last_error());
  return kExitUsage;
}

void emit(const std::string& text, const std::string& out_dir, const std::string& file) {
  if (out_dir.empty()) {
    std::cout << text << '\n';
    return;
  }
  fs::create_directories(out_dir);
  const fs::path p = fs::path(out_dir) / file;
  std::ofstream(p) << text << '\n';
  std::fprintf(stderr, "wrote %s\n", p.string().c_str());
}

struct ReportGuard {
  roblip_report* r = nullptr;
  ~ReportGuard() { roblip_report_free(r); }
};

struct VerifyArgs {
  Common common;
  std::optional<std::size_t> trials, max_dim, max_set_size, grid_points;
  bool understate = false;
  bool summary = false;
};

int cmd_verify(const VerifyArgs& a) {
  const json cfg = read_config(a.common.config);
  roblip_verify_options o;
  roblip_verify_options_default(&o);
  o.seed = cfg.value("seed", o.seed);
  o.trials = cfg.value("trials", o.trials);
  o.max_dim = cfg.value("max_dim", o.max_dim);
  o.max_set_size = cfg.value("max_set_size", o.max_set_size);
  o.grid_points = cfg.value("grid_points", o.grid_points);
  if (a.common.seed) o.seed = *a.common.seed;
  if (a.trials) o.trials = *a.trials;
  if (a.max_dim) o.max_dim = *a.max_dim;
  if (a.max_set_size) o.max_set_size = *a.max_set_size;
  if (a.grid_points) o.grid_points = *a.grid_points;
  o.understate_lipschitz = a.understate ? 1 : 0;
  o.include_details = a.summary ? 0 : 1;
  ReportGuard rep;
  if (auto s = roblip_verify(&o, &rep.r); s != ROBLIP_OK) return library_error(s);
  std::fputs(roblip_report_text(rep.r), stderr);
  emit(roblip_report_json(rep.r), a.common.out, "verify_report.json");
  if (!roblip_report_passed(rep.r)) {
    std::fprintf(stderr, "verification FAILED\n");
    return kExitFailed;
  }
  return kExitOk;
}

int cmd_run_grid(const Common& c) {
  if (c.config.empty()) {
    std::fprintf(stderr, "error: run-grid needs --config\n");
    return kExitUsage;
  }
  json cfg = read_config(c.config);
  if (c.seed) cfg["seeds"] = json::array({*c.seed});
  if (!c.out.empty()) cfg["out_dir"] = c.out;
  if (c.jobs) cfg["jobs"] = *c.jobs;
  const std::string base = fs::path(c.config).parent_path().string();
  // out_dir given in the file is relative to the file, a flag to the cwd.
  if (c.out.empty() && cfg.contains("out_dir")) {
    const fs::path od = cfg["out_dir"].get<std::string>();
    if (od.is_relative() && !base.empty()) cfg["out_dir"] = (fs::path(base) / od).string();
  }
  ReportGuard rep;
  auto log = [](const char* line, void*) { std::fprintf(stderr, "%s\n", line); };
  if (auto s = roblip_run_grid(cfg.dump().c_str(), base.c_str(), log, nullptr, &rep.r); s != ROBLIP_OK)
    return library_error(s);
  std::cout << roblip_report_json(rep.r) << '\n';
  return kExitOk;
}

struct LipArgs {
  Common common;
  std::string checkpoint, images, labels;
  std::optional<std::size_t> n;
  bool raw = false;
  double duplicate_threshold = 1e-9;
};

int cmd_lipschitz(const LipArgs& a) {
  const json cfg = read_config(a.common.config);
  const std::string ckpt = a.checkpoint.empty() ? cfg.value("checkpoint", "") : a.checkpoint;
  const std::string images = a.images.empty() ? cfg.value("images", "") : a.images;
  const std::string labels = a.labels.empty() ? cfg.value("labels", "") : a.labels;
  if (ckpt.empty() || images.empty() || labels.empty()) {
    std::fprintf(stderr, "error: lipschitz needs --checkpoint, --images and --labels\n");
    return kExitUsage;
  }
  roblip_model* model = nullptr;
  roblip_dataset* ds = nullptr;
  roblip_dataset* sub = nullptr;
  int rc = kExitOk;
  ReportGuard rep;
  do {
    if (auto s = roblip_model_load(ckpt.c_str(), &model); s != ROBLIP_OK) { rc = library_error(s); break; }
    if (auto s = roblip_dataset_load_idx(images.c_str(), labels.c_str(), &ds); s != ROBLIP_OK) {
      rc = library_error(s);
      break;
    }
    const roblip_dataset* use = ds;
    const std::optional<std::size_t> n = a.n ? a.n : (cfg.contains("n") ? std::optional(cfg["n"].get<std::size_t>())
                                                                          : std::nullopt);
    if (n) {
      const std::uint64_t seed = a.common.seed.value_or(cfg.value("seed", std::uint64_t{0}));
      if (auto s = roblip_dataset_subset(ds, *n, seed, &sub); s != ROBLIP_OK) { rc = library_error(s); break; }
      use = sub;
    }
    const unsigned threads = a.common.jobs.value_or(0);
    if (auto s = roblip_model_lipschitz(model, use, a.raw ? 0 : 1, a.duplicate_threshold, threads, &rep.r);
        s != ROBLIP_OK) {
      rc = library_error(s);
      break;
    }
    emit(roblip_report_json(rep.r), a.common.out, "lipschitz.json");
  } while (false);
  roblip_dataset_free(sub);
  roblip_dataset_free(ds);
  roblip_model_free(model);
  return rc;
}

struct FitArgs {
  Common common;
  std::string csv;
  std::size_t d = 10;
};

int cmd_fit(const FitArgs& a) {
  const json cfg = read_config(a.common.config);
  const std::string csv = a.csv.empty() ? cfg.value("csv", "") : a.csv;
  if (csv.empty()) {
    std::fprintf(stderr, "error: fit needs a results CSV\n");
    return kExitUsage;
  }
  ReportGuard rep;
  if (auto s = roblip_fit_csv(csv.c_str(), a.d, &rep.r); s != ROBLIP_OK) return library_error(s);
  const std::string out = a.common.out.empty() ? fs::path(csv).parent_path().string() : a.common.out;
  emit(roblip_report_json(rep.r), out.empty() ? "." : out, "fit_report.json");
  emit(roblip_report_text(rep.r), out.empty() ? "." : out, "fit_report.txt");
  std::cout << roblip_report_text(rep.r);
  return kExitOk;
}

struct BoundsArgs {
  Common common;
  std::optional<double> lipschitz, rho, sigma, epsilon, delta, clean_risk, expected_rad, p;
  std::optional<std::size_t> n, d;
};

int cmd_bounds(const BoundsArgs& a) {
  const json cfg = read_config(a.common.config);
  roblip_bound_inputs in;
  roblip_bound_inputs_default(&in);
  auto pick = [&](const std::optional<double>& flag, const char* key, double& dst) {
    if (flag) dst = *flag;
    else if (cfg.contains(key)) dst = cfg[key].get<double>();
  };
  pick(a.lipschitz, "lipschitz", in.lipschitz);
  pick(a.rho, "rho", in.rho);
  pick(a.sigma, "sigma", in.sigma);
  pick(a.epsilon, "epsilon", in.epsilon);
  pick(a.delta, "delta_conf", in.delta_conf);
  pick(a.clean_risk, "clean_risk", in.clean_risk);
  pick(a.p, "p", in.p);
  in.n = a.n.value_or(cfg.value("n", in.n));
  in.effective_dim = a.d.value_or(cfg.value("d", in.effective_dim));
  if (a.expected_rad || cfg.contains("expected_rad")) {
    in.has_expected_rad = 1;
    pick(a.expected_rad, "expected_rad", in.expected_rad);
  }
  ReportGuard rep;
  if (auto s = roblip_bounds(&in, &rep.r); s != ROBLIP_OK) return library_error(s);
  emit(roblip_report_json(rep.r), a.common.out, "bounds.json");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust generalization and empirical Lipschitz toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(roblip_version()));

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Randomized checks of the complexity and loss inequalities");
  add_common(verify, va.common);
  verify->add_option("--trials", va.trials, "Trials per suite (default 500)");
  verify->add_option("--max-dim", va.max_dim, "Largest vector dimension / sample size (default 8)");
  verify->add_option("--max-set-size", va.max_set_size, "Largest |A|, |B| (default 8)");
  verify->add_option("--grid-points", va.grid_points, "Grid oracle resolution (default 100000)");
  verify->add_flag("--summary", va.summary, "Omit per-trial records from the JSON");
  verify->add_flag("--understate-lipschitz", va.understate, "Negative control: declare half the map constants")
      ->group("Testing");

  Common grid_common;
  auto* grid = app.add_subcommand("run-grid", "Train and measure every (n, width, seed) cell");
  add_common(grid, grid_common);

  LipArgs la;
  auto* lip = app.add_subcommand("lipschitz", "Empirical Lipschitz estimate of a checkpoint on a dataset");
  add_common(lip, la.common);
  lip->add_option("--checkpoint", la.checkpoint, "Model checkpoint");
  lip->add_option("--images", la.images, "IDX images file (.gz allowed)");
  lip->add_option("--labels", la.labels, "IDX labels file (.gz allowed)");
  lip->add_option("--n", la.n, "Use a seeded random subset of this size");
  lip->add_option("--duplicate-threshold", la.duplicate_threshold, "Skip pairs closer than this");
  lip->add_flag("--raw", la.raw, "Use logits instead of tanh outputs");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit L = C n^alpha p^beta to a results CSV");
  add_common(fit, fa.common);
  fit->add_option("csv", fa.csv, "Results CSV");
  fit->add_option("--d", fa.d, "Effective dimension for the theory comparison")->check(CLI::PositiveNumber);

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the closed-form bounds");
  add_common(bounds, ba.common);
  bounds->add_option("--lipschitz,-L", ba.lipschitz, "Lipschitz constant");
  bounds->add_option("--rho", ba.rho, "Perturbation radius");
  bounds->add_option("--sigma", ba.sigma, "Label-noise level");
  bounds->add_option("--epsilon", ba.epsilon, "Interpolation margin");
  bounds->add_option("--delta", ba.delta, "Confidence parameter in (0, 1)");
  bounds->add_option("--n", ba.n, "Sample size");
  bounds->add_option("--clean-risk", ba.clean_risk, "Empirical clean risk for the gap bound");
  bounds->add_option("--expected-rad", ba.expected_rad, "Expected Rademacher complexity");
  bounds->add_option("--p", ba.p, "Parameter count for the scaling laws");
  bounds->add_option("--d", ba.d, "Effective dimension for the scaling laws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(va);
    if (*grid) return cmd_run_grid(grid_common);
    if (*lip) return cmd_lipschitz(la);
    if (*fit) return cmd_fit(fa);
    if (*bounds) return cmd_bounds(ba);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

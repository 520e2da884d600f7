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

#include "roblip/roblip.h"

#include <new>
#include <string>

#include "roblip/bounds.hpp"
#include "roblip/error.hpp"
#include "roblip/grid.hpp"
#include "roblip/lipestimate.hpp"
#include "roblip/rademacher.hpp"
#include "roblip/report.hpp"
#include "roblip/trainer.hpp"
#include "roblip/verify.hpp"

struct roblip_report {
  std::string json;
  std::string text;
  bool passed = true;
};

struct roblip_dataset {
  roblip::ImageDataset ds;
};

struct roblip_model {
  roblip::Mlp net;
};

namespace {

thread_local std::string g_last_error;

roblip_status fail(roblip_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
roblip_status guard(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return ROBLIP_OK;
  } catch (const roblip::InvalidArgument& e) {
    return fail(ROBLIP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const roblip::DimensionError& e) {
    return fail(ROBLIP_ERR_DIMENSION, e.what());
  } catch (const roblip::CutoffExceeded& e) {
    return fail(ROBLIP_ERR_CUTOFF, e.what());
  } catch (const roblip::Unsupported& e) {
    return fail(ROBLIP_ERR_UNSUPPORTED, e.what());
  } catch (const roblip::IoError& e) {
    return fail(ROBLIP_ERR_IO, e.what());
  } catch (const roblip::IdxFormatError& e) {
    return fail(ROBLIP_ERR_FORMAT, e.what());
  } catch (const roblip::TrainingDiverged& e) {
    return fail(ROBLIP_ERR_DIVERGED, e.what());
  } catch (const roblip::InsufficientData& e) {
    return fail(ROBLIP_ERR_INSUFFICIENT_DATA, e.what());
  } catch (const roblip::RankDeficient& e) {
    return fail(ROBLIP_ERR_RANK_DEFICIENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ROBLIP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ROBLIP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ROBLIP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ROBLIP_ERR_INTERNAL, "unknown error");
  }
}

template <class... Ptrs>
void require(Ptrs... ptrs) {
  if (((ptrs == nullptr) || ...)) throw roblip::InvalidArgument("null argument");
}

roblip_report* make_report(std::string json, bool passed, std::string text = {}) {
  return new roblip_report{std::move(json), std::move(text), passed};
}

roblip::VectorSet rows_to_set(const double* rows, size_t count, size_t dim) {
  require(rows);
  if (count == 0 || dim == 0) throw roblip::InvalidArgument("empty vector set");
  return roblip::VectorSet(dim, std::vector<double>(rows, rows + count * dim));
}

}  // namespace

extern "C" {

const char* roblip_version(void) { return "0.1.0"; }

const char* roblip_status_string(roblip_status s) {
  switch (s) {
    case ROBLIP_OK: return "ok";
    case ROBLIP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ROBLIP_ERR_DIMENSION: return "dimension mismatch";
    case ROBLIP_ERR_CUTOFF: return "exact enumeration cutoff exceeded";
    case ROBLIP_ERR_UNSUPPORTED: return "unsupported";
    case ROBLIP_ERR_IO: return "i/o error";
    case ROBLIP_ERR_FORMAT: return "malformed file";
    case ROBLIP_ERR_DIVERGED: return "training diverged";
    case ROBLIP_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case ROBLIP_ERR_RANK_DEFICIENT: return "rank-deficient design";
    case ROBLIP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* roblip_last_error(void) { return g_last_error.c_str(); }

const char* roblip_report_json(const roblip_report* r) { return r ? r->json.c_str() : ""; }
const char* roblip_report_text(const roblip_report* r) { return r ? r->text.c_str() : ""; }
int roblip_report_passed(const roblip_report* r) { return r && r->passed ? 1 : 0; }
void roblip_report_free(roblip_report* r) { delete r; }

void roblip_bound_inputs_default(roblip_bound_inputs* in) {
  if (!in) return;
  const roblip::BoundInputs d;
  *in = roblip_bound_inputs{d.lipschitz, d.rho, d.sigma, d.epsilon, d.delta_conf, d.n, 0.0, 0, 0.0, 1.0, 10};
}

roblip_status roblip_bounds(const roblip_bound_inputs* in, roblip_report** out) {
  return guard([&] {
    require(in, out);
    roblip::report::BoundsRequest req;
    req.inputs = {in->lipschitz, in->rho, in->sigma, in->epsilon, in->delta_conf, in->n};
    req.clean_risk = in->clean_risk;
    if (in->has_expected_rad) req.expected_rad = in->expected_rad;
    req.p = in->p;
    req.effective_dim = in->effective_dim;
    *out = make_report(roblip::report::bounds_report(req).dump(2), true);
  });
}

roblip_status roblip_a_rho(double lipschitz, double rho, double* out) {
  return guard([&] {
    require(out);
    *out = roblip::a_rho(lipschitz, rho);
  });
}

roblip_status roblip_gap_bound(double lipschitz, double rho, double clean_risk, double* out) {
  return guard([&] {
    require(out);
    *out = roblip::gap_bound(lipschitz, rho, clean_risk);
  });
}

roblip_status roblip_rad_lower_bound(double gamma, double lipschitz, double rho, size_t n, double delta_conf,
                                     double* out, int* vacuous) {
  return guard([&] {
    require(out);
    const auto lb = roblip::rad_lower_bound(gamma, lipschitz, rho, n, delta_conf);
    *out = lb.value;
    if (vacuous) *vacuous = lb.vacuous ? 1 : 0;
  });
}

roblip_status roblip_rad_exact(const double* rows, size_t count, size_t dim, double* out) {
  return guard([&] {
    require(out);
    *out = roblip::rad_exact(rows_to_set(rows, count, dim)).value;
  });
}

roblip_status roblip_rad_mc(const double* rows, size_t count, size_t dim, uint64_t draws, uint64_t seed,
                            double* value, double* std_error) {
  return guard([&] {
    require(value);
    const auto e = roblip::rad_mc(rows_to_set(rows, count, dim), draws, seed);
    *value = e.value;
    if (std_error) *std_error = e.std_error;
  });
}

void roblip_verify_options_default(roblip_verify_options* o) {
  if (!o) return;
  const roblip::VerifyOptions d;
  *o = roblip_verify_options{d.seed, d.trials, d.max_dim, d.max_set_size, d.grid_points, 0, 1};
}

roblip_status roblip_verify(const roblip_verify_options* o, roblip_report** out) {
  return guard([&] {
    require(o, out);
    roblip::VerifyOptions v;
    v.seed = o->seed;
    v.trials = o->trials;
    v.max_dim = o->max_dim;
    v.max_set_size = o->max_set_size;
    v.grid_points = o->grid_points;
    v.understate_lipschitz = o->understate_lipschitz != 0;
    const auto rep = roblip::run_verification(v);
    std::string text;
    for (const auto& s : rep.suites)
      text += s.name + ": " + std::to_string(s.violations) + " violations in " + std::to_string(s.trials) +
              " trials\n";
    *out = make_report(roblip::report::to_json(rep, o->include_details != 0).dump(2), rep.passed(), text);
  });
}

roblip_status roblip_dataset_load_idx(const char* images_path, const char* labels_path, roblip_dataset** out) {
  return guard([&] {
    require(images_path, labels_path, out);
    *out = new roblip_dataset{roblip::load_idx_dataset(images_path, labels_path)};
  });
}

roblip_status roblip_dataset_synthetic(size_t d, size_t classes, size_t n, double spread, uint64_t seed,
                                       roblip_dataset** out) {
  return guard([&] {
    require(out);
    *out = new roblip_dataset{roblip::synthetic_blobs(d, classes, n, spread, seed)};
  });
}

roblip_status roblip_dataset_subset(const roblip_dataset* ds, size_t n, uint64_t seed, roblip_dataset** out) {
  return guard([&] {
    require(ds, out);
    *out = new roblip_dataset{roblip::sample_subset(ds->ds, n, seed)};
  });
}

size_t roblip_dataset_size(const roblip_dataset* ds) { return ds ? ds->ds.n : 0; }
size_t roblip_dataset_dim(const roblip_dataset* ds) { return ds ? ds->ds.d : 0; }
size_t roblip_dataset_classes(const roblip_dataset* ds) { return ds ? ds->ds.classes : 0; }
const double* roblip_dataset_features(const roblip_dataset* ds) { return ds ? ds->ds.features.data() : nullptr; }
const int* roblip_dataset_labels(const roblip_dataset* ds) { return ds ? ds->ds.labels.data() : nullptr; }
void roblip_dataset_free(roblip_dataset* ds) { delete ds; }

void roblip_train_config_default(roblip_train_config* c) {
  if (!c) return;
  const roblip::TrainConfig d;
  *c = roblip_train_config{d.learning_rate, d.batch_size, d.beta1,      d.beta2,
                           d.adam_epsilon,  d.patience,   d.max_epochs, d.seed};
}

roblip_status roblip_model_build(size_t input_dim, const size_t* hidden, size_t hidden_count, size_t classes,
                                 uint64_t seed, roblip_model** out) {
  return guard([&] {
    require(out);
    if (hidden_count > 0) require(hidden);
    roblip::MlpSpec spec;
    spec.input_dim = input_dim;
    spec.hidden.assign(hidden, hidden + hidden_count);
    spec.classes = classes;
    *out = new roblip_model{roblip::build_mlp(spec, seed).net};
  });
}

roblip_status roblip_model_load(const char* path, roblip_model** out) {
  return guard([&] {
    require(path, out);
    *out = new roblip_model{roblip::load_checkpoint(path)};
  });
}

roblip_status roblip_model_save(const roblip_model* m, const char* path) {
  return guard([&] {
    require(m, path);
    roblip::save_checkpoint(m->net, path);
  });
}

size_t roblip_model_parameter_count(const roblip_model* m) { return m ? m->net.parameter_count() : 0; }
size_t roblip_model_input_dim(const roblip_model* m) { return m ? m->net.spec().input_dim : 0; }
size_t roblip_model_classes(const roblip_model* m) { return m ? m->net.spec().classes : 0; }

roblip_status roblip_model_predict(const roblip_model* m, const double* x, size_t n, int squashed, double* out) {
  return guard([&] {
    require(m, x, out);
    const std::span<const double> in(x, n * m->net.spec().input_dim);
    const auto y = squashed ? m->net.predict_squashed(in, n) : m->net.logits(in, n);
    std::copy(y.begin(), y.end(), out);
  });
}

roblip_status roblip_model_train(roblip_model* m, const roblip_dataset* train, const roblip_dataset* test,
                                 const roblip_train_config* cfg, roblip_report** out) {
  return guard([&] {
    require(m, train, test, cfg);
    roblip::TrainConfig tc;
    tc.learning_rate = cfg->learning_rate;
    tc.batch_size = cfg->batch_size;
    tc.beta1 = cfg->beta1;
    tc.beta2 = cfg->beta2;
    tc.adam_epsilon = cfg->adam_epsilon;
    tc.patience = cfg->patience;
    tc.max_epochs = cfg->max_epochs;
    tc.seed = cfg->seed;
    roblip::TrainedModel start;
    start.net = m->net;
    auto trained = roblip::train_until_overfit(std::move(start), train->ds, test->ds, tc);
    if (out) {
      nlohmann::json hist = nlohmann::json::array();
      for (const auto& e : trained.history)
        hist.push_back({{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"train_accuracy", e.train_accuracy},
                        {"test_loss", e.test_loss},
                        {"test_accuracy", e.test_accuracy}});
      nlohmann::json j = {{"p", trained.p()},
                          {"stopped_epoch", trained.stopped_epoch},
                          {"best_epoch", trained.best_epoch},
                          {"best_test_loss", trained.best_test_loss},
                          {"final_train_loss", trained.final_train_loss},
                          {"stopped_by_patience", trained.stopped_by_patience},
                          {"history", hist}};
      *out = make_report(j.dump(2), true);
    }
    m->net = std::move(trained.net);
  });
}

void roblip_model_free(roblip_model* m) { delete m; }

roblip_status roblip_lipschitz(const double* outputs, size_t classes, const double* x, size_t n, size_t d,
                               double duplicate_threshold, unsigned threads, double* l_emp, roblip_report** out) {
  return guard([&] {
    require(outputs, x);
    roblip::LipOptions lo;
    lo.duplicate_threshold = duplicate_threshold;
    lo.threads = threads;
    const auto e = roblip::pairwise_lip({outputs, n * classes}, classes, {x, n * d}, d, lo);
    if (l_emp) *l_emp = e.L_emp;
    if (out) *out = make_report(roblip::report::to_json(e).dump(2), true);
  });
}

roblip_status roblip_model_lipschitz(const roblip_model* m, const roblip_dataset* ds, int squashed,
                                     double duplicate_threshold, unsigned threads, roblip_report** out) {
  return guard([&] {
    require(m, ds, out);
    if (ds->ds.d != m->net.spec().input_dim) throw roblip::DimensionError("model and dataset dimensions differ");
    const auto y = squashed ? m->net.predict_squashed(ds->ds.features, ds->ds.n)
                            : m->net.logits(ds->ds.features, ds->ds.n);
    roblip::LipOptions lo;
    lo.duplicate_threshold = duplicate_threshold;
    lo.threads = threads;
    const auto e = roblip::pairwise_lip(y, m->net.spec().classes, ds->ds.features, ds->ds.d, lo);
    auto j = roblip::report::to_json(e);
    j["squashed"] = squashed != 0;
    *out = make_report(j.dump(2), true);
  });
}

roblip_status roblip_run_grid(const char* config_json, const char* base_dir, roblip_log_fn log, void* user,
                              roblip_report** out) {
  return guard([&] {
    require(config_json, out);
    const auto cfg = roblip::ExperimentConfig::from_json(nlohmann::json::parse(config_json),
                                                         base_dir ? base_dir : "");
    roblip::GridLog sink;
    if (log) sink = [log, user](const std::string& s) { log(s.c_str(), user); };
    const auto res = roblip::run_grid(cfg, sink);
    std::size_t positive = 0;
    for (const auto& r : res.records)
      if (r.status == "ok" && r.L_emp >= roblip::kZeroEstimateThreshold) ++positive;
    nlohmann::json j = {{"csv", res.csv_path},       {"rows", res.records.size()}, {"computed", res.computed},
                        {"skipped", res.skipped},    {"failed", res.failed},       {"positive_L_emp", positive}};
    *out = make_report(j.dump(2), res.failed == 0);
  });
}

roblip_status roblip_fit_csv(const char* csv_path, size_t effective_dim, roblip_report** out) {
  return guard([&] {
    require(csv_path, out);
    const auto fit = roblip::report::fit_records(roblip::read_results_csv(csv_path), {effective_dim});
    const bool complete = fit.joint.has_value() && !fit.joint->partial();
    *out = make_report(roblip::report::to_json(fit).dump(2), complete, roblip::report::text_table(fit));
  });
}

}  // extern "C"

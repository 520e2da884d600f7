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

#ifndef ROBLIP_ROBLIP_H
#define ROBLIP_ROBLIP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef ROBLIP_BUILDING_LIBRARY
#    define ROBLIP_API __declspec(dllexport)
#  else
#    define ROBLIP_API __declspec(dllimport)
#  endif
#else
#  define ROBLIP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum roblip_status {
  ROBLIP_OK = 0,
  ROBLIP_ERR_INVALID_ARGUMENT = 1,
  ROBLIP_ERR_DIMENSION = 2,
  ROBLIP_ERR_CUTOFF = 3,
  ROBLIP_ERR_UNSUPPORTED = 4,
  ROBLIP_ERR_IO = 5,
  ROBLIP_ERR_FORMAT = 6,
  ROBLIP_ERR_DIVERGED = 7,
  ROBLIP_ERR_INSUFFICIENT_DATA = 8,
  ROBLIP_ERR_RANK_DEFICIENT = 9,
  ROBLIP_ERR_INTERNAL = 10
} roblip_status;

ROBLIP_API const char* roblip_version(void);
ROBLIP_API const char* roblip_status_string(roblip_status status);
/* Message of the last failing call on this thread; "" if none. */
ROBLIP_API const char* roblip_last_error(void);

/* Reports: a JSON document, an optional text rendering and a pass flag. */
typedef struct roblip_report roblip_report;
ROBLIP_API const char* roblip_report_json(const roblip_report* r);
ROBLIP_API const char* roblip_report_text(const roblip_report* r);
ROBLIP_API int roblip_report_passed(const roblip_report* r);
ROBLIP_API void roblip_report_free(roblip_report* r);

/* ---- closed-form bounds ---- */

typedef struct roblip_bound_inputs {
  double lipschitz;
  double rho;
  double sigma;
  double epsilon;
  double delta_conf;
  size_t n;
  double clean_risk;
  int has_expected_rad;
  double expected_rad;
  double p;
  size_t effective_dim;
} roblip_bound_inputs;

ROBLIP_API void roblip_bound_inputs_default(roblip_bound_inputs* in);
ROBLIP_API roblip_status roblip_bounds(const roblip_bound_inputs* in, roblip_report** out);
ROBLIP_API roblip_status roblip_a_rho(double lipschitz, double rho, double* out);
ROBLIP_API roblip_status roblip_gap_bound(double lipschitz, double rho, double clean_risk, double* out);
ROBLIP_API roblip_status roblip_rad_lower_bound(double gamma, double lipschitz, double rho, size_t n,
                                                double delta_conf, double* out, int* vacuous);

/* ---- Rademacher complexity of a finite set (count rows of length dim) ---- */

ROBLIP_API roblip_status roblip_rad_exact(const double* rows, size_t count, size_t dim, double* out);
ROBLIP_API roblip_status roblip_rad_mc(const double* rows, size_t count, size_t dim, uint64_t draws,
                                       uint64_t seed, double* value, double* std_error);

/* ---- randomized inequality verification ---- */

typedef struct roblip_verify_options {
  uint64_t seed;
  size_t trials;
  size_t max_dim;
  size_t max_set_size;
  size_t grid_points;
  int understate_lipschitz; /* negative control */
  int include_details;      /* per-trial checks in the JSON */
} roblip_verify_options;

ROBLIP_API void roblip_verify_options_default(roblip_verify_options* o);
/* ROBLIP_OK even when checks fail; inspect roblip_report_passed. */
ROBLIP_API roblip_status roblip_verify(const roblip_verify_options* o, roblip_report** out);

/* ---- datasets ---- */

typedef struct roblip_dataset roblip_dataset;
ROBLIP_API roblip_status roblip_dataset_load_idx(const char* images_path, const char* labels_path,
                                                 roblip_dataset** out);
ROBLIP_API roblip_status roblip_dataset_synthetic(size_t d, size_t classes, size_t n, double spread, uint64_t seed,
                                                  roblip_dataset** out);
ROBLIP_API roblip_status roblip_dataset_subset(const roblip_dataset* ds, size_t n, uint64_t seed,
                                               roblip_dataset** out);
ROBLIP_API size_t roblip_dataset_size(const roblip_dataset* ds);
ROBLIP_API size_t roblip_dataset_dim(const roblip_dataset* ds);
ROBLIP_API size_t roblip_dataset_classes(const roblip_dataset* ds);
/* Row-major size x dim; valid until the dataset is freed. */
ROBLIP_API const double* roblip_dataset_features(const roblip_dataset* ds);
ROBLIP_API const int* roblip_dataset_labels(const roblip_dataset* ds);
ROBLIP_API void roblip_dataset_free(roblip_dataset* ds);

/* ---- models ---- */

typedef struct roblip_model roblip_model;

typedef struct roblip_train_config {
  double learning_rate;
  size_t batch_size;
  double beta1;
  double beta2;
  double adam_epsilon;
  int patience;
  int max_epochs;
  uint64_t seed;
} roblip_train_config;

ROBLIP_API void roblip_train_config_default(roblip_train_config* c);
ROBLIP_API roblip_status roblip_model_build(size_t input_dim, const size_t* hidden, size_t hidden_count,
                                            size_t classes, uint64_t seed, roblip_model** out);
ROBLIP_API roblip_status roblip_model_load(const char* path, roblip_model** out);
ROBLIP_API roblip_status roblip_model_save(const roblip_model* m, const char* path);
ROBLIP_API size_t roblip_model_parameter_count(const roblip_model* m);
ROBLIP_API size_t roblip_model_input_dim(const roblip_model* m);
ROBLIP_API size_t roblip_model_classes(const roblip_model* m);
/* out holds n x classes values: tanh(logits) if squashed, else logits. */
ROBLIP_API roblip_status roblip_model_predict(const roblip_model* m, const double* x, size_t n, int squashed,
                                              double* out);
/* Trains in place; the report holds the epoch history. */
ROBLIP_API roblip_status roblip_model_train(roblip_model* m, const roblip_dataset* train,
                                            const roblip_dataset* test, const roblip_train_config* cfg,
                                            roblip_report** out);
ROBLIP_API void roblip_model_free(roblip_model* m);

/* ---- empirical Lipschitz estimate ---- */

ROBLIP_API roblip_status roblip_lipschitz(const double* outputs, size_t classes, const double* x, size_t n,
                                          size_t d, double duplicate_threshold, unsigned threads,
                                          double* l_emp, roblip_report** out);
ROBLIP_API roblip_status roblip_model_lipschitz(const roblip_model* m, const roblip_dataset* ds, int squashed,
                                                double duplicate_threshold, unsigned threads,
                                                roblip_report** out);

/* ---- experiment grid and fitting ---- */

typedef void (*roblip_log_fn)(const char* line, void* user);

/* config_json: experiment config text; relative data paths resolve against base_dir. */
ROBLIP_API roblip_status roblip_run_grid(const char* config_json, const char* base_dir, roblip_log_fn log,
                                         void* user, roblip_report** out);
/* JSON fit report plus a text table; passed is 0 when a fit is partial. */
ROBLIP_API roblip_status roblip_fit_csv(const char* csv_path, size_t effective_dim, roblip_report** out);

#ifdef __cplusplus
}
#endif

#endif /* ROBLIP_ROBLIP_H */

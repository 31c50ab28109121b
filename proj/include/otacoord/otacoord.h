// Copyright 2026 The otacoord Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// C interface to the otacoord solvers. All objects are opaque handles that
// must be released with the matching *_destroy call. Strings returned through
// char** out-parameters are owned by the caller and freed with
// otac_free_string. On failure, otac_last_error() describes the most recent
// error on the calling thread.

#ifndef OTACOORD_OTACOORD_H_
#define OTACOORD_OTACOORD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(OTAC_BUILDING_LIBRARY)
#define OTAC_API __attribute__((visibility("default")))
#else
#define OTAC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum otac_status {
  OTAC_OK = 0,
  OTAC_ERR_INVALID_ARGUMENT = 1,
  OTAC_ERR_PARSE = 2,
  OTAC_ERR_SINGULAR_GRAM = 3,
  OTAC_ERR_NUMERICAL_INSTABILITY = 4,
  OTAC_ERR_NULL_PROJECTION = 5,
  OTAC_ERR_ROOT_INFEASIBLE = 6,
  OTAC_ERR_NO_FEASIBLE_SETTING = 7,
  OTAC_ERR_INSTANCE_TOO_LARGE = 8,
  // A shortcut solver whose sufficient condition does not hold.
  OTAC_ERR_NOT_APPLICABLE = 9,
  OTAC_ERR_INTERNAL = 10,
} otac_status;

typedef enum otac_solver {
  OTAC_SOLVER_AZF = 0,
  OTAC_SOLVER_AMMSE = 1,
  OTAC_SOLVER_ZF_OPT = 2,
  OTAC_SOLVER_MMSE_OPT = 3,
  OTAC_SOLVER_ZF_SHORTCUT = 4,
  OTAC_SOLVER_MMSE_SHORTCUT = 5,
} otac_solver;

typedef enum otac_scheme { OTAC_SCHEME_ZF = 0, OTAC_SCHEME_MMSE = 1 } otac_scheme;
typedef enum otac_fading { OTAC_FADING_COMPLEX = 0, OTAC_FADING_REAL = 1 } otac_fading;
typedef enum otac_axis { OTAC_AXIS_SNR_DB = 0, OTAC_AXIS_LOAD = 1 } otac_axis;
typedef enum otac_metric { OTAC_METRIC_ERROR = 0, OTAC_METRIC_CHECKTIME = 1 } otac_metric;

typedef struct otac_problem otac_problem;
typedef struct otac_solution otac_solution;
typedef struct otac_tree otac_tree;
typedef struct otac_sweep otac_sweep;

OTAC_API const char* otac_version(void);
OTAC_API const char* otac_status_string(otac_status status);
OTAC_API const char* otac_last_error(void);
OTAC_API void otac_free_string(char* text);
OTAC_API unsigned otac_default_thread_count(void);

// Names: "azf", "ammse", "zf-opt", "mmse-opt", "zf-shortcut", "mmse-shortcut".
OTAC_API otac_status otac_solver_from_name(const char* name, otac_solver* out);
OTAC_API const char* otac_solver_name(otac_solver solver);
OTAC_API otac_status otac_scheme_from_name(const char* name, otac_scheme* out);
OTAC_API otac_status otac_fading_from_name(const char* name, otac_fading* out);
OTAC_API otac_status otac_axis_from_name(const char* name, otac_axis* out);
OTAC_API otac_status otac_metric_from_name(const char* name, otac_metric* out);

// "start:step:stop" or "a,b,c". Writes up to `capacity` values and always
// sets *count to the full grid length.
OTAC_API otac_status otac_parse_grid(const char* text, double* out, size_t capacity,
                                     size_t* count);

// --- problems -------------------------------------------------------------

// channel_re/channel_im are column-major N x L; channel_im may be NULL.
OTAC_API otac_status otac_problem_create(size_t antennas, size_t devices,
                                         const double* channel_re,
                                         const double* channel_im,
                                         const double* weights, double power,
                                         double noise_variance, otac_problem** out);
OTAC_API otac_status otac_problem_from_json(const char* text, otac_problem** out);
OTAC_API otac_status otac_problem_to_json(const otac_problem* problem, char** out);
OTAC_API otac_status otac_problem_example(double noise_variance, otac_problem** out);
// Draws trial `trial` of the seeded channel model with weights 1/L.
// pathloss may be NULL (all ones) or hold `devices` amplitude gains.
OTAC_API otac_status otac_problem_generate(size_t antennas, size_t devices,
                                           const double* pathloss, uint64_t seed,
                                           uint64_t trial, otac_fading fading,
                                           double power, double noise_variance,
                                           otac_problem** out);
OTAC_API otac_status otac_problem_with_noise_variance(const otac_problem* problem,
                                                      double noise_variance,
                                                      otac_problem** out);
OTAC_API size_t otac_problem_antennas(const otac_problem* problem);
OTAC_API size_t otac_problem_devices(const otac_problem* problem);
OTAC_API double otac_problem_power(const otac_problem* problem);
OTAC_API double otac_problem_noise_variance(const otac_problem* problem);
OTAC_API void otac_problem_destroy(otac_problem* problem);

// receiver has N entries, scalings L; imaginary parts may be NULL.
OTAC_API otac_status otac_aggregation_error(const otac_problem* problem,
                                            const double* receiver_re,
                                            const double* receiver_im,
                                            const double* scalings_re,
                                            const double* scalings_im, double* out);

// --- solving --------------------------------------------------------------

OTAC_API otac_status otac_solve(const otac_problem* problem, otac_solver solver,
                                otac_solution** out);
OTAC_API double otac_solution_error(const otac_solution* solution);
OTAC_API uint64_t otac_solution_check_count(const otac_solution* solution);
OTAC_API uint64_t otac_solution_downdate_fallbacks(const otac_solution* solution);
OTAC_API size_t otac_solution_subset_size(const otac_solution* solution);
// 1-based device indices in increasing order; out must hold subset_size ints.
OTAC_API void otac_solution_subset(const otac_solution* solution, int* out);
OTAC_API size_t otac_solution_antennas(const otac_solution* solution);
OTAC_API size_t otac_solution_devices(const otac_solution* solution);
// re/im must hold antennas (receiver) or devices (scalings) doubles.
OTAC_API void otac_solution_receiver(const otac_solution* solution, double* re, double* im);
OTAC_API void otac_solution_scalings(const otac_solution* solution, double* re, double* im);
// Descent path as a JSON array of 1-based subsets, root first.
OTAC_API otac_status otac_solution_path_json(const otac_solution* solution, char** out);
OTAC_API void otac_solution_destroy(otac_solution* solution);

// --- feasibility trees ----------------------------------------------------

// One "mask error" line per feasible subset in canonical order.
OTAC_API otac_status otac_enumerate_feasible(const otac_problem* problem,
                                             otac_scheme scheme, char** out);
OTAC_API otac_status otac_tree_build(const otac_problem* problem, otac_scheme scheme,
                                     otac_tree** out);
OTAC_API size_t otac_tree_node_count(const otac_tree* tree);
OTAC_API otac_status otac_tree_to_json(const otac_tree* tree, char** out);
OTAC_API otac_status otac_tree_to_dot(const otac_tree* tree, char** out);
OTAC_API void otac_tree_destroy(otac_tree* tree);

// --- sweeps ---------------------------------------------------------------

typedef struct otac_sweep_spec {
  otac_axis axis;
  const double* grid;
  size_t grid_size;
  size_t trials;
  size_t devices;
  size_t antennas;  // SNR axis only
  double snr_db;    // load axis only
  double power;
  const double* pathloss;  // NULL or `devices` entries
  const otac_solver* solvers;
  size_t solver_count;
  uint64_t seed;
  otac_fading fading;
  otac_metric metric;
  unsigned threads;  // 0 = default
} otac_sweep_spec;

typedef struct otac_sweep_point {
  double axis_value;
  size_t antennas;
  double noise_variance;
  otac_solver solver;
  double mean_error;
  double mean_error_db;
  double mean_check_count;
  size_t trials;
} otac_sweep_point;

OTAC_API void otac_sweep_spec_init(otac_sweep_spec* spec);
OTAC_API otac_status otac_sweep_run(const otac_sweep_spec* spec, otac_sweep** out);
OTAC_API size_t otac_sweep_point_count(const otac_sweep* sweep);
OTAC_API otac_status otac_sweep_point_at(const otac_sweep* sweep, size_t index,
                                         otac_sweep_point* out);
OTAC_API otac_status otac_sweep_to_csv(const otac_sweep* sweep, char** out);
OTAC_API otac_status otac_sweep_to_json(const otac_sweep* sweep, char** out);
OTAC_API void otac_sweep_destroy(otac_sweep* sweep);

typedef struct otac_compare_spec {
  size_t devices;
  size_t antennas;
  double snr_db;
  double power;
  size_t trials;
  const double* pathloss;
  uint64_t seed;
  otac_fading fading;
  unsigned threads;
} otac_compare_spec;

OTAC_API void otac_compare_spec_init(otac_compare_spec* spec);
// Runs AZF/AMMSE against the exhaustive optima; writes a JSON report.
OTAC_API otac_status otac_oracle_compare(const otac_compare_spec* spec, char** out);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // OTACOORD_OTACOORD_H_

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

#include "otacoord/otacoord.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "otacoord/error.hpp"
#include "otacoord/mmse.hpp"
#include "otacoord/model.hpp"
#include "otacoord/sim.hpp"
#include "otacoord/tree.hpp"
#include "otacoord/zf.hpp"

struct otac_problem {
  otac::CoordinationProblem value;
};

struct otac_solution {
  otac::CoordinationSolution value;
};

struct otac_tree {
  otac::FeasibilityTree value;
};

struct otac_sweep {
  otac::SweepResult value;
};

namespace {

thread_local std::string last_error;

otac_status map_code(otac::ErrorCode code) {
  using otac::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return OTAC_ERR_INVALID_ARGUMENT;
    case ErrorCode::kParseError: return OTAC_ERR_PARSE;
    case ErrorCode::kSingularGram: return OTAC_ERR_SINGULAR_GRAM;
    case ErrorCode::kNumericalInstability: return OTAC_ERR_NUMERICAL_INSTABILITY;
    case ErrorCode::kNullProjection: return OTAC_ERR_NULL_PROJECTION;
    case ErrorCode::kRootInfeasible: return OTAC_ERR_ROOT_INFEASIBLE;
    case ErrorCode::kNoFeasibleSetting: return OTAC_ERR_NO_FEASIBLE_SETTING;
    case ErrorCode::kInstanceTooLarge: return OTAC_ERR_INSTANCE_TOO_LARGE;
  }
  return OTAC_ERR_INTERNAL;
}

otac_status fail(otac_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class Fn>
otac_status guard(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const otac::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(OTAC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(OTAC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(OTAC_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

#define OTAC_REQUIRE(cond, what) \
  if (!(cond)) return fail(OTAC_ERR_INVALID_ARGUMENT, what)

otac::SolverKind to_kind(otac_solver solver) {
  switch (solver) {
    case OTAC_SOLVER_AZF: return otac::SolverKind::kAzf;
    case OTAC_SOLVER_AMMSE: return otac::SolverKind::kAmmse;
    case OTAC_SOLVER_ZF_OPT: return otac::SolverKind::kZfOpt;
    case OTAC_SOLVER_MMSE_OPT: return otac::SolverKind::kMmseOpt;
    default: break;
  }
  throw otac::Error(otac::ErrorCode::kInvalidArgument,
                    "sweeps accept azf, ammse, zf-opt and mmse-opt only");
}

otac_solver from_kind(otac::SolverKind kind) {
  switch (kind) {
    case otac::SolverKind::kAzf: return OTAC_SOLVER_AZF;
    case otac::SolverKind::kAmmse: return OTAC_SOLVER_AMMSE;
    case otac::SolverKind::kZfOpt: return OTAC_SOLVER_ZF_OPT;
    case otac::SolverKind::kMmseOpt: return OTAC_SOLVER_MMSE_OPT;
  }
  return OTAC_SOLVER_AZF;
}

otac::Scheme to_scheme(otac_scheme scheme) {
  return scheme == OTAC_SCHEME_MMSE ? otac::Scheme::kMmse : otac::Scheme::kZf;
}

otac::Fading to_fading(otac_fading fading) {
  return fading == OTAC_FADING_REAL ? otac::Fading::kReal : otac::Fading::kComplex;
}

void split_complex(const otac::CVector& v, double* re, double* im) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (re != nullptr) re[i] = v[i].real();
    if (im != nullptr) im[i] = v[i].imag();
  }
}

otac::CVector join_complex(const double* re, const double* im, std::size_t n) {
  otac::CVector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    v[static_cast<Eigen::Index>(i)] = {re[i], im == nullptr ? 0.0 : im[i]};
  }
  return v;
}

}  // namespace

extern "C" {

const char* otac_version(void) { return "1.0.0"; }

const char* otac_status_string(otac_status status) {
  switch (status) {
    case OTAC_OK: return "ok";
    case OTAC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case OTAC_ERR_PARSE: return "parse error";
    case OTAC_ERR_SINGULAR_GRAM: return "singular Gram matrix";
    case OTAC_ERR_NUMERICAL_INSTABILITY: return "numerical instability";
    case OTAC_ERR_NULL_PROJECTION: return "null projection";
    case OTAC_ERR_ROOT_INFEASIBLE: return "root infeasible";
    case OTAC_ERR_NO_FEASIBLE_SETTING: return "no feasible setting";
    case OTAC_ERR_INSTANCE_TOO_LARGE: return "instance too large";
    case OTAC_ERR_NOT_APPLICABLE: return "not applicable";
    case OTAC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* otac_last_error(void) { return last_error.c_str(); }

void otac_free_string(char* text) { std::free(text); }

unsigned otac_default_thread_count(void) { return otac::default_thread_count(); }

otac_status otac_solver_from_name(const char* name, otac_solver* out) {
  OTAC_REQUIRE(name != nullptr && out != nullptr, "null argument");
  const std::string s(name);
  if (s == "zf-shortcut") {
    *out = OTAC_SOLVER_ZF_SHORTCUT;
    return OTAC_OK;
  }
  if (s == "mmse-shortcut") {
    *out = OTAC_SOLVER_MMSE_SHORTCUT;
    return OTAC_OK;
  }
  return guard([&] {
    *out = from_kind(otac::parse_solver(s));
    return OTAC_OK;
  });
}

const char* otac_solver_name(otac_solver solver) {
  switch (solver) {
    case OTAC_SOLVER_ZF_SHORTCUT: return "zf-shortcut";
    case OTAC_SOLVER_MMSE_SHORTCUT: return "mmse-shortcut";
    case OTAC_SOLVER_AZF:
    case OTAC_SOLVER_AMMSE:
    case OTAC_SOLVER_ZF_OPT:
    case OTAC_SOLVER_MMSE_OPT:
      return otac::to_string(to_kind(solver));
  }
  return "unknown";
}

otac_status otac_scheme_from_name(const char* name, otac_scheme* out) {
  OTAC_REQUIRE(name != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = otac::parse_scheme(name) == otac::Scheme::kMmse ? OTAC_SCHEME_MMSE : OTAC_SCHEME_ZF;
    return OTAC_OK;
  });
}

otac_status otac_fading_from_name(const char* name, otac_fading* out) {
  OTAC_REQUIRE(name != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = otac::parse_fading(name) == otac::Fading::kReal ? OTAC_FADING_REAL
                                                           : OTAC_FADING_COMPLEX;
    return OTAC_OK;
  });
}

otac_status otac_axis_from_name(const char* name, otac_axis* out) {
  OTAC_REQUIRE(name != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = otac::parse_axis(name) == otac::SweepAxis::kLoad ? OTAC_AXIS_LOAD : OTAC_AXIS_SNR_DB;
    return OTAC_OK;
  });
}

otac_status otac_metric_from_name(const char* name, otac_metric* out) {
  OTAC_REQUIRE(name != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = otac::parse_metric(name) == otac::Metric::kCheckTime ? OTAC_METRIC_CHECKTIME
                                                                : OTAC_METRIC_ERROR;
    return OTAC_OK;
  });
}

otac_status otac_parse_grid(const char* text, double* out, size_t capacity, size_t* count) {
  OTAC_REQUIRE(text != nullptr && count != nullptr, "null argument");
  return guard([&] {
    const std::vector<double> grid = otac::parse_grid(text);
    *count = grid.size();
    for (std::size_t i = 0; i < grid.size() && i < capacity && out != nullptr; ++i) {
      out[i] = grid[i];
    }
    return OTAC_OK;
  });
}

otac_status otac_problem_create(size_t antennas, size_t devices, const double* channel_re,
                                const double* channel_im, const double* weights, double power,
                                double noise_variance, otac_problem** out) {
  OTAC_REQUIRE(out != nullptr && channel_re != nullptr && weights != nullptr, "null argument");
  return guard([&] {
    const auto n = static_cast<Eigen::Index>(antennas);
    const auto l = static_cast<Eigen::Index>(devices);
    otac::CMatrix h(n, l);
    for (Eigen::Index c = 0; c < l; ++c) {
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto k = static_cast<std::size_t>(c * n + r);
        h(r, c) = {channel_re[k], channel_im == nullptr ? 0.0 : channel_im[k]};
      }
    }
    otac::RVector phi = Eigen::Map<const otac::RVector>(weights, l);
    *out = new otac_problem{otac::CoordinationProblem(std::move(h), std::move(phi), power,
                                                      noise_variance)};
    return OTAC_OK;
  });
}

otac_status otac_problem_from_json(const char* text, otac_problem** out) {
  OTAC_REQUIRE(text != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = new otac_problem{otac::problem_from_json(text)};
    return OTAC_OK;
  });
}

otac_status otac_problem_to_json(const otac_problem* problem, char** out) {
  OTAC_REQUIRE(problem != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = dup_string(otac::problem_to_json(problem->value));
    return OTAC_OK;
  });
}

otac_status otac_problem_example(double noise_variance, otac_problem** out) {
  OTAC_REQUIRE(out != nullptr, "null argument");
  return guard([&] {
    *out = new otac_problem{otac::example_problem(noise_variance)};
    return OTAC_OK;
  });
}

otac_status otac_problem_generate(size_t antennas, size_t devices, const double* pathloss,
                                  uint64_t seed, uint64_t trial, otac_fading fading,
                                  double power, double noise_variance, otac_problem** out) {
  OTAC_REQUIRE(out != nullptr, "null argument");
  return guard([&] {
    otac::ChannelModel model{antennas, devices, {}, seed, to_fading(fading)};
    if (pathloss != nullptr) model.pathloss.assign(pathloss, pathloss + devices);
    *out = new otac_problem{otac::generate_problem(model, trial, power, noise_variance)};
    return OTAC_OK;
  });
}

otac_status otac_problem_with_noise_variance(const otac_problem* problem,
                                             double noise_variance, otac_problem** out) {
  OTAC_REQUIRE(problem != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = new otac_problem{problem->value.with_noise_variance(noise_variance)};
    return OTAC_OK;
  });
}

size_t otac_problem_antennas(const otac_problem* problem) {
  return problem == nullptr ? 0 : problem->value.antennas();
}

size_t otac_problem_devices(const otac_problem* problem) {
  return problem == nullptr ? 0 : problem->value.devices();
}

double otac_problem_power(const otac_problem* problem) {
  return problem == nullptr ? 0.0 : problem->value.power();
}

double otac_problem_noise_variance(const otac_problem* problem) {
  return problem == nullptr ? 0.0 : problem->value.noise_variance();
}

void otac_problem_destroy(otac_problem* problem) { delete problem; }

otac_status otac_aggregation_error(const otac_problem* problem, const double* receiver_re,
                                   const double* receiver_im, const double* scalings_re,
                                   const double* scalings_im, double* out) {
  OTAC_REQUIRE(problem != nullptr && receiver_re != nullptr && scalings_re != nullptr &&
                   out != nullptr,
               "null argument");
  return guard([&] {
    const otac::CVector m = join_complex(receiver_re, receiver_im, problem->value.antennas());
    const otac::CVector b = join_complex(scalings_re, scalings_im, problem->value.devices());
    *out = otac::aggregation_error(problem->value, m, b);
    return OTAC_OK;
  });
}

otac_status otac_solve(const otac_problem* problem, otac_solver solver, otac_solution** out) {
  OTAC_REQUIRE(problem != nullptr && out != nullptr, "null argument");
  return guard([&]() -> otac_status {
    std::optional<otac::CoordinationSolution> sol;
    switch (solver) {
      case OTAC_SOLVER_ZF_SHORTCUT:
        sol = otac::zf_shortcut(problem->value);
        break;
      case OTAC_SOLVER_MMSE_SHORTCUT:
        sol = otac::mmse_shortcut(problem->value);
        break;
      default:
        sol = otac::run_solver(problem->value, to_kind(solver));
    }
    if (!sol) {
      return fail(OTAC_ERR_NOT_APPLICABLE, "shortcut condition does not hold");
    }
    *out = new otac_solution{std::move(*sol)};
    return OTAC_OK;
  });
}

double otac_solution_error(const otac_solution* solution) { return solution->value.error; }

uint64_t otac_solution_check_count(const otac_solution* solution) {
  return solution->value.check_count;
}

uint64_t otac_solution_downdate_fallbacks(const otac_solution* solution) {
  return solution->value.downdate_fallbacks;
}

size_t otac_solution_subset_size(const otac_solution* solution) {
  return solution->value.subset.size();
}

void otac_solution_subset(const otac_solution* solution, int* out) {
  const std::vector<int> idx = solution->value.subset.one_based();
  std::copy(idx.begin(), idx.end(), out);
}

size_t otac_solution_antennas(const otac_solution* solution) {
  return static_cast<size_t>(solution->value.receiver.size());
}

size_t otac_solution_devices(const otac_solution* solution) {
  return static_cast<size_t>(solution->value.scalings.size());
}

void otac_solution_receiver(const otac_solution* solution, double* re, double* im) {
  split_complex(solution->value.receiver, re, im);
}

void otac_solution_scalings(const otac_solution* solution, double* re, double* im) {
  split_complex(solution->value.scalings, re, im);
}

otac_status otac_solution_path_json(const otac_solution* solution, char** out) {
  OTAC_REQUIRE(solution != nullptr && out != nullptr, "null argument");
  return guard([&] {
    nlohmann::json path = nlohmann::json::array();
    for (const otac::DeviceSubset& s : solution->value.path) path.push_back(s.one_based());
    *out = dup_string(path.dump());
    return OTAC_OK;
  });
}

void otac_solution_destroy(otac_solution* solution) { delete solution; }

otac_status otac_enumerate_feasible(const otac_problem* problem, otac_scheme scheme,
                                    char** out) {
  OTAC_REQUIRE(problem != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = dup_string(otac::format_feasible_settings(
        otac::enumerate_feasible(problem->value, to_scheme(scheme))));
    return OTAC_OK;
  });
}

otac_status otac_tree_build(const otac_problem* problem, otac_scheme scheme, otac_tree** out) {
  OTAC_REQUIRE(problem != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = new otac_tree{otac::build_tree(problem->value, to_scheme(scheme))};
    return OTAC_OK;
  });
}

size_t otac_tree_node_count(const otac_tree* tree) {
  return tree == nullptr ? 0 : tree->value.nodes.size();
}

otac_status otac_tree_to_json(const otac_tree* tree, char** out) {
  OTAC_REQUIRE(tree != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = dup_string(otac::tree_to_json(tree->value));
    return OTAC_OK;
  });
}

otac_status otac_tree_to_dot(const otac_tree* tree, char** out) {
  OTAC_REQUIRE(tree != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = dup_string(otac::tree_to_dot(tree->value));
    return OTAC_OK;
  });
}

void otac_tree_destroy(otac_tree* tree) { delete tree; }

void otac_sweep_spec_init(otac_sweep_spec* spec) {
  if (spec == nullptr) return;
  *spec = otac_sweep_spec{};
  spec->axis = OTAC_AXIS_SNR_DB;
  spec->trials = 1000;
  spec->devices = 4;
  spec->antennas = 8;
  spec->snr_db = 10.0;
  spec->power = 1.0;
  spec->fading = OTAC_FADING_COMPLEX;
  spec->metric = OTAC_METRIC_ERROR;
}

otac_status otac_sweep_run(const otac_sweep_spec* spec, otac_sweep** out) {
  OTAC_REQUIRE(spec != nullptr && out != nullptr, "null argument");
  OTAC_REQUIRE(spec->grid != nullptr || spec->grid_size == 0, "null grid");
  OTAC_REQUIRE(spec->solvers != nullptr || spec->solver_count == 0, "null solver list");
  return guard([&] {
    otac::SweepSpec s;
    s.axis = spec->axis == OTAC_AXIS_LOAD ? otac::SweepAxis::kLoad : otac::SweepAxis::kSnrDb;
    s.grid.assign(spec->grid, spec->grid + spec->grid_size);
    s.trials = spec->trials;
    s.devices = spec->devices;
    s.antennas = spec->antennas;
    s.snr_db = spec->snr_db;
    s.power = spec->power;
    if (spec->pathloss != nullptr) s.pathloss.assign(spec->pathloss, spec->pathloss + spec->devices);
    for (size_t i = 0; i < spec->solver_count; ++i) s.solvers.push_back(to_kind(spec->solvers[i]));
    s.seed = spec->seed;
    s.fading = to_fading(spec->fading);
    s.threads = spec->threads;
    otac::SweepResult result = spec->metric == OTAC_METRIC_CHECKTIME ? otac::checktime_sweep(s)
                                                                     : otac::run_sweep(s);
    *out = new otac_sweep{std::move(result)};
    return OTAC_OK;
  });
}

size_t otac_sweep_point_count(const otac_sweep* sweep) {
  return sweep == nullptr ? 0 : sweep->value.points.size();
}

otac_status otac_sweep_point_at(const otac_sweep* sweep, size_t index, otac_sweep_point* out) {
  OTAC_REQUIRE(sweep != nullptr && out != nullptr, "null argument");
  OTAC_REQUIRE(index < sweep->value.points.size(), "point index out of range");
  const otac::SweepPoint& p = sweep->value.points[index];
  *out = otac_sweep_point{p.axis_value,  p.antennas,         p.noise_variance,
                          from_kind(p.solver), p.mean_error, p.mean_error_db,
                          p.mean_check_count,  p.trials};
  return OTAC_OK;
}

otac_status otac_sweep_to_csv(const otac_sweep* sweep, char** out) {
  OTAC_REQUIRE(sweep != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = dup_string(otac::sweep_to_csv(sweep->value));
    return OTAC_OK;
  });
}

otac_status otac_sweep_to_json(const otac_sweep* sweep, char** out) {
  OTAC_REQUIRE(sweep != nullptr && out != nullptr, "null argument");
  return guard([&] {
    *out = dup_string(otac::sweep_to_json(sweep->value));
    return OTAC_OK;
  });
}

void otac_sweep_destroy(otac_sweep* sweep) { delete sweep; }

void otac_compare_spec_init(otac_compare_spec* spec) {
  if (spec == nullptr) return;
  *spec = otac_compare_spec{};
  spec->devices = 4;
  spec->antennas = 8;
  spec->snr_db = 10.0;
  spec->power = 1.0;
  spec->trials = 1000;
  spec->fading = OTAC_FADING_COMPLEX;
}

otac_status otac_oracle_compare(const otac_compare_spec* spec, char** out) {
  OTAC_REQUIRE(spec != nullptr && out != nullptr, "null argument");
  return guard([&] {
    otac::OracleCompareSpec s;
    s.devices = spec->devices;
    s.antennas = spec->antennas;
    s.snr_db = spec->snr_db;
    s.power = spec->power;
    s.trials = spec->trials;
    if (spec->pathloss != nullptr) s.pathloss.assign(spec->pathloss, spec->pathloss + spec->devices);
    s.seed = spec->seed;
    s.fading = to_fading(spec->fading);
    s.threads = spec->threads;
    *out = dup_string(otac::compare_to_json(otac::oracle_compare(s)));
    return OTAC_OK;
  });
}

}  // extern "C"

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

#ifndef OTACOORD_SIM_HPP_
#define OTACOORD_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otacoord/model.hpp"

namespace otac {

enum class Fading {
  // Entries CN(0, 1/N): real and imaginary parts each N(0, 1/(2N)).
  kComplex,
  // Entries N(0, 1/N), imaginary part zero.
  kReal,
};

const char* to_string(Fading fading);
Fading parse_fading(std::string_view name);

// h_{n,l} = t_l f_{n,l} with i.i.d. fading f and fixed amplitude gains t.
//
// Variates are counter based: a trial's stream key is
//   k = splitmix64(seed ^ splitmix64(trial ^ 0x632be59bd9b4e019)),
// word j of the stream is splitmix64(k + j * 0x9e3779b97f4a7c15), and
// uniforms are ((word >> 11) + 0.5) * 2^-53. Entry (n, l) takes words
// 2e and 2e+1, e = l*N + n, through Box-Muller. Any entry is therefore a
// pure function of (seed, trial, n, l).
struct ChannelModel {
  std::size_t antennas = 1;
  std::size_t devices = 1;
  // Amplitude gains t_l; empty means all ones.
  std::vector<double> pathloss;
  std::uint64_t seed = 0;
  Fading fading = Fading::kComplex;
};

CMatrix draw_channel(const ChannelModel& model, std::uint64_t trial);

// Instance for one trial: phi_l = 1/L, given P and sigma^2.
CoordinationProblem generate_problem(const ChannelModel& model, std::uint64_t trial,
                                     double power, double noise_variance);

enum class SolverKind { kAzf, kAmmse, kZfOpt, kMmseOpt };

// "azf", "ammse", "zf-opt", "mmse-opt"
const char* to_string(SolverKind solver);
SolverKind parse_solver(std::string_view name);

CoordinationSolution run_solver(const CoordinationProblem& problem, SolverKind solver);

enum class SweepAxis { kSnrDb, kLoad };
enum class Metric { kError, kCheckTime };

const char* to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);
const char* to_string(Metric metric);
Metric parse_metric(std::string_view name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kSnrDb;
  std::vector<double> grid;
  std::size_t trials = 1000;
  std::size_t devices = 4;
  // Used for the SNR axis; the load axis sets N = round(xi * L).
  std::size_t antennas = 8;
  // Used for the load axis.
  double snr_db = 10.0;
  double power = 1.0;
  std::vector<double> pathloss;
  std::vector<SolverKind> solvers;
  std::uint64_t seed = 0;
  Fading fading = Fading::kComplex;
  Metric metric = Metric::kError;
  // 0 picks default_thread_count().
  unsigned threads = 0;
  // Keep per-trial errors and check counts in the result.
  bool record_trials = false;
};

struct SweepPoint {
  double axis_value = 0.0;
  std::size_t antennas = 0;
  double noise_variance = 0.0;
  SolverKind solver = SolverKind::kAzf;
  double mean_error = 0.0;
  double mean_error_db = 0.0;
  double mean_check_count = 0.0;
  std::size_t trials = 0;
  std::vector<double> trial_errors;
  std::vector<std::uint64_t> trial_check_counts;
};

struct SweepResult {
  SweepSpec spec;
  // Grid-major, solvers in spec order within each grid point.
  std::vector<SweepPoint> points;
};

// Monte Carlo sweep with phi_l = 1/L and sigma^2 = P 10^(-SNR/10). Every
// solver sees the same channel within a trial; on the SNR axis a trial also
// reuses its channel across grid points. Errors are averaged linearly.
SweepResult run_sweep(const SweepSpec& spec);

// run_sweep restricted to the tree-search solvers, tagged Metric::kCheckTime.
SweepResult checktime_sweep(const SweepSpec& spec);

// Columns: axis_value,solver,mean_error_linear,mean_error_db,
// mean_check_count,trials,seed; preceded by "# key: value" metadata lines.
std::string sweep_to_csv(const SweepResult& result);
std::string sweep_to_json(const SweepResult& result);

// start, start+step, ... up to stop (included when within 1e-9).
std::vector<double> expand_grid(double start, double step, double stop);
// "start:step:stop" or a comma-separated list.
std::vector<double> parse_grid(std::string_view text);

// OTA_COORD_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> values);

struct OracleCompareSpec {
  std::size_t devices = 4;
  std::size_t antennas = 8;
  double snr_db = 10.0;
  double power = 1.0;
  std::size_t trials = 1000;
  std::vector<double> pathloss;
  std::uint64_t seed = 0;
  Fading fading = Fading::kComplex;
  unsigned threads = 0;
};

struct SchemeComparison {
  SolverKind approximate = SolverKind::kAzf;
  SolverKind exact = SolverKind::kZfOpt;
  std::size_t trials = 0;
  // Fraction of trials where both pick the same subset.
  double subset_match_rate = 0.0;
  // Fraction of trials with errors equal within 1e-9 relative.
  double error_match_rate = 0.0;
  // Per-trial gap 10 log10(approx / exact) in dB.
  double mean_gap_db = 0.0;
  double max_gap_db = 0.0;
  double p50_gap_db = 0.0;
  double p90_gap_db = 0.0;
  double p99_gap_db = 0.0;
  // Trials where the approximation beat the exhaustive optimum by more
  // than 1e-12 (must be zero).
  std::size_t dominance_violations = 0;
  double mean_approximate_db = 0.0;
  double mean_exact_db = 0.0;
};

struct OracleCompareReport {
  OracleCompareSpec spec;
  std::vector<SchemeComparison> schemes;  // ZF then MMSE
};

OracleCompareReport oracle_compare(const OracleCompareSpec& spec);
std::string compare_to_json(const OracleCompareReport& report);

}  // namespace otac

#endif  // OTACOORD_SIM_HPP_

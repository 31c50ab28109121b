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

#include "otacoord/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

#include "json.hpp"
#include "otacoord/error.hpp"
#include "otacoord/mmse.hpp"
#include "otacoord/tree.hpp"
#include "otacoord/zf.hpp"

namespace otac {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
  z += kGamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t trial)
      : key_(splitmix64(seed ^ splitmix64(trial ^ 0x632be59bd9b4e019ULL))) {}

  double uniform(std::uint64_t j) const {
    const std::uint64_t w = splitmix64(key_ + j * kGamma);
    return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
  }

  // Two independent standard normals for entry e.
  std::pair<double, double> normals(std::uint64_t e) const {
    const double r = std::sqrt(-2.0 * std::log(uniform(2 * e)));
    const double a = 2.0 * std::numbers::pi * uniform(2 * e + 1);
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  std::uint64_t key_;
};

// Load sweeps change N per grid point; give each point its own stream.
std::uint64_t grid_seed(std::uint64_t seed, std::size_t grid_index) {
  return splitmix64(seed ^ (0xd1b54a32d192ed03ULL * (grid_index + 1)));
}

void check_pathloss(const std::vector<double>& pathloss, std::size_t devices) {
  if (!pathloss.empty() && pathloss.size() != devices) {
    throw Error(ErrorCode::kInvalidArgument,
                "pathloss profile has " + std::to_string(pathloss.size()) +
                    " entries for " + std::to_string(devices) + " devices");
  }
  for (double t : pathloss) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw Error(ErrorCode::kInvalidArgument, "pathloss gains must be positive");
    }
  }
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

double noise_for_snr(double power, double snr_db) {
  return power * std::pow(10.0, -snr_db / 10.0);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

nlohmann::json spec_metadata(const SweepSpec& spec) {
  nlohmann::json solvers = nlohmann::json::array();
  for (SolverKind s : spec.solvers) solvers.push_back(to_string(s));
  return {{"axis", to_string(spec.axis)},
          {"grid", spec.grid},
          {"trials", spec.trials},
          {"devices", spec.devices},
          {"antennas", spec.antennas},
          {"snr_db", spec.snr_db},
          {"power", spec.power},
          {"pathloss", spec.pathloss},
          {"solvers", std::move(solvers)},
          {"seed", spec.seed},
          {"fading", to_string(spec.fading)},
          {"metric", to_string(spec.metric)},
          {"weights", "1/L"}};
}

}  // namespace

const char* to_string(Fading fading) {
  return fading == Fading::kComplex ? "complex" : "real";
}

Fading parse_fading(std::string_view name) {
  if (name == "complex") return Fading::kComplex;
  if (name == "real") return Fading::kReal;
  throw Error(ErrorCode::kInvalidArgument, "unknown fading \"" + std::string(name) + "\"");
}

CMatrix draw_channel(const ChannelModel& model, std::uint64_t trial) {
  if (model.antennas < 1 || model.devices < 1) {
    throw Error(ErrorCode::kInvalidArgument, "channel model needs N, L >= 1");
  }
  check_pathloss(model.pathloss, model.devices);
  const CounterStream stream(model.seed, trial);
  const auto n = static_cast<Eigen::Index>(model.antennas);
  const auto l = static_cast<Eigen::Index>(model.devices);
  const double scale = model.fading == Fading::kComplex
                           ? 1.0 / std::sqrt(2.0 * static_cast<double>(n))
                           : 1.0 / std::sqrt(static_cast<double>(n));
  CMatrix h(n, l);
  for (Eigen::Index c = 0; c < l; ++c) {
    const double t = model.pathloss.empty() ? 1.0 : model.pathloss[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto [re, im] = stream.normals(static_cast<std::uint64_t>(c * n + r));
      h(r, c) = model.fading == Fading::kComplex ? std::complex<double>(re, im) * (t * scale)
                                                 : std::complex<double>(re * t * scale, 0.0);
    }
  }
  return h;
}

CoordinationProblem generate_problem(const ChannelModel& model, std::uint64_t trial,
                                     double power, double noise_variance) {
  return CoordinationProblem(
      draw_channel(model, trial),
      RVector::Constant(static_cast<Eigen::Index>(model.devices),
                        1.0 / static_cast<double>(model.devices)),
      power, noise_variance);
}

const char* to_string(SolverKind solver) {
  switch (solver) {
    case SolverKind::kAzf: return "azf";
    case SolverKind::kAmmse: return "ammse";
    case SolverKind::kZfOpt: return "zf-opt";
    case SolverKind::kMmseOpt: return "mmse-opt";
  }
  return "?";
}

SolverKind parse_solver(std::string_view name) {
  if (name == "azf") return SolverKind::kAzf;
  if (name == "ammse") return SolverKind::kAmmse;
  if (name == "zf-opt" || name == "zf_opt") return SolverKind::kZfOpt;
  if (name == "mmse-opt" || name == "mmse_opt") return SolverKind::kMmseOpt;
  throw Error(ErrorCode::kInvalidArgument, "unknown solver \"" + std::string(name) + "\"");
}

CoordinationSolution run_solver(const CoordinationProblem& problem, SolverKind solver) {
  switch (solver) {
    case SolverKind::kAzf: return azf_solve(problem);
    case SolverKind::kAmmse: return ammse_solve(problem);
    case SolverKind::kZfOpt: return exhaustive_optimum(problem, Scheme::kZf);
    case SolverKind::kMmseOpt: return exhaustive_optimum(problem, Scheme::kMmse);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown solver");
}

const char* to_string(SweepAxis axis) { return axis == SweepAxis::kSnrDb ? "snr" : "load"; }

SweepAxis parse_axis(std::string_view name) {
  if (name == "snr" || name == "snr_db") return SweepAxis::kSnrDb;
  if (name == "load") return SweepAxis::kLoad;
  throw Error(ErrorCode::kInvalidArgument, "unknown axis \"" + std::string(name) + "\"");
}

const char* to_string(Metric metric) { return metric == Metric::kError ? "error" : "checktime"; }

Metric parse_metric(std::string_view name) {
  if (name == "error") return Metric::kError;
  if (name == "checktime") return Metric::kCheckTime;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric \"" + std::string(name) + "\"");
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.grid.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep grid is empty");
  if (spec.trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  if (spec.solvers.empty()) throw Error(ErrorCode::kInvalidArgument, "no solvers requested");
  if (spec.devices < 1 || spec.devices > kMaxDevices) {
    throw Error(ErrorCode::kInvalidArgument, "device count must be in 1..64");
  }
  if (!(spec.power > 0.0)) throw Error(ErrorCode::kInvalidArgument, "power must be positive");
  check_pathloss(spec.pathloss, spec.devices);

  bool needs_oracle = false;
  bool needs_tree = false;
  for (SolverKind s : spec.solvers) {
    needs_oracle |= s == SolverKind::kZfOpt || s == SolverKind::kMmseOpt;
    needs_tree |= s == SolverKind::kAzf || s == SolverKind::kAmmse;
  }
  if (needs_oracle && spec.devices > kEnumerationCap) {
    throw Error(ErrorCode::kInstanceTooLarge,
                "exhaustive solvers support at most " + std::to_string(kEnumerationCap) +
                    " devices");
  }

  // Resolve per-grid-point antenna count and noise variance.
  const std::size_t g_count = spec.grid.size();
  std::vector<std::size_t> antennas(g_count);
  std::vector<double> noise(g_count);
  for (std::size_t g = 0; g < g_count; ++g) {
    const double v = spec.grid[g];
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "grid values must be finite");
    if (spec.axis == SweepAxis::kSnrDb) {
      antennas[g] = spec.antennas;
      noise[g] = noise_for_snr(spec.power, v);
    } else {
      const double n = std::round(v * static_cast<double>(spec.devices));
      if (!(n >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "load yields N < 1");
      antennas[g] = static_cast<std::size_t>(n);
      noise[g] = noise_for_snr(spec.power, spec.snr_db);
    }
    if (antennas[g] < 1) throw Error(ErrorCode::kInvalidArgument, "antenna count must be >= 1");
    if (needs_tree && antennas[g] < spec.devices) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tree-search solvers need N >= L (N=" + std::to_string(antennas[g]) +
                      ", L=" + std::to_string(spec.devices) + ")");
    }
  }

  const std::size_t s_count = spec.solvers.size();
  const std::size_t trials = spec.trials;
  // [g][s][trial]
  std::vector<double> errors(g_count * s_count * trials);
  std::vector<std::uint64_t> checks(g_count * s_count * trials);
  auto slot = [&](std::size_t g, std::size_t s, std::size_t t) {
    return (g * s_count + s) * trials + t;
  };

  parallel_for(trials, spec.threads, [&](std::size_t t) {
    std::optional<CMatrix> shared;
    for (std::size_t g = 0; g < g_count; ++g) {
      ChannelModel model{antennas[g], spec.devices, spec.pathloss, spec.seed, spec.fading};
      CMatrix h;
      if (spec.axis == SweepAxis::kSnrDb) {
        if (!shared) shared = draw_channel(model, t);
        h = *shared;
      } else {
        model.seed = grid_seed(spec.seed, g);
        h = draw_channel(model, t);
      }
      const CoordinationProblem problem(
          std::move(h),
          RVector::Constant(static_cast<Eigen::Index>(spec.devices),
                            1.0 / static_cast<double>(spec.devices)),
          spec.power, noise[g]);
      for (std::size_t s = 0; s < s_count; ++s) {
        const CoordinationSolution sol = run_solver(problem, spec.solvers[s]);
        errors[slot(g, s, t)] = sol.error;
        checks[slot(g, s, t)] = sol.check_count;
      }
    }
  });

  SweepResult result;
  result.spec = spec;
  std::vector<double> counts(trials);
  for (std::size_t g = 0; g < g_count; ++g) {
    for (std::size_t s = 0; s < s_count; ++s) {
      SweepPoint p;
      p.axis_value = spec.grid[g];
      p.antennas = antennas[g];
      p.noise_variance = noise[g];
      p.solver = spec.solvers[s];
      p.trials = trials;
      const auto first = errors.begin() + static_cast<std::ptrdiff_t>(slot(g, s, 0));
      const std::span<const double> errs(&*first, trials);
      p.mean_error = pairwise_sum(errs) / static_cast<double>(trials);
      p.mean_error_db = to_db(p.mean_error);
      for (std::size_t t = 0; t < trials; ++t) {
        counts[t] = static_cast<double>(checks[slot(g, s, t)]);
      }
      p.mean_check_count = pairwise_sum(counts) / static_cast<double>(trials);
      if (spec.record_trials) {
        p.trial_errors.assign(errs.begin(), errs.end());
        p.trial_check_counts.assign(checks.begin() + static_cast<std::ptrdiff_t>(slot(g, s, 0)),
                                    checks.begin() + static_cast<std::ptrdiff_t>(slot(g, s, 0) + trials));
      }
      result.points.push_back(std::move(p));
    }
  }
  return result;
}

SweepResult checktime_sweep(const SweepSpec& spec) {
  for (SolverKind s : spec.solvers) {
    if (s != SolverKind::kAzf && s != SolverKind::kAmmse) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("check-time sweeps take azf/ammse only, got ") + to_string(s));
    }
  }
  SweepSpec tagged = spec;
  tagged.metric = Metric::kCheckTime;
  return run_sweep(tagged);
}

std::string sweep_to_csv(const SweepResult& result) {
  std::string out = "# otacoord sweep\n";
  const nlohmann::json meta = spec_metadata(result.spec);
  for (const auto& [key, value] : meta.items()) {
    out += "# " + key + ": " + value.dump() + "\n";
  }
  out += "axis_value,solver,mean_error_linear,mean_error_db,mean_check_count,trials,seed\n";
  for (const SweepPoint& p : result.points) {
    out += format_number(p.axis_value) + "," + to_string(p.solver) + "," +
           format_number(p.mean_error) + "," + format_number(p.mean_error_db) + "," +
           format_number(p.mean_check_count) + "," + std::to_string(p.trials) + "," +
           std::to_string(result.spec.seed) + "\n";
  }
  return out;
}

std::string sweep_to_json(const SweepResult& result) {
  nlohmann::json points = nlohmann::json::array();
  for (const SweepPoint& p : result.points) {
    points.push_back({{"axis_value", p.axis_value},
                      {"antennas", p.antennas},
                      {"noise_variance", p.noise_variance},
                      {"solver", to_string(p.solver)},
                      {"mean_error_linear", p.mean_error},
                      {"mean_error_db", p.mean_error_db},
                      {"mean_check_count", p.mean_check_count},
                      {"trials", p.trials},
                      {"seed", result.spec.seed}});
  }
  nlohmann::json doc = {{"metadata", spec_metadata(result.spec)}, {"points", std::move(points)}};
  return doc.dump(2);
}

std::vector<double> expand_grid(double start, double step, double stop) {
  if (!std::isfinite(start) || !std::isfinite(step) || !std::isfinite(stop)) {
    throw Error(ErrorCode::kInvalidArgument, "grid bounds must be finite");
  }
  if (step == 0.0) {
    if (start != stop) throw Error(ErrorCode::kInvalidArgument, "grid step must be non-zero");
    return {start};
  }
  if ((stop - start) / step < -1e-9) return {};
  const double span = (stop - start) / step;
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  if (count > 1'000'000) throw Error(ErrorCode::kInvalidArgument, "grid too large");
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(start + static_cast<double>(i) * step);
  }
  return out;
}

std::vector<double> parse_grid(std::string_view text) {
  auto to_double = [](std::string_view s) {
    std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size()) {
      throw Error(ErrorCode::kInvalidArgument, "bad grid value \"" + buf + "\"");
    }
    return v;
  };
  if (text.find(':') != std::string_view::npos) {
    const std::size_t a = text.find(':');
    const std::size_t b = text.find(':', a + 1);
    if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument, "grid must be start:step:stop");
    }
    return expand_grid(to_double(text.substr(0, a)), to_double(text.substr(a + 1, b - a - 1)),
                       to_double(text.substr(b + 1)));
  }
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size() && !text.empty()) {
    const std::size_t comma = text.find(',', pos);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(to_double(text.substr(pos, end - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("OTA_COORD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

OracleCompareReport oracle_compare(const OracleCompareSpec& spec) {
  if (spec.trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  if (spec.devices > kEnumerationCap) {
    throw Error(ErrorCode::kInstanceTooLarge,
                "oracle comparison supports at most " + std::to_string(kEnumerationCap) +
                    " devices");
  }
  if (spec.antennas < spec.devices) {
    throw Error(ErrorCode::kInvalidArgument, "oracle comparison needs N >= L");
  }
  const ChannelModel model{spec.antennas, spec.devices, spec.pathloss, spec.seed, spec.fading};
  check_pathloss(spec.pathloss, spec.devices);
  const double noise = noise_for_snr(spec.power, spec.snr_db);

  struct TrialRecord {
    CoordinationSolution approx[2];
    CoordinationSolution exact[2];
  };
  std::vector<TrialRecord> records(spec.trials);
  parallel_for(spec.trials, spec.threads, [&](std::size_t t) {
    const CoordinationProblem problem = generate_problem(model, t, spec.power, noise);
    records[t].approx[0] = azf_solve(problem);
    records[t].exact[0] = exhaustive_optimum(problem, Scheme::kZf);
    records[t].approx[1] = ammse_solve(problem);
    records[t].exact[1] = exhaustive_optimum(problem, Scheme::kMmse);
  });

  OracleCompareReport report;
  report.spec = spec;
  for (int k = 0; k < 2; ++k) {
    SchemeComparison c;
    c.approximate = k == 0 ? SolverKind::kAzf : SolverKind::kAmmse;
    c.exact = k == 0 ? SolverKind::kZfOpt : SolverKind::kMmseOpt;
    c.trials = spec.trials;
    std::vector<double> gaps(spec.trials), approx(spec.trials), exact(spec.trials);
    std::size_t subset_matches = 0, error_matches = 0;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      const double a = records[t].approx[k].error;
      const double e = records[t].exact[k].error;
      approx[t] = a;
      exact[t] = e;
      subset_matches += records[t].approx[k].subset == records[t].exact[k].subset;
      error_matches += std::abs(a - e) <= 1e-9 * std::max(std::abs(e), 1e-300);
      c.dominance_violations += a < e - 1e-12 * std::abs(e);
      gaps[t] = (a > 0.0 && e > 0.0) ? to_db(a) - to_db(e) : 0.0;
    }
    const auto n = static_cast<double>(spec.trials);
    c.subset_match_rate = static_cast<double>(subset_matches) / n;
    c.error_match_rate = static_cast<double>(error_matches) / n;
    c.mean_gap_db = pairwise_sum(gaps) / n;
    c.mean_approximate_db = to_db(pairwise_sum(approx) / n);
    c.mean_exact_db = to_db(pairwise_sum(exact) / n);
    std::sort(gaps.begin(), gaps.end());
    auto quantile = [&](double q) {
      const auto idx = static_cast<std::size_t>(std::ceil(q * n)) - 1;
      return gaps[std::min(idx, gaps.size() - 1)];
    };
    c.max_gap_db = gaps.back();
    c.p50_gap_db = quantile(0.5);
    c.p90_gap_db = quantile(0.9);
    c.p99_gap_db = quantile(0.99);
    report.schemes.push_back(c);
  }
  return report;
}

std::string compare_to_json(const OracleCompareReport& report) {
  nlohmann::json schemes = nlohmann::json::array();
  for (const SchemeComparison& c : report.schemes) {
    schemes.push_back({{"approximate", to_string(c.approximate)},
                       {"exact", to_string(c.exact)},
                       {"trials", c.trials},
                       {"subset_match_rate", c.subset_match_rate},
                       {"error_match_rate", c.error_match_rate},
                       {"mean_gap_db", c.mean_gap_db},
                       {"max_gap_db", c.max_gap_db},
                       {"p50_gap_db", c.p50_gap_db},
                       {"p90_gap_db", c.p90_gap_db},
                       {"p99_gap_db", c.p99_gap_db},
                       {"dominance_violations", c.dominance_violations},
                       {"mean_approximate_db", c.mean_approximate_db},
                       {"mean_exact_db", c.mean_exact_db}});
  }
  const OracleCompareSpec& s = report.spec;
  nlohmann::json doc = {{"metadata",
                         {{"devices", s.devices},
                          {"antennas", s.antennas},
                          {"snr_db", s.snr_db},
                          {"power", s.power},
                          {"trials", s.trials},
                          {"pathloss", s.pathloss},
                          {"seed", s.seed},
                          {"fading", to_string(s.fading)},
                          {"weights", "1/L"}}},
                        {"schemes", std::move(schemes)}};
  return doc.dump(2);
}

}  // namespace otac

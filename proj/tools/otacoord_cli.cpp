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

// Command-line front end. Talks to the solver library through the C API only.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "otacoord/otacoord.h"

namespace {

using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitTooLarge = 4;

struct CliFailure {
  int exit_code;
  std::string message;
};

int exit_code_for(otac_status status) {
  switch (status) {
    case OTAC_ERR_INVALID_ARGUMENT:
    case OTAC_ERR_PARSE:
      return kExitInput;
    case OTAC_ERR_INSTANCE_TOO_LARGE:
      return kExitTooLarge;
    default:
      return kExitSolver;
  }
}

void check(otac_status status, const std::string& context) {
  if (status != OTAC_OK) {
    throw CliFailure{exit_code_for(status), context + ": " + otac_last_error()};
  }
}

[[noreturn]] void input_error(const std::string& message) {
  throw CliFailure{kExitInput, message};
}

struct ProblemDeleter {
  void operator()(otac_problem* p) const { otac_problem_destroy(p); }
};
struct SolutionDeleter {
  void operator()(otac_solution* p) const { otac_solution_destroy(p); }
};
struct TreeDeleter {
  void operator()(otac_tree* p) const { otac_tree_destroy(p); }
};
struct SweepDeleter {
  void operator()(otac_sweep* p) const { otac_sweep_destroy(p); }
};
using Problem = std::unique_ptr<otac_problem, ProblemDeleter>;
using Solution = std::unique_ptr<otac_solution, SolutionDeleter>;
using Tree = std::unique_ptr<otac_tree, TreeDeleter>;
using Sweep = std::unique_ptr<otac_sweep, SweepDeleter>;

std::string take_string(char* text) {
  std::string out = text == nullptr ? "" : text;
  otac_free_string(text);
  return out;
}

// Output values carry 15 significant digits.
json round15(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

std::string fmt15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

json round15(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(round15(x));
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size()) input_error("bad number in " + flag + ": " + item);
    out.push_back(v);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliFailure{kExitInput, "cannot write " + path};
  out << text;
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

otac_fading fading_from(const std::string& name) {
  otac_fading f{};
  check(otac_fading_from_name(name.c_str(), &f), "--fading");
  return f;
}

// Seed handling shared by all randomized commands.
struct SeedOptions {
  std::optional<std::uint64_t> seed;
  bool seedless = false;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "Seed for the channel stream");
    app->add_flag("--seedless", seedless, "Use the fixed seed 0 when --seed is absent");
  }

  // Returns the seed and whether it was generated here.
  std::pair<std::uint64_t, bool> resolve() const {
    if (seed && seedless) input_error("--seed and --seedless are mutually exclusive");
    if (seed) return {*seed, false};
    if (seedless) return {0, false};
    return {fresh_seed(), true};
  }
};

struct InstanceOptions {
  std::string instance_path;
  bool example = false;
  std::size_t devices = 4;
  std::size_t antennas = 8;
  std::uint64_t trial = 0;
  std::string pathloss;
  std::string fading = "complex";
  std::optional<double> sigma2;
  double snr_db = 10.0;
  double power = 1.0;
  SeedOptions seed;
  std::vector<CLI::Option*> generator_flags;

  void add(CLI::App* app) {
    app->add_option("--instance", instance_path, "Instance JSON file");
    app->add_flag("--example", example, "Use the built-in 4-device, 5-antenna example");
    generator_flags = {
        app->add_option("--L", devices, "Devices for a generated instance"),
        app->add_option("--N", antennas, "Antennas for a generated instance"),
        app->add_option("--trial", trial, "Trial index within the seeded stream"),
        app->add_option("--pathloss", pathloss, "Comma-separated amplitude gains"),
        app->add_option("--fading", fading, "complex or real"),
        app->add_option("--snr", snr_db, "SNR in dB when --sigma2 is absent"),
        app->add_option("--power", power, "Per-device power budget"),
    };
    app->add_option("--sigma2", sigma2, "Noise variance (overrides the instance value)");
    seed.add(app);
  }

  Problem load(json& metadata) const {
    const bool generated_flags = std::any_of(generator_flags.begin(), generator_flags.end(),
                                             [](CLI::Option* o) { return o->count() > 0; });
    const int sources = (instance_path.empty() ? 0 : 1) + (example ? 1 : 0);
    if (sources > 1) input_error("--instance and --example are mutually exclusive");
    if (sources == 1 && (generated_flags || seed.seed || seed.seedless)) {
      input_error("generator flags cannot be combined with --instance or --example");
    }
    otac_problem* raw = nullptr;
    if (!instance_path.empty()) {
      check(otac_problem_from_json(read_file(instance_path).c_str(), &raw), instance_path);
      metadata["instance"] = instance_path;
    } else if (example) {
      check(otac_problem_example(sigma2.value_or(0.1), &raw), "--example");
      metadata["instance"] = "example";
    } else {
      const auto [value, generated] = seed.resolve();
      std::vector<double> gains = parse_doubles(pathloss, "--pathloss");
      if (!gains.empty() && gains.size() != devices) {
        input_error("--pathloss needs one gain per device");
      }
      const double noise = sigma2.value_or(power * std::pow(10.0, -snr_db / 10.0));
      check(otac_problem_generate(antennas, devices, gains.empty() ? nullptr : gains.data(),
                                  value, trial, fading_from(fading), power, noise, &raw),
            "generated instance");
      metadata["instance"] = "generated";
      metadata["seed"] = value;
      metadata["seed_generated"] = generated;
      metadata["trial"] = trial;
      metadata["fading"] = fading;
      metadata["pathloss"] = round15(gains);
      metadata["weights"] = "1/L";
    }
    Problem problem(raw);
    if (sigma2 && !example) {
      otac_problem* updated = nullptr;
      check(otac_problem_with_noise_variance(problem.get(), *sigma2, &updated), "--sigma2");
      problem.reset(updated);
    }
    metadata["antennas"] = otac_problem_antennas(problem.get());
    metadata["devices"] = otac_problem_devices(problem.get());
    metadata["power"] = round15(otac_problem_power(problem.get()));
    metadata["noise_variance"] = round15(otac_problem_noise_variance(problem.get()));
    return problem;
  }
};

std::vector<otac_solver> parse_solvers(const std::string& text) {
  std::vector<otac_solver> out;
  for (const std::string& name : split_list(text)) {
    otac_solver s{};
    check(otac_solver_from_name(name.c_str(), &s), "--solver");
    out.push_back(s);
  }
  if (out.empty()) input_error("no solvers given");
  return out;
}

json complex_json(const std::vector<double>& re, const std::vector<double>& im) {
  return {{"re", round15(re)}, {"im", round15(im)}};
}

std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + fmt15(xs[i]);
  return out;
}

std::string metadata_csv(const json& metadata) {
  std::string out;
  for (const auto& [key, value] : metadata.items()) {
    out += "# " + key + ": " + value.dump() + "\n";
  }
  return out;
}

// --- solve -------------------------------------------------------------------

struct SolveCommand {
  InstanceOptions instance;
  std::string solvers = "azf,ammse";
  std::string format = "json";
  std::string output;
  std::string write_instance;

  void add(CLI::App* app) {
    instance.add(app);
    app->add_option("--solver,--solvers", solvers,
                    "Comma-separated: azf, ammse, zf-opt, mmse-opt, zf-shortcut, mmse-shortcut");
    app->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--output,-o", output, "Output file (default stdout)");
    app->add_option("--write-instance", write_instance, "Also write the instance JSON here");
  }

  int run() const {
    json metadata = {{"command", "solve"}};
    Problem problem = instance.load(metadata);
    const std::vector<otac_solver> kinds = parse_solvers(solvers);
    if (!write_instance.empty()) {
      char* text = nullptr;
      check(otac_problem_to_json(problem.get(), &text), "--write-instance");
      write_output(write_instance, take_string(text));
    }

    json results = json::array();
    std::string csv_rows;
    for (otac_solver kind : kinds) {
      const std::string name = otac_solver_name(kind);
      otac_solution* raw = nullptr;
      const otac_status status = otac_solve(problem.get(), kind, &raw);
      if (status == OTAC_ERR_NOT_APPLICABLE) {
        results.push_back({{"solver", name}, {"applicable", false}});
        csv_rows += name + ",false,,,,,,,,\n";
        continue;
      }
      check(status, name);
      Solution sol(raw);
      std::vector<int> subset(otac_solution_subset_size(sol.get()));
      otac_solution_subset(sol.get(), subset.data());
      const std::size_t n = otac_solution_antennas(sol.get());
      const std::size_t l = otac_solution_devices(sol.get());
      std::vector<double> m_re(n), m_im(n), b_re(l), b_im(l);
      otac_solution_receiver(sol.get(), m_re.data(), m_im.data());
      otac_solution_scalings(sol.get(), b_re.data(), b_im.data());
      const double error = otac_solution_error(sol.get());
      const double error_db = 10.0 * std::log10(error);
      json entry = {{"solver", name},
                    {"applicable", true},
                    {"subset", subset},
                    {"error_linear", round15(error)},
                    {"error_db", round15(error_db)},
                    {"check_count", otac_solution_check_count(sol.get())},
                    {"receiver", complex_json(m_re, m_im)},
                    {"scalings", complex_json(b_re, b_im)}};
      if (kind == OTAC_SOLVER_AZF || kind == OTAC_SOLVER_AMMSE) {
        char* path = nullptr;
        check(otac_solution_path_json(sol.get(), &path), name);
        entry["path"] = json::parse(take_string(path));
      }
      results.push_back(std::move(entry));

      std::string subset_text;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        subset_text += (i ? " " : "") + std::to_string(subset[i]);
      }
      csv_rows += name + ",true," + subset_text + "," + fmt15(error) + "," + fmt15(error_db) +
                  "," + std::to_string(otac_solution_check_count(sol.get())) + "," +
                  join_numbers(m_re) + "," + join_numbers(m_im) + "," + join_numbers(b_re) +
                  "," + join_numbers(b_im) + "\n";
    }

    if (format == "csv") {
      write_output(output, metadata_csv(metadata) +
                               "solver,applicable,subset,error_linear,error_db,check_count,"
                               "receiver_re,receiver_im,scalings_re,scalings_im\n" +
                               csv_rows);
    } else {
      write_output(output, json{{"metadata", metadata}, {"results", results}}.dump(2) + "\n");
    }
    return 0;
  }
};

// --- tree --------------------------------------------------------------------

struct TreeCommand {
  InstanceOptions instance;
  std::string mode = "zf";
  std::string format = "json";
  std::string output;

  void add(CLI::App* app) {
    instance.add(app);
    app->add_option("--mode", mode, "zf or mmse")->check(CLI::IsMember({"zf", "mmse"}));
    app->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
    app->add_option("--output,-o", output, "Output file (default stdout)");
  }

  int run() const {
    json metadata = {{"command", "tree"}};
    Problem problem = instance.load(metadata);
    otac_scheme scheme{};
    check(otac_scheme_from_name(mode.c_str(), &scheme), "--mode");
    otac_tree* raw = nullptr;
    check(otac_tree_build(problem.get(), scheme, &raw), "tree");
    Tree tree(raw);
    char* text = nullptr;
    if (format == "dot") {
      check(otac_tree_to_dot(tree.get(), &text), "tree");
      std::string header;
      for (const auto& [key, value] : metadata.items()) {
        header += "// " + key + ": " + value.dump() + "\n";
      }
      write_output(output, header + take_string(text));
    } else {
      check(otac_tree_to_json(tree.get(), &text), "tree");
      json doc = json::parse(take_string(text));
      doc["metadata"] = metadata;
      write_output(output, doc.dump(2) + "\n");
    }
    return 0;
  }
};

// --- sweep -------------------------------------------------------------------

struct SweepCommand {
  std::string axis = "snr";
  std::optional<std::string> grid;
  std::size_t devices = 4;
  std::size_t antennas = 8;
  double snr_db = 10.0;
  double power = 1.0;
  std::size_t trials = 1000;
  std::optional<std::string> solvers;
  std::string metric = "error";
  std::string pathloss;
  std::string fading = "complex";
  unsigned threads = 0;
  std::string format = "csv";
  std::string output;
  SeedOptions seed;

  void add(CLI::App* app) {
    app->add_option("--axis", axis, "snr or load")->check(CLI::IsMember({"snr", "load"}));
    app->add_option("--grid", grid, "start:step:stop or a comma list");
    app->add_option("--L", devices, "Devices");
    app->add_option("--N", antennas, "Antennas (snr axis)");
    app->add_option("--snr", snr_db, "SNR in dB (load axis)");
    app->add_option("--power", power, "Per-device power budget");
    app->add_option("--trials", trials, "Trials per grid point");
    app->add_option("--solvers,--solver", solvers, "Comma-separated: azf, ammse, zf-opt, mmse-opt");
    app->add_option("--metric", metric, "error or checktime")
        ->check(CLI::IsMember({"error", "checktime"}));
    app->add_option("--pathloss", pathloss, "Comma-separated amplitude gains");
    app->add_option("--fading", fading, "complex or real");
    app->add_option("--threads", threads, "Worker threads (0 = default)");
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--output,-o", output, "Output file (default stdout)");
    seed.add(app);
  }

  int run() const {
    const std::string grid_text = grid.value_or(axis == "load" ? "1:0.5:8" : "-10:2:20");
    std::size_t count = 0;
    check(otac_parse_grid(grid_text.c_str(), nullptr, 0, &count), "--grid");
    std::vector<double> values(count);
    check(otac_parse_grid(grid_text.c_str(), values.data(), count, &count), "--grid");

    const std::vector<otac_solver> kinds =
        parse_solvers(solvers.value_or(metric == "checktime" ? "azf,ammse"
                                                             : "azf,ammse,zf-opt,mmse-opt"));
    const std::vector<double> gains = parse_doubles(pathloss, "--pathloss");
    if (!gains.empty() && gains.size() != devices) {
      input_error("--pathloss needs one gain per device");
    }
    const auto [seed_value, generated] = seed.resolve();

    otac_sweep_spec spec;
    otac_sweep_spec_init(&spec);
    check(otac_axis_from_name(axis.c_str(), &spec.axis), "--axis");
    check(otac_metric_from_name(metric.c_str(), &spec.metric), "--metric");
    spec.grid = values.data();
    spec.grid_size = values.size();
    spec.trials = trials;
    spec.devices = devices;
    spec.antennas = antennas;
    spec.snr_db = snr_db;
    spec.power = power;
    spec.pathloss = gains.empty() ? nullptr : gains.data();
    spec.solvers = kinds.data();
    spec.solver_count = kinds.size();
    spec.seed = seed_value;
    spec.fading = fading_from(fading);
    spec.threads = threads;

    otac_sweep* raw = nullptr;
    check(otac_sweep_run(&spec, &raw), "sweep");
    Sweep sweep(raw);
    char* text = nullptr;
    if (format == "json") {
      check(otac_sweep_to_json(sweep.get(), &text), "sweep");
      json doc = json::parse(take_string(text));
      doc["metadata"]["seed_generated"] = generated;
      write_output(output, doc.dump(2) + "\n");
    } else {
      check(otac_sweep_to_csv(sweep.get(), &text), "sweep");
      write_output(output, "# seed_generated: " + std::string(generated ? "true" : "false") +
                               "\n" + take_string(text));
    }
    return 0;
  }
};

// --- oracle-compare ----------------------------------------------------------

struct CompareCommand {
  std::size_t devices = 4;
  std::size_t antennas = 8;
  double snr_db = 10.0;
  double power = 1.0;
  std::size_t trials = 1000;
  std::string pathloss;
  std::string fading = "complex";
  unsigned threads = 0;
  std::string output;
  SeedOptions seed;

  void add(CLI::App* app) {
    app->add_option("--L", devices, "Devices");
    app->add_option("--N", antennas, "Antennas");
    app->add_option("--snr", snr_db, "SNR in dB");
    app->add_option("--power", power, "Per-device power budget");
    app->add_option("--trials", trials, "Generated instances");
    app->add_option("--pathloss", pathloss, "Comma-separated amplitude gains");
    app->add_option("--fading", fading, "complex or real");
    app->add_option("--threads", threads, "Worker threads (0 = default)");
    app->add_option("--output,-o", output, "Output file (default stdout)");
    seed.add(app);
  }

  int run() const {
    const std::vector<double> gains = parse_doubles(pathloss, "--pathloss");
    if (!gains.empty() && gains.size() != devices) {
      input_error("--pathloss needs one gain per device");
    }
    const auto [seed_value, generated] = seed.resolve();
    otac_compare_spec spec;
    otac_compare_spec_init(&spec);
    spec.devices = devices;
    spec.antennas = antennas;
    spec.snr_db = snr_db;
    spec.power = power;
    spec.trials = trials;
    spec.pathloss = gains.empty() ? nullptr : gains.data();
    spec.seed = seed_value;
    spec.fading = fading_from(fading);
    spec.threads = threads;
    char* text = nullptr;
    check(otac_oracle_compare(&spec, &text), "oracle-compare");
    json doc = json::parse(take_string(text));
    doc["metadata"]["seed_generated"] = generated;
    write_output(output, doc.dump(2) + "\n");
    return 0;
  }
};

// Expands `--config file.json` into flags placed right after the subcommand,
// so flags given explicitly on the command line take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    std::size_t consumed = 0;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) input_error("--config needs a path");
      path = args[i + 1];
      consumed = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      consumed = 1;
    } else {
      continue;
    }
    json config;
    try {
      config = json::parse(read_file(path));
    } catch (const json::exception& e) {
      input_error("malformed config " + path + ": " + e.what());
    }
    if (!config.is_object()) input_error("config " + path + " must be a JSON object");
    std::vector<std::string> flags;
    for (const auto& [key, value] : config.items()) {
      const std::string flag = "--" + key;
      if (value.is_boolean()) {
        if (value.get<bool>()) flags.push_back(flag);
      } else if (value.is_array()) {
        std::string joined;
        for (std::size_t k = 0; k < value.size(); ++k) {
          joined += (k ? "," : "") + (value[k].is_string() ? value[k].get<std::string>()
                                                           : value[k].dump());
        }
        flags.push_back(flag);
        flags.push_back(joined);
      } else if (value.is_string()) {
        flags.push_back(flag);
        flags.push_back(value.get<std::string>());
      } else if (value.is_number()) {
        flags.push_back(flag);
        flags.push_back(value.dump());
      } else {
        input_error("unsupported config value for " + key);
      }
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
               args.begin() + static_cast<std::ptrdiff_t>(i + consumed));
    args.insert(args.begin() + 2, flags.begin(), flags.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receiver and power-scaling coordination for over-the-air aggregation",
               "otacoord-cli"};
  app.require_subcommand(1);
  app.set_version_flag("--version", otac_version());
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SolveCommand solve;
  TreeCommand tree;
  SweepCommand sweep;
  CompareCommand compare;
  CLI::App* solve_app = app.add_subcommand("solve", "Solve one instance");
  CLI::App* tree_app = app.add_subcommand("tree", "Build and export a feasibility tree");
  CLI::App* sweep_app = app.add_subcommand("sweep", "Monte Carlo sweep over SNR or load");
  CLI::App* compare_app =
      app.add_subcommand("oracle-compare", "Greedy solvers against exhaustive optima");
  for (CLI::App* sub : {solve_app, tree_app, sweep_app, compare_app}) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--config", "JSON file of flag values");
  }
  solve.add(solve_app);
  tree.add(tree_app);
  sweep.add(sweep_app);
  compare.add(compare_app);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
      app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInput;
    }
    if (*solve_app) return solve.run();
    if (*tree_app) return tree.run();
    if (*sweep_app) return sweep.run();
    return compare.run();
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

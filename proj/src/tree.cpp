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

#include "otacoord/tree.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <limits>

#include "json.hpp"
#include "otacoord/error.hpp"
#include "otacoord/mmse.hpp"
#include "otacoord/zf.hpp"

namespace otac {

namespace {

void check_cap(const CoordinationProblem& problem, std::size_t cap, const char* what) {
  if (problem.devices() > cap) {
    throw Error(ErrorCode::kInstanceTooLarge,
                std::string(what) + " supports at most " + std::to_string(cap) +
                    " devices, got " + std::to_string(problem.devices()));
  }
}

struct Evaluated {
  bool feasible = false;
  double score = 0.0;
  double error = 0.0;
  CVector receiver;
  CVector scalings;
};

Evaluated evaluate(const CoordinationProblem& problem, DeviceSubset subset, Scheme scheme) {
  Evaluated out;
  if (scheme == Scheme::kZf) {
    ZfFeasibility f = check_zf_feasible(problem, subset);
    if (!f.feasible) return out;
    out.feasible = true;
    out.score = f.receiver->squaredNorm();
    out.error = problem.noise_variance() * out.score;
    out.receiver = std::move(*f.receiver);
    out.scalings = std::move(*f.scalings);
  } else {
    MmseFeasibility f = check_mmse_feasible(problem, subset);
    if (!f.feasible) return out;
    out.feasible = true;
    out.score = f.error;
    out.error = f.error;
    out.receiver = std::move(f.receiver);
    out.scalings = std::move(f.scalings);
  }
  return out;
}

std::size_t max_subset_size(const CoordinationProblem& problem) {
  return std::min(problem.devices(), problem.antennas());
}

double round15(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace

const char* to_string(Scheme scheme) { return scheme == Scheme::kZf ? "zf" : "mmse"; }

Scheme parse_scheme(std::string_view name) {
  if (name == "zf") return Scheme::kZf;
  if (name == "mmse") return Scheme::kMmse;
  throw Error(ErrorCode::kInvalidArgument, "unknown scheme \"" + std::string(name) + "\"");
}

std::vector<DeviceSubset> canonical_subsets(std::size_t devices, std::size_t max_size) {
  std::vector<DeviceSubset> out;
  max_size = std::min(max_size, devices);
  std::vector<std::size_t> idx;
  for (std::size_t r = 1; r <= max_size; ++r) {
    idx.resize(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = i;
    while (true) {
      out.push_back(DeviceSubset::from_indices(idx));
      // Advance to the next r-combination in lexicographic order.
      std::size_t i = r;
      while (i > 0 && idx[i - 1] == devices - r + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

std::vector<FeasibleSetting> enumerate_feasible(const CoordinationProblem& problem,
                                                Scheme scheme) {
  check_cap(problem, kEnumerationCap, "exhaustive enumeration");
  std::vector<FeasibleSetting> out;
  for (DeviceSubset s : canonical_subsets(problem.devices(), max_subset_size(problem))) {
    const Evaluated e = evaluate(problem, s, scheme);
    if (e.feasible) out.push_back({s, e.error});
  }
  return out;
}

CoordinationSolution exhaustive_optimum(const CoordinationProblem& problem, Scheme scheme) {
  check_cap(problem, kEnumerationCap, "exhaustive search");
  std::optional<std::pair<DeviceSubset, Evaluated>> best;
  std::uint64_t checked = 0;
  for (DeviceSubset s : canonical_subsets(problem.devices(), max_subset_size(problem))) {
    ++checked;
    Evaluated e = evaluate(problem, s, scheme);
    if (!e.feasible) continue;
    if (!best || e.score < best->second.score) best.emplace(s, std::move(e));
  }
  if (!best) {
    throw Error(ErrorCode::kNoFeasibleSetting,
                std::string("no feasible ") + to_string(scheme) + " setting exists");
  }
  CoordinationSolution sol;
  sol.subset = best->first;
  sol.error = best->second.error;
  sol.receiver = std::move(best->second.receiver);
  sol.scalings = std::move(best->second.scalings);
  sol.check_count = checked;
  return sol;
}

FeasibilityTree build_tree(const CoordinationProblem& problem, Scheme scheme) {
  check_cap(problem, kTreeCap, "tree construction");
  FeasibilityTree tree;
  tree.scheme = scheme;
  tree.nodes = enumerate_feasible(problem, scheme);
  const std::size_t n = tree.nodes.size();
  const DeviceSubset full = DeviceSubset::all(problem.devices());

  std::vector<bool> has_subset(n, false);
  for (std::size_t c = 0; c < n; ++c) {
    const DeviceSubset child = tree.nodes[c].subset;
    if (child == full) tree.root = c;
    std::optional<std::size_t> parent;
    for (std::size_t p = 0; p < n; ++p) {
      const DeviceSubset cand = tree.nodes[p].subset;
      if (!child.is_strict_subset_of(cand)) continue;
      has_subset[p] = true;
      if (!parent) {
        parent = p;
        continue;
      }
      const DeviceSubset cur = tree.nodes[*parent].subset;
      if (cand.size() > cur.size() ||
          (cand.size() == cur.size() && canonical_less(cand, cur))) {
        parent = p;
      }
    }
    if (parent) tree.edges.emplace_back(*parent, c);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!has_subset[i]) tree.leaves.push_back(i);
  }
  return tree;
}

std::string tree_to_json(const FeasibilityTree& tree) {
  using nlohmann::json;
  json nodes = json::array();
  for (const FeasibleSetting& s : tree.nodes) {
    nodes.push_back({{"subset", s.subset.one_based()}, {"error", round15(s.error)}});
  }
  json edges = json::array();
  for (auto [p, c] : tree.edges) edges.push_back({p, c});
  json doc = {{"mode", to_string(tree.scheme)},
              {"nodes", std::move(nodes)},
              {"edges", std::move(edges)},
              {"root", tree.root ? json(*tree.root) : json(nullptr)},
              {"leaves", tree.leaves}};
  return doc.dump(2);
}

std::string tree_to_dot(const FeasibilityTree& tree) {
  std::string out = "digraph feasibility_tree {\n  label=\"";
  out += to_string(tree.scheme);
  out += " feasibility tree\";\n  node [shape=box];\n";
  char buf[64];
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", tree.nodes[i].error);
    out += "  n" + std::to_string(i) + " [label=\"" + tree.nodes[i].subset.to_string() +
           "\\n" + buf + "\"];\n";
  }
  for (auto [p, c] : tree.edges) {
    out += "  n" + std::to_string(p) + " -> n" + std::to_string(c) + ";\n";
  }
  out += "}\n";
  return out;
}

std::string format_feasible_settings(const std::vector<FeasibleSetting>& settings) {
  std::string out;
  char buf[96];
  for (const FeasibleSetting& s : settings) {
    std::snprintf(buf, sizeof buf, "%" PRIu64 " %.14e\n", s.subset.mask(), s.error);
    out += buf;
  }
  return out;
}

}  // namespace otac

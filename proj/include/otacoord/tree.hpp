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

#ifndef OTACOORD_TREE_HPP_
#define OTACOORD_TREE_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "otacoord/model.hpp"

namespace otac {

enum class Scheme { kZf, kMmse };

const char* to_string(Scheme scheme);
// "zf" | "mmse"; throws kInvalidArgument otherwise.
Scheme parse_scheme(std::string_view name);

inline constexpr std::size_t kEnumerationCap = 20;
inline constexpr std::size_t kTreeCap = 12;

struct FeasibleSetting {
  DeviceSubset subset;
  double error = 0.0;
};

// All non-empty subsets of [L] with at most `max_size` members, ordered by
// size and then lexicographically by member list.
std::vector<DeviceSubset> canonical_subsets(std::size_t devices, std::size_t max_size);

// Every subset with |S| <= N describing a feasible setting, in canonical
// order. Throws kInstanceTooLarge for L > kEnumerationCap.
std::vector<FeasibleSetting> enumerate_feasible(const CoordinationProblem& problem,
                                                Scheme scheme);

// Feasible setting of least error (least receiver norm for ZF), found by
// checking every subset. Throws kNoFeasibleSetting / kInstanceTooLarge.
CoordinationSolution exhaustive_optimum(const CoordinationProblem& problem, Scheme scheme);

struct FeasibilityTree {
  Scheme scheme = Scheme::kZf;
  std::vector<FeasibleSetting> nodes;
  // (parent, child) node indices.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  // Index of [L] when it is feasible.
  std::optional<std::size_t> root;
  // Nodes with no feasible strict subset among the nodes.
  std::vector<std::size_t> leaves;
};

// Each non-root node hangs below the largest feasible strict superset,
// ties going to the lexicographically smallest one. Throws
// kInstanceTooLarge for L > kTreeCap.
FeasibilityTree build_tree(const CoordinationProblem& problem, Scheme scheme);

std::string tree_to_json(const FeasibilityTree& tree);
std::string tree_to_dot(const FeasibilityTree& tree);

// One "mask error" line per setting, error printed with 15 significant
// digits.
std::string format_feasible_settings(const std::vector<FeasibleSetting>& settings);

}  // namespace otac

#endif  // OTACOORD_TREE_HPP_

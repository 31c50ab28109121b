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

#ifndef OTACOORD_MMSE_HPP_
#define OTACOORD_MMSE_HPP_

#include <optional>

#include "otacoord/model.hpp"

namespace otac {

struct MmseFeasibility {
  bool feasible = false;
  CVector receiver;
  // +inf entries mark devices onto which the receiver has no projection.
  CVector scalings;
  // sum_{l in S} |sqrt(P) m^T h_l - phi_l|^2 + sigma^2 ||m||^2
  double error = 0.0;
};

// Regularized ZF receiver
//   m = (1/sqrt(P)) H_S^* (H_S^T H_S^* + (sigma^2/P) I)^{-1} phi_S.
// Only throws kSingularGram when sigma^2 == 0.
CVector mmse_receiver_for_subset(const CoordinationProblem& problem, DeviceSubset subset);

// b_l = sqrt(P) inside S, phi_l / (m^T h_l) outside; feasible iff every
// outside device is strictly below the budget.
MmseFeasibility check_mmse_feasible(const CoordinationProblem& problem, DeviceSubset subset);

std::optional<CoordinationSolution> mmse_shortcut(const CoordinationProblem& problem);

// Greedy descent of the MMSE feasibility tree, picking the child of least
// aggregation error. Requires N >= L.
CoordinationSolution ammse_solve(const CoordinationProblem& problem);

}  // namespace otac

#endif  // OTACOORD_MMSE_HPP_

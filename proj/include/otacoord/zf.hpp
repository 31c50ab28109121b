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

#ifndef OTACOORD_ZF_HPP_
#define OTACOORD_ZF_HPP_

#include <optional>

#include "otacoord/model.hpp"

namespace otac {

struct ZfFeasibility {
  bool feasible = false;
  // Present whenever the receiver / scalings could be computed.
  std::optional<CVector> receiver;
  std::optional<CVector> scalings;
  // Largest |b_l|^2 / P over devices outside the subset (0 if none;
  // +inf on a null projection). Values in (1, 1 + tau] are accepted.
  double violation = 0.0;
};

// m = (1/sqrt(P)) H_S^* (H_S^T H_S^*)^{-1} phi_S, so that m^T h_l = phi_l / sqrt(P)
// for l in S. Throws kSingularGram.
CVector zf_receiver_for_subset(const CoordinationProblem& problem, DeviceSubset subset);

// b_l = phi_l / (m^T h_l). Throws kNullProjection (with the device index)
// when m is numerically orthogonal to some h_l.
CVector zf_scalings(const CoordinationProblem& problem, const CVector& receiver);

ZfFeasibility check_zf_feasible(const CoordinationProblem& problem, DeviceSubset subset);

// Closed-form ZF scheme when the weakest device dominates; nullopt if the
// sufficient condition does not hold.
std::optional<CoordinationSolution> zf_shortcut(const CoordinationProblem& problem);

// Greedy single-path descent of the ZF feasibility tree starting at [L].
// Requires N >= L. Throws kRootInfeasible if the full Gram is singular.
CoordinationSolution azf_solve(const CoordinationProblem& problem);

// (sigma^2 / P) phi_S^T (H_S^T H_S^*)^{-1} phi_S
double zf_closed_form_error(const CoordinationProblem& problem, DeviceSubset subset);

}  // namespace otac

#endif  // OTACOORD_ZF_HPP_

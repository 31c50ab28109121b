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

#ifndef OTACOORD_SRC_DESCENT_HPP_
#define OTACOORD_SRC_DESCENT_HPP_

#include <cmath>
#include <optional>
#include <utility>

#include "otacoord/error.hpp"
#include "otacoord/linalg.hpp"
#include "otacoord/model.hpp"

namespace otac::internal {

// Relative tolerance under which two children count as tied.
inline constexpr double kTieTolerance = 1e-12;

struct Candidate {
  double score = 0.0;  // selection criterion, smaller is better
  CVector receiver;
  CVector scalings;
  double error = 0.0;
};

// Walks from `root` towards the leaves. At each step every child obtained by
// removing one device is evaluated (receiver via an inverse downdate), and the
// feasible child of least score is kept; ties go to the smallest removed
// index. Stops when no child is feasible or a single device remains.
//
// `evaluate(subset, receiver)` returns nullopt for infeasible children.
template <class Evaluate>
CoordinationSolution greedy_descent(const CoordinationProblem& problem,
                                    GramInverseState state, Candidate root,
                                    Evaluate&& evaluate) {
  CoordinationSolution sol;
  sol.check_count = 1;
  sol.path.push_back(state.subset);
  Candidate current = std::move(root);

  while (state.subset.size() > 1) {
    std::optional<std::pair<GramInverseState, Candidate>> best;
    for (std::size_t device : state.members) {
      const DeviceSubset child = state.subset.without(device);
      ++sol.check_count;
      GramInverseState child_state;
      try {
        child_state = downdate_remove_device(state, problem, device);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNumericalInstability) throw;
        ++sol.downdate_fallbacks;
        try {
          child_state = gram_inverse(problem, child, state.regularizer);
        } catch (const Error& inner) {
          if (inner.code() == ErrorCode::kSingularGram) continue;
          throw;
        }
      }
      std::optional<Candidate> cand =
          evaluate(child, receiver_from_inverse(problem, child_state));
      if (!cand) continue;
      if (!best || cand->score < best->second.score -
                                     kTieTolerance * std::abs(best->second.score)) {
        best.emplace(std::move(child_state), std::move(*cand));
      }
    }
    if (!best) break;
    state = std::move(best->first);
    current = std::move(best->second);
    sol.path.push_back(state.subset);
  }

  sol.subset = state.subset;
  sol.receiver = std::move(current.receiver);
  sol.scalings = std::move(current.scalings);
  sol.error = current.error;
  return sol;
}

}  // namespace otac::internal

#endif  // OTACOORD_SRC_DESCENT_HPP_

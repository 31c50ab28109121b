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

#ifndef OTACOORD_LINALG_HPP_
#define OTACOORD_LINALG_HPP_

#include <cstddef>
#include <vector>

#include "otacoord/model.hpp"

namespace otac {

// Reciprocal-condition floor below which an unregularized Gram matrix is
// declared singular, and the smallest admissible downdate pivot.
inline constexpr double kSingularityThreshold = 1e-12;

// Inverse of (H_S^T H_S^* + lambda I) for the devices in `subset`.
// Row/column k of `inverse` corresponds to members[k] (ascending).
struct GramInverseState {
  DeviceSubset subset;
  std::vector<std::size_t> members;
  CMatrix inverse;
  double regularizer = 0.0;
};

// H_S^T H_S^* + lambda I. Entry (i, j) is h_i^T h_j^*.
CMatrix conjugate_gram(const CoordinationProblem& problem, DeviceSubset subset,
                       double regularizer);

// Throws kSingularGram when regularizer == 0 and the Gram matrix is rank
// deficient (including |S| > N), kInvalidArgument on an empty subset or a
// negative regularizer.
GramInverseState gram_inverse(const CoordinationProblem& problem, DeviceSubset subset,
                              double regularizer);

// Inverse for subset \ {device} via a Schur-complement downdate of the
// current inverse. Throws kNumericalInstability if the pivot is below
// kSingularityThreshold.
GramInverseState downdate_remove_device(const GramInverseState& state,
                                        const CoordinationProblem& problem,
                                        std::size_t device);

// (1/sqrt(P)) H_S^* G^{-1} phi_S: the ZF receiver for lambda = 0 and the
// regularized (MMSE) receiver for lambda = sigma^2 / P.
CVector receiver_from_inverse(const CoordinationProblem& problem,
                              const GramInverseState& state);

}  // namespace otac

#endif  // OTACOORD_LINALG_HPP_

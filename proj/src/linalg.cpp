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

#include "otacoord/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "otacoord/error.hpp"

namespace otac {

namespace {

CMatrix selected_columns(const CoordinationProblem& problem,
                         const std::vector<std::size_t>& members) {
  CMatrix hs(problem.channel().rows(), static_cast<Eigen::Index>(members.size()));
  for (std::size_t k = 0; k < members.size(); ++k) {
    hs.col(static_cast<Eigen::Index>(k)) =
        problem.channel().col(static_cast<Eigen::Index>(members[k]));
  }
  return hs;
}

void check_subset(const CoordinationProblem& problem, DeviceSubset subset) {
  if (subset.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "device subset must be non-empty");
  }
  if (!subset.is_subset_of(DeviceSubset::all(problem.devices()))) {
    throw Error(ErrorCode::kInvalidArgument, "device subset exceeds the device count");
  }
}

}  // namespace

CMatrix conjugate_gram(const CoordinationProblem& problem, DeviceSubset subset,
                       double regularizer) {
  check_subset(problem, subset);
  const CMatrix hs = selected_columns(problem, subset.indices());
  CMatrix gram = hs.transpose() * hs.conjugate();
  gram.diagonal().array() += regularizer;
  return gram;
}

GramInverseState gram_inverse(const CoordinationProblem& problem, DeviceSubset subset,
                              double regularizer) {
  if (!(regularizer >= 0.0) || !std::isfinite(regularizer)) {
    throw Error(ErrorCode::kInvalidArgument, "regularizer must be non-negative");
  }
  check_subset(problem, subset);
  if (regularizer == 0.0 && subset.size() > problem.antennas()) {
    throw Error(ErrorCode::kSingularGram,
                "Gram matrix of " + subset.to_string() + " is rank deficient (|S| > N)");
  }
  GramInverseState state;
  state.subset = subset;
  state.members = subset.indices();
  state.regularizer = regularizer;

  const CMatrix gram = conjugate_gram(problem, subset, regularizer);
  const Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= kSingularityThreshold)) {
    throw Error(ErrorCode::kSingularGram,
                "Gram matrix of " + subset.to_string() + " is singular");
  }
  CMatrix inverse = llt.solve(CMatrix::Identity(gram.rows(), gram.cols()));
  // Hermitian by construction; remove round-off asymmetry.
  state.inverse = (inverse + inverse.adjoint()) / 2.0;
  return state;
}

GramInverseState downdate_remove_device(const GramInverseState& state,
                                        const CoordinationProblem& problem,
                                        std::size_t device) {
  if (device >= problem.devices() || !state.subset.contains(device)) {
    throw Error(ErrorCode::kInvalidArgument, "device is not a member of the subset");
  }
  if (state.subset.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "cannot downdate a single-device subset");
  }
  const auto k = static_cast<Eigen::Index>(
      std::find(state.members.begin(), state.members.end(), device) -
      state.members.begin());
  const CMatrix& a = state.inverse;
  const std::complex<double> pivot = a(k, k);
  if (!(std::abs(pivot) >= kSingularityThreshold)) {
    throw Error(ErrorCode::kNumericalInstability, "downdate pivot below threshold");
  }

  const Eigen::Index n = a.rows();
  // Permutation-free removal: build the index list without k.
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != k) keep.push_back(i);
  }

  // For G^{-1} = [[E, f], [f^H, g]], the inverse of the leading block of G
  // is E - f f^H / g.
  GramInverseState out;
  out.subset = state.subset.without(device);
  out.regularizer = state.regularizer;
  out.members.reserve(keep.size());
  for (Eigen::Index i : keep) out.members.push_back(state.members[static_cast<std::size_t>(i)]);
  const Eigen::Index m = n - 1;
  out.inverse.resize(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      out.inverse(r, c) = a(keep[r], keep[c]) - a(keep[r], k) * a(k, keep[c]) / pivot;
    }
  }
  return out;
}

CVector receiver_from_inverse(const CoordinationProblem& problem,
                              const GramInverseState& state) {
  const CMatrix hs = selected_columns(problem, state.members);
  CVector phi(static_cast<Eigen::Index>(state.members.size()));
  for (std::size_t k = 0; k < state.members.size(); ++k) {
    phi(static_cast<Eigen::Index>(k)) =
        problem.weights()(static_cast<Eigen::Index>(state.members[k]));
  }
  return hs.conjugate() * (state.inverse * phi) / std::sqrt(problem.power());
}

}  // namespace otac

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

#include "otacoord/mmse.hpp"

#include <cmath>
#include <limits>

#include "descent.hpp"
#include "otacoord/error.hpp"
#include "otacoord/linalg.hpp"

namespace otac {

namespace {

constexpr double kProjectionFloor = 1e-14;
constexpr double kShortcutTolerance = 1e-9;

MmseFeasibility evaluate_receiver(const CoordinationProblem& problem, DeviceSubset subset,
                                  CVector receiver) {
  MmseFeasibility out;
  const double sqrt_p = std::sqrt(problem.power());
  const CVector gains = problem.channel().transpose() * receiver;
  const double m_norm = receiver.norm();
  out.scalings.resize(gains.size());
  out.feasible = true;
  double residual = 0.0;
  for (Eigen::Index l = 0; l < gains.size(); ++l) {
    const double phi = problem.weights()(l);
    if (subset.contains(static_cast<std::size_t>(l))) {
      out.scalings(l) = sqrt_p;
      residual += std::norm(sqrt_p * gains(l) - phi);
      continue;
    }
    const double floor = kProjectionFloor * m_norm * problem.channel().col(l).norm();
    if (!(std::abs(gains(l)) > floor)) {
      out.scalings(l) = std::numeric_limits<double>::infinity();
      out.feasible = false;
      continue;
    }
    out.scalings(l) = phi / gains(l);
    if (!(std::norm(out.scalings(l)) < problem.power() * (1.0 - kPowerTolerance))) {
      out.feasible = false;
    }
  }
  out.error = residual + problem.noise_variance() * receiver.squaredNorm();
  out.receiver = std::move(receiver);
  return out;
}

}  // namespace

CVector mmse_receiver_for_subset(const CoordinationProblem& problem, DeviceSubset subset) {
  return receiver_from_inverse(problem, gram_inverse(problem, subset, problem.regularizer()));
}

MmseFeasibility check_mmse_feasible(const CoordinationProblem& problem, DeviceSubset subset) {
  CVector receiver;
  try {
    receiver = mmse_receiver_for_subset(problem, subset);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularGram) throw;
    MmseFeasibility out;
    out.error = std::numeric_limits<double>::infinity();
    return out;
  }
  return evaluate_receiver(problem, subset, std::move(receiver));
}

std::optional<CoordinationSolution> mmse_shortcut(const CoordinationProblem& problem) {
  std::size_t s = 0;
  double hs_norm2 = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < problem.devices(); ++l) {
    const double n2 = problem.channel().col(static_cast<Eigen::Index>(l)).squaredNorm();
    if (n2 < hs_norm2) {
      hs_norm2 = n2;
      s = l;
    }
  }
  if (hs_norm2 == 0.0) return std::nullopt;
  const auto si = static_cast<Eigen::Index>(s);
  const auto hs = problem.channel().col(si);
  const RVector& phi = problem.weights();

  // g_l = (h_s^H h_l + (sigma^2/P) [l == s]) / phi_l
  CVector g = (hs.adjoint() * problem.channel()).transpose();
  g(si) += problem.regularizer();
  g.array() /= phi.array().cast<std::complex<double>>();
  const double gs = std::abs(g(si));
  DeviceSubset equal;
  for (Eigen::Index l = 0; l < g.size(); ++l) {
    const double gl = std::abs(g(l));
    if (gs > gl * (1.0 + kShortcutTolerance)) return std::nullopt;
    if (gl <= gs * (1.0 + kShortcutTolerance)) equal = equal.with(static_cast<std::size_t>(l));
  }

  const double p = problem.power();
  const double sqrt_p = std::sqrt(p);
  CoordinationSolution sol;
  sol.receiver = sqrt_p * phi(si) * hs.conjugate() / (p * hs_norm2 + problem.noise_variance());
  const CVector gains = problem.channel().transpose() * sol.receiver;
  sol.scalings.resize(g.size());
  for (Eigen::Index l = 0; l < g.size(); ++l) {
    sol.scalings(l) = equal.contains(static_cast<std::size_t>(l))
                          ? std::complex<double>(sqrt_p)
                          : phi(l) / gains(l);
  }
  sol.subset = equal;
  sol.error = aggregation_error(problem, sol.receiver, sol.scalings);
  sol.check_count = 0;
  return sol;
}

CoordinationSolution ammse_solve(const CoordinationProblem& problem) {
  if (problem.antennas() < problem.devices()) {
    throw Error(ErrorCode::kInvalidArgument,
                "AMMSE requires at least as many antennas as devices (N >= L)");
  }
  const DeviceSubset root = DeviceSubset::all(problem.devices());
  GramInverseState state;
  try {
    state = gram_inverse(problem, root, problem.regularizer());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularGram) throw;
    throw Error(ErrorCode::kRootInfeasible,
                std::string("AMMSE root infeasible: ") + e.what());
  }
  auto as_candidate = [](MmseFeasibility&& f) {
    internal::Candidate c;
    c.score = f.error;
    c.error = f.error;
    c.receiver = std::move(f.receiver);
    c.scalings = std::move(f.scalings);
    return c;
  };
  // The root has no outside devices, so it is always feasible.
  MmseFeasibility root_eval =
      evaluate_receiver(problem, root, receiver_from_inverse(problem, state));
  return internal::greedy_descent(
      problem, std::move(state), as_candidate(std::move(root_eval)),
      [&](DeviceSubset child, CVector receiver) -> std::optional<internal::Candidate> {
        MmseFeasibility f = evaluate_receiver(problem, child, std::move(receiver));
        if (!f.feasible) return std::nullopt;
        return as_candidate(std::move(f));
      });
}

}  // namespace otac

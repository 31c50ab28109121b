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

#include "otacoord/zf.hpp"

#include <cmath>
#include <limits>

#include "descent.hpp"
#include "otacoord/error.hpp"
#include "otacoord/linalg.hpp"

namespace otac {

namespace {

// Null-projection floor relative to ||m|| ||h_l||.
constexpr double kProjectionFloor = 1e-14;
// Relative slack for the |g_s| <= |g_l| comparisons of the shortcut.
constexpr double kShortcutTolerance = 1e-9;

// Scalings for a given receiver, plus feasibility against the budget.
// Devices in the subset sit at P analytically and are not re-checked.
ZfFeasibility evaluate_receiver(const CoordinationProblem& problem, DeviceSubset subset,
                                CVector receiver) {
  ZfFeasibility out;
  try {
    out.scalings = zf_scalings(problem, receiver);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNullProjection) throw;
    out.receiver = std::move(receiver);
    out.violation = std::numeric_limits<double>::infinity();
    return out;
  }
  double worst = 0.0;
  for (std::size_t l = 0; l < problem.devices(); ++l) {
    if (subset.contains(l)) continue;
    worst = std::max(worst,
                     std::norm((*out.scalings)(static_cast<Eigen::Index>(l))) / problem.power());
  }
  out.violation = worst;
  out.feasible = worst <= 1.0 + kPowerTolerance;
  out.receiver = std::move(receiver);
  return out;
}

std::size_t weakest_device(const CoordinationProblem& problem) {
  std::size_t s = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < problem.devices(); ++l) {
    const double norm = problem.channel().col(static_cast<Eigen::Index>(l)).squaredNorm();
    if (norm < best) {
      best = norm;
      s = l;
    }
  }
  return s;
}

}  // namespace

CVector zf_receiver_for_subset(const CoordinationProblem& problem, DeviceSubset subset) {
  return receiver_from_inverse(problem, gram_inverse(problem, subset, 0.0));
}

CVector zf_scalings(const CoordinationProblem& problem, const CVector& receiver) {
  if (receiver.size() != static_cast<Eigen::Index>(problem.antennas())) {
    throw Error(ErrorCode::kInvalidArgument, "receiver length must equal N");
  }
  const CVector gains = problem.channel().transpose() * receiver;
  const double m_norm = receiver.norm();
  CVector b(gains.size());
  for (Eigen::Index l = 0; l < gains.size(); ++l) {
    const double floor = kProjectionFloor * m_norm * problem.channel().col(l).norm();
    if (!(std::abs(gains(l)) > floor)) {
      throw Error(ErrorCode::kNullProjection,
                  "receiver is orthogonal to the channel of device " + std::to_string(l + 1),
                  static_cast<std::size_t>(l));
    }
    b(l) = problem.weights()(l) / gains(l);
  }
  return b;
}

ZfFeasibility check_zf_feasible(const CoordinationProblem& problem, DeviceSubset subset) {
  CVector receiver;
  try {
    receiver = zf_receiver_for_subset(problem, subset);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularGram) throw;
    ZfFeasibility out;
    out.violation = std::numeric_limits<double>::infinity();
    return out;
  }
  return evaluate_receiver(problem, subset, std::move(receiver));
}

std::optional<CoordinationSolution> zf_shortcut(const CoordinationProblem& problem) {
  const std::size_t s = weakest_device(problem);
  const auto hs = problem.channel().col(static_cast<Eigen::Index>(s));
  const double hs_norm2 = hs.squaredNorm();
  if (hs_norm2 == 0.0) return std::nullopt;

  const RVector& phi = problem.weights();
  // g_l = h_s^H h_l / phi_l
  CVector g = (hs.adjoint() * problem.channel()).transpose();
  g.array() /= phi.array().cast<std::complex<double>>();
  const double gs = std::abs(g(static_cast<Eigen::Index>(s)));
  DeviceSubset equal;
  for (Eigen::Index l = 0; l < g.size(); ++l) {
    const double gl = std::abs(g(l));
    if (gs > gl * (1.0 + kShortcutTolerance)) return std::nullopt;
    if (gl <= gs * (1.0 + kShortcutTolerance)) equal = equal.with(static_cast<std::size_t>(l));
  }

  const double sqrt_p = std::sqrt(problem.power());
  CoordinationSolution sol;
  sol.receiver = phi(static_cast<Eigen::Index>(s)) * hs.conjugate() / (sqrt_p * hs_norm2);
  sol.scalings.resize(g.size());
  for (Eigen::Index l = 0; l < g.size(); ++l) {
    sol.scalings(l) = g(static_cast<Eigen::Index>(s)) / g(l) * sqrt_p;
  }
  sol.subset = equal;
  sol.error = problem.noise_variance() * sol.receiver.squaredNorm();
  sol.check_count = 0;
  return sol;
}

CoordinationSolution azf_solve(const CoordinationProblem& problem) {
  if (problem.antennas() < problem.devices()) {
    throw Error(ErrorCode::kInvalidArgument,
                "AZF requires at least as many antennas as devices (N >= L)");
  }
  const DeviceSubset root = DeviceSubset::all(problem.devices());
  GramInverseState state;
  try {
    state = gram_inverse(problem, root, 0.0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularGram) throw;
    throw Error(ErrorCode::kRootInfeasible,
                std::string("AZF root infeasible: ") + e.what());
  }
  const double sigma2 = problem.noise_variance();
  auto as_candidate = [&](ZfFeasibility&& f) {
    internal::Candidate c;
    c.score = f.receiver->squaredNorm();
    c.error = sigma2 * c.score;
    c.receiver = std::move(*f.receiver);
    c.scalings = std::move(*f.scalings);
    return c;
  };

  ZfFeasibility root_eval = evaluate_receiver(problem, root, receiver_from_inverse(problem, state));
  if (!root_eval.scalings) {
    throw Error(ErrorCode::kRootInfeasible, "AZF root receiver has a null projection");
  }
  return internal::greedy_descent(
      problem, std::move(state), as_candidate(std::move(root_eval)),
      [&](DeviceSubset child, CVector receiver) -> std::optional<internal::Candidate> {
        ZfFeasibility f = evaluate_receiver(problem, child, std::move(receiver));
        if (!f.feasible) return std::nullopt;
        return as_candidate(std::move(f));
      });
}

double zf_closed_form_error(const CoordinationProblem& problem, DeviceSubset subset) {
  const GramInverseState state = gram_inverse(problem, subset, 0.0);
  RVector phi(static_cast<Eigen::Index>(state.members.size()));
  for (std::size_t k = 0; k < state.members.size(); ++k) {
    phi(static_cast<Eigen::Index>(k)) = problem.weights()(static_cast<Eigen::Index>(state.members[k]));
  }
  const std::complex<double> quad =
      phi.cast<std::complex<double>>().transpose() * state.inverse * phi.cast<std::complex<double>>();
  return problem.noise_variance() / problem.power() * quad.real();
}

}  // namespace otac

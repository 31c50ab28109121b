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

#ifndef OTACOORD_MODEL_HPP_
#define OTACOORD_MODEL_HPP_

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace otac {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Relative slack on the per-device power budget. |b|^2 <= P(1 + tau) is
// accepted as "at most P"; |b|^2 < P(1 - tau) is "strictly below P".
inline constexpr double kPowerTolerance = 1e-9;

inline constexpr std::size_t kMaxDevices = 64;

// Set of devices, stored as a bitmask over zero-based indices.
class DeviceSubset {
 public:
  constexpr DeviceSubset() = default;
  constexpr explicit DeviceSubset(std::uint64_t mask) : mask_(mask) {}

  static DeviceSubset all(std::size_t devices);
  static DeviceSubset from_indices(std::span<const std::size_t> zero_based);
  // Throws kInvalidArgument on indices outside 1..devices or duplicates.
  static DeviceSubset from_one_based(std::span<const int> one_based,
                                     std::size_t devices);

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(std::popcount(mask_));
  }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(std::size_t device) const {
    return device < kMaxDevices && ((mask_ >> device) & 1u) != 0;
  }
  constexpr DeviceSubset without(std::size_t device) const {
    return DeviceSubset(mask_ & ~(std::uint64_t{1} << device));
  }
  constexpr DeviceSubset with(std::size_t device) const {
    return DeviceSubset(mask_ | (std::uint64_t{1} << device));
  }
  constexpr bool is_subset_of(DeviceSubset other) const {
    return (mask_ & ~other.mask_) == 0;
  }
  constexpr bool is_strict_subset_of(DeviceSubset other) const {
    return is_subset_of(other) && mask_ != other.mask_;
  }

  // Ascending zero-based member indices.
  std::vector<std::size_t> indices() const;
  std::vector<int> one_based() const;
  // "{1,2,4}"
  std::string to_string() const;

  friend constexpr bool operator==(DeviceSubset, DeviceSubset) = default;

 private:
  std::uint64_t mask_ = 0;
};

// Strict weak order: increasing size, then lexicographic on sorted members.
bool canonical_less(DeviceSubset a, DeviceSubset b);

// Channel H (N x L, column l is h_l), aggregation weights phi, power budget P
// and receiver noise variance sigma^2. Validated on construction; immutable.
class CoordinationProblem {
 public:
  CoordinationProblem(CMatrix channel, RVector weights, double power,
                      double noise_variance);

  const CMatrix& channel() const { return channel_; }
  const RVector& weights() const { return weights_; }
  double power() const { return power_; }
  double noise_variance() const { return noise_variance_; }

  std::size_t antennas() const { return static_cast<std::size_t>(channel_.rows()); }
  std::size_t devices() const { return static_cast<std::size_t>(channel_.cols()); }

  // sigma^2 / P, the Tikhonov weight of the MMSE receiver.
  double regularizer() const { return noise_variance_ / power_; }

  CoordinationProblem with_noise_variance(double noise_variance) const;

 private:
  CMatrix channel_;
  RVector weights_;
  double power_;
  double noise_variance_;
};

struct CoordinationSolution {
  CVector receiver;
  CVector scalings;
  // Devices transmitting at the full budget P.
  DeviceSubset subset;
  double error = 0.0;
  // Subsets whose feasibility was evaluated; 0 for closed-form paths.
  std::uint64_t check_count = 0;

  // Diagnostics. `path` is the sequence of subsets visited by a tree
  // descent (root first); empty for other solvers.
  std::vector<DeviceSubset> path;
  std::uint64_t downdate_fallbacks = 0;
};

// sum_l |m^T h_l b_l - phi_l|^2 + sigma^2 ||m||^2
double aggregation_error(const CoordinationProblem& problem, const CVector& receiver,
                         const CVector& scalings);

// Four devices, five antennas, real channel, phi = 0.25, P = 1.
CoordinationProblem example_problem(double noise_variance);

// {"channel_re": [[...]], "channel_im": [[...]], "weights": [...],
//  "power": P, "noise_variance": s2}; row-major, N rows of L entries.
// "channel_im" may be omitted for real channels.
std::string problem_to_json(const CoordinationProblem& problem);
CoordinationProblem problem_from_json(std::string_view text);

double to_db(double linear);

}  // namespace otac

#endif  // OTACOORD_MODEL_HPP_

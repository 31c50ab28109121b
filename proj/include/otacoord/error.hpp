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

#ifndef OTACOORD_ERROR_HPP_
#define OTACOORD_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace otac {

enum class ErrorCode {
  kInvalidArgument,
  kParseError,
  // Gram matrix of the selected channels is (numerically) singular.
  kSingularGram,
  // Rank-one downdate pivot too small; callers recompute from scratch.
  kNumericalInstability,
  // Receiver is orthogonal to a device channel: that device would need
  // infinite power.
  kNullProjection,
  kRootInfeasible,
  kNoFeasibleSetting,
  kInstanceTooLarge,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> device = std::nullopt)
      : std::runtime_error(message), code_(code), device_(device) {}

  ErrorCode code() const noexcept { return code_; }

  // Zero-based device index for kNullProjection.
  std::optional<std::size_t> device() const noexcept { return device_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> device_;
};

}  // namespace otac

#endif  // OTACOORD_ERROR_HPP_

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

#include "otacoord/model.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "otacoord/error.hpp"

namespace otac {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParseError: return "parse error";
    case ErrorCode::kSingularGram: return "singular Gram matrix";
    case ErrorCode::kNumericalInstability: return "numerical instability";
    case ErrorCode::kNullProjection: return "null projection";
    case ErrorCode::kRootInfeasible: return "root infeasible";
    case ErrorCode::kNoFeasibleSetting: return "no feasible setting";
    case ErrorCode::kInstanceTooLarge: return "instance too large";
  }
  return "unknown error";
}

DeviceSubset DeviceSubset::all(std::size_t devices) {
  if (devices > kMaxDevices) {
    throw Error(ErrorCode::kInvalidArgument, "at most 64 devices are supported");
  }
  return DeviceSubset(devices == kMaxDevices ? ~std::uint64_t{0}
                                             : (std::uint64_t{1} << devices) - 1);
}

DeviceSubset DeviceSubset::from_indices(std::span<const std::size_t> zero_based) {
  DeviceSubset s;
  for (std::size_t i : zero_based) {
    if (i >= kMaxDevices) {
      throw Error(ErrorCode::kInvalidArgument, "device index out of range");
    }
    s = s.with(i);
  }
  return s;
}

DeviceSubset DeviceSubset::from_one_based(std::span<const int> one_based,
                                          std::size_t devices) {
  DeviceSubset s;
  for (int i : one_based) {
    if (i < 1 || static_cast<std::size_t>(i) > devices) {
      throw Error(ErrorCode::kInvalidArgument,
                  "device index " + std::to_string(i) + " outside 1.." +
                      std::to_string(devices));
    }
    const auto idx = static_cast<std::size_t>(i - 1);
    if (s.contains(idx)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate device index " + std::to_string(i));
    }
    s = s.with(idx);
  }
  return s;
}

std::vector<std::size_t> DeviceSubset::indices() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::uint64_t m = mask_; m != 0; m &= m - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  }
  return out;
}

std::vector<int> DeviceSubset::one_based() const {
  std::vector<int> out;
  for (std::size_t i : indices()) out.push_back(static_cast<int>(i) + 1);
  return out;
}

std::string DeviceSubset::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int i : one_based()) {
    if (!first) s += ',';
    s += std::to_string(i);
    first = false;
  }
  return s + "}";
}

bool canonical_less(DeviceSubset a, DeviceSubset b) {
  if (a.size() != b.size()) return a.size() < b.size();
  // For equal popcount, lexicographic order of the sorted member lists is
  // decided at the lowest bit where the masks differ: whoever owns it is
  // smaller.
  const std::uint64_t diff = a.mask() ^ b.mask();
  if (diff == 0) return false;
  const std::uint64_t lowest = diff & (~diff + 1);
  return (a.mask() & lowest) != 0;
}

CoordinationProblem::CoordinationProblem(CMatrix channel, RVector weights,
                                         double power, double noise_variance)
    : channel_(std::move(channel)),
      weights_(std::move(weights)),
      power_(power),
      noise_variance_(noise_variance) {
  if (channel_.rows() < 1 || channel_.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "channel must be at least 1x1");
  }
  if (static_cast<std::size_t>(channel_.cols()) > kMaxDevices) {
    throw Error(ErrorCode::kInvalidArgument, "at most 64 devices are supported");
  }
  if (weights_.size() != channel_.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                "weights length " + std::to_string(weights_.size()) +
                    " does not match device count " + std::to_string(channel_.cols()));
  }
  if (!channel_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "channel contains non-finite entries");
  }
  for (Eigen::Index l = 0; l < weights_.size(); ++l) {
    if (!std::isfinite(weights_(l)) || weights_(l) <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be finite and positive");
    }
  }
  if (!std::isfinite(power_) || power_ <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "power budget must be positive");
  }
  if (!std::isfinite(noise_variance_) || noise_variance_ < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "noise variance must be non-negative");
  }
}

CoordinationProblem CoordinationProblem::with_noise_variance(double noise_variance) const {
  return CoordinationProblem(channel_, weights_, power_, noise_variance);
}

double aggregation_error(const CoordinationProblem& problem, const CVector& receiver,
                         const CVector& scalings) {
  const auto n = static_cast<Eigen::Index>(problem.antennas());
  const auto l = static_cast<Eigen::Index>(problem.devices());
  if (receiver.size() != n || scalings.size() != l) {
    throw Error(ErrorCode::kInvalidArgument,
                "aggregation_error: receiver must have length N and scalings length L");
  }
  // H^T m gives m^T h_l for every l.
  const CVector gains = problem.channel().transpose() * receiver;
  double total = 0.0;
  for (Eigen::Index i = 0; i < l; ++i) {
    total += std::norm(gains(i) * scalings(i) - problem.weights()(i));
  }
  return total + problem.noise_variance() * receiver.squaredNorm();
}

CoordinationProblem example_problem(double noise_variance) {
  CMatrix h(5, 4);
  // clang-format off
  h << 0.30,  0.46,  0.39,  0.19,
      -0.55,  0.32, -0.52,  0.04,
       0.32, -0.14, -0.48, -0.11,
       0.72,  0.13, -0.37,  0.18,
       0.21, -0.36, -1.32, -0.23;
  // clang-format on
  return CoordinationProblem(std::move(h), RVector::Constant(4, 0.25), 1.0,
                             noise_variance);
}

namespace {

using nlohmann::json;

RVector parse_vector(const json& j, const char* key) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError, std::string("\"") + key + "\" must be an array");
  }
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw Error(ErrorCode::kParseError, std::string("\"") + key + "\" must hold numbers");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd parse_rows(const json& j, const char* key) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::kParseError,
                std::string("\"") + key + "\" must be a non-empty array of rows");
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(ErrorCode::kParseError,
                  std::string("\"") + key + "\" rows must all have the same length");
    }
    m.row(static_cast<Eigen::Index>(r)) = parse_vector(j[r], key).transpose();
  }
  return m;
}

double parse_number(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_number()) {
    throw Error(ErrorCode::kParseError, std::string("missing numeric field \"") + key + "\"");
  }
  return it->get<double>();
}

}  // namespace

std::string problem_to_json(const CoordinationProblem& problem) {
  json re = json::array();
  json im = json::array();
  const CMatrix& h = problem.channel();
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    json rr = json::array();
    json ri = json::array();
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      rr.push_back(h(r, c).real());
      ri.push_back(h(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  json w = json::array();
  for (Eigen::Index l = 0; l < problem.weights().size(); ++l) {
    w.push_back(problem.weights()(l));
  }
  json doc = {{"channel_re", std::move(re)},
              {"channel_im", std::move(im)},
              {"weights", std::move(w)},
              {"power", problem.power()},
              {"noise_variance", problem.noise_variance()}};
  return doc.dump(2);
}

CoordinationProblem problem_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, "instance must be a JSON object");
  }
  if (!doc.contains("channel_re")) {
    throw Error(ErrorCode::kParseError, "missing field \"channel_re\"");
  }
  const Eigen::MatrixXd re = parse_rows(doc["channel_re"], "channel_re");
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
  if (doc.contains("channel_im")) {
    im = parse_rows(doc["channel_im"], "channel_im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) {
      throw Error(ErrorCode::kParseError, "channel_re and channel_im shapes differ");
    }
  }
  if (!doc.contains("weights")) {
    throw Error(ErrorCode::kParseError, "missing field \"weights\"");
  }
  CMatrix h(re.rows(), re.cols());
  h.real() = re;
  h.imag() = im;
  try {
    return CoordinationProblem(std::move(h), parse_vector(doc["weights"], "weights"),
                               parse_number(doc, "power"),
                               parse_number(doc, "noise_variance"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) {
      throw Error(ErrorCode::kParseError, e.what());
    }
    throw;
  }
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace otac

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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "json.hpp"
#include "otacoord/error.hpp"
#include "otacoord/sim.hpp"

namespace {

using otac::ChannelModel;
using otac::Fading;
using otac::SolverKind;
using otac::SweepSpec;

TEST(Channel, DeterministicPerSeedAndTrial) {
  const ChannelModel model{6, 3, {}, 42, Fading::kComplex};
  EXPECT_EQ(otac::draw_channel(model, 7), otac::draw_channel(model, 7));
  EXPECT_NE(otac::draw_channel(model, 7), otac::draw_channel(model, 8));
  ChannelModel other = model;
  other.seed = 43;
  EXPECT_NE(otac::draw_channel(model, 7), otac::draw_channel(other, 7));
  // A column depends only on its own entry indices.
  ChannelModel wider = model;
  wider.devices = 5;
  EXPECT_EQ(otac::draw_channel(wider, 7).leftCols(3), otac::draw_channel(model, 7));
}

TEST(Channel, PathlossScalesExactly) {
  ChannelModel unit{4, 2, {1.0, 1.0}, 9, Fading::kComplex};
  ChannelModel scaled{4, 2, {2.0, 1.0}, 9, Fading::kComplex};
  const otac::CMatrix a = otac::draw_channel(unit, 3);
  const otac::CMatrix b = otac::draw_channel(scaled, 3);
  for (Eigen::Index r = 0; r < 4; ++r) {
    EXPECT_DOUBLE_EQ(std::norm(b(r, 0)), 4.0 * std::norm(a(r, 0)));
    EXPECT_EQ(b(r, 1), a(r, 1));
  }
}

TEST(Channel, MomentsMatchStatedVariance) {
  for (Fading f : {Fading::kComplex, Fading::kReal}) {
    const std::size_t n = 4;
    const ChannelModel model{n, 2, {}, 2024, f};
    const int trials = 125000;  // 10^6 entries
    double sum = 0.0, sum_sq = 0.0, re_sq = 0.0;
    std::complex<double> cross = 0.0;
    double cross_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
      const otac::CMatrix h = otac::draw_channel(model, static_cast<std::uint64_t>(t));
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
          const double p = std::norm(h(r, c));
          sum += p;
          sum_sq += p * p;
          re_sq += h(r, c).real() * h(r, c).real();
        }
        const std::complex<double> x = h(r, 0) * std::conj(h(r, 1));
        cross += x;
        cross_sq += std::norm(x);
      }
    }
    const double count = trials * 8.0;
    const double mean = sum / count;
    const double se = std::sqrt((sum_sq / count - mean * mean) / count);
    EXPECT_NEAR(mean, 1.0 / n, 3 * se);
    if (f == Fading::kComplex) EXPECT_NEAR(re_sq / count, 0.5 / n, 6 * se);
    if (f == Fading::kReal) EXPECT_DOUBLE_EQ(re_sq, sum);
    const double pairs = trials * 4.0;
    const double cross_se = std::sqrt(cross_sq / pairs / pairs);
    EXPECT_NEAR(std::abs(cross / pairs), 0.0, 3 * cross_se);
  }
}

TEST(Channel, RejectsBadModels) {
  EXPECT_THROW(otac::draw_channel({0, 2, {}, 1, Fading::kComplex}, 0), otac::Error);
  EXPECT_THROW(otac::draw_channel({2, 2, {1.0}, 1, Fading::kComplex}, 0), otac::Error);
  EXPECT_THROW(otac::draw_channel({2, 2, {1.0, -1.0}, 1, Fading::kComplex}, 0), otac::Error);
}

TEST(Problem, GeneratedWeightsAreUniform) {
  const auto p = otac::generate_problem({8, 4, {}, 5, Fading::kReal}, 0, 1.0, 0.1);
  EXPECT_EQ(p.weights(), otac::RVector::Constant(4, 0.25));
  EXPECT_EQ(p.noise_variance(), 0.1);
  EXPECT_EQ(p.channel().imag(), Eigen::MatrixXd::Zero(8, 4));
}

SweepSpec small_spec() {
  SweepSpec spec;
  spec.grid = {-10.0, 0.0, 10.0, 20.0};
  spec.trials = 200;
  spec.solvers = {SolverKind::kAzf, SolverKind::kAmmse, SolverKind::kZfOpt, SolverKind::kMmseOpt};
  spec.seed = 77;
  spec.record_trials = true;
  return spec;
}

TEST(Sweep, ReproducibleAndThreadIndependent) {
  SweepSpec spec = small_spec();
  spec.threads = 1;
  const auto a = otac::run_sweep(spec);
  spec.threads = 4;
  const auto b = otac::run_sweep(spec);
  EXPECT_EQ(otac::sweep_to_csv(a), otac::sweep_to_csv(b));
  EXPECT_EQ(otac::sweep_to_json(a), otac::sweep_to_json(b));
  ASSERT_EQ(a.points.size(), 16u);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].trial_errors, b.points[i].trial_errors);
  }
}

TEST(Sweep, PointLayoutAndInvariants) {
  const auto r = otac::run_sweep(small_spec());
  ASSERT_EQ(r.points.size(), 16u);
  for (std::size_t g = 0; g < 4; ++g) {
    const auto& azf = r.points[4 * g + 0];
    const auto& ammse = r.points[4 * g + 1];
    const auto& zf = r.points[4 * g + 2];
    const auto& mmse = r.points[4 * g + 3];
    EXPECT_EQ(azf.solver, SolverKind::kAzf);
    EXPECT_EQ(mmse.solver, SolverKind::kMmseOpt);
    EXPECT_DOUBLE_EQ(azf.noise_variance, std::pow(10.0, -r.spec.grid[g] / 10.0));
    for (const auto* p : {&azf, &ammse, &zf, &mmse}) {
      EXPECT_NEAR(p->mean_error_db, 10.0 * std::log10(p->mean_error), 1e-12);
      EXPECT_EQ(p->trials, 200u);
      EXPECT_EQ(p->antennas, 8u);
    }
    // Per-trial dominance of the exhaustive optima within each scheme.
    for (std::size_t t = 0; t < 200; ++t) {
      EXPECT_GE(azf.trial_errors[t], zf.trial_errors[t] * (1 - 1e-12));
      EXPECT_GE(ammse.trial_errors[t], mmse.trial_errors[t] * (1 - 1e-12));
    }
    // Across schemes the ordering holds on average only.
    EXPECT_LE(mmse.mean_error, zf.mean_error);
    // AZF check counts never depend on the noise level.
    EXPECT_EQ(azf.trial_check_counts, r.points[0].trial_check_counts);
  }
  // ZF error is proportional to the noise variance in every trial.
  const auto& zf_lo = r.points[2];
  const auto& zf_hi = r.points[14];
  for (std::size_t t = 0; t < 200; ++t) {
    EXPECT_NEAR(zf_hi.trial_errors[t] / zf_lo.trial_errors[t], 1e-3, 1e-12);
  }
}

TEST(Sweep, LoadAxisRoundsAntennas) {
  SweepSpec spec;
  spec.axis = otac::SweepAxis::kLoad;
  spec.grid = {1.0, 1.5, 2.25};
  spec.trials = 20;
  spec.solvers = {SolverKind::kAzf};
  const auto r = otac::checktime_sweep(spec);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_EQ(r.points[0].antennas, 4u);
  EXPECT_EQ(r.points[1].antennas, 6u);
  EXPECT_EQ(r.points[2].antennas, 9u);
  EXPECT_EQ(r.spec.metric, otac::Metric::kCheckTime);
}

TEST(Sweep, Validation) {
  SweepSpec spec = small_spec();
  spec.grid.clear();
  EXPECT_THROW(otac::run_sweep(spec), otac::Error);
  spec = small_spec();
  spec.trials = 0;
  EXPECT_THROW(otac::run_sweep(spec), otac::Error);
  spec = small_spec();
  spec.devices = 21;
  spec.antennas = 42;
  try {
    otac::run_sweep(spec);
    FAIL();
  } catch (const otac::Error& e) {
    EXPECT_EQ(e.code(), otac::ErrorCode::kInstanceTooLarge);
  }
  spec = small_spec();
  spec.antennas = 3;
  EXPECT_THROW(otac::run_sweep(spec), otac::Error);
  spec = small_spec();
  EXPECT_THROW(otac::checktime_sweep(spec), otac::Error);
}

TEST(Sweep, CsvAndJsonExports) {
  SweepSpec spec = small_spec();
  spec.grid = {10.0};
  spec.trials = 10;
  const auto r = otac::run_sweep(spec);
  const std::string csv = otac::sweep_to_csv(r);
  EXPECT_NE(csv.find("axis_value,solver,mean_error_linear,mean_error_db,mean_check_count,"
                     "trials,seed\n"),
            std::string::npos);
  EXPECT_NE(csv.find("\n10,mmse-opt,"), std::string::npos);
  EXPECT_NE(csv.find("# seed: 77"), std::string::npos);
  const auto doc = nlohmann::json::parse(otac::sweep_to_json(r));
  EXPECT_EQ(doc["points"].size(), 4u);
  EXPECT_EQ(doc["metadata"]["seed"], 77);
  EXPECT_EQ(doc["points"][3]["solver"], "mmse-opt");
}

TEST(Grid, ExpansionAndParsing) {
  EXPECT_EQ(otac::expand_grid(-10, 2, 20).size(), 16u);
  EXPECT_EQ(otac::expand_grid(1, 0.5, 8).back(), 8.0);
  EXPECT_EQ(otac::expand_grid(0, 0.1, 0.3).size(), 4u);
  EXPECT_TRUE(otac::expand_grid(5, 1, 4).empty());
  EXPECT_EQ(otac::parse_grid("1,2.5,4"), (std::vector<double>{1, 2.5, 4}));
  EXPECT_EQ(otac::parse_grid("-10:5:0"), (std::vector<double>{-10, -5, 0}));
  EXPECT_TRUE(otac::parse_grid("").empty());
  EXPECT_THROW(otac::parse_grid("1:x:3"), otac::Error);
  EXPECT_THROW(otac::parse_grid("1:2"), otac::Error);
  EXPECT_THROW(otac::parse_grid("1,,2"), otac::Error);
  EXPECT_THROW(otac::expand_grid(0, 0, 1), otac::Error);
}

TEST(Reduction, PairwiseSumIsOrderFixed) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
  double naive = 0.0;
  for (double x : v) naive += x;
  EXPECT_NEAR(otac::pairwise_sum(v), naive, 1e-12);
  EXPECT_EQ(otac::pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Threads, EnvironmentCap) {
  setenv("OTA_COORD_THREADS", "3", 1);
  EXPECT_EQ(otac::default_thread_count(), 3u);
  unsetenv("OTA_COORD_THREADS");
  EXPECT_GE(otac::default_thread_count(), 1u);
}

TEST(Names, RoundTrip) {
  for (SolverKind s : {SolverKind::kAzf, SolverKind::kAmmse, SolverKind::kZfOpt,
                       SolverKind::kMmseOpt}) {
    EXPECT_EQ(otac::parse_solver(otac::to_string(s)), s);
  }
  EXPECT_EQ(otac::parse_solver("zf_opt"), SolverKind::kZfOpt);
  EXPECT_EQ(otac::parse_fading("real"), Fading::kReal);
  EXPECT_EQ(otac::parse_axis("load"), otac::SweepAxis::kLoad);
  EXPECT_EQ(otac::parse_metric("checktime"), otac::Metric::kCheckTime);
  EXPECT_THROW(otac::parse_solver("lmmse"), otac::Error);
  EXPECT_THROW(otac::parse_fading("rician"), otac::Error);
}

TEST(OracleCompare, ReportsSaneStatistics) {
  otac::OracleCompareSpec spec;
  spec.trials = 300;
  spec.seed = 3;
  const auto report = otac::oracle_compare(spec);
  ASSERT_EQ(report.schemes.size(), 2u);
  for (const auto& c : report.schemes) {
    EXPECT_EQ(c.dominance_violations, 0u);
    EXPECT_GE(c.mean_gap_db, -1e-12);
    EXPECT_GE(c.max_gap_db, c.p99_gap_db);
    EXPECT_GE(c.p99_gap_db, c.p90_gap_db);
    EXPECT_GE(c.p90_gap_db, c.p50_gap_db);
    EXPECT_GE(c.subset_match_rate, 0.5);
    EXPECT_LE(c.subset_match_rate, 1.0);
    EXPECT_GE(c.mean_approximate_db, c.mean_exact_db);
  }
  const auto doc = nlohmann::json::parse(otac::compare_to_json(report));
  EXPECT_EQ(doc["schemes"][0]["approximate"], "azf");
  EXPECT_EQ(doc["schemes"][1]["exact"], "mmse-opt");
  spec.devices = 21;
  spec.antennas = 42;
  EXPECT_THROW(otac::oracle_compare(spec), otac::Error);
}

}  // namespace

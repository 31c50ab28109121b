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

#include "oracles.hpp"
#include "otacoord/error.hpp"
#include "otacoord/model.hpp"
#include "otacoord/tree.hpp"
#include "otacoord/zf.hpp"

namespace {

using otac::CMatrix;
using otac::CoordinationProblem;
using otac::CVector;
using otac::DeviceSubset;
using otac::RVector;

CoordinationProblem make(const CMatrix& h, std::initializer_list<double> w, double power,
                         double noise) {
  RVector phi(static_cast<Eigen::Index>(w.size()));
  Eigen::Index i = 0;
  for (double x : w) phi[i++] = x;
  return CoordinationProblem(h, phi, power, noise);
}

CMatrix column(std::initializer_list<double> v) {
  CMatrix h(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) h(i++, 0) = x;
  return h;
}

TEST(ZfReceiver, ScalarExamples) {
  const CVector m1 = otac::zf_receiver_for_subset(make(column({1, 0}), {1}, 1, 0), DeviceSubset(1));
  EXPECT_NEAR(std::abs(m1[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m1[1]), 0.0, 1e-15);
  const CVector m2 = otac::zf_receiver_for_subset(make(column({2, 0}), {1}, 4, 0), DeviceSubset(1));
  EXPECT_NEAR(std::abs(m2[0] - 0.25), 0.0, 1e-15);
}

TEST(ZfReceiver, ExampleRootZeroForcesEveryDevice) {
  const CoordinationProblem p = otac::example_problem(0.1);
  const CVector m = otac::zf_receiver_for_subset(p, DeviceSubset::all(4));
  const CVector residual = p.channel().transpose() * m - CVector::Constant(4, 0.25);
  EXPECT_LT(residual.norm(), 1e-10);
  const double frozen[] = {-0.17278492245541988, 0.10624385100405587, -0.5024519710534527,
                           0.8197517276163897, -0.32936675408494676};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(m[i].real(), frozen[i], 1e-12);
  const CVector b = otac::zf_scalings(p, m);
  for (int l = 0; l < 4; ++l) EXPECT_NEAR(std::abs(b[l] - 1.0), 0.0, 1e-9);
}

TEST(ZfReceiver, RandomSubsetsHitTargets) {
  oracle::RandomInstances gen(51);
  for (int t = 0; t < 100; ++t) {
    const CoordinationProblem p = gen.problem(7, 5, 0.1, 0.2, true, 3.0);
    const DeviceSubset s(1 + static_cast<std::uint64_t>(t) % 31);
    const CVector m = otac::zf_receiver_for_subset(p, s);
    for (std::size_t l : s.indices()) {
      const auto li = static_cast<Eigen::Index>(l);
      const std::complex<double> proj = (p.channel().col(li).transpose() * m)(0);
      EXPECT_LT(std::abs(proj - p.weights()[li] / std::sqrt(p.power())), 1e-10);
    }
  }
}

TEST(ZfScalings, DivisionAndNullProjection) {
  const CoordinationProblem p1 = make(column({1, 0}), {1}, 1, 0);
  CVector m(2);
  m << 1.0, 0.0;
  EXPECT_NEAR(std::abs(otac::zf_scalings(p1, m)[0] - 1.0), 0.0, 1e-15);
  const CoordinationProblem p2 = make(column({1, 0}), {0.25}, 1, 0);
  m << 0.5, 0.0;
  EXPECT_NEAR(std::abs(otac::zf_scalings(p2, m)[0] - 0.5), 0.0, 1e-15);
  m << 0.0, 1.0;
  try {
    otac::zf_scalings(p1, m);
    FAIL();
  } catch (const otac::Error& e) {
    EXPECT_EQ(e.code(), otac::ErrorCode::kNullProjection);
    ASSERT_TRUE(e.device().has_value());
    EXPECT_EQ(*e.device(), 0u);
  }
}

// Feasibility and sigma^2 ||m||^2 for all 15 subsets at sigma^2 = 0.1,
// frozen from an independent numpy enumeration.
struct Frozen {
  std::uint64_t mask;
  bool feasible;
  double error;
};
constexpr Frozen kExampleZf[] = {
    {1, false, 5.910724418384716e-03},  {2, false, 1.301812122474485e-02},
    {4, false, 2.468209462127794e-03},  {8, false, 4.626202812731312e-02},
    {3, false, 2.069559032349624e-02},  {5, false, 1.007817600116687e-02},
    {9, true, 4.725192040096412e-02},   {6, false, 1.302817106792463e-02},
    {10, true, 6.845918013668861e-02},  {12, true, 5.518197243538617e-02},
    {7, false, 2.080859706537212e-02},  {11, true, 7.296938994207951e-02},
    {13, true, 5.521174996630667e-02},  {14, true, 8.154328105764184e-02},
    {15, true, 1.074075722146107e-01},
};

TEST(ZfFeasibility, ExampleAllSubsets) {
  const CoordinationProblem p = otac::example_problem(0.1);
  for (const Frozen& f : kExampleZf) {
    const DeviceSubset s(f.mask);
    const otac::ZfFeasibility r = otac::check_zf_feasible(p, s);
    EXPECT_EQ(r.feasible, f.feasible) << s.to_string();
    ASSERT_TRUE(r.receiver.has_value());
    EXPECT_NEAR(p.noise_variance() * r.receiver->squaredNorm(), f.error, 1e-12 * f.error);
    EXPECT_NEAR(otac::zf_closed_form_error(p, s), f.error, 1e-10 * f.error);
    EXPECT_EQ(r.feasible, r.violation <= 1.0 + 1e-9) << s.to_string();
  }
}

TEST(ZfFeasibility, SingleDeviceAndInvariants) {
  const CoordinationProblem p = make(column({0.3, -2.0, 0.1}), {0.7}, 2.0, 0.5);
  EXPECT_TRUE(otac::check_zf_feasible(p, DeviceSubset(1)).feasible);

  oracle::RandomInstances gen(61);
  for (int t = 0; t < 200; ++t) {
    const CoordinationProblem q = gen.problem(6, 4, 0.1, 0.2, true, 1.5);
    const DeviceSubset s(1 + static_cast<std::uint64_t>(t) % 15);
    const otac::ZfFeasibility r = otac::check_zf_feasible(q, s);
    const oracle::Setting ref = oracle::zf_setting(q, oracle::members(s.mask()));
    EXPECT_EQ(r.feasible, ref.feasible);
    if (!r.feasible) continue;
    const CVector& m = *r.receiver;
    const CVector& b = *r.scalings;
    for (Eigen::Index l = 0; l < 4; ++l) {
      const std::complex<double> proj = (q.channel().col(l).transpose() * m)(0);
      EXPECT_LT(std::abs(proj * b[l] - q.weights()[l]), 1e-9);
      EXPECT_LE(std::norm(b[l]), q.power() * (1 + 1e-9));
      if (s.contains(static_cast<std::size_t>(l))) {
        EXPECT_NEAR(std::norm(b[l]), q.power(), 1e-9 * q.power());
      }
    }
  }
}

TEST(ZfFeasibility, CollinearSubsetIsInfeasible) {
  CMatrix h(2, 2);
  h << 1, 2, 1, 2;
  const CoordinationProblem p = make(h, {0.5, 0.5}, 1, 0.1);
  EXPECT_FALSE(otac::check_zf_feasible(p, DeviceSubset(3)).feasible);
}

TEST(ZfShortcut, ScalarAndOrthogonalExamples) {
  const CoordinationProblem single = make(column({0.6, 0.8}), {0.5}, 4.0, 0.2);
  const auto one = otac::zf_shortcut(single);
  ASSERT_TRUE(one.has_value());
  EXPECT_LT(std::abs(one->receiver[0] - 0.5 * 0.6 / 2.0), 1e-15);
  EXPECT_EQ(one->check_count, 0u);
  EXPECT_EQ(one->subset, DeviceSubset(1));

  CMatrix orth(2, 2);
  orth << 1, 0, 0, 3;
  EXPECT_FALSE(otac::zf_shortcut(make(orth, {1, 1}, 1, 0.1)).has_value());

  CMatrix scalar(1, 2);
  scalar << 0.5, 2.0;
  const auto s = otac::zf_shortcut(make(scalar, {1, 1}, 1, 0.1));
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->subset, DeviceSubset(1));
  EXPECT_LT(std::abs(s->receiver[0] - 2.0), 1e-15);
  EXPECT_LT(std::abs(s->scalings[0] - 1.0), 1e-15);
  EXPECT_LT(std::abs(s->scalings[1] - 0.25), 1e-15);
  EXPECT_NEAR(s->error, 0.4, 1e-15);
}

TEST(ZfShortcut, ExampleConditionFails) {
  EXPECT_FALSE(otac::zf_shortcut(otac::example_problem(0.1)).has_value());
}

TEST(ZfShortcut, SolutionIsFeasibleAndOptimal) {
  oracle::RandomInstances gen(71);
  int fired = 0;
  for (int t = 0; t < 4000 && fired < 60; ++t) {
    const std::size_t l = 2 + t % 4;
    const CoordinationProblem p = gen.problem(2 * l, l, 0.05, 0.1, true);
    const auto s = otac::zf_shortcut(p);
    if (!s) continue;
    ++fired;
    EXPECT_NEAR(s->error, otac::aggregation_error(p, s->receiver, s->scalings), 1e-9 * s->error);
    for (Eigen::Index k = 0; k < s->scalings.size(); ++k) {
      EXPECT_LE(std::norm(s->scalings[k]), p.power() * (1 + 1e-9));
    }
    const oracle::Best best = oracle::brute_optimum(p, true);
    EXPECT_NEAR(s->error, best.error, 1e-9 * best.error);
    EXPECT_GE(otac::azf_solve(p).error, best.error * (1 - 1e-12));
  }
  EXPECT_GE(fired, 60);
}

// Feasibility is not inherited by subsets, so the greedy descent can stop at
// a node whose children are all infeasible even when the shortcut certifies
// a deeper optimum.
TEST(Azf, CanStopAboveShortcutOptimum) {
  oracle::RandomInstances gen(71);
  int found = 0;
  for (int t = 0; t < 4000 && found == 0; ++t) {
    const std::size_t l = 2 + t % 4;
    const CoordinationProblem p = gen.problem(2 * l, l, 0.05, 0.1, true);
    const auto s = otac::zf_shortcut(p);
    if (!s) continue;
    const auto azf = otac::azf_solve(p);
    const oracle::Best best = oracle::brute_optimum(p, true);
    if (azf.error <= best.error * (1 + 1e-9)) continue;
    ++found;
    EXPECT_EQ(s->subset.mask(), best.mask);
    const std::uint64_t stop = azf.subset.mask();
    EXPECT_TRUE(oracle::zf_setting(p, oracle::members(stop)).feasible);
    ASSERT_GT(azf.subset.size(), 1u);
    for (std::size_t k : azf.subset.indices()) {
      const std::uint64_t child = stop & ~(std::uint64_t{1} << k);
      EXPECT_FALSE(oracle::zf_setting(p, oracle::members(child)).feasible);
    }
  }
  EXPECT_EQ(found, 1);
}

TEST(ClosedFormError, ScalarExamples) {
  EXPECT_DOUBLE_EQ(otac::zf_closed_form_error(make(column({1, 0}), {1}, 1, 1), DeviceSubset(1)),
                   1.0);
  EXPECT_DOUBLE_EQ(otac::zf_closed_form_error(make(column({2, 0}), {1}, 4, 2), DeviceSubset(1)),
                   0.125);
}

TEST(Azf, Example) {
  const CoordinationProblem p = otac::example_problem(0.1);
  const auto sol = otac::azf_solve(p);
  EXPECT_EQ(sol.subset, DeviceSubset(0b1001));
  EXPECT_NEAR(sol.error, 4.725192040096412e-02, 1e-12);
  ASSERT_FALSE(sol.path.empty());
  EXPECT_EQ(sol.path.front(), DeviceSubset::all(4));
  EXPECT_EQ(sol.path.back(), sol.subset);
  // Root, then 4 + 3 + 2 children along {1,2,3,4} -> {1,3,4} -> {1,4}.
  EXPECT_EQ(sol.check_count, 10u);
  EXPECT_EQ(sol.downdate_fallbacks, 0u);
}

TEST(Azf, TieBreakRemovesSmallestIndex) {
  CMatrix h = CMatrix::Identity(3, 3);
  h.array() += -0.3;
  const CoordinationProblem p = make(h, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1, 0.1);
  const auto sol = otac::azf_solve(p);
  ASSERT_GE(sol.path.size(), 2u);
  EXPECT_EQ(sol.path[1], DeviceSubset(0b110));
  if (sol.path.size() > 2) EXPECT_EQ(sol.path[2], DeviceSubset(0b100));
}

TEST(Azf, Properties) {
  oracle::RandomInstances gen(81);
  for (int t = 0; t < 200; ++t) {
    const std::size_t l = 2 + t % 5;
    const CoordinationProblem p = gen.problem(l + t % 4, l, 0.2, t % 2 ? 0.2 : 1.0);
    const auto sol = otac::azf_solve(p);
    // Feasible, zero-forcing, at least one device at full power.
    EXPECT_FALSE(sol.subset.empty());
    EXPECT_NEAR(sol.error, otac::aggregation_error(p, sol.receiver, sol.scalings),
                1e-9 * sol.error);
    double peak = 0.0;
    for (Eigen::Index k = 0; k < sol.scalings.size(); ++k) {
      peak = std::max(peak, std::norm(sol.scalings[k]));
    }
    EXPECT_NEAR(peak, p.power(), 1e-9 * p.power());
    // Dominated by the exhaustive optimum.
    const oracle::Best best = oracle::brute_optimum(p, true);
    EXPECT_GE(sol.error, best.error * (1 - 1e-12));
    // Path shrinks one device at a time through feasible subsets.
    for (std::size_t i = 1; i < sol.path.size(); ++i) {
      EXPECT_TRUE(sol.path[i].is_strict_subset_of(sol.path[i - 1]));
      EXPECT_EQ(sol.path[i].size() + 1, sol.path[i - 1].size());
      EXPECT_TRUE(otac::check_zf_feasible(p, sol.path[i]).feasible);
    }
    // Noise variance only rescales the error.
    const auto louder = otac::azf_solve(p.with_noise_variance(0.7));
    EXPECT_EQ(louder.subset, sol.subset);
    EXPECT_EQ(louder.check_count, sol.check_count);
    EXPECT_EQ(louder.receiver, sol.receiver);
    EXPECT_NEAR(louder.error / sol.error, 0.7 / 0.2, 1e-12);
  }
}

TEST(Azf, RequiresAtLeastAsManyAntennasAsDevices) {
  oracle::RandomInstances gen(91);
  try {
    otac::azf_solve(gen.problem(3, 4, 0.1));
    FAIL();
  } catch (const otac::Error& e) {
    EXPECT_EQ(e.code(), otac::ErrorCode::kInvalidArgument);
  }
}

TEST(Azf, SingularRootIsRootInfeasible) {
  CMatrix h(2, 2);
  h << 1, 2, 1, 2;
  try {
    otac::azf_solve(make(h, {0.5, 0.5}, 1, 0.1));
    FAIL();
  } catch (const otac::Error& e) {
    EXPECT_EQ(e.code(), otac::ErrorCode::kRootInfeasible);
  }
}

TEST(Structure, ZfNestedFeasiblePairsAreOrdered) {
  oracle::RandomInstances gen(101);
  for (int t = 0; t < 40; ++t) {
    const std::size_t l = 3 + t % 4;
    const CoordinationProblem p = gen.problem(l + 2, l, 0.1, 0.3);
    const auto settings = otac::enumerate_feasible(p, otac::Scheme::kZf);
    for (const auto& small : settings) {
      for (const auto& big : settings) {
        if (small.subset.is_strict_subset_of(big.subset)) {
          EXPECT_LE(small.error, big.error + 1e-12);
        }
      }
    }
  }
}

TEST(Structure, OptimumHasTwoDevicesWhenShortcutFails) {
  // Equal weights: with unequal weights another singleton may be feasible.
  oracle::RandomInstances gen(111);
  for (int t = 0; t < 150; ++t) {
    const std::size_t l = 2 + t % 5;
    const CoordinationProblem p = gen.problem(2 * l, l, 0.1, 0.2);
    if (otac::zf_shortcut(p)) continue;
    EXPECT_GE(otac::exhaustive_optimum(p, otac::Scheme::kZf).subset.size(), 2u);
  }
}

}  // namespace

#include "heatdecon/bounds.hpp"
#include "heatdecon/error.hpp"

#include "instances.hpp"

#include <boost/math/tools/roots.hpp>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace heatdecon;
using std::numbers::e;

namespace {

// Folz bound through exp/log, kept apart from the library's evaluation.
double folz_exp_form(double d, double t) { return std::exp((d / 2) * std::log(2 * e * t / d)); }

testing_support::Instance k2_instance() { return testing_support::make_instance(testing_support::k2()); }
testing_support::Instance p3_instance() { return testing_support::make_instance(testing_support::p3()); }

SupportProfile profile(Eigen::Index j, double d) { return {j, d}; }

}  // namespace

TEST(GraphConstants, SmallGraphs) {
  const auto k2 = k2_instance();
  EXPECT_EQ(k2.constants.n, 2);
  EXPECT_NEAR(k2.constants.op_norm, 2.0, 1e-14);
  EXPECT_NEAR(k2.constants.gap, 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(k2.constants.zeta, 1.0);
  const auto p3 = p3_instance();
  EXPECT_NEAR(p3.constants.op_norm, 3.0, 1e-14);
  EXPECT_NEAR(p3.constants.gap, 1.0, 1e-14);
  EXPECT_NEAR(p3.constants.zeta, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(SupportProfile, Values) {
  const auto p3 = p3_instance();
  const std::vector<Vertex> ends{0, 2};
  const auto p = support_profile(p3.metric, ends);
  EXPECT_EQ(p.j, 2);
  EXPECT_NEAR(p.d_min, std::sqrt(2.0), 1e-15);
  const std::vector<Vertex> one{1};
  EXPECT_TRUE(std::isinf(support_profile(p3.metric, one).d_min));
}

TEST(DiagonalBounds, TimeZero) {
  const auto b = diagonal_bounds(p3_instance().constants, 0.0);
  EXPECT_EQ(b.lower, 1.0);
  EXPECT_EQ(b.upper, 1.0);
}

TEST(DiagonalBounds, K2HalfTimeIsExact) {
  const auto b = diagonal_bounds(k2_instance().constants, 0.5);
  const double exact = (1 + std::exp(-1.0)) / 2;
  EXPECT_NEAR(b.lower, exact, 1e-14);
  EXPECT_NEAR(b.upper, exact, 1e-14);
}

TEST(DiagonalBounds, LongTimeLimit) {
  const auto b = diagonal_bounds(p3_instance().constants, 1e3);
  EXPECT_NEAR(b.lower, 1.0 / 3, 1e-15);
  EXPECT_NEAR(b.upper, 1.0 / 3, 1e-15);
}

TEST(DiagonalBounds, NegativeTime) {
  EXPECT_THROW(diagonal_bounds(k2_instance().constants, -1.0), Error);
}

TEST(DiagonalBounds, SandwichOnRandomGraphs) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = testing_support::make_instance(
        testing_support::random_connected_graph(rng, 3 + 3 * trial, 0.2));
    for (double t : {0.01, 0.1, 1.0}) {
      const auto b = diagonal_bounds(inst.constants, t);
      const HeatOperator h(inst.spectrum, t);
      for (Vertex x = 0; x < inst.constants.n; ++x) {
        EXPECT_GE(h(x, x), b.lower - 1e-10);
        EXPECT_LE(h(x, x), b.upper + 1e-10);
      }
    }
  }
}

TEST(Folz, UnitAtCriticalDistance) {
  for (double t : {0.01, 0.3, 2.0}) {
    const auto v = folz_bound(2 * e * t, t);
    EXPECT_NEAR(v.value, 1.0, 1e-15);
  }
}

TEST(Folz, DirectEvaluation) {
  const auto v = folz_bound(1.0, 0.05);
  EXPECT_NEAR(v.value, std::sqrt(0.1 * e), 1e-15);
  EXPECT_NEAR(v.value, 0.521371, 1e-6);
  EXPECT_NEAR(v.value, folz_exp_form(1.0, 0.05), 1e-15);
  EXPECT_FALSE(v.vacuous);
}

TEST(Folz, VacuousFlag) {
  EXPECT_TRUE(folz_bound(0.1, 1.0).vacuous);
  EXPECT_GE(folz_bound(0.1, 1.0).value, 1.0);
  EXPECT_FALSE(folz_bound(5.0, 0.01).vacuous);
}

TEST(Folz, ErrorCodes) {
  auto code = [](double d, double t) {
    try {
      folz_bound(d, t);
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code(0.0, 1.0), ErrorCode::kNonPositiveDistance);
  EXPECT_EQ(code(-1.0, 1.0), ErrorCode::kNonPositiveDistance);
  EXPECT_EQ(code(1.0, 0.0), ErrorCode::kNonPositiveTime);
  EXPECT_EQ(code(1.0, -2.0), ErrorCode::kNonPositiveTime);
}

TEST(Folz, DominatesOffDiagonal) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = testing_support::make_instance(
        testing_support::random_connected_graph(rng, 4 + 3 * trial, 0.15));
    for (double t : {0.001, 0.01, 0.1}) {
      const HeatOperator h(inst.spectrum, t);
      for (Vertex x = 0; x < inst.constants.n; ++x)
        for (Vertex y = 0; y < inst.constants.n; ++y)
          if (x != y) { EXPECT_LE(h(x, y), folz_bound(inst.metric(x, y), t).value + 1e-12); }
    }
  }
}

TEST(Invertibility, SingleVertexAlwaysOk) {
  const auto c = p3_instance().constants;
  for (double t : {0.0, 0.1, 10.0}) {
    const auto r = check_invertibility(c, profile(1, kInfiniteSeparation), t);
    EXPECT_TRUE(r.ok);
    EXPECT_DOUBLE_EQ(r.margin, diagonal_bounds(c, t).lower);
  }
}

TEST(Invertibility, SmallTimeLimit) {
  const auto c = p3_instance().constants;
  double prev = 0.0;
  for (double t : {1e-6, 1e-12, 1e-24, 1e-48}) {
    const auto r = check_invertibility(c, profile(3, 0.5), t);
    EXPECT_TRUE(r.ok);
    EXPECT_GT(r.margin, prev);
    EXPECT_NEAR(r.margin, 1.0 / 3 + std::exp(-3 * t) * 2 / 3 - 2 * folz_exp_form(0.5, t), 1e-15);
    prev = r.margin;
  }
  EXPECT_NEAR(prev, 1.0, 1e-11);
}

TEST(Invertibility, K2PlugIn) {
  const auto c = k2_instance().constants;
  const double t = 0.01;
  const double lhs = std::sqrt(2 * e * t);  // (J-1)(2eT/D)^{D/2}, D = 1
  const double rhs = 0.5 + std::exp(-2 * t) / 2;
  const auto r = check_invertibility(c, profile(2, 1.0), t);
  EXPECT_TRUE(r.ok);
  EXPECT_NEAR(r.margin, rhs - lhs, 1e-15);
}

TEST(Invertibility, FailsWhenCouplingDominates) {
  const auto c = k2_instance().constants;
  EXPECT_FALSE(check_invertibility(c, profile(2, 1.0), 0.15).ok);
  EXPECT_THROW(inverse_norm_bound(c, profile(2, 1.0), 0.15), Error);
}

TEST(InverseNormBound, TrivialCases) {
  const auto c = p3_instance().constants;
  EXPECT_DOUBLE_EQ(inverse_norm_bound(c, profile(1, kInfiniteSeparation), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(inverse_norm_bound(c, profile(3, 0.3), 0.0), 1.0);
}

TEST(InverseNormBound, K2DominatesExactNorms) {
  const auto inst = k2_instance();
  const double t = 0.01;
  const double lhs = std::sqrt(2 * e * t);
  const double margin = 0.5 + std::exp(-2 * t) / 2 - lhs;
  const double bound = inverse_norm_bound(inst.constants, profile(2, 1.0), t);
  EXPECT_NEAR(bound, 1.0 / margin, 1e-13);

  const Eigen::Matrix2d m = testing_support::k2_kernel(t);
  const Eigen::Matrix2d inv = m.inverse();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
  EXPECT_GE(bound, 1.0 / svd.singularValues().minCoeff());
  EXPECT_GE(bound, inv.cwiseAbs().rowwise().sum().maxCoeff());
}

TEST(Feasibility, SmallTimeBothHold) {
  const auto c = p3_instance().constants;
  const auto r = check_certificate_condition(c, profile(2, std::sqrt(2.0)), 1e-10);
  EXPECT_TRUE(r.cond1_ok);
  EXPECT_TRUE(r.cond2_ok);
  EXPECT_NEAR(r.cond1_rhs, 1.0, 1e-8);
  EXPECT_LT(r.cond2_lhs, 1e-2);
}

TEST(Feasibility, SingleVertexReducesToZetaTerm) {
  const auto c = p3_instance().constants;
  const double t = 0.02;
  const auto r = check_certificate_condition(c, profile(1, kInfiniteSeparation), t);
  EXPECT_EQ(r.cond1_lhs, 0.0);
  EXPECT_NEAR(r.cond2_lhs, folz_exp_form(c.zeta, t), 1e-14);
  EXPECT_DOUBLE_EQ(r.cond2_rhs, diagonal_bounds(c, t).lower);
}

TEST(Feasibility, P3PlugIn) {
  const auto c = p3_instance().constants;
  const double t = 0.001;
  const double d = std::sqrt(2.0);
  const double zeta = 1.0 / std::sqrt(2.0);
  const double diag = 1.0 / 3 + std::exp(-3 * t) * 2.0 / 3;
  const double c1 = folz_exp_form(d, t);
  const double c2 = folz_exp_form(zeta, t) + folz_exp_form(d / 2, t);
  const auto r = check_certificate_condition(c, profile(2, d), t);
  EXPECT_NEAR(r.t, t, 0.0);
  EXPECT_NEAR(r.cond1_lhs, c1, 1e-15);
  EXPECT_NEAR(r.cond1_rhs, diag, 1e-15);
  EXPECT_NEAR(r.cond2_lhs, c2, 1e-14);
  EXPECT_NEAR(r.cond2_rhs, diag - c1, 1e-14);
  EXPECT_EQ(r.cond1_ok, c1 < diag);
  EXPECT_EQ(r.cond2_ok, c2 < diag - c1);
  ASSERT_TRUE(r.inverse_norm_bound.has_value());
  EXPECT_NEAR(*r.inverse_norm_bound, 1.0 / (diag - c1), 1e-13);
}

TEST(Feasibility, NoBoundWhenConditionOneFails) {
  const auto c = k2_instance().constants;
  const auto r = check_certificate_condition(c, profile(2, 1.0), 0.5);
  EXPECT_FALSE(r.cond1_ok);
  EXPECT_FALSE(r.inverse_norm_bound.has_value());
}

TEST(Feasibility, ConditionTwoImpliesOne) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = testing_support::make_instance(
        testing_support::random_connected_graph(rng, 5 + trial, 0.2));
    const auto s = testing_support::random_subset(rng, inst.constants.n, 1 + trial % 4);
    const auto p = support_profile(inst.metric, s);
    for (double t : {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
      const auto r = check_certificate_condition(inst.constants, p, t);
      if (r.cond2_ok && r.cond2_rhs > 0) { EXPECT_TRUE(r.cond1_ok); }
    }
  }
}

TEST(MaxTime, BisectionContract) {
  std::mt19937_64 rng(24);
  int interior = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = testing_support::make_instance(
        testing_support::random_connected_graph(rng, 4 + trial, 0.2));
    const auto s = testing_support::random_subset(rng, inst.constants.n, 1 + trial % 5);
    const auto p = support_profile(inst.metric, s);
    const double t_max = max_admissible_time(inst.constants, p);
    if (t_max == 0.0) continue;
    const auto at = check_certificate_condition(inst.constants, p, t_max);
    EXPECT_TRUE(at.cond1_ok && at.cond2_ok);
    const double cap = (std::isinf(p.d_min) ? inst.constants.zeta : p.d_min) / (2 * e);
    EXPECT_LE(t_max, cap);
    if (t_max < cap) {
      ++interior;
      const auto beyond = check_certificate_condition(inst.constants, p, 1.01 * t_max);
      EXPECT_FALSE(beyond.cond1_ok && beyond.cond2_ok);
    }
  }
  EXPECT_GT(interior, 0);
}

TEST(MaxTime, K2SingleVertexRoot) {
  const auto c = k2_instance().constants;
  const double t_max = max_admissible_time(c, profile(1, kInfiniteSeparation));
  // (2eT)^{1/2} = 1/2 + e^{-2T}/2 with zeta = 1
  const auto f = [](double t) { return std::sqrt(2 * e * t) - (0.5 + std::exp(-2 * t) / 2); };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, 1e-12, 1.0 / (2 * e), boost::math::tools::eps_tolerance<double>(50), iters);
  const double root = 0.5 * (a + b);
  EXPECT_NEAR(t_max, root, 1e-8 * root);
}

TEST(MaxTime, MonotoneInSupportSize) {
  const auto c = p3_instance().constants;
  for (double d : {0.8, 1.5, 3.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 2; j <= 8; ++j) {
      const double t = max_admissible_time(c, profile(j, d));
      EXPECT_LE(t, prev * (1 + 1e-9)) << "d=" << d << " j=" << j;
      prev = t;
    }
  }
}

TEST(MaxTime, TimeZeroRejected) {
  EXPECT_THROW(check_certificate_condition(k2_instance().constants, profile(1, kInfiniteSeparation), -1e-3),
               Error);
}

TEST(Gershgorin, DiagnosticDominatesClosedForm) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = testing_support::make_instance(
        testing_support::random_connected_graph(rng, 6 + trial, 0.2));
    const auto s = testing_support::random_subset(rng, inst.constants.n, 2 + trial % 4);
    const auto p = support_profile(inst.metric, s);
    const double t_max = max_admissible_time(inst.constants, p);
    if (t_max == 0.0) continue;
    const HeatOperator h(inst.spectrum, t_max);
    const auto check = check_invertibility(inst.constants, p, t_max);
    ASSERT_TRUE(check.ok);
    EXPECT_GE(gershgorin_lower_bound(restrict(h, s)), check.margin - 1e-12);
  }
}

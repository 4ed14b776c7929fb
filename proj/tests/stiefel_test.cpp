// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "sth/errors.hpp"
#include "sth/stiefel.hpp"
#include "test_support.hpp"

namespace sth {
namespace {

using testing::gaussianish;
using testing::random_point;
using testing::random_skew;
using testing::random_tangent;

TEST(StiefelPoint, RejectsNonOrthonormal) {
  EXPECT_THROW(StiefelPoint(2.0 * Matrix::Identity(4, 2)), PreconditionError);
  EXPECT_THROW(StiefelPoint(Matrix::Identity(2, 3)), DimensionError);
}

TEST(TangentVector, RejectsNonTangent) {
  const StiefelPoint u(Matrix::Identity(4, 2));
  EXPECT_THROW(TangentVector(u, Matrix::Identity(4, 2)), DomainError);
}

TEST(ProjectTangent, IdempotentAndTangent) {
  Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const StiefelPoint u = random_point(rng, 12, 3);
    const TangentVector d = project_tangent(u, gaussianish(rng, 12, 3));
    EXPECT_LT(tangency_defect(u.matrix(), d.matrix()), 1e-12);
    EXPECT_LT((project_tangent(u, d.matrix()).matrix() - d.matrix()).norm(), 1e-12);
  }
}

TEST(ProjectTangent, BasePointMapsToZero) {
  Rng rng(102);
  const StiefelPoint u = random_point(rng, 8, 3);
  EXPECT_LT(project_tangent(u, u.matrix()).matrix().norm(), 1e-12);
}

TEST(Metric, NormalPartIsFrobenius) {
  Rng rng(111);
  const StiefelPoint u = random_point(rng, 10, 3);
  const Matrix t = gaussianish(rng, 10, 3);
  const Matrix normal = t - u.matrix() * (u.matrix().transpose() * t);
  const TangentVector d(u, normal);
  EXPECT_NEAR(metric(d, d), normal.squaredNorm(), 1e-12);
}

TEST(Metric, VerticalPartIsHalfFrobenius) {
  Rng rng(112);
  const StiefelPoint u = random_point(rng, 10, 3);
  const Matrix a = random_skew(rng, 3);
  const TangentVector d(u, u.matrix() * a);
  EXPECT_NEAR(metric(d, d), 0.5 * (a.transpose() * a).trace(), 1e-12);
}

TEST(Metric, SymmetricPositiveAndBaseChecked) {
  Rng rng(113);
  const StiefelPoint u = random_point(rng, 9, 3);
  const TangentVector x = random_tangent(rng, u, 1.0);
  const TangentVector y = random_tangent(rng, u, 1.0);
  EXPECT_NEAR(metric(x, y), metric(y, x), 1e-14);
  EXPECT_GT(metric(x, x), 0.0);
  EXPECT_NEAR(norm(x), std::sqrt(metric(x, x)), 1e-15);
  EXPECT_NEAR(canonical_norm(u.matrix(), x.matrix()), norm(x), 1e-15);
  const StiefelPoint w = random_point(rng, 9, 3);
  EXPECT_THROW(metric(x, TangentVector::zero(w)), DomainError);
}

TEST(SplitTangent, VerticalAndNormalCases) {
  Rng rng(121);
  const StiefelPoint u = random_point(rng, 10, 3);
  const Matrix a = random_skew(rng, 3);
  const HorizontalSplit v = split_tangent(TangentVector(u, u.matrix() * a));
  EXPECT_LT((v.a - a).norm(), 1e-14);
  EXPECT_LT(v.r_factor.norm(), 1e-14);

  const Matrix t = gaussianish(rng, 10, 3);
  const HorizontalSplit n =
      split_tangent(TangentVector(u, t - u.matrix() * (u.matrix().transpose() * t)));
  EXPECT_LT(n.a.norm(), 1e-14);
}

TEST(SplitTangent, Reconstructs) {
  Rng rng(122);
  for (int trial = 0; trial < 10; ++trial) {
    const StiefelPoint u = random_point(rng, 14, 4);
    const TangentVector d = random_tangent(rng, u, 1.3);
    const HorizontalSplit s = split_tangent(d);
    EXPECT_LT((s.a + s.a.transpose()).norm(), 1e-10);
    EXPECT_LT((u.matrix() * s.a + s.q * s.r_factor - d.matrix()).norm(), 1e-12);
    EXPECT_LT((u.matrix().transpose() * s.q).norm(), 1e-12);
  }
}

TEST(SplitTangent, RankDeficientNormalPart) {
  Rng rng(123);
  const StiefelPoint u = random_point(rng, 10, 3);
  Matrix t = gaussianish(rng, 10, 3);
  t.col(2).setZero();
  Matrix normal = t - u.matrix() * (u.matrix().transpose() * t);
  const TangentVector d(u, normal + u.matrix() * random_skew(rng, 3));
  const HorizontalSplit s = split_tangent(d);
  EXPECT_TRUE(s.rank_deficient);
  EXPECT_LT((s.q.transpose() * s.q - Matrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_LT((u.matrix().transpose() * s.q).norm(), 1e-12);
  EXPECT_LT((u.matrix() * s.a + s.q * s.r_factor - d.matrix()).norm(), 1e-12);
}

TEST(StiefelExp, TrivialCases) {
  Rng rng(131);
  const StiefelPoint u = random_point(rng, 10, 3);
  const TangentVector d = random_tangent(rng, u, 0.7);
  EXPECT_LT((stiefel_exp(d, 0.0).matrix() - u.matrix()).norm(), 1e-14);
  EXPECT_LT((stiefel_exp(TangentVector::zero(u), 0.8).matrix() - u.matrix()).norm(), 1e-14);
}

TEST(StiefelExp, StaysOnManifold) {
  Rng rng(132);
  for (int trial = 0; trial < 5; ++trial) {
    const StiefelPoint u = random_point(rng, 30, 5);
    const TangentVector d = random_tangent(rng, u, 2.5);
    for (int i = 0; i <= 10; ++i) {
      const Matrix x = stiefel_exp(d, 0.1 * i).matrix();
      EXPECT_LE((x.transpose() * x - Matrix::Identity(5, 5)).norm(), 1e-10);
    }
  }
}

TEST(StiefelExp, DifferentialAtZeroIsIdentity) {
  Rng rng(133);
  const StiefelPoint u = random_point(rng, 20, 4);
  const TangentVector d = random_tangent(rng, u, 1.0);
  auto err = [&](double h) {
    return ((stiefel_exp(d, h).matrix() - u.matrix()) / h - d.matrix()).norm();
  };
  const double e3 = err(1e-3);
  const double e4 = err(1e-4);
  EXPECT_LT(e3, 1e-2);
  // First-order decay: a tenfold smaller step gives a roughly tenfold smaller error.
  EXPECT_GT(e3 / e4, 7.0);
  EXPECT_LT(e3 / e4, 13.0);
}

TEST(StiefelExp, GeodesicIsConstantSpeed) {
  Rng rng(134);
  const StiefelPoint u = random_point(rng, 16, 3);
  const TangentVector d = random_tangent(rng, u, 0.9);
  const StiefelPoint a = stiefel_exp(d, 0.25);
  const StiefelPoint b = stiefel_exp(d, 0.75);
  EXPECT_NEAR(dist(a, b), 0.5 * 0.9, 1e-9);
}

TEST(StiefelLog, SamePointGivesZero) {
  Rng rng(141);
  const StiefelPoint u = random_point(rng, 10, 3);
  EXPECT_LT(stiefel_log(u, u).matrix().norm(), 1e-14);
  EXPECT_LT(dist(u, u), 1e-15);
}

TEST(StiefelLog, RoundTripHalfNorm) {
  Rng rng(142);
  const StiefelPoint u = random_point(rng, 25, 4);
  const TangentVector d = random_tangent(rng, u, 0.5);
  const TangentVector back = stiefel_log(u, stiefel_exp(d));
  EXPECT_LT((back.matrix() - d.matrix()).norm(), 1e-10);
  EXPECT_LT(tangency_defect(u.matrix(), back.matrix()), 1e-12);
}

TEST(StiefelLog, PostconditionExpOfLogHitsTarget) {
  Rng rng(143);
  const StiefelPoint u = random_point(rng, 20, 4);
  const StiefelPoint w = stiefel_exp(random_tangent(rng, u, 1.4));
  const TangentVector v = stiefel_log(u, w);
  EXPECT_LT((stiefel_exp(v).matrix() - w.matrix()).norm(), 1e-11);
}

TEST(StiefelLog, IterationCapThrowsWithDiagnostics) {
  Rng rng(144);
  const StiefelPoint u = random_point(rng, 20, 4);
  const StiefelPoint w = stiefel_exp(random_tangent(rng, u, 1.5));
  try {
    stiefel_log(u, w, kLogTolerance, 1);
    FAIL() << "expected NoConvergence";
  } catch (const NoConvergence& e) {
    EXPECT_EQ(e.iterations(), 1u);
    EXPECT_GT(e.residual(), kLogTolerance);
  }
}

TEST(StiefelLog, AntipodalPointIsOutOfReach) {
  Rng rng(145);
  const StiefelPoint u = random_point(rng, 12, 3);
  EXPECT_THROW(stiefel_log(u, StiefelPoint(-u.matrix())), NoConvergence);
}

TEST(StiefelLog, RejectsNonPositiveTau) {
  const StiefelPoint u(Matrix::Identity(6, 2));
  EXPECT_THROW(stiefel_log(u, u, 0.0), PreconditionError);
}

TEST(Dist, RadialIsometryAndSymmetry) {
  Rng rng(151);
  const StiefelPoint u = random_point(rng, 20, 4);
  const TangentVector d = random_tangent(rng, u, 0.3);
  const StiefelPoint w = stiefel_exp(d);
  EXPECT_NEAR(dist(u, w), 0.3, 1e-8);
  EXPECT_NEAR(dist(u, w), dist(w, u), 1e-8);
}

// Property: round trip and radial isometry for canonical norms up to 1.
TEST(StiefelProperty, ExpLogRoundTrip) {
  Rng rng(161);
  for (int trial = 0; trial < 25; ++trial) {
    const StiefelPoint u = random_point(rng, 60, 6);
    const double length = rng.uniform(0.05, 1.0);
    const TangentVector d = random_tangent(rng, u, length);
    const TangentVector back = stiefel_log(u, stiefel_exp(d));
    EXPECT_LE((back.matrix() - d.matrix()).norm(), 1e-9) << "trial " << trial;
    EXPECT_LE(std::abs(norm(back) - length), 1e-8 * length) << "trial " << trial;
  }
}

TEST(CallCounters, CountExpAndLog) {
  Rng rng(171);
  const StiefelPoint u = random_point(rng, 10, 2);
  const TangentVector d = random_tangent(rng, u, 0.4);
  reset_call_counters();
  const StiefelPoint w = stiefel_exp(d);
  stiefel_log(u, w);
  stiefel_exp(d, 0.5);
  EXPECT_EQ(call_counters().exp_calls, 2u);
  EXPECT_EQ(call_counters().log_calls, 1u);
  reset_call_counters();
  EXPECT_EQ(call_counters().exp_calls, 0u);
}

}  // namespace
}  // namespace sth

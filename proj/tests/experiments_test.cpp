// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sth/errors.hpp"
#include "sth/experiments.hpp"
#include "test_support.hpp"

namespace sth {
namespace {

bool has_comment(const ErrorReport& r, const std::string& text) {
  return std::find(r.comments.begin(), r.comments.end(), text) != r.comments.end();
}

std::string comment_value(const ErrorReport& r, const std::string& key) {
  for (const std::string& c : r.comments) {
    if (c.rfind(key + ",", 0) == 0) return c.substr(key.size() + 1);
  }
  return {};
}

TEST(Chebyshev, Midpoint) {
  const std::vector<double> x = chebyshev_nodes(-1.0, 3.0, 1);
  ASSERT_EQ(x.size(), 1u);
  EXPECT_NEAR(x[0], 1.0, 1e-15);
}

TEST(Chebyshev, SixNodesOnSymmetricInterval) {
  const std::vector<double> x = chebyshev_nodes(-1.1, 1.1, 6);
  const double expected[] = {-1.0625, -0.7778, -0.2847, 0.2847, 0.7778, 1.0625};
  ASSERT_EQ(x.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(x[i], expected[i], 5e-5);
}

TEST(Chebyshev, TwoNodes) {
  const std::vector<double> x = chebyshev_nodes(0.0, 0.5, 2);
  ASSERT_EQ(x.size(), 2u);
  EXPECT_NEAR(x[0], 0.0732, 5e-5);
  EXPECT_NEAR(x[1], 0.4268, 5e-5);
}

TEST(UniformGrid, Endpoints) {
  const std::vector<double> g = uniform_grid(0.5, 2.0, 100);
  ASSERT_EQ(g.size(), 100u);
  EXPECT_EQ(g.front(), 0.5);
  EXPECT_EQ(g.back(), 2.0);
  EXPECT_THROW(uniform_grid(0.0, 1.0, 1), PreconditionError);
}

TEST(Config, MethodNames) {
  for (Method m : {Method::hermite, Method::geodesic, Method::rbf}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("spline"), PreconditionError);
}

TEST(Config, Validation) {
  const ExperimentConfig good = default_config(ExperimentKind::qr_interp);
  EXPECT_NO_THROW(validate(good));
  auto broken = [&](auto mutate) {
    ExperimentConfig c = good;
    mutate(c);
    return c;
  };
  EXPECT_THROW(validate(broken([](ExperimentConfig& c) { c.r = c.n + 1; })), PreconditionError);
  EXPECT_THROW(validate(broken([](ExperimentConfig& c) { c.num_nodes = 1; })), PreconditionError);
  EXPECT_THROW(validate(broken([](ExperimentConfig& c) { c.h = 0.0; })), PreconditionError);
  EXPECT_THROW(validate(broken([](ExperimentConfig& c) { c.tau = -1.0; })), PreconditionError);
  EXPECT_THROW(validate(broken([](ExperimentConfig& c) { c.b = c.a; })), PreconditionError);
}

TEST(Rng, DeterministicAndInRange) {
  Rng a(42), b(42), c(43);
  const Matrix x = a.uniform_matrix(5, 4, 0.0, 0.5);
  EXPECT_EQ(x, b.uniform_matrix(5, 4, 0.0, 0.5));
  EXPECT_NE(x, c.uniform_matrix(5, 4, 0.0, 0.5));
  EXPECT_GE(x.minCoeff(), 0.0);
  EXPECT_LT(x.maxCoeff(), 0.5);
}

TEST(QrExperiment, SamplesAreTangentAndMatchFiniteDifferences) {
  const QRExperimentData d = gen_qr_experiment(default_config(ExperimentKind::qr_interp));
  ASSERT_EQ(d.samples.size(), 6u);
  const double h = 1e-6;
  for (const HermiteSample& s : d.samples) {
    EXPECT_LT(tangency_defect(s.point.matrix(), s.velocity.matrix()), 1e-10);
    const Matrix fd = (d.q_at(s.t + h).matrix() - d.q_at(s.t - h).matrix()) / (2 * h);
    EXPECT_LT(testing::rel_diff(s.velocity.matrix(), fd), 1e-6);
    const Matrix yfd = (d.y_at(s.t + h) - d.y_at(s.t - h)) / (2 * h);
    EXPECT_LT(testing::rel_diff(d.y_dot_at(s.t), yfd), 1e-8);
  }
}

TEST(QrExperiment, ReferencePathIsContinuous) {
  const QRExperimentData d = gen_qr_experiment(default_config(ExperimentKind::qr_interp));
  for (double t : uniform_grid(-1.1, 1.1, 200)) {
    EXPECT_LE((d.q_at(t + 1e-4).matrix() - d.q_at(t).matrix()).norm(), 1e-2) << t;
  }
}

TEST(QrExperiment, DeterministicReports) {
  ExperimentConfig c = default_config(ExperimentKind::qr_interp);
  c.n = 40;
  c.r = 4;
  const ErrorReport a = run_qr_interp(c);
  const ErrorReport b = run_qr_interp(c);
  ASSERT_EQ(a.series.size(), b.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    EXPECT_EQ(a.series[i].values, b.series[i].values);
    EXPECT_EQ(a.series[i].max_rel, b.series[i].max_rel);
  }
  EXPECT_EQ(a.comments, b.comments);
}

TEST(QrExperiment, DeskScaleOrdering) {
  const ErrorReport r = run_qr_interp(default_config(ExperimentKind::qr_interp));
  const ErrorSeries* hermite = r.find("hermite");
  const ErrorSeries* geodesic = r.find("geodesic");
  ASSERT_NE(hermite, nullptr);
  ASSERT_NE(geodesic, nullptr);
  EXPECT_EQ(hermite->values.size(), 100u);
  EXPECT_LE(hermite->max_rel, 0.1 * geodesic->max_rel);
  EXPECT_EQ(hermite->max_rel, *std::max_element(hermite->values.begin(), hermite->values.end()));
  EXPECT_TRUE(has_comment(r, "hermite_fit_calls,log=15,exp=10"));
}

class LowRankTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ExperimentConfig c = default_config(ExperimentKind::svd_interp);
    c.n = 80;
    c.m = 30;
    c.r = 5;
    config_ = new ExperimentConfig(c);
    data_ = new LowRankSVDData(gen_lowrank_svd_experiment(c));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete config_;
  }
  static ExperimentConfig* config_;
  static LowRankSVDData* data_;
};

ExperimentConfig* LowRankTest::config_ = nullptr;
LowRankSVDData* LowRankTest::data_ = nullptr;

TEST_F(LowRankTest, FixedRankAtNodes) {
  for (const LowRankSVDSample& s : data_->samples) {
    const Vector sigma = svd_full(data_->w_at(s.t)).sigma;
    EXPECT_LE(sigma(config_->r) / sigma(0), 1e-10);
    EXPECT_LT((sigma.head(config_->r) - s.sigma).norm(), 1e-10 * sigma(0));
  }
}

TEST_F(LowRankTest, ReconstructionDerivativeMatchesProductRule) {
  for (const LowRankSVDSample& s : data_->samples) {
    const Matrix& u = s.u.matrix();
    const Matrix& v = s.v.matrix();
    const Matrix recon = s.u_dot.matrix() * s.sigma.asDiagonal() * v.transpose() +
                         u * s.sigma_dot.asDiagonal() * v.transpose() +
                         u * s.sigma.asDiagonal() * s.v_dot.matrix().transpose();
    EXPECT_LT(testing::rel_diff(recon, data_->w_dot_at(s.t)), 1e-7);
    EXPECT_LT(tangency_defect(u, s.u_dot.matrix()), 1e-9);
    EXPECT_LT(tangency_defect(v, s.v_dot.matrix()), 1e-9);
  }
}

TEST_F(LowRankTest, WDotMatchesFiniteDifferences) {
  const double t = data_->nodes.front(), h = 1e-6;
  const Matrix fd = (data_->w_at(t + h) - data_->w_at(t - h)) / (2 * h);
  EXPECT_LT(testing::rel_diff(data_->w_dot_at(t), fd), 1e-8);
}

TEST_F(LowRankTest, SignTrackedPathIsContinuous) {
  const std::vector<StiefelPoint>& u = data_->reference_u;
  ASSERT_EQ(u.size(), data_->grid.size());
  for (std::size_t i = 1; i < u.size(); ++i) {
    EXPECT_LT((u[i].matrix() - u[i - 1].matrix()).norm(), 0.1) << "grid point " << i;
  }
  EXPECT_LT((u.front().matrix() - data_->samples.front().u.matrix()).norm(), 1e-12);
  EXPECT_LT((u.back().matrix() - data_->samples.back().u.matrix()).norm(), 1e-12);
}

TEST(SvdInterp, OrderingAndNodeErrors) {
  ExperimentConfig c = default_config(ExperimentKind::svd_interp);
  c.n = 100;
  c.m = 40;
  c.r = 5;
  const ErrorReport r = run_svd_interp(c);
  const ErrorSeries* hermite = r.find("hermite");
  const ErrorSeries* geodesic = r.find("geodesic");
  ASSERT_NE(hermite, nullptr);
  ASSERT_NE(geodesic, nullptr);
  EXPECT_LE(hermite->max_rel, 0.1 * geodesic->max_rel);
  // The grid starts and ends at the nodes.
  EXPECT_LT(hermite->values.front(), 1e-10);
  EXPECT_LT(hermite->values.back(), 1e-10);
  EXPECT_LT(geodesic->values.front(), 1e-10);
}

TEST(SvdInterp, RejectsRbf) {
  ExperimentConfig c = default_config(ExperimentKind::svd_interp);
  c.methods = {Method::hermite, Method::rbf};
  EXPECT_THROW(run_svd_interp(c), PreconditionError);
}

TEST(SnapshotModel, NormalizedColumnsAndDerivative) {
  const SnapshotModel model(1001, 6);
  ASSERT_EQ(model.times().size(), 6u);
  EXPECT_EQ(model.times().front(), 1.0);
  EXPECT_EQ(model.times().back(), 4.0);
  for (double mu : {1.7, 2.0, 2.3}) {
    const Matrix y = model.y(mu);
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      EXPECT_NEAR(model.l2_inner(y.col(j), y.col(j)), 1.0, 1e-10);
    }
    const double h = 1e-6;
    const Matrix fd = (model.y(mu + h) - model.y(mu - h)) / (2 * h);
    EXPECT_LT(testing::rel_diff(model.y_dot(mu), fd), 1e-7);
  }
}

TEST(SnapshotModel, TrapezoidRule) {
  const SnapshotModel model(101, 2);
  const Vector one = Vector::Ones(101);
  EXPECT_NEAR(model.l2_inner(one, one), 1.0, 1e-14);
  // Exact for linear integrands: int_0^1 x dx.
  EXPECT_NEAR(model.l2_inner(model.x(), one), 0.5, 1e-14);
}

TEST(SnapshotExperiment, SmallestSingularValueBendsNearTwo) {
  ExperimentConfig c = default_config(ExperimentKind::snapshot_interp);
  c.n = 201;
  const std::vector<double> s = snapshot_sigma_min_scan(c, 61);
  const std::vector<double> mu = uniform_grid(c.a, c.b, 61);
  std::size_t arg = 1;
  double peak = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double d2 = std::abs(s[i + 1] - 2 * s[i] + s[i - 1]);
    if (d2 > peak) {
      peak = d2;
      arg = i;
    }
  }
  EXPECT_GE(mu[arg], 1.9);
  EXPECT_LE(mu[arg], 2.25);
}

TEST(SnapshotExperiment, SamplesAreTangent) {
  ExperimentConfig c = default_config(ExperimentKind::snapshot_interp);
  c.n = 201;
  const SnapshotData d = gen_snapshot_experiment(c);
  ASSERT_EQ(d.samples.size(), 6u);
  for (const HermiteSample& s : d.samples) {
    EXPECT_LT(tangency_defect(s.point.matrix(), s.velocity.matrix()), 1e-9);
  }
  EXPECT_EQ(d.reference.size(), d.grid.size());
}

TEST(TransportAccuracy, InteriorMinimum) {
  const ErrorReport r = run_transport_accuracy(default_config(ExperimentKind::transport_accuracy));
  ASSERT_EQ(r.abscissa, "h");
  const std::vector<double>& e = r.series.at(0).values;
  ASSERT_EQ(e.size(), 6u);
  const auto best = std::min_element(e.begin(), e.end());
  EXPECT_LT(*best, e.front());
  EXPECT_LT(*best, e.back());
  EXPECT_LE(e[2], 1e-8);
  EXPECT_GT(e[0] / e[1], 10.0);
}

TEST(TangentVsManifold, ManifoldErrorNotLarger) {
  const ErrorReport r = run_tangent_vs_manifold(default_config(ExperimentKind::tangent_vs_manifold));
  const ErrorSeries* tangent = r.find("tangent");
  const ErrorSeries* manifold = r.find("manifold");
  ASSERT_NE(tangent, nullptr);
  ASSERT_NE(manifold, nullptr);
  EXPECT_EQ(comment_value(r, "skipped_points"), "0");
  for (std::size_t i = 0; i < tangent->values.size(); ++i) {
    EXPECT_LE(manifold->values[i], 1.05 * tangent->values[i] + 1e-10) << "grid point " << i;
  }
  EXPECT_LT(tangent->values.front(), 1e-9);
  EXPECT_LT(tangent->values.back(), 1e-9);
  EXPECT_LT(manifold->values.back(), 1e-9);
}

TEST(DistanceBound, ClosedForms) {
  EXPECT_EQ(eval_distance_bound({0.3, 0.3, 0.0, 1.25}), 0.0);
  EXPECT_DOUBLE_EQ(eval_distance_bound({0.3, 0.2, 0.1, 0.0}), 0.1 + 0.1 * 0.3);
  EXPECT_LT(eval_distance_bound({0.3, 0.3, 0.1, 1.25}), eval_distance_bound({0.3, 0.3, 0.1, 0.0}));
  EXPECT_THROW(eval_distance_bound({1.0, 0.3, 0.1, 0.0}), PreconditionError);
  EXPECT_THROW(eval_distance_bound({0.3, 0.3, 2.0, 0.0}), PreconditionError);
}

TEST(DistanceBound, ObservedDistancesWithinBounds) {
  const std::vector<BoundCase> cases = bound_cases(default_config(ExperimentKind::bound_check));
  ASSERT_EQ(cases.size(), 12u);
  for (const BoundCase& c : cases) {
    EXPECT_LE(c.observed, c.bound_flat + 2e-3);
    if (c.inputs.delta == c.inputs.delta_tilde) {
      EXPECT_GE(c.observed, c.bound_curved - 2e-3);
    }
  }
  EXPECT_TRUE(has_comment(run_bound_check(default_config(ExperimentKind::bound_check)),
                          "bound_check,pass"));
}

}  // namespace
}  // namespace sth

// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sth/calculus.hpp"
#include "sth/interpolate.hpp"
#include "sth/linalg.hpp"
#include "sth/report.hpp"
#include "sth/stiefel.hpp"

namespace sth {

enum class Method { hermite, geodesic, rbf };

std::string_view to_string(Method method);

/// Parses "hermite", "geodesic" or "rbf"; throws PreconditionError otherwise.
Method parse_method(std::string_view name);

enum class ExperimentKind {
  transport_accuracy,
  qr_interp,
  svd_interp,
  snapshot_interp,
  tangent_vs_manifold,
  bound_check,
};

struct ExperimentConfig {
  Eigen::Index n = 100;
  Eigen::Index r = 6;
  Eigen::Index m = 50;
  double a = -1.1;
  double b = 1.1;
  int num_nodes = 6;
  std::uint64_t seed = 1;
  double h = kTransportStep;
  double tau = kLogTolerance;
  Centering centering = Centering::q_centered;
  std::vector<Method> methods = {Method::hermite, Method::geodesic, Method::rbf};
  double rbf_shape = 1.0;
  int grid_points = 100;

  bool uses(Method method) const;
};

/// Desk-scale defaults per experiment.
ExperimentConfig default_config(ExperimentKind kind);

/// Throws PreconditionError on an invalid configuration.
void validate(const ExperimentConfig& config);

// Seeded generator: std::mt19937_64 with uniform doubles built from the top
// 53 bits, so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi);
  Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Affinely mapped Chebyshev roots cos((2j + 1) pi / 2k), ascending.
std::vector<double> chebyshev_nodes(double a, double b, int k);

/// `count` equidistant points from a to b inclusive.
std::vector<double> uniform_grid(double a, double b, int count);

/// Singular value decompositions along an ascending parameter list with the
/// leading `rank` columns of u and v sign-aligned to the previous parameter.
/// Extra parameters are inserted where consecutive bases differ too much to
/// make the alignment unambiguous. The first decomposition keeps its signs.
std::vector<FullSVD> tracked_svd(const std::function<Matrix(double)>& y_of,
                                 const std::vector<double>& ts, Eigen::Index rank);

// --- cubic QR-factor data ---------------------------------------------------

struct QRExperimentData {
  std::array<Matrix, 4> y;  // Y(t) = Y0 + t Y1 + t^2 Y2 + t^3 Y3
  std::vector<double> nodes;
  std::vector<HermiteSample> samples;
  std::uint64_t seed_used = 0;

  Matrix y_at(double t) const;
  Matrix y_dot_at(double t) const;
  StiefelPoint q_at(double t) const;
};

/// Samples Q(t_i) and Q'(t_i) at Chebyshev nodes. Rank-deficient draws are
/// replaced by a draw with the next seed (seed_used records the final one).
QRExperimentData gen_qr_experiment(const ExperimentConfig& config);

ErrorReport run_qr_interp(const ExperimentConfig& config);

// --- fixed-rank product W(t) = Y(t) Z(t) ------------------------------------

struct LowRankSVDSample {
  double t;
  StiefelPoint u;
  TangentVector u_dot;
  Vector sigma;
  Vector sigma_dot;
  StiefelPoint v;
  TangentVector v_dot;
};

struct LowRankSVDData {
  std::array<Matrix, 4> y;  // n x r, cubic in t
  std::array<Matrix, 3> z;  // r x m, quadratic in t
  std::vector<double> nodes;
  std::vector<LowRankSVDSample> samples;
  std::vector<double> grid;              // evaluation grid on [t_0, t_k]
  std::vector<StiefelPoint> reference_u;  // U_r(t) on the grid, signs tracked with the samples
  std::uint64_t seed_used = 0;

  Matrix w_at(double t) const;
  Matrix w_dot_at(double t) const;
};

LowRankSVDData gen_lowrank_svd_experiment(const ExperimentConfig& config);

ErrorReport run_svd_interp(const ExperimentConfig& config);

// --- snapshot function x^t sin(pi/2 mu x) ------------------------------------

// Normalized snapshots F(x, t_j, mu) on an equidistant x-grid of [0, 1] at
// r snapshot times t_j evenly spaced in [1, 4]; L2 by the trapezoidal rule.
class SnapshotModel {
 public:
  SnapshotModel(Eigen::Index n, Eigen::Index r);

  const Vector& x() const noexcept { return x_; }
  const std::vector<double>& times() const noexcept { return times_; }

  double l2_inner(const Vector& f, const Vector& g) const;

  /// n x r snapshot matrix Y(mu) and its mu-derivative.
  Matrix y(double mu) const;
  Matrix y_dot(double mu) const;

 private:
  Vector x_;
  Vector weights_;
  std::vector<double> times_;
};

struct SnapshotData {
  std::vector<double> nodes;
  std::vector<HermiteSample> samples;  // U(mu_i), U'(mu_i)
  std::vector<double> grid;
  std::vector<StiefelPoint> reference;  // U(mu) on the grid, signs tracked
};

SnapshotData gen_snapshot_experiment(const ExperimentConfig& config);

ErrorReport run_snapshot_experiment(const ExperimentConfig& config);

/// Smallest singular value of Y(mu) on `count` equidistant points of [a, b].
std::vector<double> snapshot_sigma_min_scan(const ExperimentConfig& config, int count);

// --- velocity transport accuracy ----------------------------------------------

/// Step sizes 1e-2, ..., 1e-7.
std::vector<double> transport_steps();

/// validate_transport on snapshot data p = U(0.9), q = U(1.4),
/// v_p = Log_p(U(1.9)) for every step size.
ErrorReport run_transport_accuracy(const ExperimentConfig& config);

// --- curvature: tangent-space versus manifold errors ------------------------

/// U-factor Hermite interpolation of the fixed-rank product data. Series
/// "tangent" holds ||gamma(t) - Log_c(U(t))||_c at the arc center c, series
/// "manifold" holds dist(Exp_c(gamma(t)), U(t)), series "hermite" the relative
/// Frobenius error of the U-factor.
ErrorReport run_tangent_vs_manifold(const ExperimentConfig& config);

struct BoundInputs {
  double delta;
  double delta_tilde;
  double s0;
  double curvature;
};

/// |delta - delta_tilde| + s0 delta (1 - K / 6 delta^2).
double eval_distance_bound(const BoundInputs& b);

struct BoundCase {
  BoundInputs inputs;
  double observed;  // dist(Exp_q(Delta), Exp_q(Delta~))
  double bound_flat;
  double bound_curved;  // K = 5/4
};

/// Constructed tangent pairs with prescribed norms and angle on St(n, r).
std::vector<BoundCase> bound_cases(const ExperimentConfig& config);

ErrorReport run_bound_check(const ExperimentConfig& config);

}  // namespace sth

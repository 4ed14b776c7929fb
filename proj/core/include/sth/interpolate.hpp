// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "sth/calculus.hpp"
#include "sth/linalg.hpp"
#include "sth/stiefel.hpp"

namespace sth {

struct HermiteCoeffs {
  double a0;
  double a1;
  double b0;
  double b1;
};

/// Cubic Hermite cardinal functions on [t0, t1]. Evaluated in the normalized
/// variable s = (t - t0) / (t1 - t0), so the values at s = 0 and s = 1 are
/// exact. Throws DomainError unless t0 < t1.
HermiteCoeffs hermite_coeffs(double t, double t0, double t1);

/// Derivatives d/dt of the cardinal functions.
HermiteCoeffs hermite_coeffs_dt(double t, double t0, double t1);

/// a0 p + a1 q + b0 v0 + b1 v1 for arbitrary matrices (vectors are n x 1).
Matrix euclid_hermite(const Matrix& p, const Matrix& q, const Matrix& v0, const Matrix& v1,
                      double t, double t0, double t1);

enum class Centering { q_centered, p_centered };

struct HermiteSample {
  double t;
  StiefelPoint point;
  TangentVector velocity;
};

struct PointSample {
  double t;
  StiefelPoint point;
};

// One quasi-cubic arc. All tangent data lives at `center`:
//   q-centered: center = q, offset = Log_q(p), gamma = a0 offset + b0 v_hat_start + b1 v_hat_end
//   p-centered: center = p, offset = Log_p(q), gamma = a1 offset + b0 v_hat_start + b1 v_hat_end
struct HermiteArc {
  double t0;
  double t1;
  Centering centering;
  StiefelPoint center;
  TangentVector offset;
  TangentVector v_hat_start;
  TangentVector v_hat_end;
};

/// Fits one arc: one logarithm for the offset and one velocity transport for
/// the far-end velocity (3 Log and 2 Exp evaluations in total). Throws
/// NoConvergence when a logarithm fails; the samples are then too far apart.
HermiteArc fit_arc(const HermiteSample& s0, const HermiteSample& s1,
                   Centering centering = Centering::q_centered, double h = kTransportStep,
                   TransportCurve curve = TransportCurve::geodesic, double tau = kLogTolerance);

/// Tangent-space curve gamma(t) at arc.center.
TangentVector arc_tangent(const HermiteArc& arc, double t);

/// Exp_center(gamma(t)); exactly one Exp evaluation. Throws DomainError for t
/// outside [t0, t1].
StiefelPoint eval_arc(const HermiteArc& arc, double t);

// Piecewise C1 curve built from consecutive arcs.
class CompositeCurve {
 public:
  CompositeCurve(std::vector<HermiteArc> arcs);

  const std::vector<HermiteArc>& arcs() const noexcept { return arcs_; }
  const std::vector<double>& knots() const noexcept { return knots_; }

  /// Arc used at t: t in [t_i, t_{i+1}) uses arc i, t = t_k uses the last.
  std::size_t arc_index(double t) const;

  StiefelPoint evaluate(double t) const;

 private:
  std::vector<HermiteArc> arcs_;
  std::vector<double> knots_;
};

/// Fits k arcs to k + 1 samples with strictly increasing parameters. A fit
/// failure is rethrown with the offending subinterval in the message.
CompositeCurve fit_composite(const std::vector<HermiteSample>& samples,
                             Centering centering = Centering::q_centered,
                             double h = kTransportStep,
                             TransportCurve curve = TransportCurve::geodesic,
                             double tau = kLogTolerance);

// Piecewise geodesic interpolation of point samples.
class GeodesicCurve {
 public:
  GeodesicCurve(std::vector<PointSample> samples, double tau = kLogTolerance);

  const std::vector<double>& knots() const noexcept { return knots_; }
  StiefelPoint evaluate(double t) const;

 private:
  std::vector<double> knots_;
  std::vector<TangentVector> steps_;  // Log_{p_i}(p_{i+1})
};

GeodesicCurve geodesic_interp(const std::vector<PointSample>& samples,
                              double tau = kLogTolerance);

enum class RbfFailurePolicy {
  strict,   // any failing logarithm throws
  partial,  // fit on the samples whose logarithm converged
};

// Interpolation in the single tangent space at sample floor(k / 2) with the
// inverse multiquadric phi(d) = 1 / sqrt(1 + (shape * d)^2) on parameters
// rescaled to [-1, 1]; the result is mapped back by Exp.
class TangentRbfCurve {
 public:
  TangentRbfCurve(const std::vector<PointSample>& samples, double shape = 1.0,
                  RbfFailurePolicy policy = RbfFailurePolicy::strict,
                  double tau = kLogTolerance);

  std::size_t center_index() const noexcept { return center_index_; }
  const std::vector<std::size_t>& failed_samples() const noexcept { return failed_; }

  TangentVector tangent(double t) const;
  StiefelPoint evaluate(double t) const;

 private:
  double scaled(double t) const;

  StiefelPoint center_;
  std::size_t center_index_ = 0;
  double shape_;
  double t_lo_ = 0.0;
  double t_hi_ = 0.0;
  std::vector<double> nodes_;  // rescaled parameters of the fitted samples
  Matrix weights_;             // one row per fitted sample, vec(n x r) per row
  std::vector<std::size_t> failed_;
};

TangentRbfCurve tangent_rbf_interp(const std::vector<PointSample>& samples, double shape = 1.0,
                                   RbfFailurePolicy policy = RbfFailurePolicy::strict,
                                   double tau = kLogTolerance);

}  // namespace sth

// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#include "sth/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "sth/errors.hpp"

namespace sth {

namespace {

// Relative slack when deciding whether t lies inside [lo, hi].
constexpr double kRangeSlack = 1e-12;

double clamp_to_range(double t, double lo, double hi, const char* op) {
  const double slack = kRangeSlack * (hi - lo);
  if (!(t >= lo - slack && t <= hi + slack)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << op << ": t = " << t << " outside [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
  return std::clamp(t, lo, hi);
}

std::string interval_text(double a, double b) {
  std::ostringstream msg;
  msg.precision(6);
  msg << "[" << a << ", " << b << "]";
  return msg.str();
}

void require_increasing(const std::vector<double>& t, const char* op) {
  if (t.size() < 2) throw PreconditionError(std::string(op) + ": need at least two samples");
  const double span = t.back() - t.front();
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!(t[i + 1] > t[i])) {
      throw PreconditionError(std::string(op) + ": sample parameters must be strictly increasing");
    }
    if (t[i + 1] - t[i] < 1e-12 * span) {
      throw PreconditionError(std::string(op) + ": degenerate subinterval " + std::to_string(i) +
                              " " + interval_text(t[i], t[i + 1]));
    }
  }
}

// Index i with t in [knots[i], knots[i+1]); the last knot maps to the last piece.
std::size_t piece_index(const std::vector<double>& knots, double t) {
  const auto it = std::upper_bound(knots.begin(), knots.end(), t);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots.begin() - 1, 0));
  return std::min(i, knots.size() - 2);
}

}  // namespace

HermiteCoeffs hermite_coeffs(double t, double t0, double t1) {
  if (!(t0 < t1)) throw DomainError("hermite_coeffs: need t0 < t1");
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {1.0 - 3.0 * s2 + 2.0 * s3, 3.0 * s2 - 2.0 * s3, h * (s - 2.0 * s2 + s3), h * (s3 - s2)};
}

HermiteCoeffs hermite_coeffs_dt(double t, double t0, double t1) {
  if (!(t0 < t1)) throw DomainError("hermite_coeffs_dt: need t0 < t1");
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  return {6.0 * (s2 - s) / h, 6.0 * (s - s2) / h, 1.0 - 4.0 * s + 3.0 * s2, 3.0 * s2 - 2.0 * s};
}

Matrix euclid_hermite(const Matrix& p, const Matrix& q, const Matrix& v0, const Matrix& v1,
                      double t, double t0, double t1) {
  if (q.rows() != p.rows() || v0.rows() != p.rows() || v1.rows() != p.rows() ||
      q.cols() != p.cols() || v0.cols() != p.cols() || v1.cols() != p.cols()) {
    throw DimensionError("euclid_hermite: inconsistent shapes");
  }
  const HermiteCoeffs c = hermite_coeffs(t, t0, t1);
  return c.a0 * p + c.a1 * q + c.b0 * v0 + c.b1 * v1;
}

// ---------------------------------------------------------------------------

HermiteArc fit_arc(const HermiteSample& s0, const HermiteSample& s1, Centering centering, double h,
                   TransportCurve curve, double tau) {
  if (!(s0.t < s1.t)) throw DomainError("fit_arc: need t0 < t1");
  if (!s0.velocity.base().same_as(s0.point) || !s1.velocity.base().same_as(s1.point)) {
    throw PreconditionError("fit_arc: sample velocity is not attached to the sample point");
  }
  try {
    if (centering == Centering::q_centered) {
      TangentVector offset = stiefel_log(s1.point, s0.point, tau);
      TangentVector v_hat = transport_velocity(s1.point, s0.velocity, h, curve, tau);
      return HermiteArc{s0.t, s1.t, centering, s1.point, std::move(offset), std::move(v_hat),
                        s1.velocity};
    }
    TangentVector offset = stiefel_log(s0.point, s1.point, tau);
    TangentVector v_hat = transport_velocity(s0.point, s1.velocity, h, curve, tau);
    return HermiteArc{s0.t, s1.t, centering, s0.point, std::move(offset), s0.velocity,
                      std::move(v_hat)};
  } catch (const NoConvergence& e) {
    throw NoConvergence("fit_arc on " + interval_text(s0.t, s1.t) + ": " + e.what() +
                            "; refine the sampling so that consecutive samples are closer",
                        e.iterations(), e.residual());
  }
}

TangentVector arc_tangent(const HermiteArc& arc, double t) {
  const HermiteCoeffs c = hermite_coeffs(t, arc.t0, arc.t1);
  const double w = arc.centering == Centering::q_centered ? c.a0 : c.a1;
  return w * arc.offset + c.b0 * arc.v_hat_start + c.b1 * arc.v_hat_end;
}

StiefelPoint eval_arc(const HermiteArc& arc, double t) {
  t = clamp_to_range(t, arc.t0, arc.t1, "eval_arc");
  return stiefel_exp(arc_tangent(arc, t));
}

// ---------------------------------------------------------------------------

CompositeCurve::CompositeCurve(std::vector<HermiteArc> arcs) : arcs_(std::move(arcs)) {
  if (arcs_.empty()) throw PreconditionError("CompositeCurve: no arcs");
  knots_.reserve(arcs_.size() + 1);
  knots_.push_back(arcs_.front().t0);
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    if (i > 0 && arcs_[i].t0 != arcs_[i - 1].t1) {
      throw PreconditionError("CompositeCurve: arcs " + std::to_string(i - 1) + " and " +
                              std::to_string(i) + " do not share a knot");
    }
    knots_.push_back(arcs_[i].t1);
  }
}

std::size_t CompositeCurve::arc_index(double t) const {
  clamp_to_range(t, knots_.front(), knots_.back(), "CompositeCurve");
  return piece_index(knots_, t);
}

StiefelPoint CompositeCurve::evaluate(double t) const {
  return eval_arc(arcs_[arc_index(t)], t);
}

CompositeCurve fit_composite(const std::vector<HermiteSample>& samples, Centering centering,
                             double h, TransportCurve curve, double tau) {
  std::vector<double> t(samples.size());
  std::transform(samples.begin(), samples.end(), t.begin(),
                 [](const HermiteSample& s) { return s.t; });
  require_increasing(t, "fit_composite");

  std::vector<HermiteArc> arcs;
  arcs.reserve(samples.size() - 1);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    try {
      arcs.push_back(fit_arc(samples[i], samples[i + 1], centering, h, curve, tau));
    } catch (const NoConvergence& e) {
      throw NoConvergence("fit_composite: subinterval " + std::to_string(i) + ": " + e.what(),
                          e.iterations(), e.residual());
    }
  }
  return CompositeCurve(std::move(arcs));
}

// ---------------------------------------------------------------------------

GeodesicCurve::GeodesicCurve(std::vector<PointSample> samples, double tau) {
  knots_.resize(samples.size());
  std::transform(samples.begin(), samples.end(), knots_.begin(),
                 [](const PointSample& s) { return s.t; });
  require_increasing(knots_, "geodesic_interp");
  steps_.reserve(samples.size() - 1);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    try {
      steps_.push_back(stiefel_log(samples[i].point, samples[i + 1].point, tau));
    } catch (const NoConvergence& e) {
      throw NoConvergence("geodesic_interp: subinterval " + std::to_string(i) + " " +
                              interval_text(knots_[i], knots_[i + 1]) + ": " + e.what(),
                          e.iterations(), e.residual());
    }
  }
}

StiefelPoint GeodesicCurve::evaluate(double t) const {
  t = clamp_to_range(t, knots_.front(), knots_.back(), "GeodesicCurve");
  const std::size_t i = piece_index(knots_, t);
  const double s = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return stiefel_exp(steps_[i], s);
}

GeodesicCurve geodesic_interp(const std::vector<PointSample>& samples, double tau) {
  return GeodesicCurve(samples, tau);
}

// ---------------------------------------------------------------------------

TangentRbfCurve::TangentRbfCurve(const std::vector<PointSample>& samples, double shape,
                                 RbfFailurePolicy policy, double tau)
    : center_(samples.empty() ? throw PreconditionError("tangent_rbf_interp: no samples")
                              : samples[samples.size() / 2].point),
      center_index_(samples.size() / 2),
      shape_(shape) {
  if (!(shape > 0.0)) throw PreconditionError("tangent_rbf_interp: shape must be positive");
  const auto [lo, hi] = std::minmax_element(
      samples.begin(), samples.end(),
      [](const PointSample& a, const PointSample& b) { return a.t < b.t; });
  t_lo_ = lo->t;
  t_hi_ = hi->t;
  if (samples.size() > 1 && !(t_hi_ > t_lo_)) {
    throw PreconditionError("tangent_rbf_interp: sample parameters must be distinct");
  }

  const Eigen::Index nr = center_.n() * center_.r();
  std::vector<Matrix> images;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      images.push_back(stiefel_log(center_, samples[i].point, tau).matrix());
      nodes_.push_back(scaled(samples[i].t));
    } catch (const NoConvergence&) {
      failed_.push_back(i);
    }
  }
  if (!failed_.empty() && policy == RbfFailurePolicy::strict) {
    std::string list;
    for (std::size_t i : failed_) list += (list.empty() ? "" : ", ") + std::to_string(i);
    throw NoConvergence("tangent_rbf_interp: logarithm to center sample " +
                            std::to_string(center_index_) + " failed for samples " + list,
                        kLogMaxIterations, 0.0);
  }

  const auto k = static_cast<Eigen::Index>(nodes_.size());
  Matrix phi(k, k);
  Matrix data(k, nr);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double d = shape_ * (nodes_[i] - nodes_[j]);
      phi(i, j) = 1.0 / std::sqrt(1.0 + d * d);
    }
    data.row(i) = Eigen::Map<const Vector>(images[i].data(), nr).transpose();
  }
  // The inverse multiquadric kernel matrix is positive definite.
  const Eigen::LLT<Matrix> llt(phi);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("tangent_rbf_interp: kernel matrix is not positive definite");
  }
  weights_ = llt.solve(data);
}

double TangentRbfCurve::scaled(double t) const {
  if (!(t_hi_ > t_lo_)) return 0.0;
  return 2.0 * (t - t_lo_) / (t_hi_ - t_lo_) - 1.0;
}

TangentVector TangentRbfCurve::tangent(double t) const {
  const double s = scaled(t);
  Vector phi(static_cast<Eigen::Index>(nodes_.size()));
  for (Eigen::Index j = 0; j < phi.size(); ++j) {
    const double d = shape_ * (s - nodes_[j]);
    phi(j) = 1.0 / std::sqrt(1.0 + d * d);
  }
  const Vector flat = weights_.transpose() * phi;
  Matrix delta = Eigen::Map<const Matrix>(flat.data(), center_.n(), center_.r());
  return project_tangent(center_, delta);
}

StiefelPoint TangentRbfCurve::evaluate(double t) const { return stiefel_exp(tangent(t)); }

TangentRbfCurve tangent_rbf_interp(const std::vector<PointSample>& samples, double shape,
                                   RbfFailurePolicy policy, double tau) {
  return TangentRbfCurve(samples, shape, policy, tau);
}

}  // namespace sth

// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>
#include <utility>

#include "sth/linalg.hpp"
#include "sth/stiefel.hpp"

namespace sth {

// Default central finite-difference step for velocity transport.
inline constexpr double kTransportStep = 1e-4;

// Relative singular-value gap below which SVD differentiation refuses to run.
inline constexpr double kSingularGapTolerance = 1e-8;

struct QRDerivative {
  Matrix q_dot;  // n x r, Q^T q_dot skew
  Matrix r_dot;  // r x r upper triangular
};

struct SVDDerivative {
  Matrix u_dot;
  Vector sigma_dot;
  Matrix v_dot;
};

struct BlockExpResult {
  Matrix exp_m;       // expm(m)
  Matrix dexp_block;  // d/dt expm(m + t m_dot) at t = 0
};

/// Derivative of the economy QR factorization along t + s t_dot.
/// Throws DomainError if the triangular factor is singular.
QRDerivative diff_qr(const Matrix& t, const Matrix& t_dot, const EconQR& qr);

/// Derivative of a full SVD y = U diag(sigma) V^T with mutually distinct,
/// positive singular values.
SVDDerivative diff_svd(const Matrix& y, const Matrix& y_dot, const FullSVD& svd);

/// Derivative of the rank-r truncated SVD. `v_full` is the full m x m right
/// factor of y; the leading r singular triplets are recovered from y * v_full.
SVDDerivative diff_svd_truncated(const Matrix& y, const Matrix& y_dot, Eigen::Index rank,
                                 const Matrix& v_full);

/// Flip column signs of (u_t, v_t) so that diag(u_t^T u_ref) >= 0. A zero
/// diagonal entry is a tie and throws DomainError.
std::pair<Matrix, Matrix> svd_sign_normalize(const Matrix& u_t, const Matrix& v_t,
                                             const Matrix& u_ref);

/// Fréchet derivative of expm by the block-triangular identity
/// expm([[M, Md], [0, M]]) = [[expm(M), L(M, Md)], [0, expm(M)]].
BlockExpResult mathias_dexp(const Matrix& m, const Matrix& m_dot);

/// d/dt Exp_U(xi0 + t v) at t = 0. The normal component of xi0 must have full
/// column rank (xi0 = 0 is allowed and returns v).
Matrix dexp_stiefel(const TangentVector& xi0, const TangentVector& v);

enum class TransportCurve { geodesic, cayley, polar_retraction, qr_retraction };

std::string_view to_string(TransportCurve curve);

/// Curve through p with initial velocity v_p, evaluated at s.
StiefelPoint transport_curve_point(const TangentVector& v_p, double s, TransportCurve curve);

/// Central difference of s -> Log_q(curve_p(s v_p)) at s = 0: the velocity v_p
/// at p expressed in normal coordinates centered at q.
TangentVector transport_velocity(const StiefelPoint& q, const TangentVector& v_p,
                                 double h = kTransportStep,
                                 TransportCurve curve = TransportCurve::geodesic,
                                 double tau = kLogTolerance);

/// Relative reconstruction error ||v_rec - v_p||_p / ||v_p||_p where
/// v_rec = dexp_stiefel(Log_q(p), transport_velocity(q, v_p, h)).
double validate_transport(const StiefelPoint& q, const TangentVector& v_p,
                          double h = kTransportStep,
                          TransportCurve curve = TransportCurve::geodesic,
                          double tau = kLogTolerance);

}  // namespace sth

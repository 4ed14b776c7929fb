// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#include "sth/calculus.hpp"

#include <cmath>
#include <string>

#include "sth/errors.hpp"

namespace sth {

namespace {

// x * r^{-1} for upper triangular r.
Matrix solve_right_upper(const Matrix& x, const Matrix& r) {
  return r.triangularView<Eigen::Upper>().transpose().solve(x.transpose()).transpose();
}

void check_singular_values(const Vector& sigma, Eigen::Index count, bool check_tail_gap,
                           const char* op) {
  const double sigma_max = sigma.head(count).maxCoeff();
  if (!(sigma(count - 1) > kRankTolerance * sigma_max)) {
    throw DomainError(std::string(op) + ": zero singular value");
  }
  const Eigen::Index last = check_tail_gap ? std::min<Eigen::Index>(count, sigma.size() - 1) : count - 1;
  for (Eigen::Index i = 0; i < last; ++i) {
    if (std::abs(sigma(i) - sigma(i + 1)) < kSingularGapTolerance * sigma_max) {
      throw DomainError(std::string(op) + ": singular values " + std::to_string(i) + " and " +
                        std::to_string(i + 1) + " are not separated");
    }
  }
}

}  // namespace

QRDerivative diff_qr(const Matrix& t, const Matrix& t_dot, const EconQR& qr) {
  const Eigen::Index n = t.rows();
  const Eigen::Index r = t.cols();
  if (t_dot.rows() != n || t_dot.cols() != r || qr.q.rows() != n || qr.q.cols() != r ||
      qr.r.rows() != r || qr.r.cols() != r) {
    throw DimensionError("diff_qr: inconsistent shapes");
  }
  const double threshold = kRankTolerance * qr.r.norm();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (!(std::abs(qr.r(j, j)) > threshold)) {
      throw DomainError("diff_qr: triangular factor is singular at column " + std::to_string(j));
    }
  }

  const Matrix qt_tdot = qr.q.transpose() * t_dot;
  const Matrix l = solve_right_upper(qt_tdot, qr.r).triangularView<Eigen::StrictlyLower>();
  const Matrix x = l - l.transpose();

  QRDerivative out;
  out.r_dot = (qt_tdot - x * qr.r).triangularView<Eigen::Upper>();
  out.q_dot = solve_right_upper(t_dot - qr.q * qt_tdot, qr.r) + qr.q * x;
  return out;
}

SVDDerivative diff_svd(const Matrix& y, const Matrix& y_dot, const FullSVD& svd) {
  const Eigen::Index n = y.rows();
  const Eigen::Index m = y.cols();
  if (y_dot.rows() != n || y_dot.cols() != m || svd.u.rows() != n || svd.u.cols() != m ||
      svd.sigma.size() != m || svd.v.rows() != m || svd.v.cols() != m) {
    throw DimensionError("diff_svd: inconsistent shapes");
  }
  check_singular_values(svd.sigma, m, false, "diff_svd");

  const Vector& s = svd.sigma;
  const Matrix p = svd.u.transpose() * y_dot * svd.v;

  SVDDerivative out;
  out.sigma_dot = p.diagonal();
  Matrix gamma = Matrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == j) continue;
      gamma(i, j) = (s(i) * p(i, j) + s(j) * p(j, i)) / ((s(j) + s(i)) * (s(j) - s(i)));
    }
  }
  out.v_dot = svd.v * gamma;
  const Matrix inner = s.asDiagonal() * gamma - Matrix(out.sigma_dot.asDiagonal());
  out.u_dot = (y_dot * svd.v + svd.u * inner) * s.cwiseInverse().asDiagonal();
  return out;
}

SVDDerivative diff_svd_truncated(const Matrix& y, const Matrix& y_dot, Eigen::Index rank,
                                 const Matrix& v_full) {
  const Eigen::Index n = y.rows();
  const Eigen::Index m = y.cols();
  if (y_dot.rows() != n || y_dot.cols() != m || v_full.rows() != m || v_full.cols() != m) {
    throw DimensionError("diff_svd_truncated: inconsistent shapes");
  }
  if (rank < 1 || rank > m) throw DimensionError("diff_svd_truncated: rank out of range");

  // y v_i = sigma_i u_i for every column of the full right factor.
  const Matrix yv = y * v_full;
  const Vector s = yv.colwise().norm().transpose();
  check_singular_values(s, rank, true, "diff_svd_truncated");

  const Matrix v_r = v_full.leftCols(rank);
  const Matrix u_r = yv.leftCols(rank) * s.head(rank).cwiseInverse().asDiagonal();

  // a(i, j) = sigma_i u_i^T ydot v_j,  b(j, i) = sigma_j u_j^T ydot v_i.
  const Matrix ydot_v = y_dot * v_full;
  const Matrix a = yv.transpose() * ydot_v.leftCols(rank);
  const Matrix b = yv.leftCols(rank).transpose() * ydot_v;

  SVDDerivative out;
  out.sigma_dot.resize(rank);
  for (Eigen::Index j = 0; j < rank; ++j) out.sigma_dot(j) = a(j, j) / s(j);

  Matrix gamma = Matrix::Zero(m, rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == j) continue;
      gamma(i, j) = (a(i, j) + b(j, i)) / ((s(j) + s(i)) * (s(j) - s(i)));
    }
  }
  out.v_dot = v_full * gamma;
  const Matrix inner =
      s.head(rank).asDiagonal() * gamma.topRows(rank) - Matrix(out.sigma_dot.asDiagonal());
  out.u_dot = (ydot_v.leftCols(rank) + u_r * inner) * s.head(rank).cwiseInverse().asDiagonal();
  return out;
}

std::pair<Matrix, Matrix> svd_sign_normalize(const Matrix& u_t, const Matrix& v_t,
                                             const Matrix& u_ref) {
  if (u_t.cols() != v_t.cols() || u_t.cols() != u_ref.cols() || u_t.rows() != u_ref.rows()) {
    throw DimensionError("svd_sign_normalize: inconsistent shapes");
  }
  Matrix u = u_t;
  Matrix v = v_t;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const double d = u_t.col(j).dot(u_ref.col(j));
    if (d == 0.0) {
      throw DomainError("svd_sign_normalize: sign undefined for column " + std::to_string(j));
    }
    if (d < 0.0) {
      u.col(j) *= -1.0;
      v.col(j) *= -1.0;
    }
  }
  return {std::move(u), std::move(v)};
}

BlockExpResult mathias_dexp(const Matrix& m, const Matrix& m_dot) {
  if (m.rows() != m.cols() || m_dot.rows() != m.rows() || m_dot.cols() != m.cols()) {
    throw DimensionError("mathias_dexp: need square matrices of equal size");
  }
  const Eigen::Index k = m.rows();
  Matrix block = Matrix::Zero(2 * k, 2 * k);
  block.topLeftCorner(k, k) = m;
  block.topRightCorner(k, k) = m_dot;
  block.bottomRightCorner(k, k) = m;
  const Matrix e = expm(block);
  return BlockExpResult{e.topLeftCorner(k, k), e.topRightCorner(k, k)};
}

Matrix dexp_stiefel(const TangentVector& xi0, const TangentVector& v) {
  if (!xi0.base().same_as(v.base())) throw DomainError("dexp_stiefel: base point mismatch");
  if (xi0.matrix().norm() == 0.0) return v.matrix();

  const Matrix& u = xi0.base().matrix();
  const Eigen::Index r = u.cols();
  const HorizontalSplit split = split_tangent(xi0);
  if (split.rank_deficient) {
    throw DomainError("dexp_stiefel: normal component of the base vector is rank deficient");
  }

  // t -> (I - U U^T)(xi0 + t v) has QR factors (Q(t), R(t)); A(t) = U^T(xi0 + t v).
  const Matrix a_dot = u.transpose() * v.matrix();
  const Matrix t0 = xi0.matrix() - u * split.a;
  const Matrix t_dot = v.matrix() - u * a_dot;
  const QRDerivative qr_dot = diff_qr(t0, t_dot, EconQR{split.q, split.r_factor, false});

  Matrix m = Matrix::Zero(2 * r, 2 * r);
  m.topLeftCorner(r, r) = skew(split.a);
  m.topRightCorner(r, r) = -split.r_factor.transpose();
  m.bottomLeftCorner(r, r) = split.r_factor;

  Matrix m_dot = Matrix::Zero(2 * r, 2 * r);
  m_dot.topLeftCorner(r, r) = skew(a_dot);
  m_dot.topRightCorner(r, r) = -qr_dot.r_dot.transpose();
  m_dot.bottomLeftCorner(r, r) = qr_dot.r_dot;

  const BlockExpResult blocks = mathias_dexp(m, m_dot);
  return qr_dot.q_dot * blocks.exp_m.bottomLeftCorner(r, r) +
         u * blocks.dexp_block.topLeftCorner(r, r) +
         split.q * blocks.dexp_block.bottomLeftCorner(r, r);
}

std::string_view to_string(TransportCurve curve) {
  switch (curve) {
    case TransportCurve::geodesic:
      return "geodesic";
    case TransportCurve::cayley:
      return "cayley";
    case TransportCurve::polar_retraction:
      return "polar";
    case TransportCurve::qr_retraction:
      return "qr";
  }
  return "unknown";
}

StiefelPoint transport_curve_point(const TangentVector& v_p, double s, TransportCurve curve) {
  const Matrix& u = v_p.base().matrix();
  const Matrix& delta = v_p.matrix();
  const Eigen::Index r = u.cols();

  switch (curve) {
    case TransportCurve::geodesic:
      return stiefel_exp(v_p, s);

    case TransportCurve::cayley: {
      const HorizontalSplit split = split_tangent(v_p);
      Matrix m0 = Matrix::Zero(2 * r, 2 * r);
      m0.topLeftCorner(r, r) = skew(split.a);
      m0.topRightCorner(r, r) = -split.r_factor.transpose();
      m0.bottomLeftCorner(r, r) = split.r_factor;
      const Matrix id = Matrix::Identity(2 * r, 2 * r);
      // The two factors commute, so the solve order is immaterial.
      const Matrix cay = (id - 0.5 * s * m0).partialPivLu().solve(id + 0.5 * s * m0);
      return StiefelPoint(u * cay.topLeftCorner(r, r) + split.q * cay.bottomLeftCorner(r, r));
    }

    case TransportCurve::polar_retraction: {
      const Eigen::SelfAdjointEigenSolver<Matrix> evd(delta.transpose() * delta);
      const Vector scale =
          (1.0 + s * s * evd.eigenvalues().array().max(0.0)).rsqrt().matrix();
      const Matrix& phi = evd.eigenvectors();
      return StiefelPoint((u + s * delta) * phi * scale.asDiagonal() * phi.transpose());
    }

    case TransportCurve::qr_retraction:
      return StiefelPoint(qr_econ(u + s * delta).q);
  }
  throw PreconditionError("transport_curve_point: unknown curve");
}

TangentVector transport_velocity(const StiefelPoint& q, const TangentVector& v_p, double h,
                                 TransportCurve curve, double tau) {
  if (!(h > 0.0)) throw PreconditionError("transport_velocity: step h must be positive");

  auto log_at = [&](double s, const char* side) {
    try {
      return stiefel_log(q, transport_curve_point(v_p, s, curve), tau);
    } catch (const NoConvergence& e) {
      throw NoConvergence(std::string("transport_velocity: logarithm at the ") + side +
                              " offset failed: " + e.what(),
                          e.iterations(), e.residual());
    }
  };
  const TangentVector plus = log_at(h, "+h");
  const TangentVector minus = log_at(-h, "-h");
  return project_tangent(q, (plus.matrix() - minus.matrix()) / (2.0 * h));
}

double validate_transport(const StiefelPoint& q, const TangentVector& v_p, double h,
                          TransportCurve curve, double tau) {
  const TangentVector delta_p = stiefel_log(q, v_p.base(), tau);
  const TangentVector v_hat = transport_velocity(q, v_p, h, curve, tau);
  const Matrix v_rec = dexp_stiefel(delta_p, v_hat);
  const double denom = norm(v_p);
  if (!(denom > 0.0)) throw PreconditionError("validate_transport: zero velocity");
  return canonical_norm(v_p.base().matrix(), v_rec - v_p.matrix()) / denom;
}

}  // namespace sth

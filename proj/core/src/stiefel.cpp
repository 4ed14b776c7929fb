// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#include "sth/stiefel.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sth/errors.hpp"

namespace sth {

namespace {

thread_local CallCounters tls_counters;

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

double tangency_bound(const Matrix& delta) { return 1e-8 * std::max(1.0, delta.norm()); }

}  // namespace

CallCounters& call_counters() noexcept { return tls_counters; }

void reset_call_counters() noexcept { tls_counters = CallCounters{}; }

// ---------------------------------------------------------------------------

StiefelPoint::StiefelPoint(Matrix u) : u_(std::move(u)) {
  if (u_.rows() < u_.cols() || u_.cols() == 0) {
    throw DimensionError("StiefelPoint: need n >= r >= 1, got " + std::to_string(u_.rows()) + "x" +
                         std::to_string(u_.cols()));
  }
  if (!u_.allFinite()) throw NumericalError("StiefelPoint: non-finite entries");
  const double defect =
      (u_.transpose() * u_ - Matrix::Identity(u_.cols(), u_.cols())).norm();
  if (!(defect <= kStiefelTolerance)) {
    throw PreconditionError("StiefelPoint: columns not orthonormal (defect " +
                            std::to_string(defect) + ")");
  }
}

bool StiefelPoint::same_as(const StiefelPoint& other) const {
  return u_.rows() == other.u_.rows() && u_.cols() == other.u_.cols() &&
         (u_ - other.u_).norm() <= 1e-12;
}

TangentVector::TangentVector(StiefelPoint base, Matrix delta)
    : base_(std::move(base)), delta_(std::move(delta)) {
  require_same_shape(base_.matrix(), delta_, "TangentVector");
  if (!delta_.allFinite()) throw NumericalError("TangentVector: non-finite entries");
  const double defect = tangency_defect(base_.matrix(), delta_);
  if (!(defect <= tangency_bound(delta_))) {
    throw DomainError("TangentVector: U^T D is not skew-symmetric (defect " +
                      std::to_string(defect) + ")");
  }
}

TangentVector::TangentVector(StiefelPoint base, Matrix delta, Unchecked)
    : base_(std::move(base)), delta_(std::move(delta)) {}

TangentVector TangentVector::zero(const StiefelPoint& base) {
  return TangentVector(base, Matrix::Zero(base.n(), base.r()), Unchecked{});
}

TangentVector TangentVector::operator*(double s) const {
  return TangentVector(base_, s * delta_, Unchecked{});
}

TangentVector TangentVector::operator+(const TangentVector& other) const {
  if (!base_.same_as(other.base_)) throw DomainError("TangentVector: base point mismatch in +");
  return TangentVector(base_, delta_ + other.delta_, Unchecked{});
}

TangentVector TangentVector::operator-(const TangentVector& other) const {
  if (!base_.same_as(other.base_)) throw DomainError("TangentVector: base point mismatch in -");
  return TangentVector(base_, delta_ - other.delta_, Unchecked{});
}

TangentVector operator*(double s, const TangentVector& v) { return v * s; }

// ---------------------------------------------------------------------------

double tangency_defect(const Matrix& u, const Matrix& delta) {
  const Matrix utd = u.transpose() * delta;
  return (utd + utd.transpose()).norm();
}

TangentVector project_tangent(const StiefelPoint& base, const Matrix& x) {
  require_same_shape(base.matrix(), x, "project_tangent");
  const Matrix& u = base.matrix();
  Matrix delta = x - u * sym(u.transpose() * x);
  return TangentVector(base, std::move(delta));
}

double canonical_norm(const Matrix& u, const Matrix& delta) {
  require_same_shape(u, delta, "canonical_norm");
  const double sq = delta.squaredNorm() - 0.5 * (u.transpose() * delta).squaredNorm();
  return std::sqrt(std::max(0.0, sq));
}

double metric(const TangentVector& xi, const TangentVector& eta) {
  if (!xi.base().same_as(eta.base())) throw DomainError("metric: base point mismatch");
  const Matrix& u = xi.base().matrix();
  const Matrix uxi = u.transpose() * xi.matrix();
  const Matrix ueta = u.transpose() * eta.matrix();
  return (xi.matrix().array() * eta.matrix().array()).sum() -
         0.5 * (uxi.array() * ueta.array()).sum();
}

double norm(const TangentVector& xi) { return canonical_norm(xi.base().matrix(), xi.matrix()); }

HorizontalSplit normal_qr(const Matrix& u, const Matrix& x) {
  require_same_shape(u, x, "normal_qr");
  const Eigen::Index n = x.rows();
  const Eigen::Index r = x.cols();
  if (n < u.cols() + r) {
    throw DimensionError("normal_qr: need n >= 2r for a normal frame");
  }

  HorizontalSplit out;
  out.q = Matrix::Zero(n, r);
  out.r_factor = Matrix::Zero(r, r);
  const double threshold = kRankTolerance * x.norm();
  std::vector<Eigen::Index> deficient;

  // Classical Gram-Schmidt with reorthogonalization; columns of q that are
  // still zero (deficient) drop out of the projections automatically.
  for (Eigen::Index j = 0; j < r; ++j) {
    Vector w = x.col(j);
    for (int pass = 0; pass < 3; ++pass) {
      const double before = w.norm();
      w -= u * (u.transpose() * w);
      if (j > 0) {
        const Vector c = out.q.leftCols(j).transpose() * w;
        w -= out.q.leftCols(j) * c;
        out.r_factor.col(j).head(j) += c;
      }
      if (pass >= 1 && w.norm() > 0.7 * before) break;
    }
    const double rho = w.norm();
    if (rho <= threshold) {
      deficient.push_back(j);
      continue;
    }
    out.q.col(j) = w / rho;
    out.r_factor(j, j) = rho;
  }

  if (!deficient.empty()) {
    out.rank_deficient = true;
    const Eigen::Index k = u.cols();
    Matrix basis(n, k + r - static_cast<Eigen::Index>(deficient.size()));
    basis.leftCols(k) = u;
    Eigen::Index col = k;
    std::size_t next_def = 0;
    for (Eigen::Index j = 0; j < r; ++j) {
      if (next_def < deficient.size() && deficient[next_def] == j) {
        ++next_def;
        continue;
      }
      basis.col(col++) = out.q.col(j);
    }
    const Matrix fill = orth_extend(basis, static_cast<Eigen::Index>(deficient.size()));
    for (std::size_t i = 0; i < deficient.size(); ++i) {
      out.q.col(deficient[i]) = fill.col(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

HorizontalSplit split_tangent(const TangentVector& xi) {
  const Matrix& u = xi.base().matrix();
  // normal_qr projects out u itself; passing the full delta makes the rank
  // threshold relative to ||delta||, so a vertical vector counts as rank deficient.
  HorizontalSplit out = normal_qr(u, xi.matrix());
  out.a = u.transpose() * xi.matrix();
  return out;
}

StiefelPoint stiefel_exp(const TangentVector& xi, double t) {
  ++tls_counters.exp_calls;
  const HorizontalSplit split = split_tangent(xi);
  const Eigen::Index r = xi.base().r();

  Matrix m = Matrix::Zero(2 * r, 2 * r);
  m.topLeftCorner(r, r) = t * skew(split.a);
  m.topRightCorner(r, r) = -t * split.r_factor.transpose();
  m.bottomLeftCorner(r, r) = t * split.r_factor;
  const Matrix e = expm(m);

  Matrix result = xi.base().matrix() * e.topLeftCorner(r, r) + split.q * e.bottomLeftCorner(r, r);
  return StiefelPoint(std::move(result));
}

TangentVector stiefel_log(const StiefelPoint& base, const StiefelPoint& target, double tau,
                          std::size_t max_iterations) {
  ++tls_counters.log_calls;
  require_same_shape(base.matrix(), target.matrix(), "stiefel_log");
  if (!(tau > 0.0)) throw PreconditionError("stiefel_log: tau must be positive");

  const Matrix& u = base.matrix();
  const Eigen::Index p = base.r();

  const Matrix m = u.transpose() * target.matrix();
  const HorizontalSplit qn = normal_qr(u, target.matrix());

  Matrix v(2 * p, 2 * p);
  v.leftCols(p) << m, qn.r_factor;
  v.rightCols(p) = orth_complete(v.leftCols(p));
  if (v.determinant() < 0.0) v.col(2 * p - 1) *= -1.0;

  Matrix log_v;
  double residual = 0.0;
  for (std::size_t k = 0;; ++k) {
    try {
      log_v = logm_orthogonal(v);
    } catch (const DomainError& e) {
      throw NoConvergence(std::string("stiefel_log: matrix logarithm undefined (") + e.what() +
                              "); target too far from base point",
                          k, residual);
    }
    residual = log_v.bottomRightCorner(p, p).norm();
    if (residual <= tau) break;
    if (k + 1 >= max_iterations || !std::isfinite(residual)) {
      throw NoConvergence("stiefel_log: no convergence after " + std::to_string(k + 1) +
                              " iterations, ||C||_F = " + std::to_string(residual),
                          k + 1, residual);
    }
    const Matrix phi = expm(-log_v.bottomRightCorner(p, p));
    v.rightCols(p) = v.rightCols(p) * phi;
  }

  Matrix delta = u * log_v.topLeftCorner(p, p) + qn.q * log_v.bottomLeftCorner(p, p);
  return TangentVector(base, std::move(delta));
}

double dist(const StiefelPoint& p, const StiefelPoint& q, double tau) {
  return norm(stiefel_log(p, q, tau));
}

}  // namespace sth

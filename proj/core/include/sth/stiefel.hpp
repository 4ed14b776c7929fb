// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "sth/linalg.hpp"

namespace sth {

// Orthonormality tolerance ||U^T U - I||_F for accepting a point.
inline constexpr double kStiefelTolerance = 1e-10;

// Default convergence threshold of the iterative logarithm.
inline constexpr double kLogTolerance = 1e-14;

// Iteration cap of the iterative logarithm.
inline constexpr std::size_t kLogMaxIterations = 100;

// A point on St(n, r): an n x r matrix with orthonormal columns.
class StiefelPoint {
 public:
  /// Throws PreconditionError if ||u^T u - I||_F > kStiefelTolerance.
  explicit StiefelPoint(Matrix u);

  const Matrix& matrix() const noexcept { return u_; }
  Eigen::Index n() const noexcept { return u_.rows(); }
  Eigen::Index r() const noexcept { return u_.cols(); }

  /// Same matrix up to 1e-12 in the Frobenius norm.
  bool same_as(const StiefelPoint& other) const;

 private:
  Matrix u_;
};

// A tangent vector delta at `base`: base^T delta is skew-symmetric.
//
// Construction checks ||U^T D + D^T U||_F <= 1e-8 * max(1, ||D||_F) and throws
// DomainError otherwise; call project_tangent to map an arbitrary matrix.
class TangentVector {
 public:
  TangentVector(StiefelPoint base, Matrix delta);

  /// Zero vector at `base`.
  static TangentVector zero(const StiefelPoint& base);

  const StiefelPoint& base() const noexcept { return base_; }
  const Matrix& matrix() const noexcept { return delta_; }

  TangentVector operator*(double s) const;
  TangentVector operator+(const TangentVector& other) const;
  TangentVector operator-(const TangentVector& other) const;

 private:
  struct Unchecked {};
  TangentVector(StiefelPoint base, Matrix delta, Unchecked);

  StiefelPoint base_;
  Matrix delta_;
};

TangentVector operator*(double s, const TangentVector& v);

// delta = u * a + q * r_factor with a = u^T delta, q orthonormal and
// orthogonal to u, r_factor upper triangular.
struct HorizontalSplit {
  Matrix a;
  Matrix q;
  Matrix r_factor;
  bool rank_deficient = false;
};

/// QR factorization of (I - u u^T) x with q orthogonal to u. R-diagonal
/// entries below kRankTolerance * ||x||_F count as zero. Columns of q belonging
/// to a numerically zero R-diagonal are completed against u and the other q
/// columns; the corresponding rows of the triangular factor are zero.
HorizontalSplit normal_qr(const Matrix& u, const Matrix& x);

TangentVector project_tangent(const StiefelPoint& base, const Matrix& x);

/// ||U^T D + D^T U||_F
double tangency_defect(const Matrix& u, const Matrix& delta);

/// Canonical metric tr(xi^T (I - U U^T / 2) eta). Throws DomainError on
/// differing base points.
double metric(const TangentVector& xi, const TangentVector& eta);

double norm(const TangentVector& xi);

/// Canonical norm evaluated on a raw matrix at `u` (no tangency check).
double canonical_norm(const Matrix& u, const Matrix& delta);

HorizontalSplit split_tangent(const TangentVector& xi);

/// Geodesic c(t) = Exp_U(t xi) = (U, Q) expm(t [[A, -R^T], [R, 0]]) [I; 0].
StiefelPoint stiefel_exp(const TangentVector& xi, double t = 1.0);

/// Iterative Riemannian logarithm. Throws NoConvergence after
/// kLogMaxIterations iterations or when the matrix logarithm leaves its
/// domain (the target is too far from the base point).
TangentVector stiefel_log(const StiefelPoint& base, const StiefelPoint& target,
                          double tau = kLogTolerance,
                          std::size_t max_iterations = kLogMaxIterations);

/// Riemannian distance ||Log_p(q)||.
double dist(const StiefelPoint& p, const StiefelPoint& q, double tau = kLogTolerance);

// Per-thread call counters for the Riemannian exp and log.
struct CallCounters {
  std::uint64_t exp_calls = 0;
  std::uint64_t log_calls = 0;
};

CallCounters& call_counters() noexcept;
void reset_call_counters() noexcept;

}  // namespace sth

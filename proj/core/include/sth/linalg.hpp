// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace sth {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// R-diagonal entries below this multiple of ||a||_F count as zero.
inline constexpr double kRankTolerance = 1e-13;

// Economy QR factorization a = q * r with q (n x r) orthonormal and r (r x r)
// upper triangular with a nonnegative diagonal.
struct EconQR {
  Matrix q;
  Matrix r;
  bool rank_deficient = false;
};

struct FullSVD {
  Matrix u;      // n x m
  Vector sigma;  // m, descending, nonnegative
  Matrix v;      // m x m orthogonal
};

/// Matrix exponential (scaling and squaring with a Pade approximant).
Matrix expm(const Matrix& x);

/// Principal matrix logarithm. Throws DomainError if x has an eigenvalue on
/// the closed negative real axis.
Matrix logm(const Matrix& x);

/// Principal logarithm of an orthogonal matrix, returned exactly skew.
/// Uses the real Schur form, which is block diagonal for normal matrices.
Matrix logm_orthogonal(const Matrix& x);

/// Householder QR with the sign convention diag(r) >= 0 applied as a
/// post-pass. The result is a continuous function of a on full-rank paths.
EconQR qr_econ(const Matrix& a);

/// Thin left factor, full right factor. Requires rows >= cols.
FullSVD svd_full(const Matrix& y);

/// Columns completing an orthonormal frame v_r (m x r) to an orthogonal
/// m x m matrix (v_r | result). Deterministic.
Matrix orth_complete(const Matrix& v_r);

/// `count` orthonormal columns orthogonal to the orthonormal columns of
/// `basis`. Greedy Gram-Schmidt over the canonical unit vectors, always taking
/// the candidate with the largest residual.
Matrix orth_extend(const Matrix& basis, Eigen::Index count);

/// Skew-symmetric part (x - x^T) / 2.
Matrix skew(const Matrix& x);

/// Symmetric part (x + x^T) / 2.
Matrix sym(const Matrix& x);

bool all_finite(const Matrix& x);

}  // namespace sth

// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#include "sth/linalg.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "sth/errors.hpp"

namespace sth {

namespace {

void require_square(const Matrix& x, const char* op) {
  if (x.rows() != x.cols()) {
    throw DimensionError(std::string(op) + ": matrix must be square, got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

}  // namespace

bool all_finite(const Matrix& x) { return x.allFinite(); }

Matrix skew(const Matrix& x) { return 0.5 * (x - x.transpose()); }

Matrix sym(const Matrix& x) { return 0.5 * (x + x.transpose()); }

Matrix expm(const Matrix& x) {
  require_square(x, "expm");
  if (!x.allFinite()) throw NumericalError("expm: non-finite input");
  if (x.size() == 0) return x;
  Matrix result = x.exp();
  if (!result.allFinite()) throw NumericalError("expm: non-finite result");
  return result;
}

Matrix logm(const Matrix& x) {
  require_square(x, "logm");
  if (!x.allFinite()) throw NumericalError("logm: non-finite input");
  if (x.size() == 0) return x;

  const Eigen::EigenSolver<Matrix> eig(x, /*computeEigenvectors=*/false);
  if (eig.info() != Eigen::Success) throw NumericalError("logm: eigenvalue iteration failed");
  const double scale = std::max(1.0, x.norm());
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const std::complex<double> lambda = eig.eigenvalues()(i);
    if (std::abs(lambda.imag()) <= 1e-14 * scale && lambda.real() <= 0.0) {
      throw DomainError("logm: eigenvalue " + std::to_string(lambda.real()) +
                        " on the closed negative real axis");
    }
  }

  Matrix result = x.log();
  if (!result.allFinite()) throw NumericalError("logm: non-finite result");
  return result;
}

Matrix logm_orthogonal(const Matrix& x) {
  require_square(x, "logm_orthogonal");
  if (!x.allFinite()) throw NumericalError("logm_orthogonal: non-finite input");
  const Eigen::Index n = x.rows();
  if (n == 0) return x;

  const Eigen::RealSchur<Matrix> schur(x);
  if (schur.info() != Eigen::Success) throw NumericalError("logm_orthogonal: Schur iteration failed");
  const Matrix& t = schur.matrixT();
  const Matrix& z = schur.matrixU();

  Matrix log_t = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n;) {
    const bool two_by_two = i + 1 < n && t(i + 1, i) != 0.0;
    if (!two_by_two) {
      if (t(i, i) <= 0.0) {
        throw DomainError("logm_orthogonal: eigenvalue " + std::to_string(t(i, i)) +
                          " on the closed negative real axis");
      }
      log_t(i, i) = std::log(t(i, i));
      i += 1;
      continue;
    }
    // Standardized 2x2 block with complex pair rho * exp(+-i theta).
    const double a = t(i, i);
    const double b = t(i, i + 1);
    const double c = t(i + 1, i);
    const double d = t(i + 1, i + 1);
    const double re = 0.5 * (a + d);
    const double im = std::sqrt(std::max(0.0, -b * c - 0.25 * (a - d) * (a - d)));
    const double theta = std::atan2(im, re);
    if (std::abs(theta) >= std::numbers::pi) {
      throw DomainError("logm_orthogonal: eigenvalue pair on the negative real axis");
    }
    const double log_rho = 0.5 * std::log(re * re + im * im);
    // (block - re*I)^2 = -im^2 * I, so log(block) = log_rho*I + theta/im * (block - re*I).
    const double factor = theta / im;
    log_t(i, i) = log_rho + factor * (a - re);
    log_t(i + 1, i + 1) = log_rho + factor * (d - re);
    log_t(i, i + 1) = factor * b;
    log_t(i + 1, i) = factor * c;
    i += 2;
  }
  Matrix result = z * log_t * z.transpose();
  return skew(result);
}

EconQR qr_econ(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index r = a.cols();
  if (n < r) {
    throw DimensionError("qr_econ: need rows >= cols, got " + std::to_string(n) + "x" +
                         std::to_string(r));
  }
  if (!a.allFinite()) throw NumericalError("qr_econ: non-finite input");

  const Eigen::HouseholderQR<Matrix> qr(a);
  EconQR out;
  out.q = qr.householderQ() * Matrix::Identity(n, r);
  out.r = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();

  for (Eigen::Index j = 0; j < r; ++j) {
    if (out.r(j, j) < 0.0) {
      out.r.row(j) *= -1.0;
      out.q.col(j) *= -1.0;
    }
  }
  const double threshold = kRankTolerance * a.norm();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (out.r(j, j) <= threshold) out.rank_deficient = true;
  }
  return out;
}

FullSVD svd_full(const Matrix& y) {
  if (y.rows() < y.cols()) {
    throw DimensionError("svd_full: need rows >= cols, got " + std::to_string(y.rows()) + "x" +
                         std::to_string(y.cols()));
  }
  if (!y.allFinite()) throw NumericalError("svd_full: non-finite input");
  const Eigen::BDCSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeFullV);
  return FullSVD{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Matrix orth_extend(const Matrix& basis, Eigen::Index count) {
  const Eigen::Index m = basis.rows();
  const Eigen::Index k = basis.cols();
  if (count < 0 || k + count > m) {
    throw DimensionError("orth_extend: cannot add " + std::to_string(count) + " columns to " +
                         std::to_string(m) + "x" + std::to_string(k));
  }

  Matrix frame(m, k + count);
  frame.leftCols(k) = basis;
  Eigen::Index filled = k;

  // residuals(:, i) = (I - F F^T) e_i for the current frame F; start from
  // the projector complementary to `basis`.
  Matrix residuals = Matrix::Identity(m, m);
  if (k > 0) residuals -= basis * basis.transpose();

  for (Eigen::Index step = 0; step < count; ++step) {
    Eigen::Index best = 0;
    residuals.colwise().squaredNorm().maxCoeff(&best);
    Vector w = residuals.col(best);
    for (int pass = 0; pass < 2; ++pass) {
      w -= frame.leftCols(filled) * (frame.leftCols(filled).transpose() * w);
    }
    w.normalize();
    frame.col(filled) = w;
    ++filled;
    residuals -= w * (w.transpose() * residuals);
  }
  return frame.rightCols(count);
}

Matrix orth_complete(const Matrix& v_r) {
  const Eigen::Index m = v_r.rows();
  const Eigen::Index r = v_r.cols();
  if (r > m) throw DimensionError("orth_complete: more columns than rows");
  const double defect = (v_r.transpose() * v_r - Matrix::Identity(r, r)).norm();
  if (!(defect <= 1e-10)) {
    throw PreconditionError("orth_complete: input columns are not orthonormal (defect " +
                            std::to_string(defect) + ")");
  }
  return orth_extend(v_r, m - r);
}

}  // namespace sth

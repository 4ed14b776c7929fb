// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sth {

// Shape mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition on the input does not hold (non-orthonormal
// frame, invalid configuration, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input lies outside the domain where the operation is defined: singular
// triangular factor, repeated singular values, eigenvalue on the closed
// negative real axis, parameter outside an arc.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Floating point breakdown (non-finite output).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative method hit its iteration cap. Carries the number of
// iterations performed and the last residual.
class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, std::size_t iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

}  // namespace sth

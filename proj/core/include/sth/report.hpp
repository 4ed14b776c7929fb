// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace sth {

// One CSV column plus its summary footers.
struct ErrorSeries {
  std::string name;                // footer key, e.g. "hermite"
  std::string suffix = "rel_err";  // column header is name + "_" + suffix (just name if empty)
  std::vector<double> values;
  bool summarize = true;  // emit "# max_rel" / "# l2_rel" footers
  double max_rel = std::numeric_limits<double>::quiet_NaN();
  double l2_rel = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::size_t> failed_samples;
  std::string failure;  // non-empty when the method could not be run at all

  std::string column() const { return suffix.empty() ? name : name + "_" + suffix; }
};

struct ErrorReport {
  std::string abscissa = "t";
  std::vector<double> eval_grid;
  std::vector<ErrorSeries> series;
  std::vector<std::string> comments;  // free-form "# ..." lines, without the prefix

  const ErrorSeries* find(std::string_view name) const;
};

// Accumulates pointwise relative errors ||x* - x|| / ||x|| and the discrete
// L2 ratio sqrt(sum ||x* - x||^2 / sum ||x||^2) over a grid.
class ErrorAccumulator {
 public:
  void add(double error_norm, double reference_norm);
  void add_missing();
  ErrorSeries finish(std::string name) const;

 private:
  std::vector<double> rel_;
  double num_ = 0.0;
  double den_ = 0.0;
};

/// Shortest round-trip decimal ("nan", "inf", "-inf" for non-finite values).
std::string format_double(double x);

/// Parses what format_double writes; throws PreconditionError otherwise.
double parse_double(std::string_view text);

void write_report(const ErrorReport& report, std::ostream& out);
ErrorReport read_report(std::istream& in);

/// Writes the CSV to `path`; I/O failures throw std::runtime_error naming the path.
void emit_report(const ErrorReport& report, const std::string& path);
ErrorReport parse_report(const std::string& path);

}  // namespace sth

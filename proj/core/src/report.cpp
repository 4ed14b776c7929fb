// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#include "sth/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "sth/errors.hpp"

namespace sth {

namespace {

constexpr std::string_view kMaxKey = "max_rel";
constexpr std::string_view kL2Key = "l2_rel";
constexpr std::string_view kFailedSamplesKey = "failed_samples";
constexpr std::string_view kFailureKey = "failure";

std::vector<std::string_view> split(std::string_view line, char sep, std::size_t max_parts = 0) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    if (max_parts != 0 && parts.size() + 1 == max_parts) {
      parts.push_back(line.substr(start));
      break;
    }
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

ErrorSeries& series_named(ErrorReport& report, std::string_view name) {
  for (ErrorSeries& s : report.series) {
    if (s.name == name) return s;
  }
  throw PreconditionError("read_report: footer refers to unknown column " + std::string(name));
}

ErrorSeries series_from_header(std::string_view column) {
  ErrorSeries s;
  for (std::string_view suffix : {"_rel_err", "_abs_err"}) {
    if (column.size() > suffix.size() && column.ends_with(suffix)) {
      s.name = std::string(column.substr(0, column.size() - suffix.size()));
      s.suffix = std::string(suffix.substr(1));
      s.summarize = false;
      return s;
    }
  }
  s.name = std::string(column);
  s.suffix.clear();
  s.summarize = false;
  return s;
}

}  // namespace

const ErrorSeries* ErrorReport::find(std::string_view name) const {
  for (const ErrorSeries& s : series) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void ErrorAccumulator::add(double error_norm, double reference_norm) {
  rel_.push_back(error_norm / reference_norm);
  num_ += error_norm * error_norm;
  den_ += reference_norm * reference_norm;
}

void ErrorAccumulator::add_missing() { rel_.push_back(std::numeric_limits<double>::quiet_NaN()); }

ErrorSeries ErrorAccumulator::finish(std::string name) const {
  ErrorSeries s;
  s.name = std::move(name);
  s.values = rel_;
  double mx = -1.0;
  for (double v : rel_) {
    if (std::isfinite(v)) mx = std::max(mx, v);
  }
  if (mx >= 0.0) s.max_rel = mx;
  if (den_ > 0.0) s.l2_rel = std::sqrt(num_ / den_);
  return s;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw PreconditionError("not a number: '" + std::string(text) + "'");
  }
  return x;
}

void write_report(const ErrorReport& report, std::ostream& out) {
  out << report.abscissa;
  for (const ErrorSeries& s : report.series) out << ',' << s.column();
  out << '\n';
  for (std::size_t i = 0; i < report.eval_grid.size(); ++i) {
    out << format_double(report.eval_grid[i]);
    for (const ErrorSeries& s : report.series) {
      out << ',' << (i < s.values.size() ? format_double(s.values[i]) : "nan");
    }
    out << '\n';
  }
  // Nothing to summarize on an empty grid: the output is the header alone.
  const bool footers = !report.eval_grid.empty();
  for (const ErrorSeries& s : report.series) {
    if (footers && s.summarize) out << "# " << kMaxKey << ',' << s.name << ',' << format_double(s.max_rel) << '\n';
  }
  for (const ErrorSeries& s : report.series) {
    if (footers && s.summarize) out << "# " << kL2Key << ',' << s.name << ',' << format_double(s.l2_rel) << '\n';
  }
  for (const ErrorSeries& s : report.series) {
    if (s.failed_samples.empty()) continue;
    out << "# " << kFailedSamplesKey << ',' << s.name << ',';
    for (std::size_t i = 0; i < s.failed_samples.size(); ++i) {
      out << (i ? ";" : "") << s.failed_samples[i];
    }
    out << '\n';
  }
  for (const ErrorSeries& s : report.series) {
    if (!s.failure.empty()) out << "# " << kFailureKey << ',' << s.name << ',' << s.failure << '\n';
  }
  for (const std::string& c : report.comments) out << "# " << c << '\n';
}

ErrorReport read_report(std::istream& in) {
  ErrorReport report;
  std::string line;
  if (!std::getline(in, line)) throw PreconditionError("read_report: empty input");
  const auto header = split(line, ',');
  report.abscissa = std::string(header.front());
  for (std::size_t j = 1; j < header.size(); ++j) {
    report.series.push_back(series_from_header(header[j]));
  }

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.starts_with("# ")) {
      const std::string_view body = std::string_view(line).substr(2);
      const auto parts = split(body, ',', 3);
      if (parts.size() == 3 && (parts[0] == kMaxKey || parts[0] == kL2Key)) {
        ErrorSeries& s = series_named(report, parts[1]);
        s.summarize = true;
        (parts[0] == kMaxKey ? s.max_rel : s.l2_rel) = parse_double(parts[2]);
      } else if (parts.size() == 3 && parts[0] == kFailedSamplesKey) {
        ErrorSeries& s = series_named(report, parts[1]);
        for (std::string_view idx : split(parts[2], ';')) {
          s.failed_samples.push_back(static_cast<std::size_t>(parse_double(idx)));
        }
      } else if (parts.size() == 3 && parts[0] == kFailureKey) {
        series_named(report, parts[1]).failure = std::string(parts[2]);
      } else {
        report.comments.emplace_back(body);
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != report.series.size() + 1) {
      throw PreconditionError("read_report: row has " + std::to_string(cells.size()) +
                              " cells, expected " + std::to_string(report.series.size() + 1));
    }
    report.eval_grid.push_back(parse_double(cells[0]));
    for (std::size_t j = 0; j < report.series.size(); ++j) {
      report.series[j].values.push_back(parse_double(cells[j + 1]));
    }
  }
  return report;
}

void emit_report(const ErrorReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_report: cannot open '" + path + "' for writing");
  write_report(report, out);
  out.flush();
  if (!out) throw std::runtime_error("emit_report: write to '" + path + "' failed");
}

ErrorReport parse_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_report: cannot open '" + path + "'");
  return read_report(in);
}

}  // namespace sth

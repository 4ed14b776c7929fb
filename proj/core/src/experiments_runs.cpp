// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <type_traits>
#include <utility>
#include <string>

#include "sth/errors.hpp"
#include "sth/experiments.hpp"

namespace sth {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Tangent errors below this floor are excluded from the manifold/tangent ratio.
constexpr double kRatioFloor = 1e-10;

// Additive slack of the distance-bound comparison.
constexpr double kBoundSlack = 2e-3;

ErrorSeries failed_series(Method method, std::size_t points, const std::exception& e) {
  ErrorSeries s;
  s.name = std::string(to_string(method));
  s.values.assign(points, kNaN);
  s.failure = e.what();
  return s;
}

// Runs `fit` once, then `error_at(fitted, i)` on every grid index. Method
// failures become a NaN series carrying the message.
template <class Fit, class ErrorAt>
ErrorSeries run_method(Method method, std::size_t points, Fit fit, ErrorAt error_at) {
  try {
    auto fitted = fit();
    ErrorAccumulator acc;
    for (std::size_t i = 0; i < points; ++i) {
      const auto [err, ref] = error_at(fitted, i);
      acc.add(err, ref);
    }
    ErrorSeries s = acc.finish(std::string(to_string(method)));
    if constexpr (std::is_same_v<decltype(fitted), TangentRbfCurve>) {
      s.failed_samples = fitted.failed_samples();
    }
    return s;
  } catch (const NoConvergence& e) {
    return failed_series(method, points, e);
  } catch (const NumericalError& e) {
    return failed_series(method, points, e);
  } catch (const DomainError& e) {
    return failed_series(method, points, e);
  }
}

std::vector<PointSample> points_of(const std::vector<HermiteSample>& samples) {
  std::vector<PointSample> out;
  for (const HermiteSample& s : samples) out.push_back(PointSample{s.t, s.point});
  return out;
}

std::string calls_comment(const char* what, const CallCounters& c) {
  return std::string(what) + ",log=" + std::to_string(c.log_calls) +
         ",exp=" + std::to_string(c.exp_calls);
}

// Fits the composite Hermite curve while recording the Exp/Log count.
CompositeCurve counted_fit(const std::vector<HermiteSample>& samples, const ExperimentConfig& c,
                           std::vector<std::string>& comments, const char* label) {
  reset_call_counters();
  CompositeCurve curve = fit_composite(samples, c.centering, c.h, TransportCurve::geodesic, c.tau);
  comments.push_back(calls_comment(label, call_counters()));
  return curve;
}

// Evaluates an interpolant of point samples on St(n, r) against references.
ErrorReport run_stiefel_methods(const ExperimentConfig& config,
                                const std::vector<HermiteSample>& samples,
                                const std::vector<double>& grid,
                                const std::vector<StiefelPoint>& reference) {
  ErrorReport report;
  report.eval_grid = grid;
  auto err = [&](const StiefelPoint& x, std::size_t i) {
    return std::pair{(x.matrix() - reference[i].matrix()).norm(), reference[i].matrix().norm()};
  };
  for (Method method : config.methods) {
    switch (method) {
      case Method::hermite:
        report.series.push_back(run_method(
            method, grid.size(),
            [&] { return counted_fit(samples, config, report.comments, "hermite_fit_calls"); },
            [&](const CompositeCurve& c, std::size_t i) { return err(c.evaluate(grid[i]), i); }));
        break;
      case Method::geodesic:
        report.series.push_back(run_method(
            method, grid.size(), [&] { return geodesic_interp(points_of(samples), config.tau); },
            [&](const GeodesicCurve& c, std::size_t i) { return err(c.evaluate(grid[i]), i); }));
        break;
      case Method::rbf:
        report.series.push_back(run_method(
            method, grid.size(),
            [&] {
              return tangent_rbf_interp(points_of(samples), config.rbf_shape,
                                        RbfFailurePolicy::partial, config.tau);
            },
            [&](const TangentRbfCurve& c, std::size_t i) { return err(c.evaluate(grid[i]), i); }));
        break;
    }
  }
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------

ErrorReport run_qr_interp(const ExperimentConfig& config) {
  const QRExperimentData data = gen_qr_experiment(config);
  const std::vector<double> grid =
      uniform_grid(data.nodes.front(), data.nodes.back(), config.grid_points);
  std::vector<StiefelPoint> reference;
  for (double t : grid) reference.push_back(data.q_at(t));
  ErrorReport report = run_stiefel_methods(config, data.samples, grid, reference);
  if (data.seed_used != config.seed) {
    report.comments.push_back("regenerated_seed," + std::to_string(data.seed_used));
  }
  return report;
}

ErrorReport run_svd_interp(const ExperimentConfig& config) {
  if (config.uses(Method::rbf)) {
    throw PreconditionError("svd-interp supports the methods hermite and geodesic");
  }
  const LowRankSVDData data = gen_lowrank_svd_experiment(config);
  const std::vector<double>& grid = data.grid;
  const std::vector<double>& knots = data.nodes;

  std::vector<HermiteSample> u_samples;
  std::vector<HermiteSample> v_samples;
  for (const LowRankSVDSample& s : data.samples) {
    u_samples.push_back(HermiteSample{s.t, s.u, s.u_dot});
    v_samples.push_back(HermiteSample{s.t, s.v, s.v_dot});
  }
  auto piece = [&](double t) {
    const auto it = std::upper_bound(knots.begin(), knots.end(), t);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots.begin() - 1, 0));
    return std::min(i, knots.size() - 2);
  };
  std::vector<Matrix> w_ref;
  for (double t : grid) w_ref.push_back(data.w_at(t));
  auto err = [&](const StiefelPoint& u, const Vector& sigma, const StiefelPoint& v,
                 std::size_t i) {
    const Matrix w = u.matrix() * sigma.asDiagonal() * v.matrix().transpose();
    return std::pair{(w - w_ref[i]).norm(), w_ref[i].norm()};
  };

  ErrorReport report;
  report.eval_grid = grid;
  for (Method method : config.methods) {
    if (method == Method::hermite) {
      struct Fitted {
        CompositeCurve u, v;
      };
      report.series.push_back(run_method(
          method, grid.size(),
          [&] {
            return Fitted{counted_fit(u_samples, config, report.comments, "hermite_fit_calls_u"),
                          counted_fit(v_samples, config, report.comments, "hermite_fit_calls_v")};
          },
          [&](const Fitted& f, std::size_t i) {
            const double t = grid[i];
            const std::size_t k = piece(t);
            const LowRankSVDSample& s0 = data.samples[k];
            const LowRankSVDSample& s1 = data.samples[k + 1];
            const Vector sigma =
                euclid_hermite(s0.sigma, s1.sigma, s0.sigma_dot, s1.sigma_dot, t, s0.t, s1.t);
            return err(f.u.evaluate(t), sigma, f.v.evaluate(t), i);
          }));
    } else {
      struct Fitted {
        GeodesicCurve u, v;
      };
      report.series.push_back(run_method(
          method, grid.size(),
          [&] {
            return Fitted{geodesic_interp(points_of(u_samples), config.tau),
                          geodesic_interp(points_of(v_samples), config.tau)};
          },
          [&](const Fitted& f, std::size_t i) {
            const double t = grid[i];
            const std::size_t k = piece(t);
            const LowRankSVDSample& s0 = data.samples[k];
            const LowRankSVDSample& s1 = data.samples[k + 1];
            const double w = (t - s0.t) / (s1.t - s0.t);
            const Vector sigma = (1.0 - w) * s0.sigma + w * s1.sigma;
            return err(f.u.evaluate(t), sigma, f.v.evaluate(t), i);
          }));
    }
  }
  if (data.seed_used != config.seed) {
    report.comments.push_back("regenerated_seed," + std::to_string(data.seed_used));
  }
  return report;
}

ErrorReport run_snapshot_experiment(const ExperimentConfig& config) {
  const SnapshotData data = gen_snapshot_experiment(config);
  ErrorReport report = run_stiefel_methods(config, data.samples, data.grid, data.reference);
  if (const ErrorSeries* rbf = report.find("rbf"); rbf != nullptr) {
    report.comments.push_back("rbf_center," +
                              format_double(data.nodes[data.nodes.size() / 2]));
  }
  return report;
}

// ---------------------------------------------------------------------------

ErrorReport run_transport_accuracy(const ExperimentConfig& config) {
  validate(config);
  const SnapshotModel model(config.n, config.r);
  const std::vector<double> mus = {0.9, 1.4, 1.9};
  const std::vector<FullSVD> svds =
      tracked_svd([&](double mu) { return model.y(mu); }, mus, config.r);
  const StiefelPoint p(svds[0].u);
  const StiefelPoint q(svds[1].u);
  const TangentVector v_p = stiefel_log(p, StiefelPoint(svds[2].u), config.tau);

  ErrorReport report;
  report.abscissa = "h";
  ErrorSeries s;
  s.name = "transport";
  s.summarize = false;
  double best = std::numeric_limits<double>::infinity();
  double best_h = kNaN;
  for (double h : transport_steps()) {
    const double e = validate_transport(q, v_p, h, TransportCurve::geodesic, config.tau);
    report.eval_grid.push_back(h);
    s.values.push_back(e);
    if (e < best) {
      best = e;
      best_h = h;
    }
  }
  report.series.push_back(std::move(s));
  report.comments.push_back("argmin_h," + format_double(best_h));
  report.comments.push_back("dist_pq," + format_double(dist(p, q, config.tau)));
  return report;
}

// ---------------------------------------------------------------------------

ErrorReport run_tangent_vs_manifold(const ExperimentConfig& config) {
  const LowRankSVDData data = gen_lowrank_svd_experiment(config);
  std::vector<HermiteSample> samples;
  for (const LowRankSVDSample& s : data.samples) {
    samples.push_back(HermiteSample{s.t, s.u, s.u_dot});
  }

  ErrorReport report;
  report.eval_grid = data.grid;
  const CompositeCurve curve = counted_fit(samples, config, report.comments, "hermite_fit_calls");

  ErrorAccumulator rel;
  ErrorSeries tangent;
  ErrorSeries manifold;
  tangent.name = "tangent";
  manifold.name = "manifold";
  for (ErrorSeries* s : {&tangent, &manifold}) {
    s->suffix = "abs_err";
    s->summarize = false;
  }
  std::size_t skipped = 0;
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < data.grid.size(); ++i) {
    const double t = data.grid[i];
    const StiefelPoint& ref = data.reference_u[i];
    const HermiteArc& arc = curve.arcs()[curve.arc_index(t)];
    const TangentVector gamma = arc_tangent(arc, t);
    const StiefelPoint x = stiefel_exp(gamma);
    rel.add((x.matrix() - ref.matrix()).norm(), ref.matrix().norm());
    try {
      const TangentVector target = stiefel_log(arc.center, ref, config.tau);
      const double te = norm(gamma - target);
      const double me = dist(x, ref, config.tau);
      tangent.values.push_back(te);
      manifold.values.push_back(me);
      if (te > kRatioFloor) max_ratio = std::max(max_ratio, me / te);
    } catch (const NoConvergence&) {
      ++skipped;
      tangent.values.push_back(kNaN);
      manifold.values.push_back(kNaN);
    }
  }
  report.series.push_back(rel.finish("hermite"));
  report.series.push_back(std::move(tangent));
  report.series.push_back(std::move(manifold));
  report.comments.push_back("max_ratio,manifold/tangent," + format_double(max_ratio));
  report.comments.push_back("skipped_points," + std::to_string(skipped));
  return report;
}

// ---------------------------------------------------------------------------

double eval_distance_bound(const BoundInputs& b) {
  if (!(b.delta >= 0.0 && b.delta < 1.0 && b.delta_tilde >= 0.0 && b.delta_tilde < 1.0)) {
    throw PreconditionError("eval_distance_bound: need 0 <= delta, delta_tilde < 1");
  }
  if (!(b.s0 >= 0.0 && b.s0 <= 0.5 * std::numbers::pi)) {
    throw PreconditionError("eval_distance_bound: need s0 in [0, pi/2]");
  }
  if (!std::isfinite(b.curvature)) throw PreconditionError("eval_distance_bound: bad curvature");
  return std::abs(b.delta - b.delta_tilde) +
         b.s0 * b.delta * (1.0 - b.curvature / 6.0 * b.delta * b.delta);
}

std::vector<BoundCase> bound_cases(const ExperimentConfig& config) {
  validate(config);
  Rng rng(config.seed);
  const StiefelPoint q(qr_econ(rng.uniform_matrix(config.n, config.r, -1.0, 1.0)).q);
  const TangentVector x = project_tangent(q, rng.uniform_matrix(config.n, config.r, -1.0, 1.0));
  const TangentVector y = project_tangent(q, rng.uniform_matrix(config.n, config.r, -1.0, 1.0));
  // Orthonormal pair (e1, e2) in the canonical metric.
  const TangentVector e1 = (1.0 / norm(x)) * x;
  const TangentVector y_perp = y - metric(y, e1) * e1;
  const TangentVector e2 = (1.0 / norm(y_perp)) * y_perp;

  constexpr double kFlat = 0.0;
  constexpr double kMaxCurvature = 1.25;
  std::vector<BoundCase> cases;
  for (double delta : {0.1, 0.2, 0.3}) {
    for (double s0 : {0.05, 0.1}) {
      for (double ratio : {1.0, 0.9}) {
        const double delta_tilde = ratio * delta;
        const TangentVector d = delta * e1;
        const TangentVector dt = delta_tilde * (std::cos(s0) * e1 + std::sin(s0) * e2);
        BoundCase c;
        c.inputs = BoundInputs{delta, delta_tilde, s0, kFlat};
        c.observed = dist(stiefel_exp(d), stiefel_exp(dt), config.tau);
        c.bound_flat = eval_distance_bound(c.inputs);
        c.bound_curved = eval_distance_bound({delta, delta_tilde, s0, kMaxCurvature});
        cases.push_back(c);
      }
    }
  }
  return cases;
}

ErrorReport run_bound_check(const ExperimentConfig& config) {
  const std::vector<BoundCase> cases = bound_cases(config);
  ErrorReport report;
  report.abscissa = "case";
  std::vector<ErrorSeries> cols(6);
  const char* names[] = {"delta", "delta_tilde", "s0", "observed", "bound_k0", "bound_k54"};
  for (std::size_t j = 0; j < cols.size(); ++j) {
    cols[j].name = names[j];
    cols[j].suffix.clear();
    cols[j].summarize = false;
  }
  bool ok = true;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const BoundCase& c = cases[i];
    report.eval_grid.push_back(static_cast<double>(i));
    const double row[] = {c.inputs.delta, c.inputs.delta_tilde, c.inputs.s0,
                          c.observed,     c.bound_flat,         c.bound_curved};
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j].values.push_back(row[j]);
    ok = ok && c.observed <= c.bound_flat + kBoundSlack;
    // The lower comparison is meaningful for equal norms only: with
    // delta != delta_tilde the two legs meet at an angle, not along a ray.
    if (c.inputs.delta == c.inputs.delta_tilde) {
      ok = ok && c.observed >= c.bound_curved - kBoundSlack;
    }
  }
  report.series = std::move(cols);
  report.comments.push_back(std::string("bound_check,") + (ok ? "pass" : "fail"));
  return report;
}

}  // namespace sth

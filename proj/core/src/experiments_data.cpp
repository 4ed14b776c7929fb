// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sth/errors.hpp"
#include "sth/experiments.hpp"

namespace sth {

namespace {

// Regeneration attempts when a random draw violates a sampling precondition.
constexpr int kMaxDraws = 10;

// Minimal |u_t^T u_prev| column overlap accepted between consecutive
// decompositions before the parameter step is refined.
constexpr double kMinOverlap = 0.9;
constexpr int kMaxRefinement = 30;

void align(FullSVD& cur, const FullSVD& prev, Eigen::Index rank) {
  auto [u, v] = svd_sign_normalize(cur.u.leftCols(rank), cur.v.leftCols(rank),
                                   prev.u.leftCols(rank));
  cur.u.leftCols(rank) = u;
  cur.v.leftCols(rank) = v;
}

double min_overlap(const FullSVD& cur, const FullSVD& prev, Eigen::Index rank) {
  const Vector d =
      (cur.u.leftCols(rank).transpose() * prev.u.leftCols(rank)).diagonal().cwiseAbs();
  return d.minCoeff();
}

FullSVD advance(const std::function<Matrix(double)>& y_of, const FullSVD& prev, double ta,
                double tb, Eigen::Index rank, int depth) {
  FullSVD cur = svd_full(y_of(tb));
  if (min_overlap(cur, prev, rank) < kMinOverlap && depth < kMaxRefinement) {
    const double tm = 0.5 * (ta + tb);
    const FullSVD mid = advance(y_of, prev, ta, tm, rank, depth + 1);
    return advance(y_of, mid, tm, tb, rank, depth + 1);
  }
  align(cur, prev, rank);
  return cur;
}

std::vector<double> merged(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a);
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t position(const std::vector<double>& sorted, double t) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), t) -
                                  sorted.begin());
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::hermite:
      return "hermite";
    case Method::geodesic:
      return "geodesic";
    case Method::rbf:
      return "rbf";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::hermite, Method::geodesic, Method::rbf}) {
    if (name == to_string(m)) return m;
  }
  throw PreconditionError("unknown method '" + std::string(name) + "'");
}

bool ExperimentConfig::uses(Method method) const {
  return std::find(methods.begin(), methods.end(), method) != methods.end();
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  switch (kind) {
    case ExperimentKind::transport_accuracy:
      c.n = 200;
      c.a = 0.9;
      c.b = 1.9;
      c.num_nodes = 2;
      c.methods = {Method::hermite};
      break;
    case ExperimentKind::qr_interp:
      break;
    case ExperimentKind::svd_interp:
    case ExperimentKind::tangent_vs_manifold:
      c.a = 0.0;
      c.b = 0.5;
      c.num_nodes = 2;
      c.methods = kind == ExperimentKind::svd_interp
                      ? std::vector<Method>{Method::hermite, Method::geodesic}
                      : std::vector<Method>{Method::hermite};
      break;
    case ExperimentKind::snapshot_interp:
      c.n = 1001;
      c.a = 1.7;
      c.b = 2.3;
      break;
    case ExperimentKind::bound_check:
      c.n = 40;
      c.r = 4;
      c.methods = {};
      break;
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw PreconditionError("config: " + what); };
  if (c.r < 1 || c.n < 1 || c.m < 1) fail("n, r, m must be positive");
  if (c.n < 2 * c.r) fail("need n >= 2r");
  if (c.num_nodes < 2) fail("need at least 2 nodes");
  if (!(c.a < c.b)) fail("interval must satisfy a < b");
  if (!(c.h > 0.0)) fail("h must be positive");
  if (!(c.tau > 0.0)) fail("tau must be positive");
  if (!(c.rbf_shape > 0.0)) fail("rbf shape must be positive");
  if (c.grid_points < 2) fail("need at least 2 grid points");
}

// ---------------------------------------------------------------------------

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Matrix Rng::uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  Matrix x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = uniform(lo, hi);
  }
  return x;
}

std::vector<double> chebyshev_nodes(double a, double b, int k) {
  if (!(a < b) || k < 1) throw PreconditionError("chebyshev_nodes: need a < b and k >= 1");
  std::vector<double> t(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const double c = std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * k));
    t[static_cast<std::size_t>(k - 1 - j)] = 0.5 * (a + b) + 0.5 * (b - a) * c;
  }
  return t;
}

std::vector<double> uniform_grid(double a, double b, int count) {
  if (count < 2) throw PreconditionError("uniform_grid: need at least two points");
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = a + (b - a) * i / (count - 1);
  t.back() = b;
  return t;
}

std::vector<FullSVD> tracked_svd(const std::function<Matrix(double)>& y_of,
                                 const std::vector<double>& ts, Eigen::Index rank) {
  std::vector<FullSVD> out;
  if (ts.empty()) return out;
  out.reserve(ts.size());
  out.push_back(svd_full(y_of(ts.front())));
  if (rank < 1 || rank > out.front().u.cols()) throw DimensionError("tracked_svd: bad rank");
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1])) throw PreconditionError("tracked_svd: parameters must ascend");
    out.push_back(advance(y_of, out.back(), ts[i - 1], ts[i], rank, 0));
  }
  return out;
}

// ---------------------------------------------------------------------------

Matrix QRExperimentData::y_at(double t) const {
  return y[0] + t * (y[1] + t * (y[2] + t * y[3]));
}

Matrix QRExperimentData::y_dot_at(double t) const {
  return y[1] + t * (2.0 * y[2] + 3.0 * t * y[3]);
}

StiefelPoint QRExperimentData::q_at(double t) const { return StiefelPoint(qr_econ(y_at(t)).q); }

QRExperimentData gen_qr_experiment(const ExperimentConfig& config) {
  validate(config);
  QRExperimentData data;
  data.nodes = chebyshev_nodes(config.a, config.b, config.num_nodes);
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(draw);
    Rng rng(seed);
    data.y[0] = rng.uniform_matrix(config.n, config.r, 0.0, 1.0);
    data.y[1] = rng.uniform_matrix(config.n, config.r, 0.0, 0.5);
    data.y[2] = rng.uniform_matrix(config.n, config.r, 0.0, 0.5);
    data.y[3] = rng.uniform_matrix(config.n, config.r, 0.0, 0.2);
    data.samples.clear();
    try {
      for (double t : data.nodes) {
        const Matrix y = data.y_at(t);
        const EconQR qr = qr_econ(y);
        if (qr.rank_deficient) throw DomainError("rank-deficient Y(t)");
        const QRDerivative d = diff_qr(y, data.y_dot_at(t), qr);
        StiefelPoint point(qr.q);
        data.samples.push_back(HermiteSample{t, point, TangentVector(point, d.q_dot)});
      }
    } catch (const DomainError&) {
      continue;
    }
    data.seed_used = seed;
    return data;
  }
  throw PreconditionError("gen_qr_experiment: no full-rank draw after " +
                          std::to_string(kMaxDraws) + " seeds");
}

// ---------------------------------------------------------------------------

Matrix LowRankSVDData::w_at(double t) const {
  const Matrix yt = y[0] + t * (y[1] + t * (y[2] + t * y[3]));
  const Matrix zt = z[0] + t * (z[1] + t * z[2]);
  return yt * zt;
}

Matrix LowRankSVDData::w_dot_at(double t) const {
  const Matrix yt = y[0] + t * (y[1] + t * (y[2] + t * y[3]));
  const Matrix zt = z[0] + t * (z[1] + t * z[2]);
  const Matrix yd = y[1] + t * (2.0 * y[2] + 3.0 * t * y[3]);
  const Matrix zd = z[1] + 2.0 * t * z[2];
  return yd * zt + yt * zd;
}

LowRankSVDData gen_lowrank_svd_experiment(const ExperimentConfig& config) {
  validate(config);
  if (config.m < 2 * config.r || config.n < config.m) {
    throw PreconditionError("config: the fixed-rank product needs n >= m >= 2r");
  }
  const Eigen::Index r = config.r;
  LowRankSVDData data;
  data.nodes = chebyshev_nodes(config.a, config.b, config.num_nodes);
  data.grid = uniform_grid(data.nodes.front(), data.nodes.back(), config.grid_points);
  const std::vector<double> ts = merged(data.nodes, data.grid);

  for (int draw = 0; draw < kMaxDraws; ++draw) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(draw);
    Rng rng(seed);
    data.y[0] = rng.uniform_matrix(config.n, r, 0.0, 1.0);
    for (int i = 1; i < 4; ++i) data.y[i] = rng.uniform_matrix(config.n, r, 0.0, 0.5);
    data.z[0] = rng.uniform_matrix(r, config.m, 0.0, 1.0);
    for (int i = 1; i < 3; ++i) data.z[i] = rng.uniform_matrix(r, config.m, 0.0, 0.5);
    data.samples.clear();
    data.reference_u.clear();
    try {
      const std::vector<FullSVD> svds =
          tracked_svd([&](double t) { return data.w_at(t); }, ts, r);
      for (double t : data.nodes) {
        const FullSVD& s = svds[position(ts, t)];
        const SVDDerivative d = diff_svd_truncated(data.w_at(t), data.w_dot_at(t), r, s.v);
        StiefelPoint u(s.u.leftCols(r));
        StiefelPoint v(s.v.leftCols(r));
        data.samples.push_back(LowRankSVDSample{t, u, TangentVector(u, d.u_dot),
                                                s.sigma.head(r), d.sigma_dot, v,
                                                TangentVector(v, d.v_dot)});
      }
      for (double t : data.grid) {
        data.reference_u.emplace_back(svds[position(ts, t)].u.leftCols(r));
      }
    } catch (const DomainError&) {
      continue;
    }
    data.seed_used = seed;
    return data;
  }
  throw PreconditionError("gen_lowrank_svd_experiment: no draw with separated singular values after " +
                          std::to_string(kMaxDraws) + " seeds");
}

// ---------------------------------------------------------------------------

SnapshotModel::SnapshotModel(Eigen::Index n, Eigen::Index r) {
  if (n < 2 || r < 2) throw PreconditionError("SnapshotModel: need n >= 2 and r >= 2");
  x_ = Vector::LinSpaced(n, 0.0, 1.0);
  const double dx = 1.0 / static_cast<double>(n - 1);
  weights_ = Vector::Constant(n, dx);
  weights_(0) = weights_(n - 1) = 0.5 * dx;
  for (Eigen::Index j = 0; j < r; ++j) {
    times_.push_back(1.0 + 3.0 * static_cast<double>(j) / static_cast<double>(r - 1));
  }
}

double SnapshotModel::l2_inner(const Vector& f, const Vector& g) const {
  return (weights_.array() * f.array() * g.array()).sum();
}

Matrix SnapshotModel::y(double mu) const {
  const double w = 0.5 * std::numbers::pi * mu;
  Matrix out(x_.size(), static_cast<Eigen::Index>(times_.size()));
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double t = times_[static_cast<std::size_t>(j)];
    const Vector f = (x_.array().pow(t) * (w * x_.array()).sin()).matrix();
    out.col(j) = f / std::sqrt(l2_inner(f, f));
  }
  return out;
}

Matrix SnapshotModel::y_dot(double mu) const {
  const double w = 0.5 * std::numbers::pi * mu;
  Matrix out(x_.size(), static_cast<Eigen::Index>(times_.size()));
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double t = times_[static_cast<std::size_t>(j)];
    const Eigen::ArrayXd xt = x_.array().pow(t);
    const Vector f = (xt * (w * x_.array()).sin()).matrix();
    const Vector df =
        (xt * (w * x_.array()).cos() * (0.5 * std::numbers::pi * x_.array())).matrix();
    const double nf = std::sqrt(l2_inner(f, f));
    out.col(j) = df / nf - l2_inner(f, df) / (nf * nf * nf) * f;
  }
  return out;
}

SnapshotData gen_snapshot_experiment(const ExperimentConfig& config) {
  validate(config);
  const SnapshotModel model(config.n, config.r);
  SnapshotData data;
  data.nodes = chebyshev_nodes(config.a, config.b, config.num_nodes);
  data.grid = uniform_grid(data.nodes.front(), data.nodes.back(), config.grid_points);
  const std::vector<double> ts = merged(data.nodes, data.grid);
  const std::vector<FullSVD> svds =
      tracked_svd([&](double mu) { return model.y(mu); }, ts, config.r);
  for (double mu : data.nodes) {
    const FullSVD& s = svds[position(ts, mu)];
    const SVDDerivative d = diff_svd(model.y(mu), model.y_dot(mu), s);
    StiefelPoint u(s.u);
    data.samples.push_back(HermiteSample{mu, u, TangentVector(u, d.u_dot)});
  }
  for (double mu : data.grid) data.reference.emplace_back(svds[position(ts, mu)].u);
  return data;
}

std::vector<double> snapshot_sigma_min_scan(const ExperimentConfig& config, int count) {
  validate(config);
  const SnapshotModel model(config.n, config.r);
  std::vector<double> out;
  for (double mu : uniform_grid(config.a, config.b, count)) {
    out.push_back(svd_full(model.y(mu)).sigma(config.r - 1));
  }
  return out;
}

std::vector<double> transport_steps() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}; }

}  // namespace sth

#ifndef GEOWALK_WALK_HPP
#define GEOWALK_WALK_HPP

//! \file walk.hpp
//! r-geodesic random walks, push-forward ensembles and their statistics.
//!
//! Sample i of an ensemble draws from RngStream(derive_seed(master_seed, i)),
//! so the endpoint list does not depend on the worker count.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "geowalk/errors.hpp"
#include "geowalk/geometry.hpp"
#include "geowalk/parallel.hpp"
#include "geowalk/rng.hpp"
#include "geowalk/sunada.hpp"

namespace geowalk {

struct WalkConfig {
  ModelSpace space;
  ManifoldPoint start;
  double r = 1.0;
  int steps = 1;
  int samples = 1;
  std::uint64_t master_seed = 0;
  int workers = 1;

  void validate() const {
    space.validate();
    if (!(r > 0.0)) throw InputError("walk step length must be > 0");
    if (steps < 0) throw InputError("walk step count must be >= 0");
    if (samples < 1) throw InputError("walk sample count must be >= 1");
    if (start.coords.size() != space.ambient_dim()) throw InputError("walk start has wrong size");
  }
};

/// exp_x(r u) for a uniformly drawn unit direction u.
inline ManifoldPoint walk_step(const ModelSpace& s, const ManifoldPoint& x, double r,
                               RngStream& rng) {
  if (!(r > 0.0)) throw InputError("walk_step: r must be > 0");
  const Vec u = detail::sample_direction_raw(s, x.coords, rng);
  return {detail::exp_raw(s, x.coords, u, r)};
}

struct WalkPath {
  std::vector<ManifoldPoint> points;          // n + 1 points
  std::optional<DirectionTuple> directions;   // the same walk as a tuple at the start
};

/// One walk of cfg.steps steps. With record_directions, each drawn direction
/// is carried back to T_x by inverse parallel transport along the path, which
/// gives the direction tuple v with phi(v) = final point.
inline WalkPath run_walk(const WalkConfig& cfg, RngStream& rng, bool record_directions = false) {
  cfg.validate();
  const ModelSpace& s = cfg.space;
  WalkPath path;
  path.points.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  Vec p = cfg.start.coords;
  path.points.push_back({p});
  std::vector<Vec> frame_x;
  std::vector<Vec> transported;
  DirectionTuple tuple{s, cfg.start, cfg.r, {}};
  if (record_directions) {
    frame_x = detail::frame_raw(s, p);
    transported = frame_x;
  }
  for (int k = 0; k < cfg.steps; ++k) {
    const Vec u = detail::sample_direction_raw(s, p, rng);
    Vec y = detail::exp_raw(s, p, u, cfg.r);
    if (record_directions) {
      Vec at_x = detail::combine(frame_x, detail::frame_coords(s, transported, u));
      detail::renormalize_tangent(s, cfg.start.coords, at_x);
      tuple.dirs.push_back({cfg.start, std::move(at_x)});
      for (auto& e : transported) e = detail::transport_raw(s, p, u, cfg.r, y, e);
    }
    p = std::move(y);
    path.points.push_back({p});
  }
  if (record_directions && cfg.steps > 0) path.directions = std::move(tuple);
  return path;
}

struct Ensemble {
  std::vector<ManifoldPoint> endpoints;
  std::vector<std::uint64_t> seeds;
  WalkConfig config;
};

inline Ensemble run_ensemble(const WalkConfig& cfg) {
  cfg.validate();
  Ensemble ens;
  ens.config = cfg;
  ens.endpoints.resize(static_cast<std::size_t>(cfg.samples));
  ens.seeds.resize(static_cast<std::size_t>(cfg.samples));
  parallel_for(ens.endpoints.size(), cfg.workers, [&](std::size_t i) {
    ens.seeds[i] = derive_seed(cfg.master_seed, i);
    RngStream rng(ens.seeds[i]);
    Vec p = cfg.start.coords;
    for (int k = 0; k < cfg.steps; ++k) p = walk_step(cfg.space, {p}, cfg.r, rng).coords;
    ens.endpoints[i] = {std::move(p)};
  });
  return ens;
}

struct CfPoint {
  double t = 0.0;
  std::complex<double> value;
  double stderr_ = 0.0;  // sqrt(sum |z_k - mean|^2 / (N (N - 1)))
};

/// (1/N) sum_k exp(i t <u, X_k - x>). Torus displacements use the minimal
/// lattice image.
inline std::vector<CfPoint> empirical_cf(const Ensemble& ens, const std::vector<double>& ts,
                                         const Vec& u) {
  const ModelSpace& s = ens.config.space;
  if (s.is_hyperbolic())
    throw UnsupportedGeometry("characteristic functions need a linear structure");
  if (u.size() != s.dim) throw InputError("empirical_cf: direction has wrong size");
  std::vector<double> proj;
  proj.reserve(ens.endpoints.size());
  for (const auto& e : ens.endpoints)
    proj.push_back(u.dot(detail::log_raw(s, ens.config.start.coords, e.coords)));
  const double n = static_cast<double>(proj.size());
  std::vector<CfPoint> out;
  for (double t : ts) {
    std::complex<double> mean = 0.0;
    for (double p : proj) mean += std::polar(1.0, t * p);
    mean /= n;
    double ss = 0.0;
    for (double p : proj) ss += std::norm(std::polar(1.0, t * p) - mean);
    out.push_back({t, mean, proj.size() > 1 ? std::sqrt(ss / (n * (n - 1.0))) : 0.0});
  }
  return out;
}

struct EscapeReport {
  std::vector<double> mean_distance;  // index n = 0..n_max
  double slope = 0.0;                 // d mean_distance / dn over n in [n_max/2, n_max]
  double slope_stderr = 0.0;
  double ci_low = 0.0;                // 95% normal interval
  double ci_high = 0.0;
  double sqrt_scaling_slope = 0.0;    // OLS slope of mean_distance^2 against n, n >= 1
  double sqrt_scaling_r2 = 0.0;
};

/// Mean distance to the start per step, and its late-time drift. The slope
/// interval treats per-walk OLS slopes as i.i.d. samples.
inline EscapeReport escape_rate(const WalkConfig& cfg) {
  cfg.validate();
  if (cfg.steps < 10) throw InputError("escape_rate needs n_max >= 10");
  const int n_max = cfg.steps;
  const int lo = n_max / 2;
  const int count = n_max - lo + 1;
  double centre = 0.0;
  for (int n = lo; n <= n_max; ++n) centre += n;
  centre /= count;
  double sxx = 0.0;
  for (int n = lo; n <= n_max; ++n) sxx += (n - centre) * (n - centre);

  std::vector<std::vector<double>> dist(static_cast<std::size_t>(cfg.samples));
  std::vector<double> slopes(static_cast<std::size_t>(cfg.samples));
  parallel_for(dist.size(), cfg.workers, [&](std::size_t i) {
    RngStream rng(derive_seed(cfg.master_seed, i));
    auto& row = dist[i];
    row.resize(static_cast<std::size_t>(n_max) + 1);
    Vec p = cfg.start.coords;
    row[0] = 0.0;
    for (int k = 1; k <= n_max; ++k) {
      p = walk_step(cfg.space, {p}, cfg.r, rng).coords;
      row[k] = detail::distance_raw(cfg.space, cfg.start.coords, p);
    }
    double sxy = 0.0;
    for (int n = lo; n <= n_max; ++n) sxy += (n - centre) * row[n];
    slopes[i] = sxy / sxx;
  });

  EscapeReport rep;
  rep.mean_distance.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (const auto& row : dist)
    for (int k = 0; k <= n_max; ++k) rep.mean_distance[k] += row[k];
  for (auto& m : rep.mean_distance) m /= cfg.samples;

  const double ns = static_cast<double>(cfg.samples);
  double mean_slope = 0.0;
  for (double b : slopes) mean_slope += b;
  mean_slope /= ns;
  double var = 0.0;
  for (double b : slopes) var += (b - mean_slope) * (b - mean_slope);
  var = cfg.samples > 1 ? var / (ns - 1.0) : 0.0;
  rep.slope = mean_slope;
  rep.slope_stderr = std::sqrt(var / ns);
  rep.ci_low = rep.slope - 1.96 * rep.slope_stderr;
  rep.ci_high = rep.slope + 1.96 * rep.slope_stderr;

  Eigen::MatrixXd design(n_max, 2);
  Vec rhs(n_max);
  for (int n = 1; n <= n_max; ++n) {
    design(n - 1, 0) = 1.0;
    design(n - 1, 1) = n;
    rhs[n - 1] = rep.mean_distance[n] * rep.mean_distance[n];
  }
  const Vec coef = design.colPivHouseholderQr().solve(rhs);
  const Vec resid = rhs - design * coef;
  const double tss = (rhs.array() - rhs.mean()).square().sum();
  rep.sqrt_scaling_slope = coef[1];
  rep.sqrt_scaling_r2 = tss > 0.0 ? 1.0 - resid.squaredNorm() / tss : 1.0;
  return rep;
}

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<long> counts;

  double width() const { return counts.empty() ? 0.0 : (hi - lo) / counts.size(); }
  long total() const {
    long t = 0;
    for (long c : counts) t += c;
    return t;
  }
};

/// Counts of distance(start, endpoint) on [0, n r]; values past the upper
/// edge land in the last bin.
inline Histogram radial_histogram(const Ensemble& ens, int bins) {
  if (bins < 1) throw InputError("radial_histogram needs bins >= 1");
  Histogram h;
  h.hi = ens.config.steps * ens.config.r;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& e : ens.endpoints) {
    const double dist = detail::distance_raw(ens.config.space, ens.config.start.coords, e.coords);
    std::size_t idx = 0;
    if (h.hi > 0.0) idx = static_cast<std::size_t>(std::max(0.0, std::floor(dist / h.width())));
    idx = std::min(idx, h.counts.size() - 1);
    ++h.counts[idx];
  }
  return h;
}

}  // namespace geowalk

#endif  // GEOWALK_WALK_HPP

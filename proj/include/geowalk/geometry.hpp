#ifndef GEOWALK_GEOMETRY_HPP
#define GEOWALK_GEOMETRY_HPP

//! \file geometry.hpp
//! Closed-form Riemannian primitives on the three constant-curvature model
//! spaces: Euclidean space, hyperbolic space (hyperboloid model, curvature
//! -a^2) and the flat torus.
//!
//! Hyperbolic points are stored as d+1 ambient coordinates (time component
//! first) on the sheet <x,x> = -1/a^2, x0 > 0, with the Minkowski form
//! <u,w> = -u0 w0 + sum_i ui wi. After every exp and transport, points are
//! re-lifted through x0 = sqrt(1/a^2 + |xs|^2) and tangent vectors through
//! u0 = <xs,us>/x0, so chained operations stay on the model.
//!
//! The `detail` functions work on raw coordinate vectors without validation
//! and are what the hot loops call; the public functions check their
//! preconditions and throw InputError on misuse.

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "geowalk/config.hpp"
#include "geowalk/errors.hpp"
#include "geowalk/rng.hpp"

namespace geowalk {

using Vec = Eigen::VectorXd;

enum class SpaceKind { Euclidean, Hyperbolic, FlatTorus };

inline const char* to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Euclidean: return "euclidean";
    case SpaceKind::Hyperbolic: return "hyperbolic";
    case SpaceKind::FlatTorus: return "torus";
  }
  return "unknown";
}

/// Geometry descriptor. `curvature_scale` is only read for hyperbolic
/// space, `periods` only for the torus.
struct ModelSpace {
  SpaceKind kind = SpaceKind::Euclidean;
  int dim = 2;
  double curvature_scale = 1.0;
  std::vector<double> periods;

  static ModelSpace euclidean(int d) {
    ModelSpace s{SpaceKind::Euclidean, d, 1.0, {}};
    s.validate();
    return s;
  }
  static ModelSpace hyperbolic(int d, double a = 1.0) {
    ModelSpace s{SpaceKind::Hyperbolic, d, a, {}};
    s.validate();
    return s;
  }
  static ModelSpace flat_torus(std::vector<double> periods) {
    ModelSpace s{SpaceKind::FlatTorus, static_cast<int>(periods.size()), 1.0, std::move(periods)};
    s.validate();
    return s;
  }

  bool is_hyperbolic() const { return kind == SpaceKind::Hyperbolic; }
  bool is_torus() const { return kind == SpaceKind::FlatTorus; }
  int ambient_dim() const { return is_hyperbolic() ? dim + 1 : dim; }

  void validate() const {
    if (dim < 2) throw InputError("model space dimension must be >= 2");
    if (is_hyperbolic() && !(curvature_scale > 0.0))
      throw InputError("hyperbolic curvature scale must be > 0");
    if (is_torus()) {
      if (static_cast<int>(periods.size()) != dim)
        throw InputError("torus needs one period per dimension");
      for (double p : periods)
        if (!(p > 0.0)) throw InputError("torus periods must be > 0");
    }
  }
};

struct ManifoldPoint {
  Vec coords;
};

struct TangentVector {
  ManifoldPoint base;
  Vec components;
};

/// Result of the torus log map: the minimal-image displacement and whether a
/// half-period tie had to be broken.
struct LogResult {
  TangentVector vector;
  bool ambiguous = false;
};

namespace detail {

inline double minkowski(const Vec& u, const Vec& w) {
  return -u[0] * w[0] + u.tail(u.size() - 1).dot(w.tail(w.size() - 1));
}

inline double inner(const ModelSpace& s, const Vec& u, const Vec& w) {
  return s.is_hyperbolic() ? minkowski(u, w) : u.dot(w);
}

inline void reduce_torus(const ModelSpace& s, Vec& x) {
  for (int i = 0; i < s.dim; ++i) {
    const double p = s.periods[i];
    double r = x[i] - p * std::floor(x[i] / p);
    if (r >= p || r < 0.0) r = 0.0;
    x[i] = r;
  }
}

inline void renormalize_point(const ModelSpace& s, Vec& x) {
  if (s.is_hyperbolic()) {
    const double a = s.curvature_scale;
    x[0] = std::sqrt(1.0 / (a * a) + x.tail(s.dim).squaredNorm());
  } else if (s.is_torus()) {
    reduce_torus(s, x);
  }
}

inline void renormalize_tangent(const ModelSpace& s, const Vec& x, Vec& u) {
  if (s.is_hyperbolic()) u[0] = x.tail(s.dim).dot(u.tail(s.dim)) / x[0];
}

/// Point at arclength t from x along unit direction v.
inline Vec exp_raw(const ModelSpace& s, const Vec& x, const Vec& v, double t) {
  Vec y;
  if (s.is_hyperbolic()) {
    const double a = s.curvature_scale;
    y = std::cosh(a * t) * x + (std::sinh(a * t) / a) * v;
  } else {
    y = x + t * v;
  }
  renormalize_point(s, y);
  return y;
}

/// Velocity of the unit-speed geodesic exp_raw(x, dir, .) at time t.
inline Vec geodesic_velocity_raw(const ModelSpace& s, const Vec& x, const Vec& dir, double t) {
  if (!s.is_hyperbolic()) return dir;
  const double a = s.curvature_scale;
  return (a * std::sinh(a * t)) * x + std::cosh(a * t) * dir;
}

/// Transports u (at x) along the geodesic from x with unit direction dir for
/// length t; y must be exp_raw(x, dir, t).
inline Vec transport_raw(const ModelSpace& s, const Vec& x, const Vec& dir, double t, const Vec& y,
                         const Vec& u) {
  if (!s.is_hyperbolic()) return u;
  const double c = minkowski(u, dir);
  Vec out = u + c * (geodesic_velocity_raw(s, x, dir, t) - dir);
  renormalize_tangent(s, y, out);
  return out;
}

/// Minimal-image torus displacement y - x. Sets `ambiguous` when some
/// coordinate sits on the half-period tie; ties resolve to -P/2 (the smaller
/// lattice shift).
inline Vec torus_displacement(const ModelSpace& s, const Vec& x, const Vec& y, double tie_tol,
                              bool* ambiguous) {
  Vec d = y - x;
  bool tie = false;
  for (int i = 0; i < s.dim; ++i) {
    const double p = s.periods[i];
    d[i] -= p * std::round(d[i] / p);
    if (std::abs(std::abs(d[i]) - 0.5 * p) <= tie_tol * p) {
      tie = true;
      d[i] = -0.5 * p;
    }
  }
  if (ambiguous) *ambiguous = tie;
  return d;
}

/// Hyperbolic distance plus cosh(a d) - 1, both computed without the
/// cancellation of acosh near 1.
struct HyperbolicSeparation {
  double distance;
  double cosh_minus_one;
};

inline HyperbolicSeparation hyperbolic_separation(const ModelSpace& s, const Vec& x, const Vec& y) {
  const double a = s.curvature_scale;
  const double z = -a * a * minkowski(x, y);
  if (z > 2.0) return {std::acosh(z) / a, z - 1.0};
  const Vec diff = y - x;
  const double chord2 = std::max(0.0, minkowski(diff, diff));
  const double half = a * std::sqrt(chord2) / 2.0;
  return {2.0 * std::asinh(half) / a, 2.0 * half * half};
}

inline double distance_raw(const ModelSpace& s, const Vec& x, const Vec& y) {
  switch (s.kind) {
    case SpaceKind::Euclidean: return (y - x).norm();
    case SpaceKind::Hyperbolic: return hyperbolic_separation(s, x, y).distance;
    case SpaceKind::FlatTorus: return torus_displacement(s, x, y, 0.0, nullptr).norm();
  }
  return 0.0;
}

/// Tangent vector at x of length distance(x, y) pointing at y.
inline Vec log_raw(const ModelSpace& s, const Vec& x, const Vec& y, double tie_tol = 0.0,
                   bool* ambiguous = nullptr) {
  if (ambiguous) *ambiguous = false;
  switch (s.kind) {
    case SpaceKind::Euclidean: return y - x;
    case SpaceKind::FlatTorus: return torus_displacement(s, x, y, tie_tol, ambiguous);
    case SpaceKind::Hyperbolic: {
      const double a = s.curvature_scale;
      const auto sep = hyperbolic_separation(s, x, y);
      if (sep.distance == 0.0) return Vec::Zero(x.size());
      Vec u = (y - x) - sep.cosh_minus_one * x;
      renormalize_tangent(s, x, u);
      return u * (sep.distance * a / std::sinh(a * sep.distance));
    }
  }
  return Vec();
}

/// g-orthonormal frame at x. Euclidean/torus: canonical basis. Hyperbolic:
/// image of the canonical frame at the origin under the pure boost taking
/// the origin to x, which is exactly orthonormal and smooth in x.
inline std::vector<Vec> frame_raw(const ModelSpace& s, const Vec& x) {
  std::vector<Vec> frame;
  frame.reserve(s.dim);
  if (!s.is_hyperbolic()) {
    for (int j = 0; j < s.dim; ++j) frame.push_back(Vec::Unit(s.dim, j));
    return frame;
  }
  const double a = s.curvature_scale;
  const double y0 = a * x[0];
  const Vec ys = a * x.tail(s.dim);
  for (int j = 0; j < s.dim; ++j) {
    Vec e(s.dim + 1);
    e[0] = ys[j];
    e.tail(s.dim) = ys * (ys[j] / (1.0 + y0));
    e[j + 1] += 1.0;
    frame.push_back(std::move(e));
  }
  return frame;
}

inline Vec combine(const std::vector<Vec>& frame, const Vec& coeffs) {
  Vec out = Vec::Zero(frame.front().size());
  for (std::size_t j = 0; j < frame.size(); ++j) out += coeffs[static_cast<int>(j)] * frame[j];
  return out;
}

inline Vec frame_coords(const ModelSpace& s, const std::vector<Vec>& frame, const Vec& u) {
  Vec c(static_cast<int>(frame.size()));
  for (std::size_t j = 0; j < frame.size(); ++j) c[static_cast<int>(j)] = inner(s, u, frame[j]);
  return c;
}

inline Vec sample_direction_raw(const ModelSpace& s, const Vec& x, RngStream& rng) {
  Vec g(s.dim);
  double n2 = 0.0;
  do {
    for (int j = 0; j < s.dim; ++j) g[j] = rng.normal();
    n2 = g.squaredNorm();
  } while (n2 == 0.0);
  g /= std::sqrt(n2);
  if (!s.is_hyperbolic()) return g;
  Vec v = combine(frame_raw(s, x), g);
  renormalize_tangent(s, x, v);
  return v;
}

inline double point_scale(const ModelSpace& s, const Vec& x) {
  return s.is_hyperbolic() ? 1.0 + std::pow(s.curvature_scale * x[0], 2) : 1.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validated constructors

inline ManifoldPoint origin(const ModelSpace& s) {
  Vec x = Vec::Zero(s.ambient_dim());
  if (s.is_hyperbolic()) x[0] = 1.0 / s.curvature_scale;
  return {x};
}

/// Validates ambient coordinates (hyperboloid constraint; torus reduction).
inline ManifoldPoint make_point(const ModelSpace& s, Vec coords,
                                const Tolerances& tol = default_tolerances()) {
  if (coords.size() != s.ambient_dim())
    throw InputError("point has " + std::to_string(coords.size()) + " coordinates, expected " +
                     std::to_string(s.ambient_dim()));
  if (!coords.allFinite()) throw InputError("point coordinates must be finite");
  if (s.is_hyperbolic()) {
    const double a2 = s.curvature_scale * s.curvature_scale;
    const double residual = std::abs(a2 * detail::minkowski(coords, coords) + 1.0);
    if (coords[0] <= 0.0 || residual > tol.hyperboloid * (1.0 + a2 * coords.squaredNorm()))
      throw InputError("point is not on the upper hyperboloid sheet");
    detail::renormalize_point(s, coords);
  } else if (s.is_torus()) {
    detail::reduce_torus(s, coords);
  }
  return {std::move(coords)};
}

/// Hyperbolic point with the given spatial coordinates (x0 solved for).
inline ManifoldPoint hyperbolic_lift(const ModelSpace& s, const Vec& spatial) {
  if (!s.is_hyperbolic() || spatial.size() != s.dim)
    throw InputError("hyperbolic_lift needs d spatial coordinates of a hyperbolic space");
  Vec x(s.dim + 1);
  x.tail(s.dim) = spatial;
  detail::renormalize_point(s, x);
  return {x};
}

inline TangentVector make_tangent(const ModelSpace& s, const ManifoldPoint& x, Vec components,
                                  const Tolerances& tol = default_tolerances()) {
  if (components.size() != s.ambient_dim()) throw InputError("tangent vector has wrong size");
  if (!components.allFinite()) throw InputError("tangent components must be finite");
  if (s.is_hyperbolic()) {
    const double residual = std::abs(detail::minkowski(components, x.coords));
    const double scale = (1.0 + x.coords.norm()) * (1.0 + components.norm());
    if (residual > tol.tangent * scale)
      throw InputError("vector is not Minkowski-orthogonal to its base point");
    detail::renormalize_tangent(s, x.coords, components);
  }
  return {x, std::move(components)};
}

// ---------------------------------------------------------------------------
// Metric

inline void require_same_base(const ModelSpace& s, const ManifoldPoint& x, const ManifoldPoint& b,
                              const Tolerances& tol, const char* what) {
  double gap = 0.0;
  if (s.is_torus())
    gap = detail::torus_displacement(s, x.coords, b.coords, 0.0, nullptr).lpNorm<Eigen::Infinity>();
  else
    gap = (x.coords - b.coords).lpNorm<Eigen::Infinity>();
  if (x.coords.size() != b.coords.size() ||
      gap > tol.base_match * (1.0 + x.coords.lpNorm<Eigen::Infinity>()))
    throw InputError(std::string(what) + ": tangent vector is based at a different point");
}

inline double metric_inner(const ModelSpace& s, const ManifoldPoint& x, const TangentVector& u,
                           const TangentVector& w, const Tolerances& tol = default_tolerances()) {
  require_same_base(s, x, u.base, tol, "metric_inner");
  require_same_base(s, x, w.base, tol, "metric_inner");
  return detail::inner(s, u.components, w.components);
}

inline double metric_norm(const ModelSpace& s, const TangentVector& u) {
  return std::sqrt(std::max(0.0, detail::inner(s, u.components, u.components)));
}

inline void require_unit(const ModelSpace& s, const TangentVector& v, const Tolerances& tol,
                         const char* what) {
  const double n2 = detail::inner(s, v.components, v.components);
  if (!(std::abs(n2 - 1.0) <= tol.unit_norm * detail::point_scale(s, v.base.coords)))
    throw InputError(std::string(what) + ": direction is not a unit vector");
}

// ---------------------------------------------------------------------------
// Exponential map, log map, distance, transport

inline ManifoldPoint exp_map(const ModelSpace& s, const ManifoldPoint& x, const TangentVector& v,
                             double t, const Tolerances& tol = default_tolerances()) {
  require_same_base(s, x, v.base, tol, "exp_map");
  require_unit(s, v, tol, "exp_map");
  if (!(t >= 0.0)) throw InputError("exp_map: arclength must be >= 0");
  return {detail::exp_raw(s, x.coords, v.components, t)};
}

/// Torus log map that reports (instead of throwing on) half-period ties.
inline LogResult log_map_flagged(const ModelSpace& s, const ManifoldPoint& x,
                                 const ManifoldPoint& y,
                                 const Tolerances& tol = default_tolerances()) {
  LogResult out;
  out.vector = {x, detail::log_raw(s, x.coords, y.coords, tol.torus_tie, &out.ambiguous)};
  return out;
}

inline TangentVector log_map(const ModelSpace& s, const ManifoldPoint& x, const ManifoldPoint& y,
                             const Tolerances& tol = default_tolerances()) {
  auto res = log_map_flagged(s, x, y, tol);
  if (res.ambiguous) {
    std::ostringstream msg;
    msg << "log_map: point lies on the torus cut locus of the base point";
    throw AmbiguousCutLocus(msg.str());
  }
  return std::move(res.vector);
}

inline double distance(const ModelSpace& s, const ManifoldPoint& x, const ManifoldPoint& y) {
  return detail::distance_raw(s, x.coords, y.coords);
}

inline TangentVector parallel_transport(const ModelSpace& s, const ManifoldPoint& x,
                                        const TangentVector& dir, double t,
                                        const TangentVector& u,
                                        const Tolerances& tol = default_tolerances()) {
  require_same_base(s, x, dir.base, tol, "parallel_transport");
  require_same_base(s, x, u.base, tol, "parallel_transport");
  require_unit(s, dir, tol, "parallel_transport");
  Vec y = detail::exp_raw(s, x.coords, dir.components, t);
  Vec out = detail::transport_raw(s, x.coords, dir.components, t, y, u.components);
  return {{std::move(y)}, std::move(out)};
}

inline std::vector<TangentVector> orthonormal_frame(const ModelSpace& s, const ManifoldPoint& x) {
  std::vector<TangentVector> out;
  for (auto& e : detail::frame_raw(s, x.coords)) out.push_back({x, std::move(e)});
  return out;
}

/// Uniform unit tangent at x: standard normal coefficients in the
/// orthonormal frame, normalized.
inline TangentVector sample_unit_direction(const ModelSpace& s, const ManifoldPoint& x,
                                           RngStream& rng) {
  return {x, detail::sample_direction_raw(s, x.coords, rng)};
}

}  // namespace geowalk

#endif  // GEOWALK_GEOMETRY_HPP

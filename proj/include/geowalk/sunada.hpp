#ifndef GEOWALK_SUNADA_HPP
#define GEOWALK_SUNADA_HPP

//! \file sunada.hpp
//! Broken geodesics alpha_v and the endpoint map phi(v) = alpha_v(n r) on
//! (T^1_x M)^n, plus product sphere charts for differentiating phi.
//!
//! Segment k (0-based) leaves breakpoint x_k along the parallel transport of
//! the (k+1)-th direction v_k along the broken geodesic so far, for length r.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "geowalk/config.hpp"
#include "geowalk/errors.hpp"
#include "geowalk/geometry.hpp"
#include "geowalk/numdiff.hpp"

namespace geowalk {

/// Signs sigma_i in {-1, +1}.
using SignPattern = std::vector<int>;

inline SignPattern parse_sign_pattern(const std::string& text) {
  SignPattern out;
  for (char c : text) {
    if (c == '+')
      out.push_back(1);
    else if (c == '-')
      out.push_back(-1);
    else
      throw InputError("sign pattern may only contain '+' and '-': \"" + text + "\"");
  }
  if (out.empty()) throw InputError("sign pattern must not be empty");
  return out;
}

inline std::string format_sign_pattern(const SignPattern& signs) {
  std::string out;
  for (int s : signs) out.push_back(s > 0 ? '+' : '-');
  return out;
}

/// All 2^n patterns; bit i of the index set means sigma_i = -1.
inline std::vector<SignPattern> all_sign_patterns(int n) {
  std::vector<SignPattern> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    SignPattern p(n);
    for (int i = 0; i < n; ++i) p[i] = (mask >> i) & 1u ? -1 : 1;
    out.push_back(std::move(p));
  }
  return out;
}

inline int sign_sum(const SignPattern& signs) {
  int s = 0;
  for (int v : signs) s += v;
  return s;
}

struct DirectionTuple {
  ModelSpace space;
  ManifoldPoint base;
  double r = 1.0;
  std::vector<TangentVector> dirs;

  int n() const { return static_cast<int>(dirs.size()); }

  void validate(const Tolerances& tol = default_tolerances()) const {
    space.validate();
    if (dirs.empty()) throw InputError("direction tuple needs n >= 1 directions");
    if (!(r > 0.0)) throw InputError("step length r must be > 0");
    for (const auto& v : dirs) {
      require_same_base(space, base, v.base, tol, "direction tuple");
      require_unit(space, v, tol, "direction tuple");
    }
  }

  std::vector<Vec> components() const {
    std::vector<Vec> out;
    out.reserve(dirs.size());
    for (const auto& v : dirs) out.push_back(v.components);
    return out;
  }
};

inline DirectionTuple make_direction_tuple(const ModelSpace& s, const ManifoldPoint& x, double r,
                                           const std::vector<Vec>& dirs,
                                           const Tolerances& tol = default_tolerances()) {
  DirectionTuple t{s, x, r, {}};
  for (const auto& d : dirs) t.dirs.push_back(make_tangent(s, x, d, tol));
  t.validate(tol);
  return t;
}

/// The critical tuple (sigma_1 v0, ..., sigma_n v0).
inline DirectionTuple sign_tuple(const ModelSpace& s, const ManifoldPoint& x, double r,
                                 const SignPattern& signs, const TangentVector& v0) {
  DirectionTuple t{s, x, r, {}};
  for (int sgn : signs) t.dirs.push_back({x, static_cast<double>(sgn) * v0.components});
  t.validate();
  return t;
}

struct Trajectory {
  std::vector<ManifoldPoint> breakpoints;   // alpha(k r), k = 0..n
  std::vector<TangentVector> segment_dirs;  // alpha'(k r^+), k = 0..n-1
  std::vector<TangentVector> arrival_dirs;  // alpha'((k+1) r^-), k = 0..n-1
  std::vector<std::vector<TangentVector>> frame_log;  // v_i(k r) for all i, k = 0..n
};

namespace detail {

/// phi(v) from raw direction components; optionally returns alpha'(n r^-).
inline Vec phi_endpoint_raw(const ModelSpace& s, const Vec& x, double r, std::vector<Vec> dirs,
                            Vec* arrival = nullptr) {
  if (!s.is_hyperbolic()) {
    Vec p = x;
    for (const auto& d : dirs) p += r * d;
    renormalize_point(s, p);
    if (arrival) *arrival = dirs.back();
    return p;
  }
  Vec p = x;
  const std::size_t n = dirs.size();
  for (std::size_t k = 0; k < n; ++k) {
    Vec y = exp_raw(s, p, dirs[k], r);
    for (std::size_t j = k + 1; j < n; ++j) dirs[j] = transport_raw(s, p, dirs[k], r, y, dirs[j]);
    if (k + 1 == n && arrival) *arrival = transport_raw(s, p, dirs[k], r, y, dirs[k]);
    p = std::move(y);
  }
  return p;
}

/// Orthonormal basis of v^perp in T_x. In d = 2 it is the positive quarter
/// turn of v in the frame orientation; otherwise the frame vector most
/// parallel to v is dropped and the rest Gram-Schmidt'ed against v.
inline std::vector<Vec> perpendicular_basis(const ModelSpace& s, const Vec& x, const Vec& v) {
  const auto frame = frame_raw(s, x);
  const Vec c = frame_coords(s, frame, v);
  std::vector<Vec> basis;
  if (s.dim == 2) {
    Vec b = -c[1] * frame[0] + c[0] * frame[1];
    b /= std::sqrt(inner(s, b, b));
    basis.push_back(std::move(b));
    return basis;
  }
  int drop = 0;
  c.cwiseAbs().maxCoeff(&drop);
  for (int j = 0; j < s.dim; ++j) {
    if (j == drop) continue;
    Vec b = frame[j];
    for (int pass = 0; pass < 2; ++pass) {
      b -= inner(s, b, v) * v;
      for (const auto& q : basis) b -= inner(s, b, q) * q;
    }
    b /= std::sqrt(inner(s, b, b));
    renormalize_tangent(s, x, b);
    basis.push_back(std::move(b));
  }
  return basis;
}

/// Coordinates z = frame coords of log_center(y): normal coordinates at
/// center for the given orthonormal frame.
struct NormalChart {
  ModelSpace space;
  Vec center;
  std::vector<Vec> frame;

  Vec operator()(const Vec& y) const {
    return frame_coords(space, frame, log_raw(space, center, y));
  }
};

}  // namespace detail

/// Broken geodesic alpha_v with the full transported frame.
inline Trajectory broken_geodesic(const DirectionTuple& v) {
  v.validate();
  const ModelSpace& s = v.space;
  Trajectory traj;
  Vec p = v.base.coords;
  std::vector<Vec> frame = v.components();
  auto log_frame = [&](const Vec& at) {
    std::vector<TangentVector> entry;
    for (const auto& u : frame) entry.push_back({{at}, u});
    traj.frame_log.push_back(std::move(entry));
  };
  traj.breakpoints.push_back({p});
  log_frame(p);
  for (int k = 0; k < v.n(); ++k) {
    const Vec dir = frame[k];
    Vec y = detail::exp_raw(s, p, dir, v.r);
    traj.segment_dirs.push_back({{p}, dir});
    for (auto& u : frame) u = detail::transport_raw(s, p, dir, v.r, y, u);
    traj.arrival_dirs.push_back({{y}, frame[k]});
    p = std::move(y);
    traj.breakpoints.push_back({p});
    log_frame(p);
  }
  return traj;
}

/// phi(v) = alpha_v(n r).
inline ManifoldPoint phi_endpoint(const DirectionTuple& v) {
  v.validate();
  return {detail::phi_endpoint_raw(v.space, v.base.coords, v.r, v.components())};
}

/// Product of sphere exponential charts centered at a direction tuple:
/// factor i with offset block y_i maps to cos|y_i| v_i + sin|y_i| w/|w|,
/// w = sum_j y_ij b_ij for an orthonormal basis b_i of v_i^perp.
class SphereChart {
 public:
  explicit SphereChart(DirectionTuple center) : center_(std::move(center)) {
    center_.validate();
    const auto& s = center_.space;
    for (const auto& v : center_.dirs)
      bases_.push_back(detail::perpendicular_basis(s, center_.base.coords, v.components));
  }

  const DirectionTuple& center() const { return center_; }
  int factor_dim() const { return center_.space.dim - 1; }
  int dimension() const { return center_.n() * factor_dim(); }
  const std::vector<std::vector<Vec>>& bases() const { return bases_; }

  /// Tangent vector at the center direction of factor i for chart velocity
  /// block y_i.
  Vec factor_velocity(int i, const Vec& y) const {
    Vec w = Vec::Zero(center_.space.ambient_dim());
    for (int j = 0; j < factor_dim(); ++j) w += y[i * factor_dim() + j] * bases_[i][j];
    return w;
  }

  std::vector<Vec> eval_raw(const Vec& y) const {
    if (y.size() != dimension()) throw InputError("chart offset has wrong size");
    const auto& s = center_.space;
    std::vector<Vec> dirs;
    dirs.reserve(center_.dirs.size());
    for (int i = 0; i < center_.n(); ++i) {
      const double theta = y.segment(i * factor_dim(), factor_dim()).norm();
      if (!(theta < std::numbers::pi)) throw ChartDomain("sphere chart offset must be < pi");
      const Vec& v = center_.dirs[i].components;
      if (theta == 0.0) {
        dirs.push_back(v);
        continue;
      }
      Vec u = std::cos(theta) * v + (std::sin(theta) / theta) * factor_velocity(i, y);
      detail::renormalize_tangent(s, center_.base.coords, u);
      dirs.push_back(std::move(u));
    }
    return dirs;
  }

  DirectionTuple eval(const Vec& y) const {
    DirectionTuple out{center_.space, center_.base, center_.r, {}};
    for (auto& u : eval_raw(y)) out.dirs.push_back({center_.base, std::move(u)});
    return out;
  }

  /// Inverse of eval; throws ChartDomain at the antipode of a center factor.
  Vec coords(const DirectionTuple& t) const {
    if (t.n() != center_.n()) throw InputError("chart_coords: tuple length mismatch");
    const auto& s = center_.space;
    Vec y(dimension());
    for (int i = 0; i < center_.n(); ++i) {
      require_same_base(s, center_.base, t.dirs[i].base, default_tolerances(), "chart_coords");
      const Vec& v = center_.dirs[i].components;
      const Vec& u = t.dirs[i].components;
      const double c = detail::inner(s, u, v);
      const Vec w = u - c * v;
      const double sn = std::sqrt(std::max(0.0, detail::inner(s, w, w)));
      const double theta = std::atan2(sn, c);
      if (sn == 0.0 && c < 0.0) throw ChartDomain("chart_coords: direction is antipodal to center");
      for (int j = 0; j < factor_dim(); ++j)
        y[i * factor_dim() + j] = sn == 0.0 ? 0.0 : theta * detail::inner(s, w, bases_[i][j]) / sn;
    }
    return y;
  }

 private:
  DirectionTuple center_;
  std::vector<std::vector<Vec>> bases_;
};

/// Matrix of D_v phi from chart coordinates to frame coordinates of the
/// normal chart at phi(v). The default frame is orthonormal_frame(phi(v)).
inline Eigen::MatrixXd phi_jacobian(const SphereChart& chart,
                                    const std::vector<Vec>* codomain_frame = nullptr,
                                    const Tolerances& tol = default_tolerances()) {
  const auto& c = chart.center();
  const Vec end = detail::phi_endpoint_raw(c.space, c.base.coords, c.r, c.components());
  detail::NormalChart normal{c.space, end,
                             codomain_frame ? *codomain_frame : detail::frame_raw(c.space, end)};
  auto f = [&](const Vec& y) {
    return normal(detail::phi_endpoint_raw(c.space, c.base.coords, c.r, chart.eval_raw(y)));
  };
  return numdiff::jacobian_at_zero(f, chart.dimension(), tol.jacobian_step);
}

inline Eigen::MatrixXd phi_jacobian(const DirectionTuple& v,
                                    const Tolerances& tol = default_tolerances()) {
  return phi_jacobian(SphereChart(v), nullptr, tol);
}

}  // namespace geowalk

#endif  // GEOWALK_SUNADA_HPP

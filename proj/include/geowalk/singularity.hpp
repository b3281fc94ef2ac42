#ifndef GEOWALK_SINGULARITY_HPP
#define GEOWALK_SINGULARITY_HPP

//! \file singularity.hpp
//! Numerical certificates for the singular structure of phi:
//!   - corank of D_v phi and the location of the singular set,
//!   - immersion of phi restricted to a singular component,
//!   - V_p / V_q curves and the negative second derivative of the distance
//!     to the anchor along them,
//!   - the Hessian of the last normal coordinate at a critical tuple
//!     (transversality of the 1-jet, fold condition, signature),
//!   - first variation along a segment and the constant-curvature law of
//!     cosines used as the comparison bound.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "geowalk/config.hpp"
#include "geowalk/errors.hpp"
#include "geowalk/geometry.hpp"
#include "geowalk/numdiff.hpp"
#include "geowalk/parallel.hpp"
#include "geowalk/rng.hpp"
#include "geowalk/sunada.hpp"

namespace geowalk {

// ---------------------------------------------------------------------------
// Corank

struct SingularityReport {
  DirectionTuple tuple;
  Vec singular_values;           // d values, descending (zero-padded when n(d-1) < d)
  int rank = 0;
  int corank = 0;
  Eigen::MatrixXd kernel_basis;  // columns span ker D_v phi in chart coordinates
  bool is_singular = false;
  double rank_threshold = 0.0;   // relative threshold used
};

inline SingularityReport report_from_jacobian(const DirectionTuple& v, const Eigen::MatrixXd& jac,
                                              const Tolerances& tol = default_tolerances()) {
  SingularityReport rep{v, Vec::Zero(jac.rows()), 0, 0, {}, false, tol.rank};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  rep.singular_values.head(sv.size()) = sv;
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] >= tol.rank * smax && smax > 0.0) ++rep.rank;
  rep.corank = static_cast<int>(jac.rows()) - rep.rank;
  rep.is_singular = rep.corank > 0;
  const int cols = static_cast<int>(jac.cols());
  rep.kernel_basis = svd.matrixV().rightCols(cols - rep.rank);
  return rep;
}

inline SingularityReport corank_at(const DirectionTuple& v,
                                   const Tolerances& tol = default_tolerances()) {
  return report_from_jacobian(v, phi_jacobian(v, tol), tol);
}

/// max_i min(|v_i - v_1|, |v_i + v_1|): zero exactly on sign tuples.
inline double sign_tuple_distance(const DirectionTuple& v) {
  const auto& s = v.space;
  const Vec& first = v.dirs.front().components;
  double worst = 0.0;
  for (const auto& d : v.dirs) {
    const Vec minus = d.components - first;
    const Vec plus = d.components + first;
    const double m = std::sqrt(std::max(0.0, detail::inner(s, minus, minus)));
    const double p = std::sqrt(std::max(0.0, detail::inner(s, plus, plus)));
    worst = std::max(worst, std::min(m, p));
  }
  return worst;
}

inline DirectionTuple random_tuple(const ModelSpace& s, const ManifoldPoint& x, double r, int n,
                                   RngStream& rng) {
  DirectionTuple t{s, x, r, {}};
  for (int i = 0; i < n; ++i) t.dirs.push_back(sample_unit_direction(s, x, rng));
  return t;
}

struct ScanConfig {
  ModelSpace space;
  ManifoldPoint base;
  double r = 1.0;
  int n = 3;
  int samples = 10000;       // uniform random tuples
  int sign_samples = 100;    // random v0 per sign pattern
  std::uint64_t seed = 1;
  int workers = 1;
};

struct ScanSummary {
  int random_samples = 0;
  int random_singular = 0;
  int random_singular_off_stratum = 0;  // singular but not within 1e-4 of a sign tuple
  double min_random_ratio = std::numeric_limits<double>::infinity();  // min s_min/s_max
  double max_singular_sign_distance = 0.0;
  int sign_tuples = 0;
  int sign_corank_one = 0;
  double max_sign_null_ratio = 0.0;  // largest s_min/s_max over sign tuples
  double min_sign_second_ratio = std::numeric_limits<double>::infinity();  // s_{d-1}/s_max
  double rank_threshold = 0.0;

  bool random_tuples_regular() const { return random_singular_off_stratum == 0; }
  bool sign_tuples_corank_one() const { return sign_corank_one == sign_tuples; }
  bool passed() const { return random_tuples_regular() && sign_tuples_corank_one(); }
};

inline constexpr std::uint64_t kSignStreamSalt = 0x5349474E5F563000ULL;

/// Random tuples are expected regular; every sign tuple is expected to have
/// corank exactly one. Deterministic for any worker count.
inline ScanSummary singular_set_scan(const ScanConfig& cfg,
                                     const Tolerances& tol = default_tolerances()) {
  if (cfg.samples < 1) throw InputError("singular_set_scan needs at least one sample");
  struct RandomResult {
    double ratio;
    bool singular;
    double distance;
  };
  std::vector<RandomResult> random(static_cast<std::size_t>(cfg.samples));
  parallel_for(random.size(), cfg.workers, [&](std::size_t i) {
    RngStream rng(derive_seed(cfg.seed, i));
    const auto t = random_tuple(cfg.space, cfg.base, cfg.r, cfg.n, rng);
    const auto rep = corank_at(t, tol);
    const auto& sv = rep.singular_values;
    random[i] = {sv[0] > 0.0 ? sv[sv.size() - 1] / sv[0] : 0.0, rep.is_singular,
                 sign_tuple_distance(t)};
  });

  const auto patterns = all_sign_patterns(cfg.n);
  struct SignResult {
    double null_ratio;
    double second_ratio;
    bool corank_one;
  };
  const std::size_t sign_count = patterns.size() * static_cast<std::size_t>(cfg.sign_samples);
  std::vector<SignResult> signs(sign_count);
  parallel_for(sign_count, cfg.workers, [&](std::size_t idx) {
    const std::size_t sample = idx / patterns.size();
    RngStream rng(derive_seed(cfg.seed ^ kSignStreamSalt, sample));
    const auto v0 = sample_unit_direction(cfg.space, cfg.base, rng);
    const auto t = sign_tuple(cfg.space, cfg.base, cfg.r, patterns[idx % patterns.size()], v0);
    const auto rep = corank_at(t, tol);
    const auto& sv = rep.singular_values;
    const int d = static_cast<int>(sv.size());
    signs[idx] = {sv[d - 1] / sv[0], d >= 2 ? sv[d - 2] / sv[0] : 1.0, rep.corank == 1};
  });

  ScanSummary out;
  out.rank_threshold = tol.rank;
  out.random_samples = cfg.samples;
  for (const auto& r : random) {
    out.min_random_ratio = std::min(out.min_random_ratio, r.ratio);
    if (r.singular) {
      ++out.random_singular;
      out.max_singular_sign_distance = std::max(out.max_singular_sign_distance, r.distance);
      if (r.distance >= 1e-4) ++out.random_singular_off_stratum;
    }
  }
  out.sign_tuples = static_cast<int>(sign_count);
  for (const auto& s : signs) {
    if (s.corank_one) ++out.sign_corank_one;
    out.max_sign_null_ratio = std::max(out.max_sign_null_ratio, s.null_ratio);
    out.min_sign_second_ratio = std::min(out.min_sign_second_ratio, s.second_ratio);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Restriction to a singular component

struct ImmersionResult {
  double min_singular_value = std::numeric_limits<double>::infinity();
  int samples = 0;
  bool immersion = false;  // min singular value > tau_rank * r
};

/// Differentiates v0 -> phi(sigma_1 v0, ..., sigma_n v0) on the unit sphere
/// and reports the smallest singular value over the given v0.
inline ImmersionResult immersion_check(const ModelSpace& s, const ManifoldPoint& x, double r,
                                       const SignPattern& signs,
                                       const std::vector<TangentVector>& v0_samples,
                                       const Tolerances& tol = default_tolerances()) {
  ImmersionResult out;
  for (const auto& v0 : v0_samples) {
    const SphereChart sphere(DirectionTuple{s, x, r, {v0}});
    auto restricted = [&](const Vec& y) {
      const Vec u = sphere.eval_raw(y).front();
      std::vector<Vec> dirs;
      for (int sg : signs) dirs.push_back(static_cast<double>(sg) * u);
      return detail::phi_endpoint_raw(s, x.coords, r, std::move(dirs));
    };
    const Vec center = restricted(Vec::Zero(s.dim - 1));
    const detail::NormalChart normal{s, center, detail::frame_raw(s, center)};
    const auto jac = numdiff::jacobian_at_zero([&](const Vec& y) { return normal(restricted(y)); },
                                               s.dim - 1, tol.jacobian_step);
    const Vec sv = Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues();
    out.min_singular_value = std::min(out.min_singular_value, sv[sv.size() - 1]);
    ++out.samples;
  }
  out.immersion = out.samples > 0 && out.min_singular_value > tol.rank * r;
  return out;
}

// ---------------------------------------------------------------------------
// V_p / V_q curves

enum class Anchor { P, Q };

/// Curve s -> w(s) in V_p (anchor P) or V_q (anchor Q) through the critical
/// tuple (sigma_i v0). Free factors (sigma = +1 for P, -1 for Q) move along
/// great circles with the given chart velocity; the other segments aim at
/// the anchor p = exp_x(-2nr v0) or q = exp_x(2nr v0).
class VpqCurve {
 public:
  VpqCurve(ModelSpace space, ManifoldPoint base, double r, SignPattern signs, TangentVector v0,
           Anchor anchor, Vec velocity, const Tolerances& tol = default_tolerances())
      : space_(std::move(space)),
        base_(std::move(base)),
        r_(r),
        signs_(std::move(signs)),
        v0_(std::move(v0)),
        anchor_(anchor),
        velocity_(std::move(velocity)),
        tol_(tol),
        chart_(sign_tuple(space_, base_, r_, signs_, v0_)) {
    if (velocity_.size() != chart_.dimension())
      throw InputError("V_p/V_q velocity must have n(d-1) chart components");
    const int m = chart_.factor_dim();
    for (int i = 0; i < n(); ++i)
      if (!is_free(i) && velocity_.segment(i * m, m).norm() != 0.0)
        throw InputError("V_p/V_q velocity must vanish on constrained factors");
    const double reach = 2.0 * n() * r_;
    const Vec dir = (anchor_ == Anchor::P ? -1.0 : 1.0) * v0_.components;
    anchor_point_ = {detail::exp_raw(space_, base_.coords, dir, reach)};
  }

  int n() const { return static_cast<int>(signs_.size()); }
  bool is_free(int i) const { return anchor_ == Anchor::P ? signs_[i] > 0 : signs_[i] < 0; }
  Anchor anchor() const { return anchor_; }
  const ManifoldPoint& anchor_point() const { return anchor_point_; }
  const SphereChart& chart() const { return chart_; }
  const Vec& velocity() const { return velocity_; }
  const ModelSpace& space() const { return space_; }
  const SignPattern& signs() const { return signs_; }
  double step() const { return r_; }

  /// First free factor with nonzero velocity, or -1 for the constant curve.
  int first_moving_factor() const {
    const int m = chart_.factor_dim();
    for (int i = 0; i < n(); ++i)
      if (is_free(i) && velocity_.segment(i * m, m).norm() > 0.0) return i;
    return -1;
  }

  DirectionTuple at(double s) const {
    const Vec& x = base_.coords;
    const std::vector<Vec> moved = chart_.eval_raw(s * velocity_);
    const std::vector<Vec> frame_x = detail::frame_raw(space_, x);
    std::vector<Vec> transported = frame_x;
    DirectionTuple out{space_, base_, r_, {}};
    Vec p = x;
    for (int k = 0; k < n(); ++k) {
      Vec u;
      Vec at_x;
      if (is_free(k)) {
        at_x = moved[k];
        u = detail::combine(transported, detail::frame_coords(space_, frame_x, at_x));
      } else {
        const Vec aim = detail::log_raw(space_, p, anchor_point_.coords);
        const double len = std::sqrt(std::max(0.0, detail::inner(space_, aim, aim)));
        if (len < tol_.degenerate_aim) throw DegenerateAim("anchor coincides with a breakpoint");
        u = aim / len;
        at_x = detail::combine(frame_x, detail::frame_coords(space_, transported, u));
      }
      detail::renormalize_tangent(space_, p, u);
      detail::renormalize_tangent(space_, x, at_x);
      Vec y = detail::exp_raw(space_, p, u, r_);
      for (auto& e : transported) e = detail::transport_raw(space_, p, u, r_, y, e);
      p = std::move(y);
      out.dirs.push_back({base_, std::move(at_x)});
    }
    return out;
  }

  /// Distance from the anchor to phi(w(s)).
  double anchor_distance(double s) const {
    const auto t = at(s);
    return detail::distance_raw(space_, anchor_point_.coords,
                                detail::phi_endpoint_raw(space_, base_.coords, r_, t.components()));
  }

 private:
  ModelSpace space_;
  ManifoldPoint base_;
  double r_;
  SignPattern signs_;
  TangentVector v0_;
  Anchor anchor_;
  Vec velocity_;
  Tolerances tol_;
  SphereChart chart_;
  ManifoldPoint anchor_point_;
};

/// Second derivative at s = 0 of the distance from the anchor to phi(w(s)),
/// central second difference with step tol.acceleration_step.
inline double acceleration_check(const VpqCurve& curve,
                                 const Tolerances& tol = default_tolerances()) {
  if (curve.first_moving_factor() < 0)
    throw InputError("acceleration_check needs a non-zero free velocity");
  return numdiff::second_difference([&](double s) { return curve.anchor_distance(s); },
                                    tol.acceleration_step);
}

// ---------------------------------------------------------------------------
// Hessian of the last normal coordinate at a critical tuple

struct FoldCertificate {
  SignPattern signs;
  Vec base_dir;
  double gradient_norm = 0.0;
  Vec hessian_eigenvalues;  // ascending
  int pos = 0;
  int neg = 0;
  int predicted_pos = 0;
  int predicted_neg = 0;
  bool signature_matches = false;
  double min_abs_eig_ratio = 0.0;  // min |eig| / max |eig|
  bool transversal = false;
  int corank = 0;
  double stratum_gap = 0.0;  // smallest singular value ratio of [kernel | stratum tangent]
  bool kernel_meets_stratum = false;
  bool is_fold = false;
  int normal_form_pos = 0;  // signature of the Hessian restricted to ker D_v phi
  int normal_form_neg = 0;
};

/// (pos, neg) = ((d-1) #{sigma = -1}, (d-1) #{sigma = +1}).
inline std::pair<int, int> signature_prediction(const SignPattern& signs, int d) {
  int minus = 0;
  for (int s : signs) minus += s < 0 ? 1 : 0;
  const int plus = static_cast<int>(signs.size()) - minus;
  return {(d - 1) * minus, (d - 1) * plus};
}

namespace detail {

/// Eigenvalues above rel * scale in magnitude, by sign; scale defaults to
/// max |eig|.
inline std::pair<int, int> count_signature(const Vec& eig, double rel, double scale = -1.0) {
  if (scale < 0.0) scale = eig.size() ? eig.cwiseAbs().maxCoeff() : 0.0;
  int pos = 0;
  int neg = 0;
  for (int i = 0; i < eig.size(); ++i) {
    if (eig[i] > rel * scale) ++pos;
    if (eig[i] < -rel * scale) ++neg;
  }
  return {pos, neg};
}

inline Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

}  // namespace detail

inline FoldCertificate hessian_at_singular(const ModelSpace& s, const ManifoldPoint& x, double r,
                                           const SignPattern& signs, const TangentVector& v0,
                                           const Tolerances& tol = default_tolerances()) {
  const DirectionTuple v = sign_tuple(s, x, r, signs, v0);
  const SphereChart chart(v);
  const int dim = chart.dimension();

  // Normal coordinates at phi(v): last axis along gamma' = sigma_n alpha'(nr^-).
  Vec arrival;
  const Vec end = detail::phi_endpoint_raw(s, x.coords, r, v.components(), &arrival);
  const Vec gamma_dir = static_cast<double>(signs.back()) * arrival;
  std::vector<Vec> frame = detail::perpendicular_basis(s, end, gamma_dir);
  frame.push_back(gamma_dir);
  const detail::NormalChart normal{s, end, frame};

  auto coordinates = [&](const Vec& y) {
    return normal(detail::phi_endpoint_raw(s, x.coords, r, chart.eval_raw(y)));
  };
  auto psi_d = [&](const Vec& y) { return coordinates(y)[s.dim - 1]; };

  FoldCertificate cert;
  cert.signs = signs;
  cert.base_dir = v0.components;

  const Eigen::MatrixXd jac = numdiff::jacobian_at_zero(coordinates, dim, tol.jacobian_step);
  cert.gradient_norm = jac.row(s.dim - 1).norm();
  if (!(cert.gradient_norm < tol.critical_gradient))
    throw NotCritical("gradient of the normal coordinate along gamma' is not small");

  Eigen::MatrixXd hess = numdiff::hessian_at_zero(psi_d, dim, tol.hessian_step);
  hess = 0.5 * (hess + hess.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
  cert.hessian_eigenvalues = eig.eigenvalues();
  const Vec abs_eig = cert.hessian_eigenvalues.cwiseAbs();
  cert.min_abs_eig_ratio = abs_eig.maxCoeff() > 0.0 ? abs_eig.minCoeff() / abs_eig.maxCoeff() : 0.0;
  cert.transversal = cert.min_abs_eig_ratio > tol.nondegenerate;
  std::tie(cert.pos, cert.neg) = detail::count_signature(cert.hessian_eigenvalues, tol.nondegenerate);
  std::tie(cert.predicted_pos, cert.predicted_neg) = signature_prediction(signs, s.dim);
  cert.signature_matches = cert.pos == cert.predicted_pos && cert.neg == cert.predicted_neg;

  const SingularityReport rep = report_from_jacobian(v, jac, tol);
  cert.corank = rep.corank;

  // Tangent of the stratum {(sigma_i u)} at v, in chart coordinates.
  const std::vector<Vec> perp = detail::perpendicular_basis(s, x.coords, v0.components);
  const int m = chart.factor_dim();
  Eigen::MatrixXd stratum(dim, m);
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < v.n(); ++i)
      for (int j = 0; j < m; ++j)
        stratum(i * m + j, c) =
            signs[i] * detail::inner(s, perp[c], chart.bases()[i][j]);
  const Eigen::MatrixXd& kernel = rep.kernel_basis;
  if (kernel.cols() + m > dim) {
    cert.stratum_gap = 0.0;
    cert.kernel_meets_stratum = true;
  } else {
    Eigen::MatrixXd joined(dim, kernel.cols() + m);
    joined << kernel, detail::orthonormal_columns(stratum);
    const Vec sv = Eigen::JacobiSVD<Eigen::MatrixXd>(joined).singularValues();
    cert.stratum_gap = sv[sv.size() - 1] / sv[0];
    cert.kernel_meets_stratum = cert.stratum_gap < tol.nondegenerate;
  }
  cert.is_fold = cert.transversal && cert.corank == 1 && !cert.kernel_meets_stratum;

  if (kernel.cols() > 0) {
    const Eigen::MatrixXd restricted = kernel.transpose() * hess * kernel;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> keig(0.5 * (restricted + restricted.transpose()));
    std::tie(cert.normal_form_pos, cert.normal_form_neg) =
        detail::count_signature(keig.eigenvalues(), tol.nondegenerate, abs_eig.maxCoeff());
  }
  return cert;
}

// ---------------------------------------------------------------------------
// First variation along one segment

struct FirstVariation {
  double at_start = 0.0;  // g(J(kr), alpha'(kr^+))
  double at_end = 0.0;    // g(J((k+1)r), alpha'((k+1)r^-))
};

/// J(t) is the variation field of s -> alpha_{chart(s * perturbation)}.
/// Segment k has constant length r, so both inner products agree.
inline FirstVariation first_variation_check(const DirectionTuple& v, int k,
                                            const Vec& perturbation,
                                            const Tolerances& tol = default_tolerances()) {
  if (k < 0 || k >= v.n()) throw InputError("first_variation_check: segment index out of range");
  const SphereChart chart(v);
  if (perturbation.size() != chart.dimension())
    throw InputError("first_variation_check: perturbation has wrong size");
  const Trajectory traj = broken_geodesic(v);
  const auto& s = v.space;
  auto breakpoint = [&](int idx, double step) {
    const DirectionTuple w = chart.eval(step * perturbation);
    return broken_geodesic(w).breakpoints[idx].coords;
  };
  auto field = [&](int idx) {
    const Vec& center = traj.breakpoints[idx].coords;
    return numdiff::derivative_at_zero(
        [&](double step) { return detail::log_raw(s, center, breakpoint(idx, step)); },
        tol.jacobian_step);
  };
  FirstVariation out;
  out.at_start = detail::inner(s, field(k), traj.segment_dirs[k].components);
  out.at_end = detail::inner(s, field(k + 1), traj.arrival_dirs[k].components);
  return out;
}

// ---------------------------------------------------------------------------
// Comparison triangle

/// Third side of a triangle with sides r, R enclosing angle alpha in the
/// model space of curvature -a^2 (a = 0: Euclidean). Evaluated as
/// sinh(a c / 2)^2 = sinh(a (R - r) / 2)^2 + sinh(a r) sinh(a R) sin(alpha / 2)^2,
/// the hyperbolic law of cosines without cancellation for small a or c.
inline double toponogov_bound(double a, double r, double R, double alpha) {
  if (!(r > 0.0) || !(R > 0.0)) throw InputError("toponogov_bound: sides must be > 0");
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi))
    throw InputError("toponogov_bound: angle must lie in [0, pi]");
  const double half_sin = std::sin(alpha / 2.0);
  if (a == 0.0) return std::sqrt((R - r) * (R - r) + 4.0 * r * R * half_sin * half_sin);
  if (!(a > 0.0)) throw InputError("toponogov_bound: curvature scale must be >= 0");
  const double sh = std::sinh(a * (R - r) / 2.0);
  const double inside = sh * sh + std::sinh(a * r) * std::sinh(a * R) * half_sin * half_sin;
  return 2.0 * std::asinh(std::sqrt(inside)) / a;
}

/// Same third side, measured by building the triangle in the model space.
inline double constructed_triangle_side(const ModelSpace& s, double r, double R, double alpha) {
  const ManifoldPoint o = origin(s);
  const auto frame = detail::frame_raw(s, o.coords);
  const Vec u1 = frame[0];
  const Vec u2 = std::cos(alpha) * frame[0] + std::sin(alpha) * frame[1];
  const Vec p = detail::exp_raw(s, o.coords, u1, R);
  const Vec y = detail::exp_raw(s, o.coords, u2, r);
  return detail::distance_raw(s, p, y);
}

// ---------------------------------------------------------------------------
// Corner angle along a V_p curve

struct AngleFit {
  int corner = -1;          // breakpoint index k of the first moving free factor
  double intercept = 0.0;   // alpha(0), expected pi
  double slope = 0.0;       // c in alpha(s) = pi + c s
  double residual = 0.0;    // max |alpha(s) - (intercept + slope s)| on the grid
  std::vector<double> s_grid;
  std::vector<double> angles;
};

namespace detail {

inline double curve_scale(const ModelSpace& s) {
  return s.is_hyperbolic() ? s.curvature_scale : 0.0;
}

/// Signed corner angle at breakpoint k between the direction to the anchor
/// and the outgoing segment, oriented so that it increases with s.
struct CornerProbe {
  const VpqCurve& curve;
  int k;
  Vec corner;
  Vec to_anchor;  // unit
  Vec orient;     // unit, perpendicular to to_anchor

  static CornerProbe make(const VpqCurve& curve, int k) {
    const auto& s = curve.space();
    const Trajectory traj = broken_geodesic(curve.at(0.0));
    const Vec corner = traj.breakpoints[k].coords;
    Vec aim = log_raw(s, corner, curve.anchor_point().coords);
    aim /= std::sqrt(inner(s, aim, aim));
    Vec w = curve.chart().factor_velocity(k, curve.velocity());
    for (int j = 0; j < k; ++j) {
      const Vec& p = traj.breakpoints[j].coords;
      const Vec& dir = traj.segment_dirs[j].components;
      w = transport_raw(s, p, dir, curve.step(), traj.breakpoints[j + 1].coords, w);
    }
    w -= inner(s, w, aim) * aim;
    const double wn = std::sqrt(std::max(0.0, inner(s, w, w)));
    if (wn > 0.0) w /= -wn;
    return {curve, k, corner, aim, w};
  }

  double angle(double s_param) const {
    const auto& s = curve.space();
    const Vec next = broken_geodesic(curve.at(s_param)).breakpoints[k + 1].coords;
    const Vec u = log_raw(s, corner, next);
    double a = std::atan2(inner(s, u, orient), inner(s, u, to_anchor));
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    return a;
  }
};

}  // namespace detail

/// Fits alpha(s) = intercept + slope s at the first moving free corner on
/// s in [-half_width, half_width]. Zero velocity gives the constant pi.
inline AngleFit angle_linearity_check(const VpqCurve& curve, double half_width = 0.2,
                                      int points = 21) {
  if (points < 3) throw InputError("angle_linearity_check needs at least 3 grid points");
  AngleFit fit;
  int k = curve.first_moving_factor();
  if (k < 0) {
    for (int i = 0; i < curve.n() && k < 0; ++i)
      if (curve.is_free(i)) k = i;
    if (k < 0) throw InputError("angle_linearity_check: the curve has no free factor");
  }
  fit.corner = k;
  const auto probe = detail::CornerProbe::make(curve, k);
  for (int i = 0; i < points; ++i) {
    const double sp = -half_width + 2.0 * half_width * i / (points - 1);
    fit.s_grid.push_back(sp);
    fit.angles.push_back(probe.angle(sp));
  }
  Eigen::MatrixXd design(points, 2);
  Vec rhs(points);
  for (int i = 0; i < points; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = fit.s_grid[i];
    rhs[i] = fit.angles[i];
  }
  const Vec coef = design.colPivHouseholderQr().solve(rhs);
  fit.intercept = coef[0];
  fit.slope = coef[1];
  fit.residual = (design * coef - rhs).cwiseAbs().maxCoeff();
  return fit;
}

struct ComparisonSlack {
  double min_slack = std::numeric_limits<double>::infinity();  // min h(s) - f(x_{k+1}(s))
  double max_abs_gap = 0.0;
};

/// Compares the distance from the anchor to x_{k+1}(s) with the comparison
/// bound built from R = dist(anchor, x_k), r and the measured corner angle.
inline ComparisonSlack toponogov_slack_along(const VpqCurve& curve, double half_width = 0.2,
                                             int points = 21) {
  const int k = curve.first_moving_factor();
  if (k < 0) throw InputError("toponogov_slack_along needs a non-zero free velocity");
  const auto& s = curve.space();
  const auto probe = detail::CornerProbe::make(curve, k);
  const double R = detail::distance_raw(s, probe.corner, curve.anchor_point().coords);
  ComparisonSlack out;
  for (int i = 0; i < points; ++i) {
    const double sp = -half_width + 2.0 * half_width * i / (points - 1);
    double alpha = probe.angle(sp);
    if (alpha > std::numbers::pi) alpha = 2.0 * std::numbers::pi - alpha;
    const Vec next = broken_geodesic(curve.at(sp)).breakpoints[k + 1].coords;
    const double f = detail::distance_raw(s, curve.anchor_point().coords, next);
    const double h = toponogov_bound(detail::curve_scale(s), curve.step(), R, alpha);
    out.min_slack = std::min(out.min_slack, h - f);
    out.max_abs_gap = std::max(out.max_abs_gap, std::abs(h - f));
  }
  return out;
}

}  // namespace geowalk

#endif  // GEOWALK_SINGULARITY_HPP

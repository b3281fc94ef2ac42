#ifndef GEOWALK_IO_HPP
#define GEOWALK_IO_HPP

//! CSV and JSON exports. CSV files are comma separated with LF line endings;
//! the first line is a '#' comment carrying the library version and the
//! run configuration.

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geowalk/config.hpp"
#include "geowalk/regularity.hpp"
#include "geowalk/singularity.hpp"
#include "geowalk/spectral.hpp"
#include "geowalk/sunada.hpp"
#include "geowalk/walk.hpp"

namespace geowalk::io {

using nlohmann::json;

/// Shortest decimal that round-trips.
inline std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string header_line(const json& config) {
  return std::string("# geowalk ") + kVersion + " config=" + config.dump() + "\n";
}

inline void write_coords(std::ostream& os, const Vec& c) {
  for (int i = 0; i < c.size(); ++i) os << ',' << num(c[i]);
}

inline std::string coord_columns(int count, const char* prefix = "x") {
  std::string out;
  for (int i = 0; i < count; ++i) out += std::string(",") + prefix + std::to_string(i);
  return out;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const json& config) {
  os << header_line(config);
  const int width = static_cast<int>(traj.breakpoints.front().coords.size());
  os << "k" << coord_columns(width) << "\n";
  for (std::size_t k = 0; k < traj.breakpoints.size(); ++k) {
    os << k;
    write_coords(os, traj.breakpoints[k].coords);
    os << "\n";
  }
}

inline void write_ensemble_csv(std::ostream& os, const Ensemble& ens, const json& config) {
  os << header_line(config);
  os << "sample_index" << coord_columns(ens.config.space.ambient_dim()) << ",distance\n";
  for (std::size_t i = 0; i < ens.endpoints.size(); ++i) {
    os << i;
    write_coords(os, ens.endpoints[i].coords);
    os << ','
       << num(detail::distance_raw(ens.config.space, ens.config.start.coords,
                                   ens.endpoints[i].coords))
       << "\n";
  }
}

inline void write_histogram_csv(std::ostream& os, const Histogram& h, const json& config) {
  os << header_line(config);
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    os << num(h.lo + i * h.width()) << ',' << num(h.lo + (i + 1) * h.width()) << ','
       << h.counts[i] << "\n";
}

inline void write_cf_csv(std::ostream& os, const std::vector<CfPoint>& cf, const json& config) {
  os << header_line(config);
  os << "t,re,im,stderr\n";
  for (const auto& p : cf)
    os << num(p.t) << ',' << num(p.value.real()) << ',' << num(p.value.imag()) << ','
       << num(p.stderr_) << "\n";
}

inline void write_spectrum_csv(std::ostream& os, const spectral::SpectralResult& res,
                               const json& config) {
  os << header_line(config);
  const int d = static_cast<int>(res.periods.size());
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << "k" << i;
  os << ",r_kstar,lambda,quad_error\n";
  for (std::size_t idx = 0; idx < res.modes.size(); ++idx) {
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << res.modes[idx][i];
    const auto& e = res.entries[idx];
    os << ',' << num(e.rho) << ',' << num(e.lambda) << ',' << num(e.quad_error) << "\n";
  }
}

inline void write_regularity_csv(std::ostream& os, const regularity::QuadraticFormSpec& spec,
                                 const std::vector<CfPoint>& empirical, const json& config) {
  os << header_line(config);
  os << "t,re,im,analytic_re,analytic_im,stderr\n";
  for (const auto& p : empirical) {
    const auto exact = regularity::chi_diff_cf(spec, p.t);
    os << num(p.t) << ',' << num(p.value.real()) << ',' << num(p.value.imag()) << ','
       << num(exact.real()) << ',' << num(exact.imag()) << ',' << num(p.stderr_) << "\n";
  }
}

// ---------------------------------------------------------------------------
// JSON

inline json vec_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline json tolerances_json(const Tolerances& t) {
  return {{"unit_norm", t.unit_norm},
          {"base_match", t.base_match},
          {"hyperboloid", t.hyperboloid},
          {"tangent", t.tangent},
          {"torus_tie", t.torus_tie},
          {"rank", t.rank},
          {"nondegenerate", t.nondegenerate},
          {"critical_gradient", t.critical_gradient},
          {"jacobian_step", t.jacobian_step},
          {"hessian_step", t.hessian_step},
          {"acceleration_step", t.acceleration_step},
          {"chart_radius", t.chart_radius},
          {"degenerate_aim", t.degenerate_aim}};
}

inline json space_json(const ModelSpace& s) {
  json out{{"kind", to_string(s.kind)}, {"dim", s.dim}};
  if (s.is_hyperbolic()) out["curvature_scale"] = s.curvature_scale;
  if (s.is_torus()) out["periods"] = s.periods;
  return out;
}

inline json tuple_json(const DirectionTuple& t) {
  json dirs = json::array();
  for (const auto& v : t.dirs) dirs.push_back(vec_json(v.components));
  return {{"space", space_json(t.space)},
          {"base", vec_json(t.base.coords)},
          {"r", t.r},
          {"dirs", dirs}};
}

inline json to_json(const SingularityReport& rep) {
  json kernel = json::array();
  for (int c = 0; c < rep.kernel_basis.cols(); ++c) kernel.push_back(vec_json(rep.kernel_basis.col(c)));
  return {{"tuple", tuple_json(rep.tuple)},
          {"singular_values", vec_json(rep.singular_values)},
          {"rank", rep.rank},
          {"corank", rep.corank},
          {"kernel_basis", kernel},
          {"is_singular", rep.is_singular},
          {"rank_threshold", rep.rank_threshold}};
}

inline json to_json(const ScanSummary& s) {
  return {{"random_samples", s.random_samples},
          {"random_singular", s.random_singular},
          {"random_singular_off_stratum", s.random_singular_off_stratum},
          {"min_random_ratio", s.min_random_ratio},
          {"max_singular_sign_distance", s.max_singular_sign_distance},
          {"sign_tuples", s.sign_tuples},
          {"sign_corank_one", s.sign_corank_one},
          {"max_sign_null_ratio", s.max_sign_null_ratio},
          {"min_sign_second_ratio", s.min_sign_second_ratio},
          {"rank_threshold", s.rank_threshold},
          {"passed", s.passed()}};
}

inline json to_json(const FoldCertificate& c) {
  return {{"sign_pattern", format_sign_pattern(c.signs)},
          {"base_dir", vec_json(c.base_dir)},
          {"gradient_norm", c.gradient_norm},
          {"hessian_eigenvalues", vec_json(c.hessian_eigenvalues)},
          {"signature", {{"pos", c.pos}, {"neg", c.neg}}},
          {"predicted_signature", {{"pos", c.predicted_pos}, {"neg", c.predicted_neg}}},
          {"signature_matches", c.signature_matches},
          {"min_abs_eig_ratio", c.min_abs_eig_ratio},
          {"transversal", c.transversal},
          {"corank", c.corank},
          {"stratum_gap", c.stratum_gap},
          {"kernel_meets_stratum", c.kernel_meets_stratum},
          {"is_fold", c.is_fold},
          {"normal_form", {{"pos", c.normal_form_pos}, {"neg", c.normal_form_neg}}}};
}

}  // namespace geowalk::io

#endif  // GEOWALK_IO_HPP

#ifndef GEOWALK_CONFIG_HPP
#define GEOWALK_CONFIG_HPP

#include <numbers>

namespace geowalk {

inline constexpr const char* kVersion = "0.1.0";

/// Numerical thresholds shared by every module. One record so that the CLI can
/// override them and every report can echo the values it was produced with.
struct Tolerances {
  double unit_norm = 1e-9;          // |g(v,v) - 1| accepted for unit directions
  double base_match = 1e-12;        // relative distance between "equal" base points
  double hyperboloid = 1e-12;       // relative hyperboloid constraint residual
  double tangent = 1e-12;           // relative Minkowski orthogonality residual
  double torus_tie = 1e-12;         // relative distance to half-period for cut-locus ties
  double rank = 1e-6;               // singular value threshold, relative to the largest
  double nondegenerate = 1e-6;      // Hessian eigenvalue threshold, relative to the largest
  double critical_gradient = 1e-6;  // |grad psi_d(0)| accepted as critical
  double jacobian_step = 1e-5;
  double hessian_step = 1e-3;
  double acceleration_step = 1e-4;
  double chart_radius = std::numbers::pi / 2;
  double degenerate_aim = 1e-9;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace geowalk

#endif  // GEOWALK_CONFIG_HPP

#ifndef GEOWALK_TESTS_SUPPORT_HPP
#define GEOWALK_TESTS_SUPPORT_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "geowalk/geometry.hpp"
#include "geowalk/rng.hpp"
#include "geowalk/sunada.hpp"

namespace testing {

using geowalk::ManifoldPoint;
using geowalk::ModelSpace;
using geowalk::RngStream;
using geowalk::TangentVector;
using geowalk::Vec;

inline constexpr double kPi = std::numbers::pi;

/// Random point: Gaussian spatial coordinates of the given spread.
inline ManifoldPoint random_point(const ModelSpace& s, RngStream& rng, double spread = 1.0) {
  Vec c(s.dim);
  for (int i = 0; i < s.dim; ++i) c[i] = spread * rng.normal();
  if (s.is_hyperbolic()) return geowalk::hyperbolic_lift(s, c);
  if (s.is_torus())
    for (int i = 0; i < s.dim; ++i) c[i] = rng.uniform() * s.periods[i];
  return geowalk::make_point(s, c);
}

/// Random tangent vector at x with Gaussian frame coefficients.
inline TangentVector random_tangent(const ModelSpace& s, const ManifoldPoint& x, RngStream& rng,
                                    double scale = 1.0) {
  const auto frame = geowalk::detail::frame_raw(s, x.coords);
  Vec c(s.dim);
  for (int i = 0; i < s.dim; ++i) c[i] = scale * rng.normal();
  return {x, geowalk::detail::combine(frame, c)};
}

inline std::vector<ModelSpace> all_spaces(int d) {
  return {ModelSpace::euclidean(d), ModelSpace::hyperbolic(d, 1.0),
          ModelSpace::flat_torus(std::vector<double>(d, 2.0 * kPi))};
}

inline Vec vec2(double a, double b) { return (Vec(2) << a, b).finished(); }
inline Vec vec3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

/// Random unit direction at the base point expressed as a DirectionTuple entry.
inline geowalk::DirectionTuple random_tuple(const ModelSpace& s, const ManifoldPoint& x, double r,
                                            int n, RngStream& rng) {
  geowalk::DirectionTuple t{s, x, r, {}};
  for (int i = 0; i < n; ++i) t.dirs.push_back(geowalk::sample_unit_direction(s, x, rng));
  return t;
}

}  // namespace testing

#endif  // GEOWALK_TESTS_SUPPORT_HPP

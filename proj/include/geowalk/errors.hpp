#ifndef GEOWALK_ERRORS_HPP
#define GEOWALK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace geowalk {

/// Precondition violated by caller-supplied data (bad dimension, non-unit
/// direction, tangent vector based at the wrong point, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Torus log map asked for a point equidistant from two lattice images.
class AmbiguousCutLocus : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sphere chart offset outside the injectivity domain.
class ChartDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The anchor point of a V_p / V_q curve coincides with a breakpoint.
class DegenerateAim : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Gradient of the normal-coordinate function is not small at a tuple that
/// was expected to be critical.
class NotCritical : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not defined on the requested geometry (e.g. a linear
/// characteristic function on the hyperboloid).
class UnsupportedGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A theorem hypothesis does not hold for the requested parameters.
class HypothesisViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace geowalk

#endif  // GEOWALK_ERRORS_HPP

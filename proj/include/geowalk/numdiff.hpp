#ifndef GEOWALK_NUMDIFF_HPP
#define GEOWALK_NUMDIFF_HPP

//! Central finite differences with one Richardson step:
//! D = (4 D(h/2) - D(h)) / 3, truncation error O(h^4).

#include <Eigen/Dense>

namespace geowalk::numdiff {

/// Jacobian of f: R^n -> R^m at 0.
template <class F>
Eigen::MatrixXd jacobian_at_zero(F&& f, int n, double h) {
  const Eigen::VectorXd f0 = f(Eigen::VectorXd::Zero(n));
  Eigen::MatrixXd jac(f0.size(), n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    auto central = [&](double step) {
      y[j] = step;
      const Eigen::VectorXd plus = f(y);
      y[j] = -step;
      const Eigen::VectorXd minus = f(y);
      y[j] = 0.0;
      return Eigen::VectorXd((plus - minus) / (2.0 * step));
    };
    const Eigen::VectorXd coarse = central(h);
    const Eigen::VectorXd fine = central(h / 2.0);
    jac.col(j) = (4.0 * fine - coarse) / 3.0;
  }
  return jac;
}

/// Gradient of a scalar f: R^n -> R at 0.
template <class F>
Eigen::VectorXd gradient_at_zero(F&& f, int n, double h) {
  auto wrapped = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd v(1);
    v[0] = f(y);
    return v;
  };
  return jacobian_at_zero(wrapped, n, h).row(0).transpose();
}

/// Symmetric Hessian of a scalar f: R^n -> R at 0.
template <class F>
Eigen::MatrixXd hessian_at_zero(F&& f, int n, double h) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  const double f0 = f(y);
  auto estimate = [&](double step) {
    Eigen::MatrixXd hess(n, n);
    for (int i = 0; i < n; ++i) {
      y.setZero();
      y[i] = step;
      const double plus = f(y);
      y[i] = -step;
      const double minus = f(y);
      hess(i, i) = (plus - 2.0 * f0 + minus) / (step * step);
      for (int j = 0; j < i; ++j) {
        double acc = 0.0;
        for (int si : {1, -1})
          for (int sj : {1, -1}) {
            y.setZero();
            y[i] = si * step;
            y[j] = sj * step;
            acc += si * sj * f(y);
          }
        hess(i, j) = hess(j, i) = acc / (4.0 * step * step);
      }
    }
    y.setZero();
    return hess;
  };
  const Eigen::MatrixXd coarse = estimate(h);
  const Eigen::MatrixXd fine = estimate(h / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

/// Plain central second difference of a scalar function of one variable at 0.
template <class F>
double second_difference(F&& f, double h) {
  return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
}

/// Richardson-refined central first difference of a vector-valued function of
/// one variable at 0.
template <class F>
Eigen::VectorXd derivative_at_zero(F&& f, double h) {
  auto central = [&](double step) { return Eigen::VectorXd((f(step) - f(-step)) / (2.0 * step)); };
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

}  // namespace geowalk::numdiff

#endif  // GEOWALK_NUMDIFF_HPP

#ifndef GEOWALK_SPECTRAL_HPP
#define GEOWALK_SPECTRAL_HPP

//! \file spectral.hpp
//! The spherical mean operator L_r on the flat torus R^d / prod(P_i Z).
//!
//! Plane waves e_k(x) = exp(i <k*, x>), k*_i = 2 pi k_i / P_i, are
//! eigenfunctions: L_r e_k = lambda_k e_k with lambda_k the sphere average of
//! exp(i r <k*, v>). L_r therefore acts on Fourier coefficients as a
//! multiplier, and lambda_k is obtained here by quadrature over the sphere.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "geowalk/errors.hpp"
#include "geowalk/parallel.hpp"

namespace geowalk::spectral {

using Complex = std::complex<double>;
using Mode = std::vector<int>;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int m) : nodes(m), weights(m) {
    for (int i = 0; i < m; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;  // P_{j-1}
        double p1 = z;    // P_j
        for (int j = 2; j <= m; ++j) {
          const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = m * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      nodes[i] = z;
      weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

inline std::vector<double> dual_frequency(const Mode& k, const std::vector<double>& periods) {
  std::vector<double> out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = 2.0 * std::numbers::pi * k[i] / periods[i];
  return out;
}

inline double frequency_norm(const Mode& k, const std::vector<double>& periods) {
  double s = 0.0;
  for (double v : dual_frequency(k, periods)) s += v * v;
  return std::sqrt(s);
}

namespace detail {

/// Sphere average of exp(i r <kstar, v>) with a rule of resolution q.
inline Complex sphere_average(const std::vector<double>& kstar, double r, int q) {
  const std::size_t d = kstar.size();
  const double two_pi = 2.0 * std::numbers::pi;
  if (d == 2) {
    Complex acc = 0.0;
    for (int j = 0; j < q; ++j) {
      const double th = two_pi * j / q;
      acc += std::polar(1.0, r * (kstar[0] * std::cos(th) + kstar[1] * std::sin(th)));
    }
    return acc / static_cast<double>(q);
  }
  if (d == 3) {
    const GaussLegendre gl(q);
    const int az = 2 * q;
    Complex acc = 0.0;
    for (int m = 0; m < q; ++m) {
      const double mu = gl.nodes[m];
      const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      Complex ring = 0.0;
      for (int j = 0; j < az; ++j) {
        const double ph = two_pi * j / az;
        ring += std::polar(1.0, r * (kstar[0] * st * std::cos(ph) + kstar[1] * st * std::sin(ph) +
                                     kstar[2] * mu));
      }
      acc += gl.weights[m] * ring / static_cast<double>(az);
    }
    return acc / 2.0;
  }
  // d >= 4: the average depends on rho = r |k*| only; integrate the
  // distribution of the first coordinate of a uniform unit vector,
  // density proportional to sin^{d-2}(theta) on [0, pi].
  double rho = 0.0;
  for (double v : kstar) rho += v * v;
  rho = r * std::sqrt(rho);
  const int power = static_cast<int>(d) - 2;
  double num = 0.0;
  double den = 0.0;
  if (power % 2 == 0) {
    for (int j = 0; j < 2 * q; ++j) {
      const double th = std::numbers::pi * j / q;
      const double w = std::pow(std::sin(th), power);
      num += w * std::cos(rho * std::cos(th));
      den += w;
    }
  } else {
    const GaussLegendre gl(q);
    for (int m = 0; m < q; ++m) {
      const double mu = gl.nodes[m];
      const double w = gl.weights[m] * std::pow(1.0 - mu * mu, (power - 1) / 2);
      num += w * std::cos(rho * mu);
      den += w;
    }
  }
  return num / den;
}

inline int default_resolution(double rho, std::size_t d) {
  if (d == 2) return 2 * static_cast<int>(std::ceil(2.0 * (rho + 10.0)));
  return static_cast<int>(std::ceil(rho)) + 12;
}

}  // namespace detail

struct EigenEstimate {
  double lambda = 0.0;      // real part of the sphere average
  double imag = 0.0;        // imaginary part (zero by v -> -v symmetry)
  double quad_error = 0.0;  // difference to a coarser rule
  double rho = 0.0;         // r |k*|
};

/// lambda_k(r) for a torus with the given periods. Resolution q = 0 picks the
/// default 4 (r |k*| + 10) points (d = 2).
inline EigenEstimate eigenvalue_of_mode(const Mode& k, double r, const std::vector<double>& periods,
                                        int q = 0) {
  if (k.size() < 2 || k.size() != periods.size())
    throw InputError("eigenvalue_of_mode: mode and periods must have the same dimension >= 2");
  const auto kstar = dual_frequency(k, periods);
  EigenEstimate est;
  est.rho = r * frequency_norm(k, periods);
  if (q <= 0) q = detail::default_resolution(est.rho, k.size());
  const Complex fine = detail::sphere_average(kstar, r, q);
  const int coarse_q = k.size() == 2 ? std::max(2, q / 2) : std::max(2, q - 6);
  const Complex coarse = detail::sphere_average(kstar, r, coarse_q);
  est.lambda = fine.real();
  est.imag = fine.imag();
  est.quad_error = std::abs(fine - coarse);
  return est;
}

/// Convenience: periods 2 pi in every direction, so k* = k.
inline EigenEstimate eigenvalue_of_mode(const Mode& k, double r) {
  return eigenvalue_of_mode(k, r, std::vector<double>(k.size(), 2.0 * std::numbers::pi));
}

/// Fourier coefficients on the cube |k_i| <= k_max. Coefficients refer to the
/// normalized Haar measure, so <f, g> = sum f(k) conj(g(k)).
class TorusFunction {
 public:
  TorusFunction(std::vector<double> periods, int k_max)
      : periods_(std::move(periods)), k_max_(k_max) {
    if (periods_.size() < 2) throw InputError("TorusFunction needs d >= 2");
    if (k_max_ < 0) throw InputError("TorusFunction needs k_max >= 0");
    std::size_t n = 1;
    for (std::size_t i = 0; i < periods_.size(); ++i) n *= side();
    coeffs_.assign(n, Complex(0.0));
  }

  int dim() const { return static_cast<int>(periods_.size()); }
  int k_max() const { return k_max_; }
  const std::vector<double>& periods() const { return periods_; }
  std::size_t size() const { return coeffs_.size(); }
  std::size_t side() const { return static_cast<std::size_t>(2 * k_max_ + 1); }

  Mode mode(std::size_t index) const {
    Mode k(periods_.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      k[i] = static_cast<int>(index % side()) - k_max_;
      index /= side();
    }
    return k;
  }

  std::size_t index_of(const Mode& k) const {
    std::size_t idx = 0;
    for (std::size_t i = k.size(); i-- > 0;) {
      if (std::abs(k[i]) > k_max_) throw InputError("mode outside the coefficient cube");
      idx = idx * side() + static_cast<std::size_t>(k[i] + k_max_);
    }
    return idx;
  }

  Complex& operator[](std::size_t index) { return coeffs_[index]; }
  const Complex& operator[](std::size_t index) const { return coeffs_[index]; }
  Complex& at(const Mode& k) { return coeffs_[index_of(k)]; }
  const Complex& at(const Mode& k) const { return coeffs_[index_of(k)]; }

  /// f(x) = sum_k f(k) exp(i <k*, x>).
  Complex evaluate(const Eigen::VectorXd& x) const {
    Complex acc = 0.0;
    for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
      if (coeffs_[idx] == Complex(0.0)) continue;
      const auto ks = dual_frequency(mode(idx), periods_);
      double phase = 0.0;
      for (std::size_t i = 0; i < ks.size(); ++i) phase += ks[i] * x[static_cast<int>(i)];
      acc += coeffs_[idx] * std::polar(1.0, phase);
    }
    return acc;
  }

  Complex inner(const TorusFunction& g) const {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) acc += coeffs_[i] * std::conj(g.coeffs_[i]);
    return acc;
  }

  double l2_norm() const { return std::sqrt(inner(*this).real()); }

  /// f(-k) = conj f(k) for every mode.
  bool is_real(double tol = 0.0) const {
    for (std::size_t idx = 0; idx < coeffs_.size(); ++idx) {
      Mode neg = mode(idx);
      for (int& v : neg) v = -v;
      if (std::abs(coeffs_[idx] - std::conj(at(neg))) > tol) return false;
    }
    return true;
  }

  /// Chebyshev shell max_i |k_i|.
  int shell(std::size_t index) const {
    int m = 0;
    for (int v : mode(index)) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::vector<double> periods_;
  int k_max_;
  std::vector<Complex> coeffs_;
};

/// lambda_k(r) for every mode of the cube, same indexing as TorusFunction.
struct ModeTable {
  std::vector<double> periods;
  int k_max = 0;
  double r = 0.0;
  std::vector<EigenEstimate> entries;
};

inline ModeTable mode_table(const std::vector<double>& periods, int k_max, double r,
                            int workers = 1) {
  const TorusFunction layout(periods, k_max);
  ModeTable table{periods, k_max, r, std::vector<EigenEstimate>(layout.size())};
  parallel_for(layout.size(), workers, [&](std::size_t idx) {
    table.entries[idx] = eigenvalue_of_mode(layout.mode(idx), r, periods);
  });
  return table;
}

/// g(k) = lambda_k(r) f(k).
inline TorusFunction apply_operator(const TorusFunction& f, const ModeTable& table) {
  if (table.k_max != f.k_max() || table.periods != f.periods())
    throw InputError("apply_operator: mode table does not match the function");
  TorusFunction g = f;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= table.entries[i].lambda;
  return g;
}

inline TorusFunction apply_operator(const TorusFunction& f, double r, int workers = 1) {
  return apply_operator(f, mode_table(f.periods(), f.k_max(), r, workers));
}

struct SpectralResult {
  double r = 0.0;
  int k_max = 0;
  std::vector<double> periods;
  std::vector<Mode> modes;
  std::vector<EigenEstimate> entries;
  double max_abs_imag = 0.0;
  double sup_abs_lambda = 0.0;
  Mode sup_mode;
  bool norm_bound_holds = false;  // sup |lambda| <= 1 + 1e-12
  bool real_spectrum = false;     // max |Im lambda| < 1e-12
};

inline SpectralResult norm_and_selfadjointness(double r, int k_max,
                                               const std::vector<double>& periods,
                                               int workers = 1) {
  if (k_max < 1) throw InputError("norm_and_selfadjointness needs k_max >= 1");
  const TorusFunction layout(periods, k_max);
  const ModeTable table = mode_table(periods, k_max, r, workers);
  SpectralResult res;
  res.r = r;
  res.k_max = k_max;
  res.periods = periods;
  res.entries = table.entries;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    res.modes.push_back(layout.mode(i));
    const auto& e = table.entries[i];
    res.max_abs_imag = std::max(res.max_abs_imag, std::abs(e.imag));
    if (std::abs(e.lambda) > res.sup_abs_lambda) {
      res.sup_abs_lambda = std::abs(e.lambda);
      res.sup_mode = res.modes.back();
    }
  }
  res.norm_bound_holds = res.sup_abs_lambda <= 1.0 + 1e-12;
  res.real_spectrum = res.max_abs_imag < 1e-12;
  return res;
}

struct SmoothingReport {
  TorusFunction result;
  std::vector<double> input_envelope;   // max |f(k)| per Chebyshev shell
  std::vector<double> output_envelope;  // max |L_r^n f(k)| per shell
};

inline std::vector<double> shell_envelope(const TorusFunction& f) {
  std::vector<double> env(static_cast<std::size_t>(f.k_max()) + 1, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto& slot = env[static_cast<std::size_t>(f.shell(i))];
    slot = std::max(slot, std::abs(f[i]));
  }
  return env;
}

/// L_r^n f together with the per-shell coefficient envelopes.
inline SmoothingReport iterate_smoothing(const TorusFunction& f, double r, int n,
                                         int workers = 1) {
  if (n < 0) throw InputError("iterate_smoothing needs n >= 0");
  SmoothingReport rep{f, shell_envelope(f), {}};
  if (n > 0) {
    const ModeTable table = mode_table(f.periods(), f.k_max(), r, workers);
    for (int it = 0; it < n; ++it) rep.result = apply_operator(rep.result, table);
  }
  rep.output_envelope = shell_envelope(rep.result);
  return rep;
}

}  // namespace geowalk::spectral

#endif  // GEOWALK_SPECTRAL_HPP

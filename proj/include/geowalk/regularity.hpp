#ifndef GEOWALK_REGULARITY_HPP
#define GEOWALK_REGULARITY_HPP

//! \file regularity.hpp
//! Regularity of the fold normal form: the push-forward of a standard
//! Gaussian under a non-degenerate quadratic form with a positive and b
//! negative squares is Z = X - Y, X ~ chi2(a), Y ~ chi2(b) independent, with
//! characteristic function (1 - 2it)^(-a/2) (1 + 2it)^(-b/2).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "geowalk/errors.hpp"
#include "geowalk/parallel.hpp"
#include "geowalk/rng.hpp"
#include "geowalk/singularity.hpp"
#include "geowalk/walk.hpp"

namespace geowalk::regularity {

using Complex = std::complex<double>;

/// Counts of + and - squares in the quadratic part of the fold normal form.
struct QuadraticFormSpec {
  int pos_count = 0;
  int neg_count = 0;

  void validate() const {
    if (pos_count < 0 || neg_count < 0) throw InputError("square counts must be >= 0");
  }
  int total() const { return pos_count + neg_count; }
};

/// Quadratic part of the normal form at a fold: the signature of the Hessian
/// restricted to ker D_v phi, which has dimension (n-1)(d-1).
inline QuadraticFormSpec from_certificate(const FoldCertificate& cert) {
  return {cert.normal_form_pos, cert.normal_form_neg};
}

/// Principal-branch (1 - 2it)^(-a/2) (1 + 2it)^(-b/2).
inline Complex chi_diff_cf(const QuadraticFormSpec& spec, double t) {
  spec.validate();
  const Complex one_minus(1.0, -2.0 * t);
  const Complex one_plus(1.0, 2.0 * t);
  return std::pow(one_minus, -0.5 * spec.pos_count) * std::pow(one_plus, -0.5 * spec.neg_count);
}

inline double sample_one(const QuadraticFormSpec& spec, RngStream& rng) {
  double z = 0.0;
  for (int i = 0; i < spec.pos_count; ++i) {
    const double g = rng.normal();
    z += g * g;
  }
  for (int i = 0; i < spec.neg_count; ++i) {
    const double h = rng.normal();
    z -= h * h;
  }
  return z;
}

inline constexpr std::size_t kSampleBlock = 4096;

/// Z_j = sum_{i<=a} G_i^2 - sum_{i<=b} H_i^2. Block b of kSampleBlock
/// samples draws from RngStream(derive_seed(seed, b)).
inline std::vector<double> sample_chi_diff(const QuadraticFormSpec& spec, std::uint64_t seed,
                                           std::size_t count, int workers = 1) {
  spec.validate();
  if (count < 1) throw InputError("sample_chi_diff needs N >= 1");
  std::vector<double> out(count);
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    RngStream rng(derive_seed(seed, b));
    const std::size_t hi = std::min(count, (b + 1) * kSampleBlock);
    for (std::size_t j = b * kSampleBlock; j < hi; ++j) out[j] = sample_one(spec, rng);
  });
  return out;
}

inline std::vector<double> sample_chi_diff(const QuadraticFormSpec& spec, RngStream& rng,
                                           std::size_t count) {
  spec.validate();
  if (count < 1) throw InputError("sample_chi_diff needs N >= 1");
  std::vector<double> out(count);
  for (auto& z : out) z = sample_one(spec, rng);
  return out;
}

/// Empirical CF of samples with complex standard error.
inline std::vector<CfPoint> empirical_cf(const std::vector<double>& samples,
                                         const std::vector<double>& ts) {
  const double n = static_cast<double>(samples.size());
  std::vector<CfPoint> out;
  for (double t : ts) {
    Complex mean = 0.0;
    for (double z : samples) mean += std::polar(1.0, t * z);
    mean /= n;
    double ss = 0.0;
    for (double z : samples) ss += std::norm(std::polar(1.0, t * z) - mean);
    out.push_back({t, mean, samples.size() > 1 ? std::sqrt(ss / (n * (n - 1.0))) : 0.0});
  }
  return out;
}

inline std::vector<CfPoint> normal_form_pushforward_cf(const QuadraticFormSpec& spec,
                                                       const std::vector<double>& ts,
                                                       std::size_t count, std::uint64_t seed,
                                                       int workers = 1) {
  return empirical_cf(sample_chi_diff(spec, seed, count, workers), ts);
}

struct DecayFit {
  double exponent = 0.0;  // -slope of log|cf| against log t
  double intercept = 0.0;
  int points_used = 0;
};

/// Least-squares decay exponent over the upper half (in log t) of the grid.
/// The grid must span at least one decade.
inline DecayFit decay_exponent_fit(const std::vector<double>& ts,
                                   const std::vector<double>& magnitudes) {
  if (ts.size() != magnitudes.size() || ts.size() < 2)
    throw InputError("decay_exponent_fit needs matching t and |cf| arrays");
  double tmin = ts.front();
  double tmax = ts.front();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0) || !(magnitudes[i] > 0.0))
      throw InputError("decay_exponent_fit needs positive t and |cf|");
    tmin = std::min(tmin, ts[i]);
    tmax = std::max(tmax, ts[i]);
  }
  if (tmax < 10.0 * tmin) throw InputError("decay_exponent_fit needs a grid spanning a decade");
  const double cut = 0.5 * (std::log(tmin) + std::log(tmax));
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (std::log(ts[i]) < cut) continue;
    xs.push_back(std::log(ts[i]));
    ys.push_back(std::log(magnitudes[i]));
  }
  if (xs.size() < 2) throw InputError("decay_exponent_fit: too few points in the tail");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  return {-slope, my - slope * mx, static_cast<int>(xs.size())};
}

struct RegularityIndex {
  int k = 0;
  bool guaranteed = false;  // false when k < 0: the formula promises nothing
};

/// k = (n-1)(d-1)/2 - 2 for odd n (an integer, since n - 1 is even).
inline RegularityIndex regularity_index(int n, int d) {
  if (n < 1 || d < 2) throw InputError("regularity_index needs n >= 1 and d >= 2");
  if (n % 2 == 0) throw HypothesisViolated("regularity_index requires odd n");
  const int k = (n - 1) * (d - 1) / 2 - 2;
  return {k, k >= 0};
}

}  // namespace geowalk::regularity

#endif  // GEOWALK_REGULARITY_HPP

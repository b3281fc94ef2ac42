// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "geowalk/geowalk.hpp"

using namespace geowalk;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec unit2(double a, double b) { return (Vec(2) << a, b).finished(); }

SignPattern random_signs(int n, RngStream& rng) {
  SignPattern s(n);
  for (auto& v : s) v = rng.uniform() < 0.5 ? -1 : 1;
  return s;
}

Vec free_velocity(const SignPattern& signs, int d, Anchor anchor, RngStream& rng) {
  Vec w = Vec::Zero(static_cast<int>(signs.size()) * (d - 1));
  for (std::size_t i = 0; i < signs.size(); ++i) {
    const bool free = anchor == Anchor::P ? signs[i] > 0 : signs[i] < 0;
    if (!free) continue;
    for (int j = 0; j < d - 1; ++j) w[static_cast<int>(i) * (d - 1) + j] = rng.normal();
  }
  return w;
}

std::vector<ModelSpace> scan_spaces(int d) {
  return {ModelSpace::euclidean(d), ModelSpace::hyperbolic(d, 1.0)};
}

// 1 ------------------------------------------------------------------------
Outcome singular_set(int workers) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  int singular = 0;
  int sign_total = 0;
  int sign_ok = 0;
  double min_ratio = 1.0;
  double max_null = 0.0;
  double min_second = 1.0;
  std::uint64_t seed = 1000;
  for (int d : {2, 3}) {
    for (int n = 2; n <= 5; ++n) {
      for (const auto& s : scan_spaces(d)) {
        const ScanConfig cfg{s, origin(s), 1.0, n, 10000, 100, ++seed, workers};
        const auto summary = singular_set_scan(cfg);
        singular += summary.random_singular;
        sign_total += summary.sign_tuples;
        sign_ok += summary.sign_corank_one;
        min_ratio = std::min(min_ratio, summary.min_random_ratio);
        max_null = std::max(max_null, summary.max_sign_null_ratio);
        min_second = std::min(min_second, summary.min_sign_second_ratio);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  out.detail << "random singular " << singular << "/160000, min s_min/s_max " << min_ratio
             << "; sign tuples corank 1 " << sign_ok << "/" << sign_total << " (max null ratio "
             << max_null << ", min s_{d-1}/s_max " << min_second << "); " << elapsed << " s";
  out.require(singular == 0, "random tuples singular");
  out.require(sign_ok == sign_total, "sign tuple corank != 1");
  out.require(elapsed < 120.0, "runtime >= 2 min");
  return out;
}

// 2, 3 --------------------------------------------------------------------
struct CertificateSweep {
  int total = 0;
  int transversal = 0;
  int signature = 0;
  int odd_total = 0;
  int odd_fold = 0;
  double min_eig_ratio = 1.0;
};

CertificateSweep sweep_certificates(int v0_per_pattern) {
  CertificateSweep sw;
  RngStream rng(2024);
  for (int d : {2, 3}) {
    for (int n = 2; n <= 5; ++n) {
      for (const auto& s : scan_spaces(d)) {
        const auto x = origin(s);
        for (const auto& signs : all_sign_patterns(n)) {
          for (int k = 0; k < v0_per_pattern; ++k) {
            const auto cert = hessian_at_singular(s, x, 1.0, signs, sample_unit_direction(s, x, rng));
            ++sw.total;
            sw.transversal += cert.transversal;
            sw.signature += cert.signature_matches;
            sw.min_eig_ratio = std::min(sw.min_eig_ratio, cert.min_abs_eig_ratio);
            if (n % 2 == 1) {
              ++sw.odd_total;
              sw.odd_fold += cert.is_fold;
            }
          }
        }
      }
    }
  }
  return sw;
}

Outcome transversality(const CertificateSweep& sw) {
  Outcome out;
  out.detail << "transversal " << sw.transversal << "/" << sw.total << ", signature match "
             << sw.signature << "/" << sw.total << ", min |eig| ratio " << sw.min_eig_ratio;
  out.require(sw.transversal == sw.total, "non-transversal certificate");
  out.require(sw.signature == sw.total, "signature mismatch");
  return out;
}

Outcome fold_parity(const CertificateSweep& sw) {
  Outcome out;
  out.detail << "odd n folds " << sw.odd_fold << "/" << sw.odd_total;
  out.require(sw.odd_fold == sw.odd_total, "odd-n certificate not a fold");
  RngStream rng(303);
  for (int d : {2, 3}) {
    for (const auto& s : scan_spaces(d)) {
      const auto x = origin(s);
      std::vector<TangentVector> v0s;
      for (int i = 0; i < 20; ++i) v0s.push_back(sample_unit_direction(s, x, rng));
      bool meets = true;
      bool not_fold = true;
      for (const auto& v0 : v0s) {
        const auto cert = hessian_at_singular(s, x, 1.0, {1, -1}, v0);
        meets = meets && cert.kernel_meets_stratum;
        not_fold = not_fold && !cert.is_fold;
      }
      const auto imm = immersion_check(s, x, 1.0, {1, -1}, v0s);
      out.detail << "; " << to_string(s.kind) << " d=" << d << " (+,-): kernel meets stratum "
                 << (meets ? "yes" : "no") << ", restriction s_min " << imm.min_singular_value;
      out.require(meets, "n=2 kernel does not meet stratum");
      out.require(not_fold, "n=2 certificate marked fold");
      out.require(imm.min_singular_value < 1e-9, "n=2 restriction not constant");
    }
  }
  return out;
}

// 4 ------------------------------------------------------------------------
Outcome acceleration() {
  Outcome out;
  const auto e2 = ModelSpace::euclidean(2);
  const auto x = origin(e2);
  const VpqCurve closed(e2, x, 1.0, {1, -1}, {x, unit2(1, 0)}, Anchor::P, unit2(1, 0));
  const double value = acceleration_check(closed);
  const double oracle = -4.0 / std::sqrt(17.0 + 8.0);
  out.detail << "closed form " << value << " (oracle " << oracle << ")";
  out.require(std::abs(value - oracle) < 1e-6, "Euclidean closed form");
  RngStream rng(404);
  for (const bool hyperbolic : {false, true}) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      const int d = 2 + trial % 2;
      const auto s = hyperbolic ? ModelSpace::hyperbolic(d, 1.0) : ModelSpace::euclidean(d);
      const auto p = origin(s);
      const int n = 2 + trial % 4;
      const Anchor anchor = rng.uniform() < 0.5 ? Anchor::P : Anchor::Q;
      auto signs = random_signs(n, rng);
      signs[static_cast<std::size_t>(rng.uniform() * n)] = anchor == Anchor::P ? 1 : -1;
      const VpqCurve curve(s, p, 1.0, signs, sample_unit_direction(s, p, rng), anchor,
                           free_velocity(signs, d, anchor, rng));
      worst = std::max(worst, acceleration_check(curve));
    }
    out.detail << "; " << (hyperbolic ? "hyperbolic" : "euclidean") << " max second derivative "
               << worst;
    out.require(worst < -1e-8, "non-negative acceleration");
  }
  return out;
}

// 5 ------------------------------------------------------------------------
Outcome comparison() {
  Outcome out;
  RngStream rng(505);
  double worst_construct = 0.0;
  double worst_flat = 0.0;
  double worst_straight = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = 0.25 + 2.0 * rng.uniform();
    const double r = 0.1 + 2.0 * rng.uniform();
    const double R = 0.1 + 5.0 * rng.uniform();
    const double alpha = kPi * rng.uniform();
    const auto s = ModelSpace::hyperbolic(2 + trial % 2, a);
    worst_construct = std::max(worst_construct, std::abs(toponogov_bound(a, r, R, alpha) -
                                                         constructed_triangle_side(s, r, R, alpha)));
    const double flat = std::sqrt(r * r + R * R - 2.0 * r * R * std::cos(alpha));
    worst_flat = std::max(worst_flat, std::abs(toponogov_bound(1e-6, r, R, alpha) - flat) / flat);
    worst_straight = std::max(worst_straight, std::abs(toponogov_bound(a, r, R, kPi) - (R + r)));
  }
  // the s = 0 configuration of a V_p curve: straight continuation away from p
  double worst_config = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = ModelSpace::hyperbolic(2 + trial % 2, 1.0);
    const auto x = origin(s);
    const int n = 2 + trial % 4;
    auto signs = random_signs(n, rng);
    signs[static_cast<std::size_t>(trial % n)] = 1;
    const VpqCurve curve(s, x, 1.0, signs, sample_unit_direction(s, x, rng), Anchor::P,
                         free_velocity(signs, s.dim, Anchor::P, rng));
    const auto fit = angle_linearity_check(curve, 0.1, 3);
    const int k = fit.corner;
    const auto traj = broken_geodesic(curve.at(0.0));
    const double R = distance(s, curve.anchor_point(), traj.breakpoints[k]);
    const double f = distance(s, curve.anchor_point(), traj.breakpoints[k + 1]);
    worst_config = std::max(worst_config, std::abs(toponogov_bound(1.0, 1.0, R, std::min(kPi, fit.angles[1])) - (R + 1.0)));
    worst_config = std::max(worst_config, std::abs(f - (R + 1.0)));
  }
  out.detail << "max |bound - constructed| " << worst_construct << ", a=1e-6 max rel gap "
             << worst_flat << ", alpha=pi max |bound - (R+r)| " << worst_straight
             << ", s=0 configuration max gap " << worst_config;
  out.require(worst_construct < 1e-9, "bound != constructed side");
  out.require(worst_flat < 1e-6, "a -> 0 limit");
  out.require(worst_straight < 1e-9 && worst_config < 1e-9, "alpha = pi case != R + r");
  return out;
}

// 6 ------------------------------------------------------------------------
Outcome first_variation() {
  Outcome out;
  RngStream rng(606);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = ModelSpace::hyperbolic(2 + trial % 2, 1.0);
    const auto x = origin(s);
    const int n = 2 + trial % 5;
    DirectionTuple v{s, x, 0.5 + rng.uniform(), {}};
    for (int i = 0; i < n; ++i) v.dirs.push_back(sample_unit_direction(s, x, rng));
    const int k = static_cast<int>(rng.uniform() * n);
    Vec w(n * (s.dim - 1));
    for (int i = 0; i < w.size(); ++i) w[i] = rng.normal();
    const auto fv = first_variation_check(v, k, w);
    worst = std::max(worst, std::abs(fv.at_start - fv.at_end));
  }
  out.detail << "max |g(J(a),a') - g(J(b),b')| " << worst;
  out.require(worst < 1e-6, "first variation mismatch");
  return out;
}

// 7 ------------------------------------------------------------------------
Outcome spectrum(int workers) {
  using namespace geowalk::spectral;
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> square{2 * kPi, 2 * kPi};
  const double lambda = eigenvalue_of_mode({1, 0}, 1.0, square).lambda;
  double oracle = 0.0;
  const int points = 20000;
  for (int i = 0; i < points; ++i) oracle += std::cos(std::cos(2 * kPi * (i + 0.5) / points));
  oracle /= points;
  const auto res = norm_and_selfadjointness(1.0, 50, square, workers);

  RngStream rng(707);
  const int k_max = 50;
  const ModeTable table{res.periods, k_max, 1.0, res.entries};
  auto random_real = [&] {
    TorusFunction f(square, k_max);
    for (std::size_t i = 0; i < f.size(); ++i) {
      Mode neg = f.mode(i);
      for (int& v : neg) v = -v;
      const std::size_t j = f.index_of(neg);
      if (j < i) continue;
      f[i] = j == i ? Complex(rng.normal()) : Complex(rng.normal(), rng.normal());
      f[j] = std::conj(f[i]);
    }
    return f;
  };
  double worst_adjoint = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_real();
    const auto g = random_real();
    const Complex left = apply_operator(f, table).inner(g);
    const Complex right = f.inner(apply_operator(g, table));
    worst_adjoint = std::max(worst_adjoint, std::abs(left - right) / (1.0 + std::abs(left)));
  }
  const double elapsed = seconds_since(t0);
  out.detail.precision(12);
  out.detail << "lambda(1,0) " << lambda << " (oracle " << oracle << "), sup|lambda| "
             << res.sup_abs_lambda << ", max|Im| " << res.max_abs_imag << ", adjoint gap "
             << worst_adjoint << "; " << elapsed << " s";
  out.require(std::abs(lambda - 0.7651976866) < 1e-8, "lambda(1,0) value");
  out.require(std::abs(lambda - oracle) < 1e-8, "lambda(1,0) vs quadrature");
  out.require(res.sup_abs_lambda <= 1.0 + 1e-12, "norm bound");
  out.require(res.max_abs_imag < 1e-12, "imaginary eigenvalue");
  out.require(worst_adjoint < 1e-12, "self-adjointness");
  out.require(elapsed < 30.0, "runtime >= 30 s");
  return out;
}

// 8 ------------------------------------------------------------------------
Outcome normal_form(int workers) {
  using namespace geowalk::regularity;
  Outcome out;
  double worst_modulus = 0.0;
  for (const QuadraticFormSpec spec : {QuadraticFormSpec{1, 0}, {2, 2}, {3, 3}, {4, 1}, {0, 6}}) {
    for (int i = -400; i <= 400; ++i) {
      const double t = 0.1 * i;
      worst_modulus = std::max(worst_modulus, std::abs(std::abs(chi_diff_cf(spec, t)) -
                                                       std::pow(1 + 4 * t * t, -spec.total() / 4.0)));
    }
  }
  const QuadraticFormSpec mc{3, 3};
  const auto cf = normal_form_pushforward_cf(mc, {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}, 1000000, 808, workers);
  double worst_z = 0.0;
  for (const auto& p : cf) worst_z = std::max(worst_z, std::abs(p.value - chi_diff_cf(mc, p.t)) / p.stderr_);

  double worst_decay = 0.0;
  std::vector<double> ts;
  for (int i = 0; i <= 60; ++i) ts.push_back(0.1 * std::pow(1000.0, i / 60.0));
  for (const QuadraticFormSpec spec : {QuadraticFormSpec{1, 0}, {2, 2}, {3, 3}, {4, 4}, {2, 1}}) {
    std::vector<double> mags;
    for (double t : ts) mags.push_back(std::abs(chi_diff_cf(spec, t)));
    const double expected = spec.total() / 2.0;
    worst_decay = std::max(worst_decay, std::abs(decay_exponent_fit(ts, mags).exponent - expected) / expected);
  }
  const int k33 = regularity_index(3, 3).k;
  const int k53 = regularity_index(5, 3).k;
  const int k32 = regularity_index(3, 2).k;
  out.detail << "max modulus gap " << worst_modulus << ", MC max |dev|/stderr " << worst_z
             << ", max decay rel err " << worst_decay << ", k = " << k33 << ", " << k53 << ", " << k32;
  out.require(worst_modulus < 1e-12, "modulus identity");
  out.require(worst_z <= 3.0, "MC outside 3 stderr");
  out.require(worst_decay < 0.05, "decay exponent");
  out.require(k33 == 0 && k53 == 2 && k32 == -1, "regularity index");
  return out;
}

// 9 ------------------------------------------------------------------------
Outcome walk_consistency() {
  Outcome out;
  RngStream rng(909);
  double worst_replay = 0.0;
  for (const auto& s : {ModelSpace::euclidean(2), ModelSpace::euclidean(3), ModelSpace::hyperbolic(2, 1.0),
                        ModelSpace::hyperbolic(3, 1.0), ModelSpace::flat_torus({2 * kPi, 3.0})}) {
    for (int trial = 0; trial < 200; ++trial) {
      const WalkConfig cfg{s, origin(s), 0.3 + rng.uniform(), 1 + trial % 10, 1, 0, 1};
      const auto path = run_walk(cfg, rng, true);
      worst_replay = std::max(worst_replay, distance(s, phi_endpoint(*path.directions), path.points.back()));
    }
  }
  bool identical = true;
  for (const auto& s : {ModelSpace::euclidean(2), ModelSpace::hyperbolic(2, 1.0), ModelSpace::flat_torus({1.0, 2.0})}) {
    WalkConfig cfg{s, origin(s), 1.0, 50, 2000, 31337, 1};
    const auto one = run_ensemble(cfg);
    for (int w : {2, 3, 8}) {
      cfg.workers = w;
      const auto many = run_ensemble(cfg);
      for (std::size_t i = 0; i < one.endpoints.size(); ++i)
        identical = identical && one.endpoints[i].coords == many.endpoints[i].coords;
    }
  }
  const auto e2 = ModelSpace::euclidean(2);
  const auto ens = run_ensemble({e2, origin(e2), 1.0, 3, 1000000, 99, default_workers()});
  std::vector<double> ts;
  for (int i = 0; i <= 80; ++i) ts.push_back(0.25 * i);
  const auto cf = empirical_cf(ens, ts, unit2(1, 0));
  double worst_z = 0.0;
  for (const auto& p : cf) {
    double j0 = 0.0;
    const int points = 4096;
    for (int i = 0; i < points; ++i) j0 += std::cos(p.t * std::cos(2 * kPi * (i + 0.5) / points));
    j0 /= points;
    const double gap = std::abs(p.value - std::pow(j0, 3));
    worst_z = std::max(worst_z, p.stderr_ > 0 ? gap / p.stderr_ : (gap == 0 ? 0.0 : 1e300));
  }
  out.detail << "max replay gap " << worst_replay << ", worker-count bit identity "
             << (identical ? "yes" : "no") << ", CF max |dev|/stderr " << worst_z;
  out.require(worst_replay < 1e-9, "replay mismatch");
  out.require(identical, "ensembles differ across worker counts");
  out.require(worst_z <= 3.0, "CF outside 3 stderr");
  return out;
}

// 10 -----------------------------------------------------------------------
Outcome escape(int workers) {
  Outcome out;
  const auto h2 = ModelSpace::hyperbolic(2, 1.0);
  const auto hyp = escape_rate({h2, origin(h2), 1.0, 200, 2000, 1010, workers});
  const auto e2 = ModelSpace::euclidean(2);
  const auto flat = escape_rate({e2, origin(e2), 1.0, 200, 2000, 1011, workers});
  out.detail << "hyperbolic slope " << hyp.slope << " CI [" << hyp.ci_low << ", " << hyp.ci_high
             << "]; Euclidean mean^2 ~ n slope " << flat.sqrt_scaling_slope << " R^2 "
             << flat.sqrt_scaling_r2;
  out.require(hyp.slope > 0.0 && hyp.ci_low > 0.0, "hyperbolic CI includes 0");
  out.require(flat.sqrt_scaling_r2 > 0.99, "Euclidean diffusive scaling");
  return out;
}

}  // namespace

int main() {
  const int workers = default_workers();
  std::printf("geowalk %s acceptance, %d worker(s)\n", kVersion, workers);
  std::fflush(stdout);
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.str().c_str());
    std::fflush(stdout);
  };
  report(1, "singular set", [&] { return singular_set(workers); });
  CertificateSweep sweep;
  report(2, "transversality and signature", [&] {
    sweep = sweep_certificates(10);
    return transversality(sweep);
  });
  report(3, "fold for odd n, failure for n = 2", [&] { return fold_parity(sweep); });
  report(4, "acceleration", acceleration);
  report(5, "comparison triangle", comparison);
  report(6, "first variation", first_variation);
  report(7, "torus spectrum", [&] { return spectrum(workers); });
  report(8, "normal-form regularity", [&] { return normal_form(workers); });
  report(9, "walk/phi consistency and determinism", walk_consistency);
  report(10, "hyperbolic escape", [&] { return escape(workers); });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

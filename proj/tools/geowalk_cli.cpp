// geowalk command-line front end.
//
//   geowalk walk | singular | fold | spectrum | regularity | toponogov [flags]
//
// Exit codes: 0 all checks pass (or expected failure annotated), 1 claim
// violation, 2 usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geowalk/geowalk.hpp"

namespace fs = std::filesystem;
using namespace geowalk;
using io::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string space = "euclidean";
  int d = 2;
  double a = 1.0;
  std::vector<double> periods;
  std::uint64_t seed = 1;
  int workers = default_workers();
  std::string out = ".";
  std::string config;
  std::vector<std::string> tol;
  Tolerances tolerances;

  ModelSpace model() const {
    if (space == "euclidean") return ModelSpace::euclidean(d);
    if (space == "hyperbolic") return ModelSpace::hyperbolic(d, a);
    auto p = periods.empty() ? std::vector<double>(static_cast<std::size_t>(d), 2 * kPi) : periods;
    if (static_cast<int>(p.size()) != d) throw UsageError("--periods needs exactly d values");
    return ModelSpace::flat_torus(std::move(p));
  }

  json to_json() const {
    return {{"space", io::space_json(model())},
            {"master_seed", seed},
            {"workers", workers},
            {"tolerances", io::tolerances_json(tolerances)}};
  }
};

void add_common(CLI::App* cmd, Common& c, bool geometry = true) {
  if (geometry) {
    cmd->add_option("--space", c.space, "euclidean | hyperbolic | torus")
        ->check(CLI::IsMember({"euclidean", "hyperbolic", "torus"}));
    cmd->add_option("--d", c.d, "dimension");
    cmd->add_option("--a", c.a, "hyperbolic curvature scale (curvature -a^2)");
    cmd->add_option("--periods", c.periods, "torus periods")->expected(1, -1);
  }
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--workers", c.workers, "worker threads (default $GEOWALK_WORKERS)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--config", c.config, "JSON file whose keys override flags");
  cmd->add_option("--tol", c.tol, "tolerance override name=value")->expected(1, -1);
}

void set_tolerance(Tolerances& t, const std::string& name, double v) {
  static const std::map<std::string, double Tolerances::*> fields{
      {"unit_norm", &Tolerances::unit_norm},
      {"base_match", &Tolerances::base_match},
      {"hyperboloid", &Tolerances::hyperboloid},
      {"tangent", &Tolerances::tangent},
      {"torus_tie", &Tolerances::torus_tie},
      {"rank", &Tolerances::rank},
      {"nondegenerate", &Tolerances::nondegenerate},
      {"critical_gradient", &Tolerances::critical_gradient},
      {"jacobian_step", &Tolerances::jacobian_step},
      {"hessian_step", &Tolerances::hessian_step},
      {"acceleration_step", &Tolerances::acceleration_step},
      {"chart_radius", &Tolerances::chart_radius},
      {"degenerate_aim", &Tolerances::degenerate_aim}};
  const auto it = fields.find(name);
  if (it == fields.end()) throw UsageError("unknown tolerance \"" + name + "\"");
  t.*(it->second) = v;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

/// Replaces option values with the entries of the --config file.
void apply_config(CLI::App* cmd, Common& c) {
  if (c.config.empty()) return;
  std::ifstream in(c.config);
  if (!in) throw UsageError("cannot read config file " + c.config);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("malformed config file: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "tolerances") {
      if (!value.is_object()) throw UsageError("\"tolerances\" must be an object");
      for (const auto& [name, v] : value.items()) {
        if (!v.is_number()) throw UsageError("tolerance \"" + name + "\" must be a number");
        set_tolerance(c.tolerances, name, v.get<double>());
      }
      continue;
    }
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "config") continue;
    CLI::Option* opt = cmd->get_option_no_throw("--" + flag);
    if (opt == nullptr) throw UsageError("unknown config key \"" + key + "\"");
    opt->clear();
    if (value.is_array()) {
      for (const auto& e : value) opt->add_result(scalar_text(e));
    } else {
      opt->add_result(scalar_text(value));
    }
    opt->run_callback();
  }
}

void finish_common(CLI::App* cmd, Common& c) {
  apply_config(cmd, c);
  for (const auto& entry : c.tol) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects name=value, got \"" + entry + "\"");
    try {
      set_tolerance(c.tolerances, entry.substr(0, eq), std::stod(entry.substr(eq + 1)));
    } catch (const std::logic_error&) {
      throw UsageError("--tol value is not a number: \"" + entry + "\"");
    }
  }
  if (c.workers < 1) throw UsageError("--workers must be >= 1");
  fs::create_directories(c.out);
}

std::ofstream open_output(const Common& c, const std::string& name) {
  const fs::path path = fs::path(c.out) / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  std::cout << "wrote " << path.string() << "\n";
  return os;
}

void write_json(const Common& c, const std::string& name, const json& config, const json& body) {
  auto os = open_output(c, name);
  os << io::header_line(config) << body.dump(2) << "\n";
}

/// One summary line per claim; returns ok.
bool claim(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  return ok;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return out;
}

// ---------------------------------------------------------------------------

struct WalkArgs {
  Common c;
  double r = 1.0;
  int steps = 10;
  int samples = 10000;
  int bins = 50;
  bool cf = false;
  double t_max = 20.0;
  int t_count = 81;
};

int cmd_walk(WalkArgs& w) {
  const ModelSpace s = w.c.model();
  const WalkConfig cfg{s, origin(s), w.r, w.steps, w.samples, w.c.seed, w.c.workers};
  json config = w.c.to_json();
  config.update({{"subcommand", "walk"}, {"r", w.r}, {"steps", w.steps}, {"samples", w.samples},
                 {"bins", w.bins}, {"cf", w.cf}, {"t_max", w.t_max}, {"t_count", w.t_count}});
  if (w.cf && s.is_hyperbolic())
    throw UnsupportedGeometry("--cf needs a Euclidean or torus ensemble");
  const auto ens = run_ensemble(cfg);
  {
    auto os = open_output(w.c, "walk_ensemble.csv");
    io::write_ensemble_csv(os, ens, config);
  }
  const auto hist = radial_histogram(ens, w.bins);
  {
    auto os = open_output(w.c, "walk_histogram.csv");
    io::write_histogram_csv(os, hist, config);
  }
  double max_dist = 0.0;
  for (const auto& e : ens.endpoints) max_dist = std::max(max_dist, distance(s, cfg.start, e));
  bool ok = claim(max_dist <= w.steps * w.r * (1 + 1e-9) + 1e-12, "distance bound",
                  "max distance " + fmt(max_dist) + " <= n r = " + fmt(w.steps * w.r));
  if (w.cf) {
    Vec u = Vec::Zero(s.ambient_dim());
    u[0] = 1.0;
    const auto cf = empirical_cf(ens, linear_grid(0.0, w.t_max, w.t_count), u);
    auto os = open_output(w.c, "walk_cf.csv");
    io::write_cf_csv(os, cf, config);
    if (s.kind == SpaceKind::Euclidean && s.dim == 2) {
      double worst = 0.0;
      for (const auto& p : cf) {
        const double exact = std::pow(std::cyl_bessel_j(0.0, p.t * w.r), w.steps);
        if (p.stderr_ > 0) worst = std::max(worst, std::abs(p.value - exact) / p.stderr_);
      }
      std::cout << "info: CF vs J0(t r)^n, max |dev|/stderr " << fmt(worst) << "\n";
    }
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct SingularArgs {
  Common c;
  double r = 1.0;
  int n = 3;
  int samples = 10000;
  int sign_samples = 100;
};

int cmd_singular(SingularArgs& g) {
  const ModelSpace s = g.c.model();
  const ScanConfig cfg{s, origin(s), g.r, g.n, g.samples, g.sign_samples, g.c.seed, g.c.workers};
  json config = g.c.to_json();
  config.update({{"subcommand", "singular"}, {"r", g.r}, {"n", g.n}, {"samples", g.samples},
                 {"sign_samples", g.sign_samples}});
  const auto sum = singular_set_scan(cfg, g.c.tolerances);
  write_json(g.c, "singular.json", config, io::to_json(sum));
  bool ok = claim(sum.random_tuples_regular(), "random tuples regular",
                  std::to_string(sum.random_singular) + "/" + std::to_string(sum.random_samples) +
                      " singular, " + std::to_string(sum.random_singular_off_stratum) +
                      " off the sign stratum, min s_min/s_max " + fmt(sum.min_random_ratio));
  ok &= claim(sum.sign_tuples_corank_one(), "sign tuples corank 1",
              std::to_string(sum.sign_corank_one) + "/" + std::to_string(sum.sign_tuples) +
                  ", max null ratio " + fmt(sum.max_sign_null_ratio));
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct FoldArgs {
  Common c;
  double r = 1.0;
  int n = 3;
  int v0_samples = 5;
  std::string signs;
};

int cmd_fold(FoldArgs& f) {
  const ModelSpace s = f.c.model();
  const ManifoldPoint x = origin(s);
  std::vector<SignPattern> patterns;
  if (f.signs.empty()) {
    patterns = all_sign_patterns(f.n);
  } else {
    try {
      patterns = {parse_sign_pattern(f.signs)};
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
    f.n = static_cast<int>(patterns[0].size());
  }
  json config = f.c.to_json();
  config.update({{"subcommand", "fold"}, {"r", f.r}, {"n", f.n}, {"v0_samples", f.v0_samples},
                 {"signs", f.signs}});
  if (f.v0_samples < 1) throw InputError("--v0-samples must be >= 1");

  RngStream rng(f.c.seed);
  json certs = json::array();
  int total = 0, transversal = 0, folds = 0;
  int balanced = 0, balanced_folds = 0, unbalanced = 0, unbalanced_folds = 0;
  double min_restriction = std::numeric_limits<double>::infinity();
  for (const auto& signs : patterns) {
    std::vector<TangentVector> v0s;
    for (int i = 0; i < f.v0_samples; ++i) v0s.push_back(sample_unit_direction(s, x, rng));
    for (const auto& v0 : v0s) {
      const auto cert = hessian_at_singular(s, x, f.r, signs, v0, f.c.tolerances);
      certs.push_back(io::to_json(cert));
      ++total;
      transversal += cert.transversal && cert.signature_matches;
      folds += cert.is_fold;
      if (sign_sum(signs) == 0) {
        ++balanced;
        balanced_folds += cert.is_fold;
      } else {
        ++unbalanced;
        unbalanced_folds += cert.is_fold;
      }
    }
    if (sign_sum(signs) == 0)
      min_restriction = std::min(
          min_restriction, immersion_check(s, x, f.r, signs, v0s, f.c.tolerances).min_singular_value);
  }
  write_json(f.c, "fold.json", config, certs);

  const auto count = [](int a, int b) { return std::to_string(a) + "/" + std::to_string(b); };
  bool ok = claim(transversal == total, "transversality",
                  count(transversal, total) + " certificates transversal with the predicted signature");
  if (f.n % 2 == 1) {
    ok &= claim(folds == total, "fold", count(folds, total) + " certificates are folds");
  } else {
    if (unbalanced > 0)
      std::cout << "info: fold on non-balanced components " << count(unbalanced_folds, unbalanced)
                << "\n";
    if (balanced > 0) {
      const bool pass = balanced_folds == balanced;
      claim(pass, "fold on sum(sigma)=0 components",
            count(balanced_folds, balanced) + " certificates are folds, restriction min singular value " +
                fmt(min_restriction) +
                (pass ? "" : " (expected failure: the fold property is claimed only for odd n)"));
    }
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
  Common c;
  double r = 1.0;
  int k_max = 50;
};

int cmd_spectrum(SpectrumArgs& a) {
  using namespace geowalk::spectral;
  if (a.c.space != "torus" && a.c.space != "euclidean")
    throw UnsupportedGeometry("spectrum is defined on the flat torus");
  a.c.space = "torus";
  const ModelSpace s = a.c.model();
  json config = a.c.to_json();
  config.update({{"subcommand", "spectrum"}, {"r", a.r}, {"k_max", a.k_max}});
  const auto res = norm_and_selfadjointness(a.r, a.k_max, s.periods, a.c.workers);
  {
    auto os = open_output(a.c, "spectrum.csv");
    io::write_spectrum_csv(os, res, config);
  }
  Mode first(static_cast<std::size_t>(s.dim), 0);
  first[0] = 1;
  std::printf("lambda(1,0,...) = %.10f\n", eigenvalue_of_mode(first, a.r, s.periods).lambda);
  std::fflush(stdout);

  const ModeTable table{res.periods, res.k_max, res.r, res.entries};
  RngStream rng(a.c.seed);
  auto random_real = [&] {
    TorusFunction f(s.periods, a.k_max);
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
  double adjoint_gap = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_real();
    const auto g = random_real();
    const Complex left = apply_operator(f, table).inner(g);
    adjoint_gap = std::max(adjoint_gap, std::abs(left - f.inner(apply_operator(g, table))) /
                                            (1.0 + std::abs(left)));
  }
  bool ok = claim(res.norm_bound_holds, "norm bound", "sup |lambda| = " + fmt(res.sup_abs_lambda));
  ok &= claim(res.real_spectrum, "real spectrum", "max |Im lambda| = " + fmt(res.max_abs_imag));
  ok &= claim(adjoint_gap < 1e-12, "self-adjointness", "max relative gap " + fmt(adjoint_gap));
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct RegularityArgs {
  Common c;
  int n = 3;
  std::string signs;
  int samples = 1000000;
  std::vector<double> t{0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
};

int cmd_regularity(RegularityArgs& g) {
  using namespace geowalk::regularity;
  if (g.c.space == "torus") throw UnsupportedGeometry("regularity needs a Euclidean or hyperbolic base");
  SignPattern signs(static_cast<std::size_t>(g.n), 1);
  if (!g.signs.empty()) {
    try {
      signs = parse_sign_pattern(g.signs);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
    g.n = static_cast<int>(signs.size());
  }
  json config = g.c.to_json();
  config.update({{"subcommand", "regularity"}, {"n", g.n}, {"signs", format_sign_pattern(signs)},
                 {"samples", g.samples}, {"t", g.t}});
  const auto index = regularity_index(g.n, g.c.d);
  std::cout << "k=" << index.k << (index.guaranteed ? "" : " (negative: no smoothness guaranteed)")
            << "\n";

  const ModelSpace s = g.c.model();
  const ManifoldPoint x = origin(s);
  const auto cert = hessian_at_singular(s, x, 1.0, signs, orthonormal_frame(s, x).front(), g.c.tolerances);
  const QuadraticFormSpec spec = from_certificate(cert);
  std::cout << "normal form: " << spec.pos_count << " positive, " << spec.neg_count << " negative squares\n";
  bool ok = claim(cert.is_fold && spec.total() == (g.n - 1) * (g.c.d - 1), "normal form rank",
                  std::to_string(spec.total()) + " squares, expected " +
                      std::to_string((g.n - 1) * (g.c.d - 1)));

  const auto cf = normal_form_pushforward_cf(spec, g.t, static_cast<std::size_t>(g.samples), g.c.seed,
                                             g.c.workers);
  {
    auto os = open_output(g.c, "regularity.csv");
    io::write_regularity_csv(os, spec, cf, config);
  }
  double modulus_gap = 0.0, worst_z = 0.0;
  for (const auto& p : cf) {
    const Complex exact = chi_diff_cf(spec, p.t);
    modulus_gap = std::max(modulus_gap, std::abs(std::abs(exact) - std::pow(1 + 4 * p.t * p.t, -spec.total() / 4.0)));
    const double dev = std::abs(p.value - exact);
    worst_z = std::max(worst_z, p.stderr_ > 0 ? dev / p.stderr_ : (dev == 0 ? 0.0 : HUGE_VAL));
  }
  std::vector<double> ts, mags;
  for (int i = 0; i <= 60; ++i) {
    ts.push_back(0.1 * std::pow(1000.0, i / 60.0));
    mags.push_back(std::abs(chi_diff_cf(spec, ts.back())));
  }
  const double expected = spec.total() / 2.0;
  const double exponent = decay_exponent_fit(ts, mags).exponent;
  ok &= claim(modulus_gap < 1e-12, "modulus identity", "max gap " + fmt(modulus_gap));
  ok &= claim(worst_z <= 3.0, "Monte Carlo characteristic function", "max |dev|/stderr " + fmt(worst_z));
  ok &= claim(std::abs(exponent - expected) <= 0.05 * expected, "decay exponent",
              fmt(exponent) + " vs (a+b)/2 = " + fmt(expected));
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct ToponogovArgs {
  Common c;
  double r = 1.0;
  double R = 2.0;
  int alpha_count = 181;
};

int cmd_toponogov(ToponogovArgs& t) {
  const double a = t.c.a;
  const ModelSpace s = a > 0.0 ? ModelSpace::hyperbolic(t.c.d, a) : ModelSpace::euclidean(t.c.d);
  if (t.alpha_count < 2) throw InputError("--alpha-count must be >= 2");
  json config{{"subcommand", "toponogov"},
              {"space", io::space_json(s)},
              {"r", t.r},
              {"R", t.R},
              {"alpha_count", t.alpha_count},
              {"tolerances", io::tolerances_json(t.c.tolerances)}};
  auto os = open_output(t.c, "toponogov.csv");
  os << io::header_line(config) << "alpha,bound,constructed,euclidean\n";
  bool monotone = true;
  double construct_gap = 0.0, below_flat = 0.0, prev = -1.0, last = 0.0;
  for (const double alpha : linear_grid(0.0, kPi, t.alpha_count)) {
    const double bound = toponogov_bound(a, t.r, t.R, alpha);
    const double built = constructed_triangle_side(s, t.r, t.R, alpha);
    const double flat = std::sqrt(std::max(0.0, t.r * t.r + t.R * t.R - 2 * t.r * t.R * std::cos(alpha)));
    os << io::num(alpha) << ',' << io::num(bound) << ',' << io::num(built) << ',' << io::num(flat) << "\n";
    monotone = monotone && bound >= prev;
    prev = bound;
    last = bound;
    construct_gap = std::max(construct_gap, std::abs(bound - built));
    below_flat = std::max(below_flat, flat - bound);
  }
  bool ok = claim(monotone, "monotone in alpha", "bound non-decreasing on [0, pi]");
  ok &= claim(construct_gap < 1e-9, "constructed side", "max |bound - constructed| " + fmt(construct_gap));
  ok &= claim(below_flat <= 1e-12 * (t.r + t.R), "comparison with flat triangle",
              "max (flat - bound) " + fmt(below_flat));
  ok &= claim(std::abs(last - (t.R + t.r)) < 1e-9, "straight angle", "bound(pi) = " + fmt(last) +
                                                                         ", R + r = " + fmt(t.R + t.r));
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodesic random walks and broken-geodesic maps on model spaces"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  WalkArgs walk;
  auto* walk_cmd = app.add_subcommand("walk", "simulate a geodesic random walk ensemble");
  add_common(walk_cmd, walk.c);
  walk_cmd->add_option("--r", walk.r, "step length");
  walk_cmd->add_option("--steps", walk.steps, "steps per walk");
  walk_cmd->add_option("--samples", walk.samples, "walks in the ensemble");
  walk_cmd->add_option("--bins", walk.bins, "radial histogram bins");
  walk_cmd->add_flag("--cf", walk.cf, "also write the empirical characteristic function");
  walk_cmd->add_option("--t-max", walk.t_max, "largest CF frequency");
  walk_cmd->add_option("--t-count", walk.t_count, "CF grid points");

  SingularArgs singular;
  auto* singular_cmd = app.add_subcommand("singular", "scan the singular set of phi");
  add_common(singular_cmd, singular.c);
  singular_cmd->add_option("--r", singular.r, "step length");
  singular_cmd->add_option("--n", singular.n, "number of steps");
  singular_cmd->add_option("--samples", singular.samples, "uniform random tuples");
  singular_cmd->add_option("--sign-samples", singular.sign_samples, "random v0 per sign pattern");

  FoldArgs fold;
  auto* fold_cmd = app.add_subcommand("fold", "fold certificates at sign tuples");
  add_common(fold_cmd, fold.c);
  fold_cmd->add_option("--r", fold.r, "step length");
  fold_cmd->add_option("--n", fold.n, "number of steps");
  fold_cmd->add_option("--v0-samples", fold.v0_samples, "random v0 per sign pattern");
  fold_cmd->add_option("--signs", fold.signs, "single sign pattern such as +-+");

  SpectrumArgs spectrum;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues of the spherical mean operator on the torus");
  add_common(spectrum_cmd, spectrum.c);
  spectrum_cmd->add_option("--r", spectrum.r, "sphere radius");
  spectrum_cmd->add_option("--k-max", spectrum.k_max, "largest |k_i|");

  RegularityArgs regularity;
  auto* regularity_cmd = app.add_subcommand("regularity", "regularity index and normal-form push-forward");
  add_common(regularity_cmd, regularity.c);
  regularity_cmd->add_option("--n", regularity.n, "number of steps");
  regularity_cmd->add_option("--signs", regularity.signs, "sign pattern of the fold");
  regularity_cmd->add_option("--samples", regularity.samples, "Monte Carlo samples");
  regularity_cmd->add_option("--t", regularity.t, "frequencies")->expected(1, -1);

  ToponogovArgs toponogov;
  auto* toponogov_cmd = app.add_subcommand("toponogov", "comparison bound swept over the angle");
  add_common(toponogov_cmd, toponogov.c, false);
  toponogov_cmd->add_option("--a", toponogov.c.a, "curvature scale (0 for flat)");
  toponogov_cmd->add_option("--d", toponogov.c.d, "dimension");
  toponogov_cmd->add_option("--r", toponogov.r, "first side");
  toponogov_cmd->add_option("--R", toponogov.R, "second side");
  toponogov_cmd->add_option("--alpha-count", toponogov.alpha_count, "angle grid points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (walk_cmd->parsed()) {
      finish_common(walk_cmd, walk.c);
      return cmd_walk(walk);
    }
    if (singular_cmd->parsed()) {
      finish_common(singular_cmd, singular.c);
      return cmd_singular(singular);
    }
    if (fold_cmd->parsed()) {
      finish_common(fold_cmd, fold.c);
      return cmd_fold(fold);
    }
    if (spectrum_cmd->parsed()) {
      finish_common(spectrum_cmd, spectrum.c);
      return cmd_spectrum(spectrum);
    }
    if (regularity_cmd->parsed()) {
      finish_common(regularity_cmd, regularity.c);
      return cmd_regularity(regularity);
    }
    finish_common(toponogov_cmd, toponogov.c);
    return cmd_toponogov(toponogov);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedGeometry& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const HypothesisViolated& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

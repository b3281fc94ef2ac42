#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "geowalk/errors.hpp"
#include "geowalk/geometry.hpp"
#include "support.hpp"

using namespace geowalk;
using testing::kPi;
using testing::vec2;
using testing::vec3;
using Catch::Matchers::WithinAbs;

TEST_CASE("exp_map closed forms") {
  const auto e2 = ModelSpace::euclidean(2);
  const auto x = origin(e2);
  const auto y = exp_map(e2, x, {x, vec2(1, 0)}, 1.0);
  CHECK((y.coords - vec2(1, 0)).norm() < 1e-15);

  const auto h2 = ModelSpace::hyperbolic(2, 1.0);
  const auto o = origin(h2);
  const auto z = exp_map(h2, o, {o, vec3(0, 1, 0)}, 1.0);
  CHECK((z.coords - vec3(std::cosh(1.0), std::sinh(1.0), 0)).norm() < 1e-14);

  const auto t2 = ModelSpace::flat_torus({2 * kPi, 2 * kPi});
  const auto p = make_point(t2, vec2(6, 0));
  const auto q = exp_map(t2, p, {p, vec2(1, 0)}, 1.0);
  CHECK_THAT(q.coords[0], WithinAbs(7 - 2 * kPi, 1e-14));
  CHECK(q.coords[1] == 0.0);
}

TEST_CASE("exp_map rejects bad input") {
  const auto e2 = ModelSpace::euclidean(2);
  const auto x = origin(e2);
  CHECK_THROWS_AS(exp_map(e2, x, {x, vec2(2, 0)}, 1.0), InputError);
  CHECK_THROWS_AS(exp_map(e2, x, {{vec2(1, 1)}, vec2(1, 0)}, 1.0), InputError);
  CHECK_THROWS_AS(exp_map(e2, x, {x, vec2(1, 0)}, -1.0), InputError);
  CHECK_THROWS_AS(ModelSpace::euclidean(1).validate(), InputError);
  CHECK_THROWS_AS(ModelSpace::hyperbolic(2, 0.0).validate(), InputError);
  CHECK_THROWS_AS(ModelSpace::flat_torus({1.0, -1.0}).validate(), InputError);
  const auto h2 = ModelSpace::hyperbolic(2, 1.0);
  CHECK_THROWS_AS(make_point(h2, vec3(2, 0, 0)), InputError);
  CHECK_THROWS_AS(make_tangent(h2, origin(h2), vec3(1, 0, 0)), InputError);
}

TEST_CASE("log_map examples") {
  const auto e2 = ModelSpace::euclidean(2);
  const auto v = log_map(e2, origin(e2), make_point(e2, vec2(3, 4)));
  CHECK((v.components - vec2(3, 4)).norm() < 1e-15);
  CHECK_THAT(metric_norm(e2, v), WithinAbs(5.0, 1e-15));

  const auto h2 = ModelSpace::hyperbolic(2, 1.0);
  const auto w =
      log_map(h2, origin(h2), make_point(h2, vec3(std::cosh(1.0), std::sinh(1.0), 0)));
  CHECK((w.components - vec3(0, 1, 0)).norm() < 1e-12);
}

TEST_CASE("torus cut-locus ties") {
  const auto t2 = ModelSpace::flat_torus({2.0, 3.0});
  const auto x = make_point(t2, vec2(0.25, 0.5));
  const auto y = make_point(t2, vec2(1.25, 0.75));
  CHECK_THROWS_AS(log_map(t2, x, y), AmbiguousCutLocus);
  const auto flagged = log_map_flagged(t2, x, y);
  CHECK(flagged.ambiguous);
  CHECK(flagged.vector.components[0] == -1.0);
  CHECK_THAT(flagged.vector.components[1], WithinAbs(0.25, 1e-15));
  CHECK_FALSE(log_map_flagged(t2, x, make_point(t2, vec2(1.2, 0.75))).ambiguous);
}

TEST_CASE("exp/log roundtrip on random pairs") {
  RngStream rng(11);
  for (int d : {2, 3, 4}) {
    for (const auto& s : testing::all_spaces(d)) {
      for (int trial = 0; trial < 1000; ++trial) {
        const auto x = testing::random_point(s, rng);
        const auto y = testing::random_point(s, rng);
        const auto v = log_map(s, x, y);
        const double len = metric_norm(s, v);
        REQUIRE_THAT(len, WithinAbs(distance(s, x, y), 1e-10 * (1 + len)));
        if (len == 0.0) continue;
        const TangentVector u{x, v.components / len};
        const auto back = exp_map(s, x, u, len);
        const double err = s.is_torus() ? distance(s, back, y) : (back.coords - y.coords).norm();
        REQUIRE(err < 1e-8);
      }
    }
  }
}

TEST_CASE("distance examples and metric axioms") {
  const auto h2 = ModelSpace::hyperbolic(2, 1.0);
  CHECK_THAT(distance(h2, origin(h2), make_point(h2, vec3(std::cosh(2.0), std::sinh(2.0), 0))),
             WithinAbs(2.0, 1e-14));
  const auto e2 = ModelSpace::euclidean(2);
  CHECK_THAT(distance(e2, origin(e2), make_point(e2, vec2(1, 1))), WithinAbs(std::sqrt(2.0), 1e-15));

  RngStream rng(12);
  for (const auto& s : testing::all_spaces(3)) {
    for (int trial = 0; trial < 1000; ++trial) {
      const auto x = testing::random_point(s, rng);
      const auto y = testing::random_point(s, rng);
      const auto z = testing::random_point(s, rng);
      const double xy = distance(s, x, y);
      REQUIRE(xy >= 0.0);
      REQUIRE(xy == distance(s, y, x));
      REQUIRE(distance(s, x, z) <= xy + distance(s, y, z) + 1e-12);
      REQUIRE(distance(s, x, x) < 1e-12);
    }
  }
}

TEST_CASE("hyperbolic distance at small separation") {
  const auto h3 = ModelSpace::hyperbolic(3, 2.0);
  RngStream rng(13);
  const auto x = testing::random_point(h3, rng);
  const auto u = sample_unit_direction(h3, x, rng);
  for (double t : {1e-8, 1e-6, 1e-4, 1e-2}) {
    const auto y = exp_map(h3, x, u, t);
    CHECK_THAT(distance(h3, x, y) / t, WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("distance along a geodesic equals arclength") {
  RngStream rng(14);
  for (const auto& s : testing::all_spaces(3)) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto x = testing::random_point(s, rng);
      const auto u = sample_unit_direction(s, x, rng);
      // torus injectivity radius is pi for periods 2 pi
      const double t = (s.is_torus() ? 3.0 : 5.0) * rng.uniform();
      REQUIRE_THAT(distance(s, x, exp_map(s, x, u, t)), WithinAbs(t, 1e-9 * (1 + t)));
    }
  }
}

TEST_CASE("parallel transport is a linear isometry") {
  const auto e2 = ModelSpace::euclidean(2);
  const auto x = origin(e2);
  const auto moved = parallel_transport(e2, x, {x, vec2(0.6, 0.8)}, 3.0, {x, vec2(-2, 5)});
  CHECK(moved.components == vec2(-2, 5));
  CHECK((moved.base.coords - vec2(1.8, 2.4)).norm() < 1e-15);

  RngStream rng(15);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = ModelSpace::hyperbolic(2 + trial % 3, 0.5 + rng.uniform());
    const auto p = testing::random_point(s, rng);
    const auto dir = sample_unit_direction(s, p, rng);
    const auto u = testing::random_tangent(s, p, rng);
    const auto w = testing::random_tangent(s, p, rng);
    const double t = 4.0 * rng.uniform();
    const auto tu = parallel_transport(s, p, dir, t, u);
    const auto tw = parallel_transport(s, p, dir, t, w);
    const double before = metric_inner(s, p, u, w);
    REQUIRE_THAT(metric_inner(s, tu.base, tu, tw), WithinAbs(before, 1e-10 * (1 + std::abs(before))));
    REQUIRE_THAT(metric_norm(s, tu), WithinAbs(metric_norm(s, u), 1e-10 * (1 + metric_norm(s, u))));
    REQUIRE(std::abs(detail::minkowski(tu.components, tu.base.coords)) < 1e-10 * (1 + tu.base.coords.norm()));
    const auto td = parallel_transport(s, p, dir, t, dir);
    const Vec gamma_dot = detail::geodesic_velocity_raw(s, p.coords, dir.components, t);
    REQUIRE((td.components - gamma_dot).norm() < 1e-10 * (1 + gamma_dot.norm()));
  }
}

TEST_CASE("hyperbolic transport equals the closed-form rotation in span{x, dir}") {
  const auto h2 = ModelSpace::hyperbolic(2, 1.0);
  const auto o = origin(h2);
  const TangentVector dir{o, vec3(0, 1, 0)};
  const TangentVector perp{o, vec3(0, 0, 1)};
  const auto moved = parallel_transport(h2, o, dir, 1.5, perp);
  CHECK((moved.components - vec3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("metric_inner positivity and symmetry") {
  const auto e2 = ModelSpace::euclidean(2);
  const auto x = origin(e2);
  CHECK(metric_inner(e2, x, {x, vec2(1, 0)}, {x, vec2(0, 1)}) == 0.0);
  RngStream rng(16);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = ModelSpace::hyperbolic(2 + trial % 3, 1.0);
    const auto p = testing::random_point(s, rng, 2.0);
    const auto u = testing::random_tangent(s, p, rng);
    const auto w = testing::random_tangent(s, p, rng);
    REQUIRE(metric_inner(s, p, u, u) > 0.0);
    REQUIRE(metric_inner(s, p, u, w) == metric_inner(s, p, w, u));
  }
  CHECK_THROWS_AS(metric_inner(e2, x, {x, vec2(1, 0)}, {{vec2(1, 0)}, vec2(0, 1)}), InputError);
}

TEST_CASE("orthonormal frames") {
  for (const auto& s : testing::all_spaces(3)) {
    RngStream rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = testing::random_point(s, rng, 2.0);
      const auto frame = orthonormal_frame(s, x);
      REQUIRE(frame.size() == 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          REQUIRE_THAT(metric_inner(s, x, frame[i], frame[j]), WithinAbs(i == j ? 1.0 : 0.0, 1e-12));
      if (!s.is_hyperbolic())
        for (int i = 0; i < 3; ++i) REQUIRE(frame[i].components == Vec::Unit(3, i));
    }
  }
  const auto h3 = ModelSpace::hyperbolic(3, 1.0);
  const auto o = origin(h3);
  const auto at_origin = orthonormal_frame(h3, o);
  for (int i = 0; i < 3; ++i) CHECK(at_origin[i].components == Vec::Unit(4, i + 1));

  RngStream rng(18);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = testing::random_point(h3, rng);
    const auto dir = sample_unit_direction(h3, x, rng);
    const double t = 3.0 * rng.uniform();
    std::vector<TangentVector> moved;
    for (const auto& e : orthonormal_frame(h3, x)) moved.push_back(parallel_transport(h3, x, dir, t, e));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        REQUIRE_THAT(detail::minkowski(moved[i].components, moved[j].components),
                     WithinAbs(i == j ? 1.0 : 0.0, 1e-10));
  }
}

TEST_CASE("uniform direction sampling") {
  RngStream rng(19);
  const auto h3 = ModelSpace::hyperbolic(3, 1.0);
  const auto x = testing::random_point(h3, rng, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const auto u = sample_unit_direction(h3, x, rng);
    REQUIRE_THAT(metric_norm(h3, u), WithinAbs(1.0, 1e-12));
  }

  for (const auto& s : {ModelSpace::euclidean(3), h3}) {
    const auto base = s.is_hyperbolic() ? x : origin(s);
    const int m = s.ambient_dim();
    Vec mean = Vec::Zero(m);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
      const Vec u = sample_unit_direction(s, base, rng).components;
      mean += u;
      cov += u * u.transpose();
    }
    mean /= draws;
    cov /= draws;
    Eigen::MatrixXd projector = Eigen::MatrixXd::Zero(m, m);
    for (const auto& e : orthonormal_frame(s, base)) projector += e.components * e.components.transpose();
    CHECK(mean.norm() < 5e-3);
    CHECK((cov - projector / 3.0).cwiseAbs().maxCoeff() < 5e-3);
  }
}

TEST_CASE("hyperbolic constraint drift over chained operations") {
  const auto h2 = ModelSpace::hyperbolic(2, 1.0);
  RngStream rng(20);
  auto x = origin(h2);
  auto u = sample_unit_direction(h2, x, rng);
  for (int step = 0; step < 1000; ++step) {
    const auto dir = sample_unit_direction(h2, x, rng);
    const auto moved = parallel_transport(h2, x, dir, 0.05, u);
    x = moved.base;
    u = moved;
    const double scale = x.coords.squaredNorm();
    REQUIRE(std::abs(detail::minkowski(x.coords, x.coords) + 1.0) < 1e-9 * scale);
    REQUIRE(std::abs(detail::minkowski(x.coords, u.components)) < 1e-9 * scale);
    REQUIRE_THAT(metric_norm(h2, u), WithinAbs(1.0, 1e-9));
  }
}

#include <doctest.h>

#include <cmath>

#include "propmap/grammar.hpp"
#include "propmap/normalize.hpp"
#include "propmap/rng.hpp"

using namespace propmap;

namespace {

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

MapSpec squaring() { return MapSpec::polynomial({0.0, 0.0, 1.0}); }
MapSpec neg_squaring() { return MapSpec::polynomial({0.0, 0.0, -1.0}); }

}  // namespace

TEST_CASE("find_escape_radius: identity and dilation") {
  double r_id = find_escape_radius(MapSpec::identity(2), 1.0, 64.0);
  CHECK(r_id >= 1.0);
  CHECK(r_id <= 1.15);
  double r_half = find_escape_radius(MapSpec::dilation(0.5, 1), 1.0, 64.0);
  CHECK(r_half >= 2.0);
  CHECK(r_half <= 2.2);
}

TEST_CASE("find_escape_radius: radial maps escape at the level") {
  MapSpec p3 = radial_extend(SphereMapSpec::circle_power(3));
  double r = find_escape_radius(p3, 2.0, 64.0);
  CHECK(r >= 2.0);
  CHECK(r <= 2.2);
}

TEST_CASE("find_escape_radius: window exhaustion is an error") {
  // dilation by 1/128 needs R = 128 > window
  CHECK_THROWS_AS(find_escape_radius(MapSpec::dilation(1.0 / 128.0, 1), 1.0, 64.0),
                  ComputationError);
  CHECK_THROWS_AS(find_escape_radius(MapSpec::constant(1, vec1(0.5)).assert_proper(), 1.0, 8.0),
                  ComputationError);
}

TEST_CASE("sphere_bound: identity and squaring") {
  double b = sphere_bound(MapSpec::identity(2), 1.0);
  CHECK(b == doctest::Approx(1.05));
  double R = find_escape_radius(squaring(), 1.0, 64.0);
  double r = sphere_bound(squaring(), R);
  CHECK(r == doctest::Approx(std::max(1.0, R * R) * 1.05).epsilon(1e-12));
}

TEST_CASE("sphere_bound: radial maps give r = R padded") {
  MapSpec p2 = radial_extend(SphereMapSpec::circle_power(2));
  CHECK(sphere_bound(p2, 3.0) == doctest::Approx(3.0 * 1.05));
}

TEST_CASE("clamp: the three regimes are exact") {
  Vec e1 = vec2(1.0, 0.0);
  CHECK((clamp(0.5 * e1, 2.0) - 0.5 * e1).norm() == 0.0);
  CHECK((clamp(1.5 * e1, 2.0) - e1).norm() == 0.0);
  CHECK((clamp(4.0 * e1, 2.0) - 2.0 * e1).norm() == 0.0);
  CHECK_THROWS_AS(clamp(e1, 0.5), DomainError);
}

TEST_CASE("clamp: identity on the unit ball, 1-Lipschitz, norm non-increasing") {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const double r = 1.0 + 3.0 * rng.uniform();
    Vec x = rng.normal_vector(3) * std::pow(4.0, rng.uniform(-1.0, 1.0));
    Vec y = rng.normal_vector(3) * std::pow(4.0, rng.uniform(-1.0, 1.0));
    if (x.norm() <= 1.0) CHECK((clamp(x, r) - x).norm() == 0.0);
    CHECK(clamp(x, r).norm() <= x.norm() + 1e-15);
    const double dist = (x - y).norm();
    if (dist > 1e-9)
      CHECK((clamp(x, r) - clamp(y, r)).norm() / dist <= 1.0 + 1e-6);
  }
}

TEST_CASE("stage_g1: identity, radial winding, and the downward parabola") {
  SUBCASE("identity inside the unit ball") {
    MapSpec g1 = stage_g1(MapSpec::identity(2), 1.0, 1.0);
    Vec v = vec2(0.3, -0.2);
    CHECK((g1.eval(v) - v).norm() < 1e-15);
  }
  SUBCASE("unit norm on the unit sphere for a radial input") {
    MapSpec g = radial_extend(SphereMapSpec::circle_power(3));
    double R = find_escape_radius(g, 1.0, 64.0);
    double r = sphere_bound(g, R);
    MapSpec g1 = stage_g1(g, R, r);
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
      Vec u = rng.unit_vector(2);
      CHECK(std::abs(g1.eval(u).norm() - 1.0) <= 1e-12);
    }
  }
  SUBCASE("- x^2 sends both ends of S^0 to -1") {
    MapSpec g = neg_squaring();
    double R = find_escape_radius(g, 1.0, 64.0);
    double r = sphere_bound(g, R);
    MapSpec g1 = stage_g1(g, R, r);
    CHECK(g1.eval(vec1(1.0))[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(g1.eval(vec1(-1.0))[0] == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("stage_G1: fixed inside the ball, norm-preserving everywhere") {
  MapSpec g = radial_extend(SphereMapSpec::circle_power(2));
  double R = find_escape_radius(g, 1.0, 64.0);
  double r = sphere_bound(g, R);
  MapSpec g1 = stage_g1(g, R, r);
  ProperHomotopy h = stage_G1(g1);

  SUBCASE("inside the unit ball the homotopy is constant") {
    Rng rng(43);
    for (int i = 0; i < 100; ++i) {
      Vec v = rng.unit_vector(2) * rng.uniform();
      Vec base = g1.eval(v);
      for (double t : {0.0, 0.3, 0.7, 1.0})
        CHECK((h.eval(t, v) - base).norm() < 1e-14);
    }
  }
  SUBCASE("radial inputs are fixed points") {
    // g1 of a radial map is radial, so the rescaling does nothing
    Rng rng(44);
    for (int i = 0; i < 100; ++i) {
      Vec v = rng.unit_vector(2) * (0.2 + 3.0 * rng.uniform());
      Vec base = g1.eval(v);
      for (double t : {0.0, 0.5, 1.0})
        CHECK((h.eval(t, v) - base).norm() < 1e-11);
    }
  }
  SUBCASE("norm identity on a 10^4 grid within 1e-9") {
    Rng rng(45);
    for (int i = 0; i < 10000; ++i) {
      const double t = rng.uniform();
      Vec v = rng.unit_vector(2) * std::pow(10.0, rng.uniform(-1.0, 1.0));
      CHECK(std::abs(h.eval(t, v).norm() - g1.eval(v).norm()) <= 1e-9);
    }
  }
  SUBCASE("endpoints match the catalog maps") {
    Rng rng(46);
    for (int i = 0; i < 100; ++i) {
      Vec v = rng.normal_vector(2);
      CHECK((h.eval(0.0, v) - h.start.eval(v)).norm() < 1e-12);
      CHECK((h.eval(1.0, v) - h.end.eval(v)).norm() < 1e-12);
    }
  }
}

TEST_CASE("stage_G1: norm identity for a non-radial proper map") {
  // an anisotropic linear map clamps to a genuinely non-radial g1
  Mat a(2, 2);
  a << 2.0, 0.5, 0.0, 1.0;
  MapSpec g = MapSpec::linear(a);
  double R = find_escape_radius(g, 1.0, 64.0);
  double r = sphere_bound(g, R);
  MapSpec g1 = stage_g1(g, R, r);
  ProperHomotopy h = stage_G1(g1);
  Rng rng(47);
  for (int i = 0; i < 10000; ++i) {
    const double t = rng.uniform();
    Vec v = rng.unit_vector(2) * std::pow(10.0, rng.uniform(-1.0, 1.0));
    CHECK(std::abs(h.eval(t, v).norm() - g1.eval(v).norm()) <= 1e-9);
  }
}

TEST_CASE("stage_G2: endpoints, and constancy when interpolating a radial map with itself") {
  MapSpec pf = radial_extend(SphereMapSpec::circle_power(2));
  SphereMapSpec f = SphereMapSpec::restriction(pf);
  ProperHomotopy h = stage_G2(pf, f);
  Rng rng(53);
  for (int i = 0; i < 200; ++i) {
    Vec v = rng.normal_vector(2) * std::pow(10.0, rng.uniform(-1.0, 1.0));
    Vec at0 = h.eval(0.0, v);
    Vec at1 = h.eval(1.0, v);
    CHECK((at0 - pf.eval(v)).norm() < 1e-12);
    CHECK((at1 - h.end.eval(v)).norm() < 1e-12);
    CHECK((h.eval(0.5, v) - at0).norm() < 1e-11);
  }
}

TEST_CASE("stage_G2: radial form outside the unit ball") {
  Mat a(2, 2);
  a << 2.0, 0.5, 0.0, 1.0;
  MapSpec g = MapSpec::linear(a);
  double R = find_escape_radius(g, 1.0, 64.0);
  double r = sphere_bound(g, R);
  MapSpec g1 = stage_g1(g, R, r);
  MapSpec g2 = MapSpec::radialize_outside_ball(g1);
  SphereMapSpec f = SphereMapSpec::restriction(g1);
  ProperHomotopy h = stage_G2(g2, f);
  // on ||v|| >= 1:  G2(t,v) = ((1-s)||g1(v)|| + s ||v||) f(v/||v||)
  Rng rng(59);
  for (int i = 0; i < 500; ++i) {
    const double t = rng.uniform();
    const double s = smooth_ramp(t);
    Vec v = rng.unit_vector(2) * (1.0 + 4.0 * rng.uniform());
    Vec expect = ((1.0 - s) * g1.eval(v).norm() + s * v.norm()) * f.eval(v / v.norm());
    CHECK((h.eval(t, v) - expect).norm() <= 1e-9 * (1.0 + expect.norm()));
  }
}

TEST_CASE("normalize: track chains within 1e-9 on a 1000-point grid") {
  Mat a(2, 2);
  a << 1.5, -0.3, 0.2, 0.8;
  MapSpec g = MapSpec::linear(a);
  NormalizationResult res = normalize(g);
  REQUIRE(res.track.stages.size() == 4);
  Rng rng(61);
  for (int i = 0; i < 250; ++i) {
    Vec v = rng.normal_vector(2) * std::pow(10.0, rng.uniform(-1.0, 1.0));
    for (size_t s = 0; s + 1 < res.track.stages.size(); ++s) {
      Vec end_here = res.track.stages[s].eval(1.0, v);
      Vec start_next = res.track.stages[s + 1].eval(0.0, v);
      CHECK((end_here - start_next).norm() <= 1e-9 * (1.0 + end_here.norm()));
    }
  }
  // first stage starts at g, last ends at the radial extension of the boundary
  MapSpec pf = radial_extend(res.boundary_map);
  for (int i = 0; i < 250; ++i) {
    Vec v = rng.normal_vector(2);
    CHECK((res.track.stages.front().eval(0.0, v) - g.eval(v)).norm() < 1e-12);
    CHECK((res.track.stages.back().eval(1.0, v) - pf.eval(v)).norm() <= 1e-10);
  }
}

TEST_CASE("normalize: certificates pass at r in {1,2,4}") {
  MapSpec g = radial_extend(SphereMapSpec::circle_power(3));
  NormalizationResult res = normalize(g);
  REQUIRE(res.track.certificates.size() == 4);
  for (const auto& cert : res.track.certificates) {
    CHECK(cert.pass());
    REQUIRE(cert.items.size() == 3);
    CHECK(cert.items[0].r == 1.0);
    CHECK(cert.items[2].r == 4.0);
  }
}

TEST_CASE("normalize: boundary map outputs are unit and identity-like for the identity") {
  NormalizationResult res = normalize(MapSpec::identity(3));
  Rng rng(67);
  for (int i = 0; i < 200; ++i) {
    Vec u = rng.unit_vector(3);
    Vec out = res.boundary_map.eval(u);
    CHECK(std::abs(out.norm() - 1.0) <= tol::kUnitNorm);
    CHECK((out - u).norm() < 1e-10);
  }
}

TEST_CASE("normalize: x^2 boundary sends both points of S^0 to +1") {
  NormalizationResult res = normalize(squaring());
  CHECK(res.boundary_map.eval(vec1(1.0))[0] == doctest::Approx(1.0));
  CHECK(res.boundary_map.eval(vec1(-1.0))[0] == doctest::Approx(1.0));
  NormalizationResult neg = normalize(neg_squaring());
  CHECK(neg.boundary_map.eval(vec1(1.0))[0] == doctest::Approx(-1.0));
  CHECK(neg.boundary_map.eval(vec1(-1.0))[0] == doctest::Approx(-1.0));
}

TEST_CASE("normalize: requires the proper flag") {
  CHECK_THROWS_AS(normalize(MapSpec::constant(2, vec2(1.0, 0.0))), DomainError);
}

TEST_CASE("boundary homotopy: constant identity family gives F(t, x) = x") {
  ProperHomotopy h;
  h.name = "constant";
  h.domain_dim = 2;
  h.codomain_dim = 2;
  h.start = MapSpec::identity(2);
  h.end = MapSpec::identity(2);
  h.eval = [](double, const Vec& v) { return v; };
  SphereHomotopy f = boundary_homotopy_from_proper_pair(h, 1.0);
  Rng rng(71);
  for (int i = 0; i < 100; ++i) {
    Vec u = rng.unit_vector(2);
    for (double t : {0.0, 0.5, 1.0}) CHECK((f.eval(t, u) - u).norm() < 1e-12);
  }
}

TEST_CASE("boundary homotopy: rotation family restricts to the circle rotation") {
  const double theta = 0.8;
  auto rot = [](double ang) {
    Mat m(2, 2);
    m << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
    return m;
  };
  ProperHomotopy h;
  h.name = "rotate";
  h.domain_dim = 2;
  h.codomain_dim = 2;
  h.start = MapSpec::identity(2);
  h.end = MapSpec::linear(rot(theta));
  h.eval = [rot, theta](double t, const Vec& v) -> Vec { return rot(theta * t) * v; };
  SphereHomotopy f = boundary_homotopy_from_proper_pair(h, 1.0);
  Rng rng(73);
  for (int i = 0; i < 100; ++i) {
    Vec u = rng.unit_vector(2);
    const double t = rng.uniform();
    CHECK((f.eval(t, u) - rot(theta * t) * u).norm() < 1e-10);
  }
  // endpoints are the normalized restrictions of the family endpoints
  for (int i = 0; i < 50; ++i) {
    Vec u = rng.unit_vector(2);
    CHECK((f.eval(0.0, u) - f.start.eval(u)).norm() < 1e-10);
    CHECK((f.eval(1.0, u) - f.end.eval(u)).norm() < 1e-10);
  }
}

TEST_CASE("stage_G1: vanishing outside the unit ball is a reported error") {
  // x^2 - 1 vanishes on S^0, which the rescaling formula cannot tolerate
  MapSpec bad = parse_map("proper(expr(1: x1*x1 - 1))");
  ProperHomotopy h = stage_G1(bad);
  Vec v(1);
  v << 2.0;
  CHECK_THROWS_AS(h.eval(0.95, v), ComputationError);
  CHECK_THROWS_AS(MapSpec::radialize_outside_ball(bad).eval(v), ComputationError);
}

TEST_CASE("smooth_ramp: flat near the endpoints") {
  CHECK(smooth_ramp(0.0) == 0.0);
  CHECK(smooth_ramp(0.09) == 0.0);
  CHECK(smooth_ramp(0.91) == 1.0);
  CHECK(smooth_ramp(1.0) == 1.0);
  CHECK(smooth_ramp(0.5) == doctest::Approx(0.5));
}

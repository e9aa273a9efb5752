#include <doctest.h>

#include <cmath>

#include "propmap/map_model.hpp"
#include "propmap/rng.hpp"

using namespace propmap;

namespace {

Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

}  // namespace

TEST_CASE("eval: identity") {
  MapSpec id = MapSpec::identity(2);
  Vec out = id.eval(vec2(0.3, 0.4));
  CHECK(out[0] == 0.3);
  CHECK(out[1] == 0.4);
  CHECK(id.is_proper());
}

TEST_CASE("eval: 1-d squaring polynomial") {
  MapSpec sq = MapSpec::polynomial({0.0, 0.0, 1.0});
  CHECK(sq.eval(vec1(-2.0))[0] == 4.0);
  CHECK(sq.is_proper());
}

TEST_CASE("eval: circle power by direct complex multiplication") {
  SphereMapSpec cube = SphereMapSpec::circle_power(3);
  const double theta = M_PI / 6.0;
  Vec z = vec2(std::cos(theta), std::sin(theta));
  Vec out = cube.eval(z);
  // oracle: multiply z*z*z directly
  double wr = z[0], wi = z[1];
  for (int i = 0; i < 2; ++i) {
    const double nr = wr * z[0] - wi * z[1];
    wi = wr * z[1] + wi * z[0];
    wr = nr;
  }
  CHECK(out[0] == doctest::Approx(wr).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(wi).epsilon(1e-14));
  CHECK(std::atan2(out[1], out[0]) == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
}

TEST_CASE("eval: negative circle power is conjugate power") {
  SphereMapSpec inv2 = SphereMapSpec::circle_power(-2);
  const double theta = 0.7;
  Vec out = inv2.eval(vec2(std::cos(theta), std::sin(theta)));
  CHECK(out[0] == doctest::Approx(std::cos(-2.0 * theta)).epsilon(1e-13));
  CHECK(out[1] == doctest::Approx(std::sin(-2.0 * theta)).epsilon(1e-13));
}

TEST_CASE("eval: dimension and unit-norm preconditions") {
  MapSpec id = MapSpec::identity(2);
  CHECK_THROWS_AS(id.eval(vec1(1.0)), DomainError);
  SphereMapSpec circle = SphereMapSpec::identity(1);
  CHECK_THROWS_AS(circle.eval(vec2(0.5, 0.0)), DomainError);
}

TEST_CASE("radial_extend: identity sphere map gives identity") {
  MapSpec p = radial_extend(SphereMapSpec::identity(1));
  CHECK(p.is_proper());
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    Vec v = 3.0 * rng.normal_vector(2);
    Vec out = p.eval(v);
    CHECK((out - v).norm() < 1e-12 * (1.0 + v.norm()));
  }
}

TEST_CASE("radial_extend: antipodal on S^0 gives negation") {
  MapSpec p = radial_extend(SphereMapSpec::antipodal(0));
  CHECK(p.eval(vec1(2.5))[0] == -2.5);
  CHECK(p.eval(vec1(-0.75))[0] == 0.75);
}

TEST_CASE("radial_extend: origin maps to origin") {
  MapSpec p = radial_extend(SphereMapSpec::hopf());
  Vec out = p.eval(Vec::Zero(4));
  CHECK(out.norm() == 0.0);
  CHECK(out.size() == 3);
}

TEST_CASE("radial_extend: norm identity over random inputs") {
  const auto check_norms = [](const MapSpec& p, int n) {
    Rng rng(23);
    for (int i = 0; i < 1000; ++i) {
      Vec v = rng.normal_vector(n) * std::pow(10.0, rng.uniform(-2.0, 2.0));
      const double nv = v.norm();
      const double np = p.eval(v).norm();
      CHECK(std::abs(np - nv) <= 1e-12 * std::max(1.0, nv));
    }
  };
  check_norms(radial_extend(SphereMapSpec::circle_power(3)), 2);
  check_norms(radial_extend(SphereMapSpec::hopf()), 4);
  check_norms(radial_extend(SphereMapSpec::suspension(SphereMapSpec::circle_power(2))), 3);
}

TEST_CASE("suspend_proper: identity goes to identity") {
  MapSpec s = suspend_proper(MapSpec::identity(1));
  CHECK(s.domain_dim() == 2);
  CHECK(s.codomain_dim() == 2);
  Vec out = s.eval(vec2(0.3, -1.2));
  CHECK(out[0] == 0.3);
  CHECK(out[1] == -1.2);
}

TEST_CASE("suspend_proper: last coordinate passes through") {
  MapSpec s = suspend_proper(MapSpec::polynomial({0.0, 0.0, 1.0}));
  Vec out = s.eval(vec2(2.0, 5.0));
  CHECK(out[0] == 4.0);
  CHECK(out[1] == 5.0);
}

TEST_CASE("suspend_proper: requires the proper flag") {
  MapSpec c = MapSpec::constant(1, vec1(1.0));
  CHECK_THROWS_AS(suspend_proper(c), DomainError);
}

TEST_CASE("suspend_proper: first block agrees with the unsuspended map on a grid") {
  MapSpec base = radial_extend(SphereMapSpec::circle_power(3));
  MapSpec s = suspend_proper(base);
  for (double x = -2.0; x <= 2.0; x += 0.5)
    for (double y = -2.0; y <= 2.0; y += 0.5)
      for (double t = -1.0; t <= 1.0; t += 0.5) {
        Vec v(3);
        v << x, y, t;
        Vec out = s.eval(v);
        Vec expect = base.eval(vec2(x, y));
        CHECK((out.head(2) - expect).norm() < 1e-14);
        CHECK(out[2] == t);
      }
}

TEST_CASE("suspend_sphere: identity on S^0 suspends to the identity class on S^1") {
  SphereMapSpec s = suspend_sphere(SphereMapSpec::identity(0));
  CHECK(s.domain_sphere_dim() == 1);
  CHECK(s.codomain_sphere_dim() == 1);
  // formula: (v, s) -> (|v| sign(v), s) = (v, s)
  Rng rng(5);
  for (int i = 0; i < 64; ++i) {
    Vec u = rng.unit_vector(2);
    Vec out = s.eval(u);
    CHECK((out - u).norm() < 1e-12);
  }
}

TEST_CASE("suspend_sphere: constant suspends to a latitude arc") {
  Vec p = vec2(1.0, 0.0);
  SphereMapSpec c = SphereMapSpec::constant(1, p);
  SphereMapSpec s = suspend_sphere(c);
  Rng rng(7);
  for (int i = 0; i < 64; ++i) {
    Vec u = rng.unit_vector(3);
    Vec out = s.eval(u);
    const double nw = u.head(2).norm();
    CHECK(out[0] == doctest::Approx(nw).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out[2] == doctest::Approx(u[2]).epsilon(1e-12));
  }
}

TEST_CASE("suspend_sphere: unit norm preserved over >= 1000 random unit inputs") {
  const auto check_unit = [](const SphereMapSpec& g) {
    Rng rng(99);
    const int n = g.domain_dim();
    for (int i = 0; i < 1000; ++i) {
      Vec u = rng.unit_vector(n);
      CHECK(std::abs(g.eval(u).norm() - 1.0) <= tol::kUnitNorm);
    }
  };
  check_unit(suspend_sphere(SphereMapSpec::circle_power(2)));
  check_unit(suspend_sphere(SphereMapSpec::circle_power(-3)));
  check_unit(suspend_sphere(suspend_sphere(SphereMapSpec::circle_power(2))));
  check_unit(SphereMapSpec::hopf());
}

TEST_CASE("jacobian: identity map") {
  MapSpec id = MapSpec::identity(2);
  Mat j = jacobian(id, vec2(0.4, -1.0));
  CHECK((j - Mat::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("jacobian: squaring map matches the analytic derivative") {
  MapSpec sq = MapSpec::polynomial({0.0, 0.0, 1.0});
  Mat j = jacobian(sq, vec1(3.0));
  CHECK(std::abs(j(0, 0) - 6.0) < 10.0 * tol::kFdStep * tol::kFdStep);
}

TEST_CASE("jacobian: planar power matches the complex derivative") {
  // d/dz z^2 = 2z; at z = 1 the real Jacobian is 2 I
  MapSpec p2 = MapSpec::planar_power(2);
  Mat j = jacobian(p2, vec2(1.0, 0.0));
  CHECK((j - 2.0 * Mat::Identity(2, 2)).norm() < 10.0 * tol::kFdStep * tol::kFdStep * 4.0);
}

TEST_CASE("properness_check: identity escapes at the level itself") {
  auto report = properness_check(MapSpec::identity(2), {1.0}, 16.0);
  REQUIRE(report.items.size() == 1);
  CHECK(report.items[0].pass);
  CHECK(report.items[0].escape_radius >= 1.0);
  CHECK(report.items[0].escape_radius <= 1.3);
}

TEST_CASE("properness_check: radial maps have R(r) = r up to grid and pad") {
  const MapSpec maps[] = {
      radial_extend(SphereMapSpec::circle_power(3)),
      radial_extend(SphereMapSpec::hopf()),
      radial_extend(SphereMapSpec::antipodal(0)),
      radial_extend(SphereMapSpec::suspension(SphereMapSpec::circle_power(-2))),
  };
  for (const auto& m : maps) {
    auto report = properness_check(m, {1.0, 2.0, 4.0}, 16.0);
    CHECK(report.pass());
    for (const auto& item : report.items) {
      CHECK(item.escape_radius >= item.r);
      CHECK(item.escape_radius <= 1.3 * item.r);
    }
  }
}

TEST_CASE("properness_check: held homotopy slice shows growing escape radius, then failure") {
  // f_eps(x) = eps x^2 + x; proper for eps > 0 but with a zero at -1/eps,
  // so the certified escape radius grows as eps shrinks and the check fails
  // once the zero reaches the sampling window.
  const auto slice = [](double eps) {
    return MapSpec::polynomial({0.0, 1.0, eps});
  };
  const double window = 64.0;
  auto r_quarter = escape_search(slice(0.25), 1.0, window, sampling::kEscapeShells);
  auto r_16th = escape_search(slice(1.0 / 16.0), 1.0, window, sampling::kEscapeShells);
  auto r_32nd = escape_search(slice(1.0 / 32.0), 1.0, window, sampling::kEscapeShells);
  REQUIRE(r_quarter.pass);
  REQUIRE(r_16th.pass);
  REQUIRE(r_32nd.pass);
  CHECK(r_quarter.escape_radius < r_16th.escape_radius);
  CHECK(r_16th.escape_radius < r_32nd.escape_radius);
  // zero lands on the window boundary: no shell suffix clears the level
  auto report = properness_check(slice(1.0 / 64.0), {1.0}, 64.0);
  CHECK_FALSE(report.items[0].pass);
}

TEST_CASE("properness_check: rejects bad inputs") {
  MapSpec id = MapSpec::identity(1);
  CHECK_THROWS_AS(properness_check(id, {}, 8.0), DomainError);
  CHECK_THROWS_AS(properness_check(id, {2.0, 1.0}, 8.0), DomainError);
  CHECK_THROWS_AS(properness_check(id, {1.0}, 0.5), DomainError);
}

TEST_CASE("composition and flags") {
  MapSpec p3 = radial_extend(SphereMapSpec::circle_power(3));
  MapSpec comp = MapSpec::compose(MapSpec::clamp_map(2.0, 2), p3);
  CHECK(comp.is_proper());
  CHECK_THROWS_AS(MapSpec::compose(MapSpec::identity(3), p3), DomainError);
  MapSpec notproper = MapSpec::constant(2, vec2(1.0, 0.0));
  CHECK_FALSE(MapSpec::compose(notproper, p3).is_proper());
}

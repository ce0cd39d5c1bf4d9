#include "oracles.hpp"

#include "shapelab/errors.hpp"
#include "shapelab/geometry.hpp"
#include "shapelab/sampling.hpp"

#include <Eigen/Geometry>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace shapelab;

namespace {

StarDomain a2_domain(double a2) { return StarDomain(Point::Zero(), 1.0, {{2, a2, 0.0}}); }

}  // namespace

TEST_CASE("area of disks and Fourier domains") {
  CHECK(area(StarDomain::disk(1.0)) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(area(StarDomain::disk(2.0)) == doctest::Approx(4 * kPi).epsilon(1e-14));

  const StarDomain d = a2_domain(0.1);
  CHECK(std::abs(area(d) - kPi * 1.005) < 1e-12);
  CHECK(area(d) == doctest::Approx(3.157301).epsilon(1e-6));

  const auto mc = oracle::monte_carlo(d, 400000, 11);
  CHECK(std::abs(mc.area - area(d)) < 5 * mc.area_err);
}

TEST_CASE("barycenter") {
  CHECK(barycenter(StarDomain::disk(1.0)).norm() < 1e-14);
  const Point c = barycenter(StarDomain::disk(1.0, Point(3, -1)));
  CHECK(std::abs(c.x() - 3) < 1e-13);
  CHECK(std::abs(c.y() + 1) < 1e-13);

  const StarDomain d(Point::Zero(), 1.0, {{1, 0.1, 0.0}});
  const double expected = (kPi * 0.1 + kPi * 0.001 / 4) / (kPi * 1.005);
  const Point b = barycenter(d);
  CHECK(std::abs(b.x() - expected) < 1e-12);
  CHECK(b.x() == doctest::Approx(0.09975).epsilon(1e-4));
  CHECK(std::abs(b.y()) < 1e-14);

  const auto mc = oracle::monte_carlo(d, 400000, 12);
  CHECK(std::abs(mc.cx - b.x()) < 5e-3);
  CHECK(std::abs(mc.cy - b.y()) < 5e-3);
}

TEST_CASE("perimeter of the unit circle") {
  CHECK(perimeter(StarDomain::disk(1.0)) == doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("symmetric difference with balls") {
  const StarDomain unit = StarDomain::disk(1.0);
  CHECK(symmetric_difference_ball(unit, BallSpec(Point::Zero(), 1.0)).value < 1e-12);

  const double lens = oracle::lens_area(1.0, 1.0, 0.1);
  CHECK(lens == doctest::Approx(2 * std::acos(0.05) - 0.05 * std::sqrt(3.99)).epsilon(1e-12));
  const Quadrature shifted = symmetric_difference_ball(unit, BallSpec(Point(0.1, 0), 1.0));
  CHECK(std::abs(shifted.value - 2 * (kPi - lens)) < 1e-9);
  CHECK(shifted.value == doctest::Approx(0.399834).epsilon(1e-5));

  const Quadrature annulus = symmetric_difference_ball(StarDomain::disk(1.05), BallSpec(Point::Zero(), 1.0));
  CHECK(std::abs(annulus.value - kPi * (1.05 * 1.05 - 1)) < 1e-12);
  CHECK(annulus.value == doctest::Approx(0.322013).epsilon(1e-5));
}

TEST_CASE("symmetric difference falls back to sampling when the ball center is outside") {
  const StarDomain unit = StarDomain::disk(1.0);
  const Quadrature q = symmetric_difference_ball(unit, BallSpec(Point(1.5, 0), 1.0));
  CHECK(q.monte_carlo);
  const double expected = 2 * (kPi - oracle::lens_area(1.0, 1.0, 1.5));
  CHECK(std::abs(q.value - expected) < 5 * q.std_error + 1e-9);
}

TEST_CASE("psi weight") {
  const PsiWeight w(BallSpec(Point::Zero(), 1.0), 0.2);
  CHECK(std::abs(w(Point(1, 0))) < 1e-15);
  CHECK(w(Point(0.9, 0)) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(w(Point(0, 0)) == doctest::Approx(0.2 * (1 + 2 / kPi)).epsilon(1e-14));
  CHECK(w(Point(0, 0)) == doctest::Approx(0.327324).epsilon(1e-6));
  CHECK(w(Point(1.1, 0)) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(w.plateau() == doctest::Approx(0.2 * (1 + 2 / kPi)));

  // monotone and C1 across the blend
  double prev = w.profile(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double t = 0.6 * i / 1000;
    CHECK(w.profile(t) >= prev - 1e-15);
    prev = w.profile(t);
  }
  const double e = 1e-7;
  for (double knot : {0.2, 0.4}) {
    const double left = (w.profile(knot) - w.profile(knot - e)) / e;
    const double right = (w.profile(knot + e) - w.profile(knot)) / e;
    CHECK(std::abs(left - right) < 1e-5);
  }
}

TEST_CASE("psi profile moments match numeric integration") {
  const PsiWeight w(BallSpec(Point::Zero(), 1.0), 0.2);
  for (double a : {0.1, 0.3, 0.55}) {
    const int n = 20000;
    double m0 = 0, m1 = 0;
    for (int i = 0; i < n; ++i) {
      const double t = a * (i + 0.5) / n;
      m0 += w.profile(t) * a / n;
      m1 += t * w.profile(t) * a / n;
    }
    CHECK(w.profile_moment0(a) == doctest::Approx(m0).epsilon(1e-7));
    CHECK(w.profile_moment1(a) == doctest::Approx(m1).epsilon(1e-7));
  }
}

TEST_CASE("asymmetry examples") {
  const BallSpec unit(Point::Zero(), 1.0);
  CHECK(asymmetry(StarDomain::disk(1.0), unit, 0.2).value < 1e-14);
  const double expected = 2 * kPi * (0.05 * 0.05 / 2 + 0.05 * 0.05 * 0.05 / 3);
  const double got = asymmetry(StarDomain::disk(1.05), unit, 0.2).value;
  CHECK(std::abs(got - expected) < 1e-12);
  CHECK(got == doctest::Approx(0.008116).epsilon(1e-4));
}

TEST_CASE("translation invariance of area, barycenter and differences") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const StarDomain d = random_domain(rng);
    const BallSpec b(Point(0.02, -0.01), 0.97);
    const Point v(1.7, -2.3);
    const StarDomain dt = d.translated(v);
    const BallSpec bt(b.center + v, b.radius);
    CHECK(std::abs(area(dt) - area(d)) < 1e-10);
    CHECK((barycenter(dt) - barycenter(d) - v).norm() < 1e-10);
    CHECK(std::abs(symmetric_difference_ball(dt, bt).value - symmetric_difference_ball(d, b).value) < 1e-10);
    CHECK(std::abs(asymmetry(dt, bt, 0.2).value - asymmetry(d, b, 0.2).value) < 1e-10);
  }
}

TEST_CASE("asymmetry is nonnegative and vanishes only on the ball") {
  std::mt19937_64 rng(4);
  const BallSpec unit(Point::Zero(), 1.0);
  for (int i = 0; i < 100; ++i) {
    const StarDomain d = random_domain(rng);
    const double a = asymmetry(d, unit, 0.2).value;
    const double d0 = symmetric_difference_ball(d, unit).value;
    CHECK(a >= 0.0);
    CHECK(d0 > 0.0);
    CHECK(a > 0.0);
  }
  CHECK(asymmetry(StarDomain::disk(1.0), unit, 0.2).value < 1e-15);
  CHECK(symmetric_difference_ball(StarDomain::disk(1.0), unit).value < 1e-15);
}

TEST_CASE("asymmetry is comparable to the squared symmetric difference") {
  std::mt19937_64 rng(5);
  const BallSpec unit(Point::Zero(), 1.0);
  const double c0 = 0.2;
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 60; ++i) {
    StarDomain d = random_domain(rng, 4, 0.08);
    double xi_max = 0.0;
    for (int j = 0; j < 512; ++j) xi_max = std::max(xi_max, std::abs(d.xi(2 * kPi * j / 512)));
    if (xi_max > c0 / 2) d = d.with_modes([&] {
      auto m = d.modes();
      for (auto& f : m) f.a *= 0.5 * c0 / xi_max, f.b *= 0.5 * c0 / xi_max;
      return m;
    }());
    const double ratio = asymmetry(d, unit, c0).value / std::pow(symmetric_difference_ball(d, unit).value, 2);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double C = std::max(hi, 1.0 / lo);
  MESSAGE("asymmetry / d0^2 in [" << lo << ", " << hi << "], C = " << C);
  CHECK(C < 20.0);
}

TEST_CASE("dilation scales area quadratically") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    const StarDomain d = random_domain(rng);
    for (double t : {0.5, 1.3, 2.0}) CHECK(std::abs(area(d.dilated(t)) / (t * t * area(d)) - 1) < 1e-12);
  }
}

TEST_CASE("rotation preserves area and rotates the barycenter") {
  const StarDomain d(Point(0.3, 0.1), 1.0, {{1, 0.05, 0.02}, {3, -0.04, 0.03}});
  const StarDomain r = d.rotated(0.7);
  CHECK(std::abs(area(r) - area(d)) < 1e-12);
  const Point rel = barycenter(d) - d.center();
  const Point expected = d.center() + Eigen::Rotation2Dd(0.7) * rel;
  CHECK((barycenter(r) - expected).norm() < 1e-12);
}

TEST_CASE("with_area hits the target") {
  const StarDomain d = a2_domain(0.1).with_area(kPi);
  CHECK(std::abs(area(d) - kPi) < 1e-13);
}

TEST_CASE("invalid domains are rejected") {
  CHECK_THROWS_AS(StarDomain(Point::Zero(), -1.0), InvalidDomain);
  CHECK_THROWS_AS(StarDomain(Point::Zero(), 1.0, {{2, 0.95, 0.0}}), InvalidDomain);
  CHECK_THROWS_AS(StarDomain(Point::Zero(), 1.0, {{0, 0.1, 0.0}}), InvalidDomain);
  CHECK_THROWS_AS(StarDomain(Point::Zero(), 1.0, {{kMaxMode + 1, 0.01, 0.0}}), InvalidDomain);
  CHECK_THROWS_AS(BallSpec(Point::Zero(), 0.0), ValidationError);
}

TEST_CASE("star shape about interior points") {
  const StarDomain d = a2_domain(0.1);
  CHECK(star_shaped_about(d, Point::Zero()));
  CHECK(d.contains(Point(0.5, 0.5)));
  CHECK_FALSE(d.contains(Point(1.2, 0)));
}

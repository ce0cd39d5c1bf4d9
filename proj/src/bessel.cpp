#include "shapelab/bessel.hpp"

#include <cmath>

namespace shapelab::bessel {

namespace {

template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double j0_first_zero() {
  static const double z = bisect([](double x) { return std::cyl_bessel_j(0.0, x); }, 2.0, 3.0);
  return z;
}

double j1_first_zero() {
  static const double z = bisect([](double x) { return std::cyl_bessel_j(1.0, x); }, 3.5, 4.0);
  return z;
}

double disk_lambda1(double radius) {
  const double j = j0_first_zero();
  return j * j / (radius * radius);
}

double disk_lambda2(double radius) {
  const double j = j1_first_zero();
  return j * j / (radius * radius);
}

double disk_torsion(double radius) { return -kPi * std::pow(radius, 4) / 16.0; }

double disk_eigenfunction(const BallSpec& ball, const Point& x) {
  const double s = (x - ball.center).norm();
  if (s >= ball.radius) return 0.0;
  const double j = j0_first_zero();
  static const double j1_at_zero = std::cyl_bessel_j(1.0, j0_first_zero());
  return std::cyl_bessel_j(0.0, j * s / ball.radius) / (std::sqrt(kPi) * ball.radius * j1_at_zero);
}

}  // namespace shapelab::bessel

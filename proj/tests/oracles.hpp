#pragma once

// Reference values computed independently of the library code paths.

#include "shapelab/geometry.hpp"

#include <cmath>
#include <random>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// J_n(x) from its power series.
inline double bessel_j(int n, double x) {
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= 0.5 * x / i;
  double sum = term;
  const double q = -0.25 * x * x;
  for (int m = 1; m < 80; ++m) {
    term *= q / (m * static_cast<double>(m + n));
    sum += term;
  }
  return sum;
}

// First positive zero of J_n inside [lo, hi] by bisection.
inline double bessel_zero(int n, double lo, double hi) {
  double flo = bessel_j(n, lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = bessel_j(n, mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double j01() { return bessel_zero(0, 2.0, 3.0); }
inline double j11() { return bessel_zero(1, 3.5, 4.2); }

// Area of the intersection of two unit-radius... general radii circles at distance s.
inline double lens_area(double r1, double r2, double s) {
  if (s >= r1 + r2) return 0.0;
  if (s <= std::abs(r1 - r2)) return kPi * std::pow(std::min(r1, r2), 2);
  const double a1 = std::acos((s * s + r1 * r1 - r2 * r2) / (2 * s * r1));
  const double a2 = std::acos((s * s + r2 * r2 - r1 * r1) / (2 * s * r2));
  const double k = 0.5 * std::sqrt((-s + r1 + r2) * (s + r1 - r2) * (s - r1 + r2) * (s + r1 + r2));
  return r1 * r1 * a1 + r2 * r2 * a2 - k;
}

struct McResult {
  double area, area_err;
  double cx, cy;
};

// Rejection sampling with the polar point-in-domain test.
inline McResult monte_carlo(const shapelab::StarDomain& d, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  const double rmax = d.max_radius();
  std::uniform_real_distribution<double> u(-rmax, rmax);
  long hits = 0;
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = u(rng), y = u(rng);
    const double rho = std::hypot(x, y);
    const double th = std::atan2(y, x);
    if (rho < d.radius(th)) {
      ++hits;
      sx += x;
      sy += y;
    }
  }
  const double box = 4 * rmax * rmax;
  const double p = static_cast<double>(hits) / n;
  return {box * p, box * std::sqrt(p * (1 - p) / n), sx / hits + d.center().x(), sy / hits + d.center().y()};
}

}  // namespace oracle

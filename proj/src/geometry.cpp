#include "shapelab/geometry.hpp"

#include "shapelab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <string>

namespace shapelab {

namespace {

constexpr int kFloorSamples = 4096;
constexpr std::size_t kMonteCarloSamples = 1'000'000;
constexpr std::uint64_t kMonteCarloSeed = 0x5eed5eedULL;

// 5-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

template <class F>
double periodic_trapezoid(F&& f, int n = kQuadratureNodes) {
  const double dt = 2.0 * kPi / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += f(i * dt);
  return sum * dt;
}

template <class F>
double gauss(F&& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) sum += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
  return sum * half;
}

// Integral over [0, 2 pi] of |g(theta)| * w(theta) for smooth g, w; cells where
// g changes sign are split at the root so the kink in |g| costs no accuracy.
template <class G, class W>
double periodic_abs_integral(G&& g, W&& w, int n = kQuadratureNodes) {
  const double dt = 2.0 * kPi / n;
  auto integrand = [&](double t) { return std::abs(g(t)) * w(t); };
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double lo = i * dt;
    double hi = lo + dt;
    const double glo = g(lo);
    const double ghi = g(hi);
    if ((glo < 0.0) != (ghi < 0.0)) {
      double a = lo, b = hi, ga = glo;
      for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if ((gm < 0.0) == (ga < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      const double root = 0.5 * (a + b);
      sum += gauss(integrand, lo, root) + gauss(integrand, root, hi);
    } else {
      sum += gauss(integrand, lo, hi);
    }
  }
  return sum;
}

struct PolarView {
  // Boundary of d seen from p: distance rho(theta) and angular speed
  // dphi/dtheta of the polar angle about p.
  const StarDomain& d;
  Point p;

  double rho(double theta) const { return (d.boundary_point(theta) - p).norm(); }
  double angular_speed(double theta) const {
    const Point rel = d.boundary_point(theta) - p;
    return cross(rel, d.boundary_tangent(theta)) / rel.squaredNorm();
  }
};

struct Box {
  Point lo, hi;
};

Box bounding_box(const StarDomain& d, const BallSpec& b) {
  const double rd = d.max_radius();
  Point lo = (d.center().array() - rd).matrix().cwiseMin((b.center.array() - b.radius).matrix());
  Point hi = (d.center().array() + rd).matrix().cwiseMax((b.center.array() + b.radius).matrix());
  return {lo, hi};
}

template <class F>
Quadrature monte_carlo(const Box& box, F&& integrand) {
  std::mt19937_64 rng(kMonteCarloSeed);
  std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x());
  std::uniform_real_distribution<double> uy(box.lo.y(), box.hi.y());
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < kMonteCarloSamples; ++i) {
    const Point x(ux(rng), uy(rng));
    const double v = integrand(x);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(kMonteCarloSamples);
  const double box_area = (box.hi - box.lo).prod();
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return {box_area * mean, box_area * std::sqrt(var / n), true};
}

}  // namespace

// ---------------------------------------------------------------------------
// StarDomain

StarDomain::StarDomain(Point center, double r0, std::vector<FourierMode> modes, double star_floor)
    : center_(std::move(center)), r0_(r0) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw InvalidDomain("StarDomain: r0 must be positive");
  if (!center_.allFinite()) throw InvalidDomain("StarDomain: center must be finite");
  std::map<int, FourierMode> merged;
  for (const auto& m : modes) {
    if (m.k < 1 || m.k > kMaxMode)
      throw InvalidDomain("StarDomain: mode index " + std::to_string(m.k) + " outside [1, " +
                          std::to_string(kMaxMode) + "]");
    if (!std::isfinite(m.a) || !std::isfinite(m.b)) throw InvalidDomain("StarDomain: non-finite mode");
    auto& slot = merged[m.k];
    slot.k = m.k;
    slot.a += m.a;
    slot.b += m.b;
  }
  for (const auto& [k, m] : merged) {
    if (m.a != 0.0 || m.b != 0.0) modes_.push_back(m);
  }
  for (int i = 0; i < kFloorSamples; ++i) {
    const double t = 2.0 * kPi * i / kFloorSamples;
    if (1.0 + xi(t) < star_floor)
      throw InvalidDomain("StarDomain: 1 + xi(theta) falls below the star-shape floor " +
                          std::to_string(star_floor));
  }
}

StarDomain StarDomain::disk(double radius, Point center) { return StarDomain(std::move(center), radius); }

FourierMode StarDomain::mode(int k) const {
  for (const auto& m : modes_)
    if (m.k == k) return m;
  return {k, 0.0, 0.0};
}

double StarDomain::xi(double theta) const {
  double s = 0.0;
  for (const auto& m : modes_) s += m.a * std::cos(m.k * theta) + m.b * std::sin(m.k * theta);
  return s;
}

double StarDomain::radius(double theta) const { return r0_ * (1.0 + xi(theta)); }

double StarDomain::radius_derivative(double theta) const {
  double s = 0.0;
  for (const auto& m : modes_) s += m.k * (-m.a * std::sin(m.k * theta) + m.b * std::cos(m.k * theta));
  return r0_ * s;
}

Point StarDomain::boundary_point(double theta) const {
  return center_ + radius(theta) * Point(std::cos(theta), std::sin(theta));
}

Point StarDomain::boundary_tangent(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  const double r = radius(theta), dr = radius_derivative(theta);
  return {dr * c - r * s, dr * s + r * c};
}

double StarDomain::min_radius() const {
  double lo = r0_ * (1.0 + xi(0.0));
  for (int i = 1; i < kFloorSamples; ++i) lo = std::min(lo, radius(2.0 * kPi * i / kFloorSamples));
  return lo;
}

double StarDomain::max_radius() const {
  double hi = r0_ * (1.0 + xi(0.0));
  for (int i = 1; i < kFloorSamples; ++i) hi = std::max(hi, radius(2.0 * kPi * i / kFloorSamples));
  return hi;
}

bool StarDomain::contains(const Point& p) const {
  const Point rel = p - center_;
  const double s = rel.norm();
  if (s == 0.0) return true;
  return s < radius(std::atan2(rel.y(), rel.x()));
}

StarDomain StarDomain::translated(const Point& shift) const { return StarDomain(center_ + shift, r0_, modes_); }

StarDomain StarDomain::dilated(double factor) const { return StarDomain(center_, r0_ * factor, modes_); }

StarDomain StarDomain::rotated(double angle) const {
  std::vector<FourierMode> out;
  out.reserve(modes_.size());
  for (const auto& m : modes_) {
    const double c = std::cos(m.k * angle), s = std::sin(m.k * angle);
    out.push_back({m.k, m.a * c - m.b * s, m.a * s + m.b * c});
  }
  return StarDomain(center_, r0_, std::move(out));
}

StarDomain StarDomain::with_area(double target) const {
  if (!(target > 0.0)) throw InvalidDomain("StarDomain::with_area: target must be positive");
  return dilated(std::sqrt(target / area(*this)));
}

StarDomain StarDomain::with_center(const Point& center) const { return StarDomain(center, r0_, modes_); }

StarDomain StarDomain::with_modes(std::vector<FourierMode> modes) const {
  return StarDomain(center_, r0_, std::move(modes));
}

// ---------------------------------------------------------------------------
// BallSpec / PsiWeight

BallSpec::BallSpec(Point c, double r) : center(std::move(c)), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("BallSpec: radius must be positive");
}

PsiWeight::PsiWeight(BallSpec ball, double c0) : ball_(std::move(ball)), c0_(c0) {
  if (!(c0 > 0.0)) throw ValidationError("PsiWeight: c0 must be positive");
}

double PsiWeight::plateau() const { return c0_ * (1.0 + 2.0 / kPi); }

double PsiWeight::profile(double t) const {
  t = std::abs(t);
  if (t <= c0_) return t;
  if (t >= 2.0 * c0_) return plateau();
  return c0_ + (2.0 * c0_ / kPi) * std::sin(kPi * (t - c0_) / (2.0 * c0_));
}

double PsiWeight::profile_moment0(double a) const {
  const double s1 = std::min(a, c0_);
  double m = 0.5 * s1 * s1;
  if (a > c0_) {
    const double u = std::min(a, 2.0 * c0_) - c0_;
    const double w = kPi / (2.0 * c0_);
    const double amp = 2.0 * c0_ / kPi;
    m += c0_ * u + amp * (1.0 - std::cos(w * u)) / w;
  }
  if (a > 2.0 * c0_) m += plateau() * (a - 2.0 * c0_);
  return m;
}

double PsiWeight::profile_moment1(double a) const {
  const double s1 = std::min(a, c0_);
  double m = s1 * s1 * s1 / 3.0;
  if (a > c0_) {
    // t = c0 + u, f = c0 + amp sin(w u)
    const double u = std::min(a, 2.0 * c0_) - c0_;
    const double w = kPi / (2.0 * c0_);
    const double amp = 2.0 * c0_ / kPi;
    const double int_sin = (1.0 - std::cos(w * u)) / w;
    const double int_u_sin = -u * std::cos(w * u) / w + std::sin(w * u) / (w * w);
    m += c0_ * c0_ * u + 0.5 * c0_ * u * u + amp * (c0_ * int_sin + int_u_sin);
  }
  if (a > 2.0 * c0_) m += 0.5 * plateau() * (a * a - 4.0 * c0_ * c0_);
  return m;
}

double PsiWeight::operator()(const Point& x) const {
  const double s = (x - ball_.center).norm();
  const double f = profile(s - ball_.radius);
  return s < ball_.radius ? f : -f;
}

// ---------------------------------------------------------------------------
// Integrals

double area(const StarDomain& d) {
  return 0.5 * periodic_trapezoid([&](double t) {
           const double r = d.radius(t);
           return r * r;
         });
}

Point barycenter(const StarDomain& d) {
  const double a = area(d);
  const double mx = periodic_trapezoid([&](double t) { return std::pow(d.radius(t), 3) * std::cos(t); }) / 3.0;
  const double my = periodic_trapezoid([&](double t) { return std::pow(d.radius(t), 3) * std::sin(t); }) / 3.0;
  return d.center() + Point(mx, my) / a;
}

double perimeter(const StarDomain& d) {
  return periodic_trapezoid([&](double t) { return d.boundary_tangent(t).norm(); });
}

bool star_shaped_about(const StarDomain& d, const Point& p) {
  if (!d.contains(p)) return false;
  const double scale = d.max_radius();
  for (int i = 0; i < kQuadratureNodes; ++i) {
    const double t = 2.0 * kPi * i / kQuadratureNodes;
    if (cross(d.boundary_point(t) - p, d.boundary_tangent(t)) <= 1e-12 * scale * scale) return false;
  }
  return true;
}

Quadrature symmetric_difference_ball(const StarDomain& d, const BallSpec& b) {
  if (star_shaped_about(d, b.center)) {
    const PolarView view{d, b.center};
    const double r2 = b.radius * b.radius;
    const double value = periodic_abs_integral(
        [&](double t) {
          const double rho = view.rho(t);
          return 0.5 * (rho * rho - r2);
        },
        [&](double t) { return view.angular_speed(t); });
    return {value, 0.0, false};
  }
  return monte_carlo(bounding_box(d, b), [&](const Point& x) {
    const bool in_d = d.contains(x);
    const bool in_b = (x - b.center).norm() < b.radius;
    return in_d != in_b ? 1.0 : 0.0;
  });
}

Quadrature asymmetry(const StarDomain& d, const BallSpec& b, double c0) {
  const PsiWeight psi(b, c0);
  if (star_shaped_about(d, b.center)) {
    const PolarView view{d, b.center};
    const double radius = b.radius;
    // Radial integral of |psi| s ds between the ball radius and rho.
    auto radial = [&](double rho) {
      if (rho >= radius) {
        const double a = rho - radius;
        return radius * psi.profile_moment0(a) + psi.profile_moment1(a);
      }
      const double a = radius - rho;
      return radius * psi.profile_moment0(a) - psi.profile_moment1(a);
    };
    const double value = periodic_trapezoid([&](double t) { return radial(view.rho(t)) * view.angular_speed(t); });
    return {value, 0.0, false};
  }
  return monte_carlo(bounding_box(d, b), [&](const Point& x) {
    const bool in_d = d.contains(x);
    const bool in_b = (x - b.center).norm() < b.radius;
    return in_d != in_b ? std::abs(psi(x)) : 0.0;
  });
}

}  // namespace shapelab

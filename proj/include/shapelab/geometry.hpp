#pragma once

#include <Eigen/Core>

#include <vector>

namespace shapelab {

using Point = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;
/// Lower bound on 1 + xi(theta) accepted by StarDomain.
inline constexpr double kStarFloor = 0.1;
/// Largest admissible Fourier index.
inline constexpr int kMaxMode = 32;
/// Uniform angles used by every periodic quadrature in this module.
inline constexpr int kQuadratureNodes = 2048;

struct FourierMode {
  int k = 1;
  double a = 0.0;  // coefficient of cos(k theta)
  double b = 0.0;  // coefficient of sin(k theta)
};

/// Planar domain {center + s e(theta) : 0 <= s < r(theta)} with
/// r(theta) = r0 (1 + xi(theta)), xi(theta) = sum_k a_k cos k theta + b_k sin k theta.
class StarDomain {
 public:
  /// Throws InvalidDomain if r0 <= 0, a mode index lies outside [1, kMaxMode]
  /// or 1 + xi dips below `star_floor` anywhere.
  StarDomain(Point center, double r0, std::vector<FourierMode> modes = {},
             double star_floor = kStarFloor);

  static StarDomain disk(double radius, Point center = Point::Zero());

  const Point& center() const { return center_; }
  double r0() const { return r0_; }
  /// Sorted by k, one entry per index.
  const std::vector<FourierMode>& modes() const { return modes_; }
  /// Coefficients (a_k, b_k) of mode k, zero if absent.
  FourierMode mode(int k) const;

  double xi(double theta) const;
  double radius(double theta) const;
  double radius_derivative(double theta) const;
  Point boundary_point(double theta) const;
  /// Derivative of boundary_point with respect to theta.
  Point boundary_tangent(double theta) const;

  double min_radius() const;
  double max_radius() const;
  bool contains(const Point& p) const;

  StarDomain translated(const Point& shift) const;
  /// Scales about the center.
  StarDomain dilated(double factor) const;
  /// Rotates about the center by `angle` (counterclockwise).
  StarDomain rotated(double angle) const;
  /// Same shape rescaled about its center so that area() == target.
  StarDomain with_area(double target) const;
  StarDomain with_center(const Point& center) const;
  StarDomain with_modes(std::vector<FourierMode> modes) const;

 private:
  Point center_;
  double r0_;
  std::vector<FourierMode> modes_;
};

struct BallSpec {
  Point center = Point::Zero();
  double radius = 1.0;

  BallSpec() = default;
  /// Throws ValidationError unless radius > 0.
  BallSpec(Point c, double r);
};

/// Smoothed signed distance to the boundary of a ball: +f(dist) inside,
/// -f(dist) outside. f(t) = t on [0, c0], a quarter sine on [c0, 2 c0]
/// (matching value and slope at both ends) and the plateau c0 (1 + 2/pi)
/// beyond 2 c0.
class PsiWeight {
 public:
  PsiWeight(BallSpec ball, double c0);

  const BallSpec& ball() const { return ball_; }
  double c0() const { return c0_; }
  double plateau() const;

  double profile(double t) const;
  /// Integrals of f(t) and t f(t) over [0, a].
  double profile_moment0(double a) const;
  double profile_moment1(double a) const;

  double operator()(const Point& x) const;

 private:
  BallSpec ball_;
  double c0_;
};

/// Value of an integral together with its Monte-Carlo standard error
/// (zero when computed by deterministic quadrature).
struct Quadrature {
  double value = 0.0;
  double std_error = 0.0;
  bool monte_carlo = false;
};

double area(const StarDomain& d);
Point barycenter(const StarDomain& d);
double perimeter(const StarDomain& d);

/// True when every ray from `p` meets the boundary exactly once, i.e. the
/// polar angle about `p` increases strictly along the boundary curve.
bool star_shaped_about(const StarDomain& d, const Point& p);

/// |d minus b| + |b minus d|.
Quadrature symmetric_difference_ball(const StarDomain& d, const BallSpec& b);

/// Integral of |psi_B| over the symmetric difference of d and B.
Quadrature asymmetry(const StarDomain& d, const BallSpec& b, double c0);

/// Default transition scale of the smoothed distance for a ball.
inline double default_c0(const BallSpec& b) { return 0.2 * b.radius; }

}  // namespace shapelab

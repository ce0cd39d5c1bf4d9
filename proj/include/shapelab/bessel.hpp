#pragma once

#include "shapelab/geometry.hpp"

namespace shapelab::bessel {

/// First positive zero of J_0 and of J_1.
double j0_first_zero();
double j1_first_zero();

/// First and second Dirichlet eigenvalues of a disk of the given radius.
double disk_lambda1(double radius);
double disk_lambda2(double radius);
/// -pi R^4 / 16 (negative sign convention).
double disk_torsion(double radius);

/// Nonnegative first eigenfunction of the ball, unit L2 norm, zero outside.
double disk_eigenfunction(const BallSpec& ball, const Point& x);

}  // namespace shapelab::bessel

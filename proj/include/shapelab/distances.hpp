#pragma once

#include "shapelab/elliptic.hpp"
#include "shapelab/geometry.hpp"

#include <vector>

namespace shapelab {

/// Uniform Cartesian grid whose nodes sit on the lattice spacing * Z^2, so
/// grids built for nearby domains share their nodes.
struct GridSpec {
  double spacing = 0.0;
  int i0 = 0, j0 = 0;  // lattice index of the first node
  int nx = 0, ny = 0;

  Point node(int i, int j) const { return {(i0 + i) * spacing, (j0 + j) * spacing}; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

  /// Smallest lattice grid covering [lo, hi] with a margin of two spacings.
  static GridSpec covering(const Point& lo, const Point& hi, double spacing);
};

/// Values on a GridSpec; integrals use the node rule (weight spacing^2).
struct GridField {
  GridSpec grid;
  std::vector<double> values;

  double l2_norm() const;
  double l1_norm() const;
  void normalize_l2();
};

/// Piecewise-linear interpolation of a mesh field onto the grid; exactly zero
/// at nodes outside the mesh.
GridField rasterize(const TriMesh& mesh, const ScalarField& field, const GridSpec& grid);
/// First eigenfunction of a ball from its closed Bessel form (unit norm in
/// the continuum, not on the grid).
GridField rasterize_ball_eigenfunction(const BallSpec& ball, const GridSpec& grid);

/// Grid covering the domain and the ball.
GridSpec common_grid(const StarDomain& d, const BallSpec& b, double spacing);

BallSpec matched_ball(const StarDomain& d);

/// L2 distance between the zero-extended eigenfunction of the solved domain
/// and that of the ball, both renormalized to unit norm on the common grid.
/// `grid_spacing` <= 0 selects half the mesh spacing; larger than that
/// throws GridTooCoarse.
double d1(const DomainSolution& omega, const BallSpec& b, double grid_spacing = 0.0);

struct DistanceReport {
  double d0 = 0.0;
  double d0_std_error = 0.0;
  double d1 = 0.0;
  double asym = 0.0;
  double d_star_sq = 0.0;
  BallSpec matched;
  double c0 = 0.0;
};

/// Distances of a solved domain to its matched ball; c0 <= 0 selects
/// default_c0 of the matched ball.
DistanceReport distance_report(const DomainSolution& omega, double c0 = 0.0, double grid_spacing = 0.0);

}  // namespace shapelab

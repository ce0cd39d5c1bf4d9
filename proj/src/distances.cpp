#include "shapelab/distances.hpp"

#include "shapelab/bessel.hpp"
#include "shapelab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace shapelab {

GridSpec GridSpec::covering(const Point& lo, const Point& hi, double spacing) {
  if (!(spacing > 0.0)) throw ValidationError("GridSpec: spacing must be positive");
  GridSpec g;
  g.spacing = spacing;
  g.i0 = static_cast<int>(std::floor(lo.x() / spacing)) - 2;
  g.j0 = static_cast<int>(std::floor(lo.y() / spacing)) - 2;
  const int i1 = static_cast<int>(std::ceil(hi.x() / spacing)) + 2;
  const int j1 = static_cast<int>(std::ceil(hi.y() / spacing)) + 2;
  g.nx = i1 - g.i0 + 1;
  g.ny = j1 - g.j0 + 1;
  return g;
}

double GridField::l2_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s) * grid.spacing;
}

double GridField::l1_norm() const {
  double s = 0.0;
  for (double v : values) s += std::abs(v);
  return s * grid.spacing * grid.spacing;
}

void GridField::normalize_l2() {
  const double n = l2_norm();
  if (n > 0.0)
    for (double& v : values) v /= n;
}

GridField rasterize(const TriMesh& mesh, const ScalarField& field, const GridSpec& grid) {
  GridField out{grid, std::vector<double>(grid.size(), 0.0)};
  std::vector<char> filled(grid.size(), 0);
  const double g = grid.spacing;
  for (const auto& tri : mesh.triangles) {
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    const Point lo = p0.cwiseMin(p1).cwiseMin(p2);
    const Point hi = p0.cwiseMax(p1).cwiseMax(p2);
    const int ia = std::max(0, static_cast<int>(std::ceil(lo.x() / g)) - grid.i0);
    const int ib = std::min(grid.nx - 1, static_cast<int>(std::floor(hi.x() / g)) - grid.i0);
    const int ja = std::max(0, static_cast<int>(std::ceil(lo.y() / g)) - grid.j0);
    const int jb = std::min(grid.ny - 1, static_cast<int>(std::floor(hi.y() / g)) - grid.j0);
    if (ia > ib || ja > jb) continue;
    const Point e1 = p1 - p0, e2 = p2 - p0;
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    const double f0 = field[tri[0]], f1 = field[tri[1]], f2 = field[tri[2]];
    constexpr double kTol = -1e-12;
    for (int j = ja; j <= jb; ++j) {
      for (int i = ia; i <= ib; ++i) {
        const std::size_t idx = grid.index(i, j);
        if (filled[idx]) continue;
        const Point r = grid.node(i, j) - p0;
        const double b1 = (r.x() * e2.y() - r.y() * e2.x()) / det;
        const double b2 = (e1.x() * r.y() - e1.y() * r.x()) / det;
        const double b0 = 1.0 - b1 - b2;
        if (b0 < kTol || b1 < kTol || b2 < kTol) continue;
        out.values[idx] = b0 * f0 + b1 * f1 + b2 * f2;
        filled[idx] = 1;
      }
    }
  }
  return out;
}

GridField rasterize_ball_eigenfunction(const BallSpec& ball, const GridSpec& grid) {
  GridField out{grid, std::vector<double>(grid.size(), 0.0)};
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out.values[grid.index(i, j)] = bessel::disk_eigenfunction(ball, grid.node(i, j));
  return out;
}

GridSpec common_grid(const StarDomain& d, const BallSpec& b, double spacing) {
  const double rd = d.max_radius();
  const Point lo = (d.center().array() - rd).matrix().cwiseMin((b.center.array() - b.radius).matrix());
  const Point hi = (d.center().array() + rd).matrix().cwiseMax((b.center.array() + b.radius).matrix());
  return GridSpec::covering(lo, hi, spacing);
}

BallSpec matched_ball(const StarDomain& d) { return BallSpec(barycenter(d), std::sqrt(area(d) / kPi)); }

double d1(const DomainSolution& omega, const BallSpec& b, double grid_spacing) {
  const double mesh_h = omega.system.mesh.h;
  const double g = grid_spacing > 0.0 ? grid_spacing : 0.5 * mesh_h;
  if (g > 0.5 * mesh_h * (1.0 + 1e-12))
    throw GridTooCoarse("d1: grid spacing exceeds half the mesh spacing");
  const GridSpec grid = common_grid(omega.domain, b, g);
  GridField u = rasterize(omega.system.mesh, omega.spectrum.u, grid);
  GridField ub = rasterize_ball_eigenfunction(b, grid);
  u.normalize_l2();
  ub.normalize_l2();
  double s = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double diff = u.values[i] - ub.values[i];
    s += diff * diff;
  }
  return std::sqrt(s) * g;
}

DistanceReport distance_report(const DomainSolution& omega, double c0, double grid_spacing) {
  DistanceReport r;
  r.matched = matched_ball(omega.domain);
  r.c0 = c0 > 0.0 ? c0 : default_c0(r.matched);
  const Quadrature sd = symmetric_difference_ball(omega.domain, r.matched);
  r.d0 = sd.value;
  r.d0_std_error = sd.std_error;
  r.asym = asymmetry(omega.domain, r.matched, r.c0).value;
  r.d1 = d1(omega, r.matched, grid_spacing);
  r.d_star_sq = r.asym + r.d1 * r.d1;
  return r;
}

}  // namespace shapelab

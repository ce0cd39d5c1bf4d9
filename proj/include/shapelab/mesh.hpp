#pragma once

#include "shapelab/geometry.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <iosfwd>
#include <vector>

namespace shapelab {

/// Conforming triangulation of a StarDomain built from a polar template:
/// ring j (j = 1..rings) carries 6 j vertices at angles 2 pi i / (6 j) and
/// radius (j / rings) r(theta). Ring `rings` is the boundary.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<int> boundary;                  // closed loop, increasing theta
  std::vector<double> boundary_theta;
  double h = 0.0;  // target edge length
  int rings = 0;

  std::size_t num_vertices() const { return vertices.size(); }
  double signed_area(std::size_t t) const;
  double area() const;
  double min_angle_degrees() const;
};

/// Ring count giving boundary and radial spacing at most h.
int rings_for(const StarDomain& d, double h);

/// Throws ValidationError unless 0 < h <= r0 / 4 and DegenerateMesh if a
/// triangle comes out inverted.
TriMesh triangulate(const StarDomain& d, double h);
/// Same template with an explicit ring count (>= 2). Keeps connectivity fixed
/// across nearby domains, which finite differences rely on.
TriMesh triangulate_rings(const StarDomain& d, int rings);

void write_mesh_csv(const TriMesh& mesh, std::ostream& vertices_out, std::ostream& triangles_out);

using SparseMatrix = Eigen::SparseMatrix<double>;
/// Piecewise-linear field stored as one value per mesh vertex.
using ScalarField = Eigen::VectorXd;

/// P1 matrices on a mesh, plus the Dirichlet elimination maps.
struct FemSystem {
  TriMesh mesh;
  SparseMatrix stiffness;  // all vertices
  SparseMatrix mass;
  SparseMatrix stiffness_interior;  // Dirichlet rows and columns removed
  SparseMatrix mass_interior;
  std::vector<int> interior;        // interior index -> vertex
  std::vector<int> interior_index;  // vertex -> interior index, -1 on the boundary
  /// Lumped boundary mass: half the length of the two edges meeting at each
  /// boundary vertex, ordered as mesh.boundary.
  std::vector<double> boundary_weight;

  ScalarField expand(const Eigen::VectorXd& interior_values) const;
  Eigen::VectorXd restrict_to_interior(const ScalarField& field) const;
  /// Integral of a P1 field, i.e. 1^T M f.
  double integral(const ScalarField& field) const;
};

FemSystem assemble(TriMesh mesh);

}  // namespace shapelab

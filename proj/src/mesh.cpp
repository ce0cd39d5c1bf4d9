#include "shapelab/mesh.hpp"

#include "shapelab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace shapelab {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

double TriMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

double TriMesh::area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += signed_area(t);
  return a;
}

double TriMesh::min_angle_degrees() const {
  double lo = 180.0;
  for (const auto& tri : triangles) {
    for (int c = 0; c < 3; ++c) {
      const Point e1 = vertices[tri[(c + 1) % 3]] - vertices[tri[c]];
      const Point e2 = vertices[tri[(c + 2) % 3]] - vertices[tri[c]];
      const double ang = std::atan2(std::abs(cross(e1, e2)), e1.dot(e2));
      lo = std::min(lo, ang * 180.0 / kPi);
    }
  }
  return lo;
}

int rings_for(const StarDomain& d, double h) {
  if (!(h > 0.0)) throw ValidationError("triangulate: h must be positive");
  return std::max(2, static_cast<int>(std::ceil(d.max_radius() / h - 1e-9)));
}

TriMesh triangulate(const StarDomain& d, double h) {
  if (!(h > 0.0) || h > d.r0() / 4.0 * (1.0 + 1e-12))
    throw ValidationError("triangulate: h must lie in (0, r0/4]");
  TriMesh mesh = triangulate_rings(d, rings_for(d, h));
  mesh.h = h;
  return mesh;
}

TriMesh triangulate_rings(const StarDomain& d, int rings) {
  if (rings < 2) throw ValidationError("triangulate_rings: need at least two rings");
  TriMesh mesh;
  mesh.rings = rings;
  mesh.h = d.max_radius() / rings;

  const int total = 1 + 3 * rings * (rings + 1);
  mesh.vertices.reserve(total);
  mesh.vertices.push_back(d.center());
  std::vector<int> ring_start(rings + 1, 0);
  for (int j = 1; j <= rings; ++j) {
    ring_start[j] = static_cast<int>(mesh.vertices.size());
    const int count = 6 * j;
    const double frac = static_cast<double>(j) / rings;
    for (int i = 0; i < count; ++i) {
      const double theta = 2.0 * kPi * i / count;
      const double r = (j == rings) ? d.radius(theta) : frac * d.radius(theta);
      mesh.vertices.push_back(d.center() + r * Point(std::cos(theta), std::sin(theta)));
    }
  }

  mesh.triangles.reserve(6 * rings * rings);
  for (int i = 0; i < 6; ++i) mesh.triangles.push_back({0, ring_start[1] + i, ring_start[1] + (i + 1) % 6});

  // Zip ring j-1 (6(j-1) vertices) with ring j (6j vertices), always advancing
  // along whichever ring has the smaller next angle.
  for (int j = 2; j <= rings; ++j) {
    const int n_in = 6 * (j - 1), n_out = 6 * j;
    const int s_in = ring_start[j - 1], s_out = ring_start[j];
    int a = 0, b = 0;
    while (a < n_in || b < n_out) {
      const double next_in = static_cast<double>(a + 1) / n_in;
      const double next_out = static_cast<double>(b + 1) / n_out;
      const int va = s_in + a % n_in, vb = s_out + b % n_out;
      if (b < n_out && (a == n_in || next_out <= next_in)) {
        mesh.triangles.push_back({va, vb, s_out + (b + 1) % n_out});
        ++b;
      } else {
        mesh.triangles.push_back({va, vb, s_in + (a + 1) % n_in});
        ++a;
      }
    }
  }

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!(mesh.signed_area(t) > 0.0)) throw DegenerateMesh("triangulate: inverted or degenerate triangle");
  }

  const int n_b = 6 * rings;
  mesh.boundary.resize(n_b);
  mesh.boundary_theta.resize(n_b);
  for (int i = 0; i < n_b; ++i) {
    mesh.boundary[i] = ring_start[rings] + i;
    mesh.boundary_theta[i] = 2.0 * kPi * i / n_b;
  }
  return mesh;
}

void write_mesh_csv(const TriMesh& mesh, std::ostream& vertices_out, std::ostream& triangles_out) {
  vertices_out << "id,x,y,boundary\n";
  std::vector<char> on_boundary(mesh.num_vertices(), 0);
  for (int b : mesh.boundary) on_boundary[b] = 1;
  vertices_out.precision(17);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    vertices_out << i << ',' << mesh.vertices[i].x() << ',' << mesh.vertices[i].y() << ','
                 << int(on_boundary[i]) << '\n';
  triangles_out << "id,v0,v1,v2\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    triangles_out << t << ',' << tri[0] << ',' << tri[1] << ',' << tri[2] << '\n';
  }
}

// ---------------------------------------------------------------------------

ScalarField FemSystem::expand(const Eigen::VectorXd& interior_values) const {
  ScalarField full = ScalarField::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t i = 0; i < interior.size(); ++i) full[interior[i]] = interior_values[static_cast<Eigen::Index>(i)];
  return full;
}

Eigen::VectorXd FemSystem::restrict_to_interior(const ScalarField& field) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t i = 0; i < interior.size(); ++i) out[static_cast<Eigen::Index>(i)] = field[interior[i]];
  return out;
}

double FemSystem::integral(const ScalarField& field) const {
  return (mass * field).sum();
}

FemSystem assemble(TriMesh mesh) {
  FemSystem sys;
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<Eigen::Triplet<double>> k_trip, m_trip;
  k_trip.reserve(9 * mesh.triangles.size());
  m_trip.reserve(9 * mesh.triangles.size());

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    const double area = mesh.signed_area(t);
    // Gradients of the barycentric coordinates: rot(opposite edge) / (2 area).
    std::array<Point, 3> grad;
    grad[0] = Point(p1.y() - p2.y(), p2.x() - p1.x()) / (2.0 * area);
    grad[1] = Point(p2.y() - p0.y(), p0.x() - p2.x()) / (2.0 * area);
    grad[2] = Point(p0.y() - p1.y(), p1.x() - p0.x()) / (2.0 * area);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        k_trip.emplace_back(tri[a], tri[b], area * grad[a].dot(grad[b]));
        m_trip.emplace_back(tri[a], tri[b], area * (a == b ? 2.0 : 1.0) / 12.0);
      }
    }
  }
  sys.stiffness.resize(n, n);
  sys.mass.resize(n, n);
  sys.stiffness.setFromTriplets(k_trip.begin(), k_trip.end());
  sys.mass.setFromTriplets(m_trip.begin(), m_trip.end());

  sys.interior_index.assign(mesh.num_vertices(), 0);
  for (int b : mesh.boundary) sys.interior_index[b] = -1;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (sys.interior_index[v] < 0) continue;
    sys.interior_index[v] = static_cast<int>(sys.interior.size());
    sys.interior.push_back(static_cast<int>(v));
  }

  auto eliminate = [&](const SparseMatrix& full) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(full.nonZeros()));
    for (Eigen::Index col = 0; col < full.outerSize(); ++col) {
      const int jc = sys.interior_index[static_cast<std::size_t>(col)];
      if (jc < 0) continue;
      for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
        const int ir = sys.interior_index[static_cast<std::size_t>(it.row())];
        if (ir >= 0) trip.emplace_back(ir, jc, it.value());
      }
    }
    const auto m = static_cast<Eigen::Index>(sys.interior.size());
    SparseMatrix out(m, m);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
  };
  sys.stiffness_interior = eliminate(sys.stiffness);
  sys.mass_interior = eliminate(sys.mass);

  const std::size_t nb = mesh.boundary.size();
  sys.boundary_weight.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const Point& prev = mesh.vertices[mesh.boundary[(i + nb - 1) % nb]];
    const Point& here = mesh.vertices[mesh.boundary[i]];
    const Point& next = mesh.vertices[mesh.boundary[(i + 1) % nb]];
    sys.boundary_weight[i] = 0.5 * ((here - prev).norm() + (next - here).norm());
  }
  sys.mesh = std::move(mesh);
  return sys;
}

}  // namespace shapelab

#include "shapelab/elliptic.hpp"

#include "shapelab/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace shapelab {

namespace {

using Factorization = Eigen::SimplicialLDLT<SparseMatrix>;

void factorize(Factorization& solver, const SparseMatrix& k) {
  solver.compute(k);
  if (solver.info() != Eigen::Success) throw SolveFailure("sparse LDLT factorization of the stiffness matrix failed");
}

double relative_residual(const FemSystem& sys, const Eigen::VectorXd& x, double lambda) {
  const Eigen::VectorXd mx = sys.mass_interior * x;
  return (sys.stiffness_interior * x - lambda * mx).norm() / mx.norm();
}

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

}  // namespace

SpectralResult solve_spectrum(const FemSystem& sys, const EigenSolverOptions& opts) {
  const auto n = static_cast<Eigen::Index>(sys.interior.size());
  if (n < 2) throw SolveFailure("solve_spectrum: fewer than two interior unknowns");
  const Eigen::Index p = std::min<Eigen::Index>(std::max(opts.block_size, 2), n);

  Factorization solver;
  factorize(solver, sys.stiffness_interior);

  Eigen::MatrixXd x(n, p);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  x.col(0).setOnes();
  for (Eigen::Index j = 1; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = uni(rng);

  SpectralResult out;
  Eigen::VectorXd lambdas;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const Eigen::MatrixXd y = solver.solve(sys.mass_interior * x);
    if (solver.info() != Eigen::Success) throw SolveFailure("solve_spectrum: back substitution failed");
    Eigen::MatrixXd a = y.transpose() * (sys.stiffness_interior * y);
    Eigen::MatrixXd b = y.transpose() * (sys.mass_interior * y);
    a = 0.5 * (a + a.transpose()).eval();
    b = 0.5 * (b + b.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(a, b);
    if (ritz.info() != Eigen::Success) throw SolveFailure("solve_spectrum: Rayleigh-Ritz step failed");
    x = y * ritz.eigenvectors();
    lambdas = ritz.eigenvalues();
    out.residual1 = relative_residual(sys, x.col(0), lambdas[0]);
    out.residual2 = relative_residual(sys, x.col(1), lambdas[1]);
    if (out.residual1 < opts.tol && out.residual2 < opts.tol2) {
      ++it;
      break;
    }
  }
  out.iterations = it;
  if (!(out.residual1 < opts.tol)) throw NoConvergence("solve_spectrum: first eigenpair did not converge", it);

  Eigen::VectorXd u = x.col(0);
  u /= std::sqrt(u.dot(sys.mass_interior * u));
  if ((sys.mass_interior * u).sum() < 0.0) u = -u;
  if (u.minCoeff() < -1e-10) throw SolverError("solve_spectrum: first eigenvector changes sign");

  out.lambda1 = lambdas[0];
  out.lambda2 = lambdas[1];
  out.u = sys.expand(u);
  out.gap_ok = out.lambda2 - out.lambda1 >= opts.gap_min;
  return out;
}

TorsionResult solve_torsion(const FemSystem& sys) {
  Factorization solver;
  factorize(solver, sys.stiffness_interior);
  const ScalarField ones = ScalarField::Ones(static_cast<Eigen::Index>(sys.mesh.num_vertices()));
  const Eigen::VectorXd load = sys.restrict_to_interior(sys.mass * ones);
  const Eigen::VectorXd w = solver.solve(load);
  if (solver.info() != Eigen::Success) throw SolveFailure("solve_torsion: back substitution failed");

  TorsionResult out;
  out.w = sys.expand(w);
  out.dirichlet = w.dot(sys.stiffness_interior * w);
  out.integral = load.dot(w);
  out.tor = 0.5 * out.dirichlet - out.integral;
  return out;
}

std::vector<double> boundary_flux(const FemSystem& sys, const ScalarField& field, const ScalarField& rhs) {
  const Eigen::VectorXd residual = sys.stiffness * field - sys.mass * rhs;
  std::vector<double> flux(sys.mesh.boundary.size());
  for (std::size_t i = 0; i < flux.size(); ++i)
    flux[i] = std::abs(residual[sys.mesh.boundary[i]] / sys.boundary_weight[i]);
  return flux;
}

BoundaryTrace boundary_trace(const FemSystem& sys, const SpectralResult& s, const TorsionResult& t) {
  BoundaryTrace trace;
  trace.theta = sys.mesh.boundary_theta;
  trace.grad_u = boundary_flux(sys, s.u, s.lambda1 * s.u);
  trace.grad_w = boundary_flux(sys, t.w, ScalarField::Ones(static_cast<Eigen::Index>(sys.mesh.num_vertices())));
  return trace;
}

GrowthDiagnostics growth_diagnostics(const StarDomain& d, const FemSystem& sys, const SpectralResult& s,
                                     const TorsionResult& t, double torsion_coeff) {
  const TriMesh& mesh = sys.mesh;
  const ScalarField q = s.u + std::sqrt(std::max(torsion_coeff, 0.0)) * t.w;

  constexpr int kCurveSamples = 2048;
  std::vector<Point> curve(kCurveSamples);
  for (int i = 0; i < kCurveSamples; ++i) curve[i] = d.boundary_point(2.0 * kPi * i / kCurveSamples);

  GrowthDiagnostics out;
  out.up = 0.0;
  for (int v : sys.interior) {
    const Point& x = mesh.vertices[v];
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kCurveSamples; ++i)
      dist = std::min(dist, point_segment_distance(x, curve[i], curve[(i + 1) % kCurveSamples]));
    if (dist > 0.0) out.up = std::max(out.up, q[v] / dist);
  }

  constexpr std::size_t kSeeds = 64;
  const std::size_t nb = mesh.boundary.size();
  const std::size_t stride = std::max<std::size_t>(1, nb / kSeeds);
  const double r_max = 0.5 * d.min_radius();
  const double r_min = 2.0 * mesh.h;
  out.down = std::numeric_limits<double>::infinity();
  std::vector<double> dist(mesh.num_vertices());
  for (std::size_t b = 0; b < nb; b += stride) {
    const Point& y = mesh.vertices[mesh.boundary[b]];
    for (std::size_t v = 0; v < dist.size(); ++v) dist[v] = (mesh.vertices[v] - y).norm();
    for (double r = r_max; r >= r_min; r *= 0.5) {
      double sup = 0.0;
      for (std::size_t v = 0; v < dist.size(); ++v)
        if (dist[v] <= r) sup = std::max(sup, q[static_cast<Eigen::Index>(v)]);
      out.down = std::min(out.down, sup / r);
    }
  }
  return out;
}

FemSystem build_system(const StarDomain& d, const Resolution& res) {
  TriMesh mesh = res.rings > 0 ? triangulate_rings(d, res.rings) : triangulate(d, res.h);
  // Pinned ring counts keep the nominal spacing so nearby domains share it.
  if (res.rings > 0 && res.h > 0.0) mesh.h = res.h;
  return assemble(std::move(mesh));
}

DomainSolution solve_domain(const StarDomain& d, const Resolution& res, const EigenSolverOptions& opts) {
  FemSystem sys = build_system(d, res);
  SpectralResult spectrum = solve_spectrum(sys, opts);
  TorsionResult torsion = solve_torsion(sys);
  const double h = sys.mesh.h;
  return {d, std::move(sys), std::move(spectrum), std::move(torsion), h};
}

}  // namespace shapelab

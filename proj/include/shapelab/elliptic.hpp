#pragma once

#include "shapelab/geometry.hpp"
#include "shapelab/mesh.hpp"

#include <vector>

namespace shapelab {

struct EigenSolverOptions {
  int max_iter = 500;
  int block_size = 6;
  /// Target for ||K u - lambda M u|| / ||M u|| on the first pair.
  double tol = 1e-10;
  /// Target on the second pair (it only feeds the gap test).
  double tol2 = 1e-8;
  double gap_min = 0.5;
};

struct SpectralResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  ScalarField u;  // u >= 0, u^T M u = 1
  double residual1 = 0.0;
  double residual2 = 0.0;
  bool gap_ok = false;
  int iterations = 0;
};

struct TorsionResult {
  ScalarField w;
  double tor = 0.0;            // 1/2 w^T K w - int w
  double dirichlet = 0.0;      // w^T K w
  double integral = 0.0;       // int w
};

/// |d_nu u| and |d_nu w| at the boundary vertices, ordered by theta.
struct BoundaryTrace {
  std::vector<double> theta;
  std::vector<double> grad_u;
  std::vector<double> grad_w;
};

/// Two lowest eigenpairs of (K, M) with Dirichlet rows eliminated. Uses
/// inverse subspace iteration on a small block with Rayleigh-Ritz
/// projection and mass-orthonormalization. Throws NoConvergence when the
/// first residual misses `tol` after max_iter sweeps.
SpectralResult solve_spectrum(const FemSystem& sys, const EigenSolverOptions& opts = {});

/// -Laplace w = 1, w = 0 on the boundary.
TorsionResult solve_torsion(const FemSystem& sys);

/// Variational flux recovery: the residual of the discrete equation tested
/// against each boundary hat function, divided by its lumped boundary mass.
/// Returns |flux| per boundary vertex (order of mesh.boundary).
std::vector<double> boundary_flux(const FemSystem& sys, const ScalarField& field, const ScalarField& rhs);

BoundaryTrace boundary_trace(const FemSystem& sys, const SpectralResult& s, const TorsionResult& t);

struct GrowthDiagnostics {
  double up = 0.0;
  double down = 0.0;
};

/// Vertex-sampled estimates of sup (u + sqrt(T) w) / dist(x, boundary) and of
/// the smallest boundary-centered growth rate sup_{B_r(y)} (u + sqrt(T) w) / r.
GrowthDiagnostics growth_diagnostics(const StarDomain& d, const FemSystem& sys, const SpectralResult& s,
                                     const TorsionResult& t, double torsion_coeff);

/// Mesh resolution: target edge length, optionally pinned to a ring count.
struct Resolution {
  double h = 0.02;
  int rings = 0;  // 0: derived from h
  double grid = 0.0;  // background grid spacing, 0: h / 2

  double grid_spacing() const { return grid > 0.0 ? grid : 0.5 * h; }
};

/// Everything solved on one domain at one resolution.
struct DomainSolution {
  StarDomain domain;
  FemSystem system;
  SpectralResult spectrum;
  TorsionResult torsion;
  double h = 0.0;  // mesh spacing actually used
};

FemSystem build_system(const StarDomain& d, const Resolution& res);
DomainSolution solve_domain(const StarDomain& d, const Resolution& res, const EigenSolverOptions& opts = {});

}  // namespace shapelab

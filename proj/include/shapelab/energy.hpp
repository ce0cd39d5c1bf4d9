#pragma once

#include "shapelab/distances.hpp"
#include "shapelab/elliptic.hpp"

namespace shapelab {

struct EnergyParams {
  double v = kPi;          // target area
  double vmax = 2.0 * kPi;  // hard cap
  double eta = 0.1;
  double torsion_coeff = 0.05;
  double tau = 0.0;
  double c_nl = 0.04;  // constant c of the nonlinearity
  double c0 = 0.0;     // psi transition scale, <= 0: 0.2 * matched radius
  double h_norm = 1.0;  // divisor applied to the nonlinearity

  /// Throws ValidationError on out-of-range values.
  void validate() const;
};

double volume_penalty(double t, double v, double eta);

/// One-sided slopes of volume_penalty at t (they differ only at t == v).
struct PenaltySlopes {
  double lower = 0.0;
  double upper = 0.0;
};
PenaltySlopes volume_penalty_slopes(double t, double v, double eta);

/// sqrt(c^2 + (c - d_star_sq)^2) - c.
double nonlinearity_h(double d_star_sq, double c);
/// Derivative of nonlinearity_h with respect to d_star_sq.
double nonlinearity_h_slope(double d_star_sq, double c);

struct EnergyReport {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double tor = 0.0;
  double vol = 0.0;
  double f_pen = 0.0;
  DistanceReport d_report;
  bool has_distances = false;
  double h_val = 0.0;
  double E_base = 0.0;
  double F_total = 0.0;
  bool gap_ok = false;
  double mesh_h = 0.0;
};

struct EvaluateOptions {
  /// Distances are always computed when tau > 0; otherwise only on request.
  bool distances = true;
  EigenSolverOptions eigen;
};

/// Energy of an already solved domain.
EnergyReport compose_report(const DomainSolution& sol, const EnergyParams& p, const Resolution& res,
                            const EvaluateOptions& opts = {});

/// Full pipeline: mesh, spectrum, torsion, distances, report. Throws
/// HardCapViolation when area(d) > vmax.
EnergyReport evaluate(const StarDomain& d, const EnergyParams& p, const Resolution& res,
                      const EvaluateOptions& opts = {});

/// Errors of the discrete pipeline on the disk of area p.v, where every
/// quantity is known in closed form. Tolerances of the form "k * floor" use
/// these numbers.
struct DiscretizationFloor {
  double lambda = 0.0;    // |lambda1_h - lambda1|
  double energy = 0.0;    // |E_h - E| for the base energy
  double distance = 0.0;  // d_star of the disk to its own matched ball
  double d1 = 0.0;
};

DiscretizationFloor discretization_floor(const EnergyParams& p, const Resolution& res);

}  // namespace shapelab

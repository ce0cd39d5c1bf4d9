#pragma once

#include "shapelab/elliptic.hpp"
#include "shapelab/energy.hpp"
#include "shapelab/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shapelab {

/// Boundary deformation given by its radial velocity
/// dr(theta) = sum_k alpha_k cos k theta + beta_k sin k theta (k >= 0,
/// absolute length units). The normal speed is dr r / sqrt(r^2 + r'^2), so
/// (T.nu) ds = dr r dtheta.
struct BoundaryField {
  std::vector<FourierMode> modes;  // k = 0 uses `a` only

  static BoundaryField constant(double value);
  static BoundaryField cosine(int k, double amplitude = 1.0);
  static BoundaryField sine(int k, double amplitude = 1.0);

  double radial(double theta) const;
  double normal_speed(const StarDomain& d, double theta) const;
  double max_abs() const;
  /// Integral of (T.nu) over the boundary, i.e. the first variation of area.
  double flux(const StarDomain& d) const;
  bool zero_mean(const StarDomain& d) const;

  BoundaryField operator+(const BoundaryField& other) const;
  BoundaryField scaled(double factor) const;
};

/// Domain with radius r(theta) + t dr(theta).
StarDomain perturb(const StarDomain& d, const BoundaryField& field, double t);

struct ShapeGradient {
  double dLambda1 = 0.0;
  double dTor = 0.0;
  double dVol = 0.0;
  Point dBary = Point::Zero();
  std::optional<double> dH;
};

/// Boundary-integral first variations. `traces` must come from a mesh of `d`.
ShapeGradient hadamard(const StarDomain& d, const BoundaryTrace& traces, const BoundaryField& field);

/// Solution, energy report and boundary traces at a pinned ring count.
struct Evaluation {
  DomainSolution solution;
  EnergyReport report;
  BoundaryTrace trace;
  Resolution resolution;  // rings pinned
};

Evaluation evaluate_full(const StarDomain& d, const EnergyParams& p, const Resolution& res,
                         const EvaluateOptions& opts = {});

struct FunctionalGradient {
  /// Directional derivative of F_tau along the field.
  double value = 0.0;
  /// Same with the lower / upper slope of the volume penalty.
  double lower = 0.0;
  double upper = 0.0;
  bool at_kink = false;
  ShapeGradient parts;
  double d_asym = 0.0;
  double d_d1_sq = 0.0;
  double d_h = 0.0;
};

/// Directional derivative of F_tau = E + tau h. Eigenvalue, torsion, area and
/// barycenter enter through hadamard(); the psi asymmetry through its boundary
/// integral plus the matched-ball recentering; d1^2 through central
/// differences of the full pipeline with step `fd_step` (max displacement).
FunctionalGradient grad_F(const Evaluation& base, const EnergyParams& p, const BoundaryField& field,
                          double fd_step = 1e-3);

/// Derivative of the asymmetry alone (with matched-ball recentering).
double asymmetry_derivative(const StarDomain& d, const BoundaryField& field, double c0_param);

/// Central difference of evaluate().F_total along the field at pinned rings.
double fd_energy(const StarDomain& d, const EnergyParams& p, const BoundaryField& field, const Resolution& res,
                 double step);

/// One row of a gradient check.
struct GradientCheckRow {
  std::string functional;
  double analytic = 0.0;
  double fd = 0.0;       // Richardson-extrapolated central difference
  double rel_err = 0.0;
  double fd_order = 0.0;  // observed order of the FD truncation error
  bool fd_exact = false;  // FD differences at round-off level
};

/// Compares hadamard() with central differences of lambda1, tor, area and
/// barycenter using steps t, t/2, t/4 (t = max displacement).
std::vector<GradientCheckRow> check_gradient(const StarDomain& d, const BoundaryField& field, const Resolution& res,
                                             double step = 1e-2);

struct FreeBoundaryResidual {
  std::vector<double> theta;
  std::vector<double> q;         // |d_nu u|^2 + (T/2) |d_nu w|^2
  std::vector<double> residual;  // q - a0
  std::vector<double> weight;    // arclength weight per sample
  double a0 = 0.0;
  double sup_norm = 0.0;
  double cv = 0.0;  // arclength coefficient of variation
};

FreeBoundaryResidual fb_residual(const StarDomain& d, const BoundaryTrace& traces, double torsion_coeff);

}  // namespace shapelab

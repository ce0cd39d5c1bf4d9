#include "shapelab/energy.hpp"

#include "shapelab/bessel.hpp"
#include "shapelab/errors.hpp"

#include <cmath>
#include <string>

namespace shapelab {

void EnergyParams::validate() const {
  if (!(v > 0.0) || !(vmax > v)) throw ValidationError("EnergyParams: need 0 < v < vmax");
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("EnergyParams: eta must lie in (0, 1)");
  if (!(torsion_coeff >= 0.0 && torsion_coeff <= 1.0))
    throw ValidationError("EnergyParams: torsion coefficient must lie in [0, 1]");
  if (!(tau >= 0.0)) throw ValidationError("EnergyParams: tau must be nonnegative");
  if (tau > 0.0 && !(c_nl > 0.0)) throw ValidationError("EnergyParams: c_nl must be positive when tau > 0");
  if (!(h_norm > 0.0)) throw ValidationError("EnergyParams: h_norm must be positive");
}

double volume_penalty(double t, double v, double eta) {
  return t <= v ? eta * (t - v) : (t - v) / eta;
}

PenaltySlopes volume_penalty_slopes(double t, double v, double eta) {
  if (t < v) return {eta, eta};
  if (t > v) return {1.0 / eta, 1.0 / eta};
  return {eta, 1.0 / eta};
}

double nonlinearity_h(double d_star_sq, double c) {
  const double gap = c - d_star_sq;
  return std::sqrt(c * c + gap * gap) - c;
}

double nonlinearity_h_slope(double d_star_sq, double c) {
  const double gap = d_star_sq - c;
  return gap / std::sqrt(c * c + gap * gap);
}

EnergyReport compose_report(const DomainSolution& sol, const EnergyParams& p, const Resolution& res,
                            const EvaluateOptions& opts) {
  EnergyReport r;
  r.lambda1 = sol.spectrum.lambda1;
  r.lambda2 = sol.spectrum.lambda2;
  r.gap_ok = sol.spectrum.gap_ok;
  r.tor = sol.torsion.tor;
  r.vol = area(sol.domain);
  r.f_pen = volume_penalty(r.vol, p.v, p.eta);
  r.mesh_h = sol.h;
  r.E_base = r.lambda1 + p.torsion_coeff * r.tor + r.f_pen;
  if (opts.distances || p.tau > 0.0) {
    r.d_report = distance_report(sol, p.c0, res.grid);
    r.has_distances = true;
    r.h_val = p.tau > 0.0 || p.c_nl > 0.0 ? nonlinearity_h(r.d_report.d_star_sq, p.c_nl) / p.h_norm : 0.0;
  }
  r.F_total = r.E_base + p.tau * r.h_val;
  return r;
}

EnergyReport evaluate(const StarDomain& d, const EnergyParams& p, const Resolution& res, const EvaluateOptions& opts) {
  p.validate();
  const double a = area(d);
  if (a > p.vmax)
    throw HardCapViolation("evaluate: area " + std::to_string(a) + " exceeds the hard cap " + std::to_string(p.vmax));
  const DomainSolution sol = solve_domain(d, res, opts.eigen);
  return compose_report(sol, p, res, opts);
}

DiscretizationFloor discretization_floor(const EnergyParams& p, const Resolution& res) {
  const double radius = std::sqrt(p.v / kPi);
  const StarDomain disk = StarDomain::disk(radius);
  const EnergyReport r = evaluate(disk, p, res, {.distances = true, .eigen = {}});
  DiscretizationFloor f;
  f.lambda = std::abs(r.lambda1 - bessel::disk_lambda1(radius));
  const double exact = bessel::disk_lambda1(radius) + p.torsion_coeff * bessel::disk_torsion(radius);
  f.energy = std::abs(r.E_base - exact);
  f.distance = std::sqrt(r.d_report.d_star_sq);
  f.d1 = r.d_report.d1;
  return f;
}

}  // namespace shapelab

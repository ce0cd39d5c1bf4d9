#pragma once

#include "shapelab/energy.hpp"
#include "shapelab/geometry.hpp"
#include "shapelab/shapegrad.hpp"

#include <string>
#include <vector>

namespace shapelab {

enum class VolumeMode { renormalize, penalized };

struct OptimizerConfig {
  int max_modes = 8;
  /// Largest coefficient change attempted by the first line search.
  double initial_step = 0.02;
  double armijo_factor = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 30;
  int max_iter = 60;
  double grad_tol = 1e-3;
  VolumeMode volume = VolumeMode::renormalize;
  double h_coarse = 0.04;
  double h_fine = 0.02;
  /// Iteration budget reserved for the fine mesh.
  int fine_iterations = 10;
  /// Step (max boundary displacement) of the d1^2 finite differences.
  double fd_step = 1e-3;
  int jobs = 1;

  void validate() const;
};

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double area = 0.0;
  double d_star_sq = 0.0;
  double h = 0.0;
  double step = 0.0;
};

struct OptimizeResult {
  StarDomain domain = StarDomain::disk(1.0);
  std::vector<TraceRow> trace;
  EnergyReport final_report;  // at h_fine
  bool converged = false;
  bool stalled = false;  // line search found no decrease
  int accepted_steps = 0;
};

/// Preconditioned gradient descent with Armijo backtracking on the Fourier
/// coefficients a_k, b_k (k <= max_modes) and, on the penalized track, r0.
/// On the renormalize track every iterate is rescaled to area p.v. Trial
/// domains that are invalid, exceed vmax or fail the spectral-gap test count
/// as rejected probes.
OptimizeResult minimize(const StarDomain& start, const EnergyParams& p, const OptimizerConfig& cfg);

struct SelectionRun {
  StarDomain seed = StarDomain::disk(1.0);
  StarDomain minimizer = StarDomain::disk(1.0);
  double d_j = 0.0;  // d_star(seed)
  double c_nl = 0.0;
  double tau = 0.0;
  double energy_ball = 0.0;
  double deficit_seed = 0.0;
  double deficit_minimizer = 0.0;
  double d_star_minimizer = 0.0;
  double xi_max_seed = 0.0;
  double xi_max_minimizer = 0.0;
  double tolerance_energy = 0.0;
  double tolerance_distance = 0.0;
  bool converged = false;
  bool verdict_deficit = false;   // E(V) - E(B) <= E(seed) - E(B) + tol
  bool verdict_distance = false;  // d_j / 2 <= d_star(V) + tol
  OptimizeResult run;
};

/// Sets c_nl = d_star(seed)^2 and minimizes F_tau from the seed on the
/// renormalize track. Throws ValidationError when d_star(seed) is not above
/// three times the distance floor.
SelectionRun selection_step(const StarDomain& seed, const EnergyParams& p_base, const OptimizerConfig& cfg);

struct SweepRow {
  int k = 0;
  double t = 0.0;
  double deficit = 0.0;  // E(Omega) - E(B)
  double d0 = 0.0;
  double d1 = 0.0;
  double asym = 0.0;
  double d_star_sq = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<int> ks;
  std::vector<double> c_k;  // least-squares fit deficit ~ c_k t^2 per k
  double min_ratio = 0.0;   // min over k >= 2 of deficit / d_star_sq
  double energy_ball = 0.0;
};

/// Volume-renormalized, barycenter-centered domains r = r0 (1 + t cos k theta)
/// against the ball of area p.v, all on one pinned ring count.
SweepTable stability_sweep(const std::vector<int>& ks, const std::vector<double>& ts, const EnergyParams& p,
                           const Resolution& res, int jobs = 1);

/// Domain used by the stability sweep.
StarDomain sweep_domain(int k, double t, double v);

struct KeyEstimateReport {
  double lhs_one = 0.0;   // |int (u_outer - u_inner)|
  double lhs_sign = 0.0;  // int |u_outer - u_inner|
  double d_tor = 0.0;     // tor(inner) - tor(outer)
  double d_lambda = 0.0;  // lambda1(inner) - lambda1(outer)
  double rhs = 0.0;
  double c_emp = 0.0;
  bool monotone = false;
};

/// Throws NotNested unless inner is contained in outer.
KeyEstimateReport key_estimate_check(const StarDomain& inner, const StarDomain& outer, const Resolution& res);

}  // namespace shapelab

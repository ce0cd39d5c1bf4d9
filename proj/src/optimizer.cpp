#include "shapelab/optimizer.hpp"

#include "shapelab/errors.hpp"
#include "shapelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace shapelab {

void OptimizerConfig::validate() const {
  if (max_modes < 1 || max_modes > kMaxMode) throw ValidationError("OptimizerConfig: mode cap out of range");
  if (!(initial_step > 0.0)) throw ValidationError("OptimizerConfig: initial step must be positive");
  if (!(armijo_factor > 0.0 && armijo_factor < 1.0)) throw ValidationError("OptimizerConfig: Armijo factor must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
    throw ValidationError("OptimizerConfig: sufficient decrease must lie in (0, 1)");
  if (max_backtracks < 1) throw ValidationError("OptimizerConfig: max_backtracks must be positive");
  if (max_iter < 0 || fine_iterations < 0) throw ValidationError("OptimizerConfig: iteration counts must be nonnegative");
  if (!(grad_tol > 0.0)) throw ValidationError("OptimizerConfig: gradient tolerance must be positive");
  if (!(h_coarse > 0.0 && h_fine > 0.0)) throw ValidationError("OptimizerConfig: mesh sizes must be positive");
  if (!(fd_step > 0.0)) throw ValidationError("OptimizerConfig: fd_step must be positive");
  if (jobs < 1) throw ValidationError("OptimizerConfig: jobs must be positive");
}

namespace {

// Below this distance from the target area the volume penalty is treated as
// nonsmooth and the min-norm subgradient is used.
constexpr double kKinkBand = 1e-6;

struct Coordinate {
  BoundaryField field;  // absolute radial velocity of a unit coordinate change
  double weight = 1.0;  // diagonal preconditioner
};

// Coordinate fields at d: a_k -> r0 cos k, b_k -> r0 sin k, r0 -> 1 + xi. In
// renormalize mode the area change is projected out along the dilation field.
std::vector<Coordinate> coordinates(const StarDomain& d, const OptimizerConfig& cfg) {
  BoundaryField dilation = BoundaryField::constant(1.0);
  for (const auto& m : d.modes()) dilation.modes.push_back(m);
  const double dilation_flux = dilation.flux(d);

  std::vector<Coordinate> out;
  for (int k = 1; k <= cfg.max_modes; ++k) {
    for (int s = 0; s < 2; ++s) {
      BoundaryField f = s == 0 ? BoundaryField::cosine(k, d.r0()) : BoundaryField::sine(k, d.r0());
      if (cfg.volume == VolumeMode::renormalize) f = f + dilation.scaled(-f.flux(d) / dilation_flux);
      out.push_back({std::move(f), 1.0 / k});
    }
  }
  if (cfg.volume == VolumeMode::penalized) out.push_back({dilation, 1.0});
  return out;
}

struct Probe {
  std::optional<Evaluation> eval;
  double objective = std::numeric_limits<double>::infinity();
};

EvaluateOptions probe_options(const EnergyParams& p) { return {.distances = p.tau > 0.0, .eigen = {}}; }

// Rejected probes (invalid or over-cap domains, degenerate meshes, small
// spectral gap) come back without an evaluation.
Probe probe(const StarDomain& base, const BoundaryField& step, const EnergyParams& p, const Resolution& res,
            bool retract) {
  Probe out;
  try {
    StarDomain trial = perturb(base, step, 1.0);
    if (retract) trial = trial.with_area(p.v);
    Evaluation e = evaluate_full(trial, p, res, probe_options(p));
    if (!e.report.gap_ok) return out;
    out.objective = e.report.F_total;
    out.eval = std::move(e);
  } catch (const InvalidDomain&) {
  } catch (const HardCapViolation&) {
  } catch (const DegenerateMesh&) {
  }
  return out;
}

struct Gradient {
  std::vector<double> smooth;  // everything but the volume penalty
  std::vector<double> volume;  // area derivative
};

Gradient coordinate_gradient(const Evaluation& e, const EnergyParams& p, const std::vector<Coordinate>& coords,
                             const OptimizerConfig& cfg) {
  Gradient g;
  g.smooth.resize(coords.size());
  g.volume.resize(coords.size());
  parallel_for(coords.size(), cfg.jobs, [&](std::size_t j) {
    const FunctionalGradient fg = grad_F(e, p, coords[j].field, cfg.fd_step);
    g.smooth[j] = fg.parts.dLambda1 + p.torsion_coeff * fg.parts.dTor + p.tau * fg.d_h;
    g.volume[j] = fg.parts.dVol;
  });
  return g;
}

double weighted_dot(const std::vector<double>& x, const std::vector<double>& y, const std::vector<Coordinate>& c) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += c[j].weight * x[j] * y[j];
  return s;
}

struct Subgradient {
  std::vector<double> g;
  // The min-norm element uses an interior penalty slope, so the kink is
  // locally optimal in the area direction and trials are pulled back onto it.
  bool hold_kink = false;
};

// Descent subgradient of smooth + f_pen(area): the one-sided slope of the
// side we are on, or at the kink the element of smallest weighted norm.
Subgradient subgradient(const Gradient& g, double area_value, const EnergyParams& p,
                        const std::vector<Coordinate>& coords) {
  Subgradient out;
  double slope;
  if (std::abs(area_value - p.v) < kKinkBand) {
    const double vv = weighted_dot(g.volume, g.volume, coords);
    const double sv = weighted_dot(g.smooth, g.volume, coords);
    const double s_free = vv > 0.0 ? -sv / vv : p.eta;
    slope = std::clamp(s_free, p.eta, 1.0 / p.eta);
    out.hold_kink = vv > 0.0 && slope == s_free;
  } else {
    slope = area_value < p.v ? p.eta : 1.0 / p.eta;
  }
  out.g.resize(g.smooth.size());
  for (std::size_t j = 0; j < out.g.size(); ++j) out.g[j] = g.smooth[j] + slope * g.volume[j];
  return out;
}

BoundaryField combine(const std::vector<Coordinate>& coords, const std::vector<double>& dir, double alpha) {
  BoundaryField f;
  for (std::size_t j = 0; j < coords.size(); ++j)
    if (dir[j] != 0.0) f = f + coords[j].field.scaled(alpha * dir[j]);
  return f;
}

// Step along the ray at which the area crosses p.v, if it does so before
// alpha_max (penalized track only).
std::optional<double> area_breakpoint(const StarDomain& d, const std::vector<Coordinate>& coords,
                                      const std::vector<double>& dir, double alpha_max, const EnergyParams& p) {
  auto side = [&](double alpha) {
    try {
      return area(perturb(d, combine(coords, dir, alpha), 1.0)) - p.v;
    } catch (const InvalidDomain&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const double s0 = area(d) - p.v;
  const double s1 = side(alpha_max);
  if (!std::isfinite(s1) || s0 == 0.0 || (s0 > 0.0) == (s1 > 0.0)) return std::nullopt;
  double lo = 0.0, hi = alpha_max;
  for (int i = 0; i < 100 && hi - lo > 1e-15 * alpha_max; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double s = side(mid);
    if ((s > 0.0) == (s0 > 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double vector_norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void ensure_distances(Evaluation& e, const EnergyParams& p) {
  if (e.report.has_distances) return;
  e.report.d_report = distance_report(e.solution, p.c0, e.resolution.grid);
  e.report.has_distances = true;
}

TraceRow trace_row(int iteration, const Evaluation& e, double grad_norm, double step) {
  return {iteration, e.report.F_total, grad_norm, e.report.vol, e.report.d_report.d_star_sq, e.solution.h, step};
}

}  // namespace

OptimizeResult minimize(const StarDomain& start, const EnergyParams& p, const OptimizerConfig& cfg) {
  p.validate();
  cfg.validate();
  if (cfg.volume == VolumeMode::renormalize && std::abs(area(start) - p.v) > 1e-10 * p.v)
    throw ValidationError("minimize: start must have area v on the renormalize track");

  OptimizeResult result{start, {}, {}, false, false, 0};
  StarDomain current = start;
  const int coarse_budget = std::max(0, cfg.max_iter - cfg.fine_iterations);
  const std::vector<std::pair<double, int>> levels = {{cfg.h_coarse, coarse_budget},
                                                      {cfg.h_fine, std::min(cfg.fine_iterations, cfg.max_iter)}};
  int iteration = 0;
  for (std::size_t level = 0; level < levels.size(); ++level) {
    const auto [h, budget] = levels[level];
    const bool last = level + 1 == levels.size();
    if (budget == 0 && !last) continue;
    Resolution res{h, rings_for(current, h), 0.0};
    Evaluation e = evaluate_full(current, p, res, probe_options(p));
    ensure_distances(e, p);
    double alpha_hint = std::numeric_limits<double>::infinity();
    bool done = false;
    result.stalled = false;
    for (int it = 0; it <= budget; ++it) {
      const std::vector<Coordinate> coords = coordinates(current, cfg);
      const Gradient g = coordinate_gradient(e, p, coords, cfg);
      const Subgradient sg = subgradient(g, e.report.vol, p, coords);
      const std::vector<double>& sub = sg.g;
      const bool retract = cfg.volume == VolumeMode::renormalize || sg.hold_kink;
      const double gnorm = vector_norm(sub);
      result.trace.push_back(trace_row(iteration, e, gnorm, 0.0));
      if (gnorm < cfg.grad_tol) {
        done = true;
        break;
      }
      if (it == budget) break;

      std::vector<double> dir(sub.size());
      double dir_max = 0.0, slope = 0.0;
      for (std::size_t j = 0; j < dir.size(); ++j) {
        dir[j] = -coords[j].weight * sub[j];
        dir_max = std::max(dir_max, std::abs(dir[j]));
        slope += sub[j] * dir[j];
      }
      double alpha = std::min(cfg.initial_step / dir_max, 4.0 * alpha_hint);
      const double f0 = e.report.F_total;
      std::optional<double> breakpoint;
      if (!retract && cfg.volume == VolumeMode::penalized && std::abs(e.report.vol - p.v) >= kKinkBand)
        breakpoint = area_breakpoint(current, coords, dir, alpha, p);

      std::optional<Probe> accepted;
      double accepted_alpha = 0.0;
      bool at_breakpoint = false;
      for (int bt = 0; bt < cfg.max_backtracks && !accepted; ++bt, alpha *= cfg.armijo_factor) {
        std::vector<double> trials = {alpha};
        // The kink is the likely minimizer along a ray that crosses it.
        if (breakpoint && *breakpoint < alpha) trials.insert(trials.begin(), *breakpoint);
        for (double a : trials) {
          Probe pr = probe(current, combine(coords, dir, a), p, res, retract);
          if (pr.eval && pr.objective < f0 && pr.objective <= f0 + cfg.sufficient_decrease * a * slope) {
            accepted = std::move(pr);
            accepted_alpha = a;
            at_breakpoint = breakpoint && a == *breakpoint;
            break;
          }
        }
        if (breakpoint && *breakpoint >= alpha) breakpoint.reset();
      }
      if (!accepted) {
        result.stalled = true;
        done = true;
        break;
      }
      if (!(accepted->objective < f0)) throw SolverError("minimize: accepted step did not decrease the objective");
      e = std::move(*accepted->eval);
      ensure_distances(e, p);
      current = e.solution.domain;
      // Landing on the kink says nothing about the curvature along the ray.
      if (!at_breakpoint) alpha_hint = accepted_alpha;
      ++result.accepted_steps;
      ++iteration;
      result.trace.back().step = accepted_alpha * dir_max;
    }
    if (last) {
      result.converged = done;
      result.final_report = e.report;
    }
  }
  result.domain = current;
  return result;
}

namespace {

// Sup of |rho - R| / R, rho the boundary radius about the matched-ball center.
double graph_deviation(const StarDomain& d) {
  const BallSpec ball = matched_ball(d);
  double m = 0.0;
  for (int i = 0; i < kQuadratureNodes; ++i) {
    const Point x = d.boundary_point(2.0 * kPi * i / kQuadratureNodes);
    m = std::max(m, std::abs((x - ball.center).norm() - ball.radius) / ball.radius);
  }
  return m;
}

}  // namespace

SelectionRun selection_step(const StarDomain& seed, const EnergyParams& p_base, const OptimizerConfig& cfg_in) {
  OptimizerConfig cfg = cfg_in;
  cfg.volume = VolumeMode::renormalize;
  p_base.validate();
  cfg.validate();

  const StarDomain start = seed.with_area(p_base.v);
  const Resolution fine{cfg.h_fine, 0, 0.0};
  const DiscretizationFloor floor = discretization_floor(p_base, fine);

  SelectionRun run;
  run.seed = start;
  run.tau = p_base.tau;
  const EnergyReport seed_report = evaluate(start, p_base, fine, {.distances = true, .eigen = {}});
  run.d_j = std::sqrt(seed_report.d_report.d_star_sq);
  run.tolerance_energy = 3.0 * floor.energy;
  run.tolerance_distance = 3.0 * floor.distance;
  if (!(run.d_j > run.tolerance_distance))
    throw ValidationError("selection_step: seed distance " + std::to_string(run.d_j) +
                          " is within three discretization floors of the ball");
  run.c_nl = run.d_j * run.d_j;

  EnergyParams p = p_base;
  p.c_nl = run.c_nl;
  const double radius = std::sqrt(p.v / kPi);
  run.energy_ball = evaluate(StarDomain::disk(radius), p, fine, {.distances = false, .eigen = {}}).E_base;
  run.deficit_seed = seed_report.E_base - run.energy_ball;
  run.xi_max_seed = graph_deviation(start);

  run.run = minimize(start, p, cfg);
  run.minimizer = run.run.domain;
  run.converged = run.run.converged;
  run.deficit_minimizer = run.run.final_report.E_base - run.energy_ball;
  run.d_star_minimizer = std::sqrt(run.run.final_report.d_report.d_star_sq);
  run.xi_max_minimizer = graph_deviation(run.minimizer);
  if (run.converged) {
    run.verdict_deficit = run.deficit_minimizer <= run.deficit_seed + run.tolerance_energy;
    run.verdict_distance = 0.5 * run.d_j <= run.d_star_minimizer + run.tolerance_distance;
  }
  return run;
}

StarDomain sweep_domain(int k, double t, double v) {
  const StarDomain d = StarDomain(Point::Zero(), 1.0, {{k, t, 0.0}}).with_area(v);
  return d.translated(-barycenter(d));
}

SweepTable stability_sweep(const std::vector<int>& ks, const std::vector<double>& ts, const EnergyParams& p,
                           const Resolution& res, int jobs) {
  p.validate();
  for (int k : ks)
    if (k < 1 || k > kMaxMode) throw ValidationError("stability_sweep: mode index out of range");
  for (double t : ts)
    if (!(t > 0.0) || t >= 1.0 - kStarFloor) throw ValidationError("stability_sweep: amplitude violates the star-shape floor");

  const StarDomain disk = StarDomain::disk(std::sqrt(p.v / kPi));
  Resolution pinned = res;
  if (pinned.rings <= 0) pinned.rings = rings_for(disk, res.h);

  SweepTable table;
  table.ks = ks;
  table.energy_ball = evaluate(disk, p, pinned, {.distances = false, .eigen = {}}).E_base;
  table.rows.resize(ks.size() * ts.size());
  parallel_for(table.rows.size(), jobs, [&](std::size_t i) {
    const int k = ks[i / ts.size()];
    const double t = ts[i % ts.size()];
    const EnergyReport r = evaluate(sweep_domain(k, t, p.v), p, pinned, {.distances = true, .eigen = {}});
    table.rows[i] = {k, t, r.E_base - table.energy_ball, r.d_report.d0, r.d_report.d1, r.d_report.asym,
                     r.d_report.d_star_sq};
  });

  table.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < ks.size(); ++a) {
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < ts.size(); ++b) {
      const SweepRow& row = table.rows[a * ts.size() + b];
      num += row.deficit * row.t * row.t;
      den += std::pow(row.t, 4);
      if (row.k >= 2 && row.d_star_sq > 0.0) table.min_ratio = std::min(table.min_ratio, row.deficit / row.d_star_sq);
    }
    table.c_k.push_back(num / den);
  }
  return table;
}

namespace {

void check_nested(const StarDomain& inner, const StarDomain& outer) {
  const double tol = 1e-12 * outer.max_radius();
  constexpr int kSamples = 4096;
  for (int i = 0; i < kSamples; ++i) {
    const double theta = 2.0 * kPi * i / kSamples;
    const double r = inner.radius(theta);
    for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const Point x = inner.center() + frac * r * Point(std::cos(theta), std::sin(theta));
      const Point rel = x - outer.center();
      const double rho = rel.norm();
      if (rho > tol && rho > outer.radius(std::atan2(rel.y(), rel.x())) + tol)
        throw NotNested("key_estimate_check: inner domain is not contained in the outer domain");
    }
  }
}

}  // namespace

KeyEstimateReport key_estimate_check(const StarDomain& inner, const StarDomain& outer, const Resolution& res) {
  check_nested(inner, outer);
  const DomainSolution si = solve_domain(inner, res);
  const DomainSolution so = solve_domain(outer, res);
  const double spacing = res.grid > 0.0 ? res.grid : 0.5 * std::min(si.h, so.h);
  const Point lo = outer.center() - Point::Constant(outer.max_radius());
  const Point hi = outer.center() + Point::Constant(outer.max_radius());
  const GridSpec grid = GridSpec::covering(lo, hi, spacing);
  GridField ui = rasterize(si.system.mesh, si.spectrum.u, grid);
  GridField uo = rasterize(so.system.mesh, so.spectrum.u, grid);
  ui.normalize_l2();
  uo.normalize_l2();

  KeyEstimateReport r;
  double sum = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double diff = uo.values[i] - ui.values[i];
    sum += diff;
    abs_sum += std::abs(diff);
  }
  const double cell = spacing * spacing;
  r.lhs_one = std::abs(sum) * cell;
  r.lhs_sign = abs_sum * cell;
  r.d_tor = si.torsion.tor - so.torsion.tor;
  r.d_lambda = si.spectrum.lambda1 - so.spectrum.lambda1;
  r.rhs = r.d_tor + r.d_lambda;
  const double lhs = std::max(r.lhs_one, r.lhs_sign);
  if (lhs == 0.0)
    r.c_emp = 0.0;
  else
    r.c_emp = r.rhs > 0.0 ? lhs / r.rhs : std::numeric_limits<double>::infinity();
  const double slack = 1e-12;
  r.monotone = r.d_lambda >= -slack * si.spectrum.lambda1 && r.d_tor >= -slack * std::abs(si.torsion.tor);
  return r;
}

}  // namespace shapelab

#include "shapelab/shapegrad.hpp"

#include "shapelab/distances.hpp"
#include "shapelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace shapelab {

namespace {

constexpr int kNodes = kQuadratureNodes;

template <class F>
double periodic_trapezoid(F&& f, int n = kNodes) {
  const double dt = 2.0 * kPi / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(i * dt);
  return s * dt;
}

// Trapezoid rule on the (uniform) boundary vertex angles of a trace.
template <class F>
double trace_integral(const std::vector<double>& theta, F&& f) {
  const double dt = 2.0 * kPi / static_cast<double>(theta.size());
  double s = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) s += f(i, theta[i]);
  return s * dt;
}

// First variation of the barycenter: (1/|Omega|) int (x - bary) (T.nu) ds.
Point barycenter_derivative(const StarDomain& d, const BoundaryField& field) {
  const Point bary = barycenter(d);
  const double bx = periodic_trapezoid([&](double t) {
    return (d.boundary_point(t).x() - bary.x()) * field.radial(t) * d.radius(t);
  });
  const double by = periodic_trapezoid([&](double t) {
    return (d.boundary_point(t).y() - bary.y()) * field.radial(t) * d.radius(t);
  });
  return Point(bx, by) / area(d);
}

double d1_along(const StarDomain& d, const BoundaryField& field, double t, const Resolution& res, double grid) {
  const StarDomain moved = perturb(d, field, t);
  const DomainSolution sol = solve_domain(moved, res);
  return d1(sol, matched_ball(moved), grid);
}

}  // namespace

// ---------------------------------------------------------------------------
// BoundaryField

BoundaryField BoundaryField::constant(double value) { return {{{0, value, 0.0}}}; }
BoundaryField BoundaryField::cosine(int k, double amplitude) { return {{{k, amplitude, 0.0}}}; }
BoundaryField BoundaryField::sine(int k, double amplitude) { return {{{k, 0.0, amplitude}}}; }

double BoundaryField::radial(double theta) const {
  double s = 0.0;
  for (const auto& m : modes) s += m.a * std::cos(m.k * theta) + (m.k == 0 ? 0.0 : m.b * std::sin(m.k * theta));
  return s;
}

double BoundaryField::normal_speed(const StarDomain& d, double theta) const {
  const double r = d.radius(theta), dr = d.radius_derivative(theta);
  return radial(theta) * r / std::sqrt(r * r + dr * dr);
}

double BoundaryField::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < kNodes; ++i) m = std::max(m, std::abs(radial(2.0 * kPi * i / kNodes)));
  return m;
}

double BoundaryField::flux(const StarDomain& d) const {
  return periodic_trapezoid([&](double t) { return radial(t) * d.radius(t); });
}

bool BoundaryField::zero_mean(const StarDomain& d) const { return std::abs(flux(d)) < 1e-10; }

BoundaryField BoundaryField::operator+(const BoundaryField& other) const {
  BoundaryField out{modes};
  out.modes.insert(out.modes.end(), other.modes.begin(), other.modes.end());
  return out;
}

BoundaryField BoundaryField::scaled(double factor) const {
  BoundaryField out{modes};
  for (auto& m : out.modes) {
    m.a *= factor;
    m.b *= factor;
  }
  return out;
}

StarDomain perturb(const StarDomain& d, const BoundaryField& field, double t) {
  // Absolute Fourier coefficients of the new radius.
  std::map<int, std::pair<double, double>> coef;
  coef[0] = {d.r0(), 0.0};
  for (const auto& m : d.modes()) coef[m.k] = {d.r0() * m.a, d.r0() * m.b};
  for (const auto& m : field.modes) {
    if (m.k < 0 || m.k > kMaxMode) throw ValidationError("perturb: field mode index out of range");
    auto& c = coef[m.k];
    c.first += t * m.a;
    if (m.k > 0) c.second += t * m.b;
  }
  const double r0 = coef[0].first;
  if (!(r0 > 0.0)) throw InvalidDomain("perturb: mean radius became nonpositive");
  std::vector<FourierMode> modes;
  for (const auto& [k, c] : coef)
    if (k > 0) modes.push_back({k, c.first / r0, c.second / r0});
  return StarDomain(d.center(), r0, std::move(modes));
}

// ---------------------------------------------------------------------------

ShapeGradient hadamard(const StarDomain& d, const BoundaryTrace& traces, const BoundaryField& field) {
  if (traces.theta.empty() || traces.grad_u.size() != traces.theta.size() ||
      traces.grad_w.size() != traces.theta.size())
    throw ValidationError("hadamard: malformed boundary trace");
  ShapeGradient g;
  // (T.nu) ds = dr r dtheta
  g.dLambda1 = -trace_integral(traces.theta, [&](std::size_t i, double t) {
    return traces.grad_u[i] * traces.grad_u[i] * field.radial(t) * d.radius(t);
  });
  g.dTor = -0.5 * trace_integral(traces.theta, [&](std::size_t i, double t) {
    return traces.grad_w[i] * traces.grad_w[i] * field.radial(t) * d.radius(t);
  });
  g.dVol = field.flux(d);
  g.dBary = barycenter_derivative(d, field);
  return g;
}

Evaluation evaluate_full(const StarDomain& d, const EnergyParams& p, const Resolution& res,
                         const EvaluateOptions& opts) {
  p.validate();
  if (area(d) > p.vmax) throw HardCapViolation("evaluate_full: area exceeds the hard cap");
  Resolution pinned = res;
  if (pinned.rings <= 0) pinned.rings = rings_for(d, res.h);
  DomainSolution sol = solve_domain(d, pinned, opts.eigen);
  EnergyReport report = compose_report(sol, p, pinned, opts);
  BoundaryTrace trace = boundary_trace(sol.system, sol.spectrum, sol.torsion);
  return {std::move(sol), std::move(report), std::move(trace), pinned};
}

double asymmetry_derivative(const StarDomain& d, const BoundaryField& field, double c0_param) {
  const BallSpec ball = matched_ball(d);
  auto asym_for = [&](const Point& c, double radius) {
    const BallSpec b(c, radius);
    const double c0 = c0_param > 0.0 ? c0_param : default_c0(b);
    return asymmetry(d, b, c0).value;
  };
  const double c0 = c0_param > 0.0 ? c0_param : default_c0(ball);
  const PsiWeight psi(ball, c0);
  // Ball held fixed: asym = int_B psi - int_Omega psi.
  const double moving = -periodic_trapezoid([&](double t) {
    return psi(d.boundary_point(t)) * field.radial(t) * d.radius(t);
  });

  const Point d_center = barycenter_derivative(d, field);
  const double d_radius = field.flux(d) / (2.0 * kPi * ball.radius);

  const double step = 1e-5 * ball.radius;
  const double dA_dR = (asym_for(ball.center, ball.radius + step) - asym_for(ball.center, ball.radius - step)) / (2 * step);
  const double dA_dx = (asym_for(ball.center + Point(step, 0), ball.radius) -
                        asym_for(ball.center - Point(step, 0), ball.radius)) / (2 * step);
  const double dA_dy = (asym_for(ball.center + Point(0, step), ball.radius) -
                        asym_for(ball.center - Point(0, step), ball.radius)) / (2 * step);
  return moving + dA_dR * d_radius + dA_dx * d_center.x() + dA_dy * d_center.y();
}

FunctionalGradient grad_F(const Evaluation& base, const EnergyParams& p, const BoundaryField& field, double fd_step) {
  const StarDomain& d = base.solution.domain;
  FunctionalGradient out;
  out.parts = hadamard(d, base.trace, field);

  const double vol = base.report.vol;
  const PenaltySlopes slopes = volume_penalty_slopes(vol, p.v, p.eta);
  out.at_kink = std::abs(vol - p.v) < 1e-8;
  const double d_vol = out.parts.dVol;
  const double smooth = out.parts.dLambda1 + p.torsion_coeff * out.parts.dTor;

  if (p.tau > 0.0) {
    if (!base.report.has_distances) throw ValidationError("grad_F: base evaluation lacks distances");
    out.d_asym = asymmetry_derivative(d, field, p.c0);
    const double scale = field.max_abs();
    if (scale > 0.0) {
      const double eps = fd_step / scale;
      const double grid = base.resolution.grid > 0.0 ? base.resolution.grid : 0.5 * base.solution.h;
      const double plus = d1_along(d, field, eps, base.resolution, grid);
      const double minus = d1_along(d, field, -eps, base.resolution, grid);
      out.d_d1_sq = (plus * plus - minus * minus) / (2.0 * eps);
    }
    out.d_h = nonlinearity_h_slope(base.report.d_report.d_star_sq, p.c_nl) * (out.d_asym + out.d_d1_sq) / p.h_norm;
    out.parts.dH = out.d_h;
  }
  const double common = smooth + p.tau * out.d_h;
  out.lower = common + slopes.lower * d_vol;
  out.upper = common + slopes.upper * d_vol;
  // One-sided directional derivative: the slope on the side the area moves to
  // (both slopes coincide away from the kink).
  out.value = d_vol >= 0.0 ? out.upper : out.lower;
  return out;
}

double fd_energy(const StarDomain& d, const EnergyParams& p, const BoundaryField& field, const Resolution& res,
                 double step) {
  Resolution pinned = res;
  if (pinned.rings <= 0) pinned.rings = rings_for(d, res.h);
  const double eps = step / field.max_abs();
  const double plus = evaluate(perturb(d, field, eps), p, pinned).F_total;
  const double minus = evaluate(perturb(d, field, -eps), p, pinned).F_total;
  return (plus - minus) / (2.0 * eps);
}

std::vector<GradientCheckRow> check_gradient(const StarDomain& d, const BoundaryField& field, const Resolution& res,
                                             double step) {
  Resolution pinned = res;
  if (pinned.rings <= 0) pinned.rings = rings_for(d, res.h);
  const DomainSolution base = solve_domain(d, pinned);
  const ShapeGradient g = hadamard(d, boundary_trace(base.system, base.spectrum, base.torsion), field);

  struct Sample {
    double lambda1, tor, vol;
    Point bary;
  };
  auto sample = [&](double t) {
    const StarDomain moved = perturb(d, field, t);
    const DomainSolution sol = solve_domain(moved, pinned);
    return Sample{sol.spectrum.lambda1, sol.torsion.tor, area(moved), barycenter(moved)};
  };
  const double t0 = step / field.max_abs();
  std::array<Sample, 3> plus{}, minus{};
  for (int i = 0; i < 3; ++i) {
    const double t = t0 / std::pow(2.0, i);
    plus[i] = sample(t);
    minus[i] = sample(-t);
  }
  auto central = [&](int i, auto get) {
    const double t = t0 / std::pow(2.0, i);
    return (get(plus[i]) - get(minus[i])) / (2.0 * t);
  };

  std::vector<GradientCheckRow> rows;
  auto scalar_row = [&](const std::string& name, double analytic, auto get, double scale) {
    GradientCheckRow row;
    row.functional = name;
    row.analytic = analytic;
    const double f0 = central(0, get), f1 = central(1, get), f2 = central(2, get);
    const double e0 = std::abs(f0 - f1), e1 = std::abs(f1 - f2);
    row.fd_exact = e0 <= 1e-11 * scale && e1 <= 1e-11 * scale;
    row.fd_order = row.fd_exact ? std::numeric_limits<double>::infinity() : std::log2(e0 / e1);
    row.fd = (4.0 * f2 - f1) / 3.0;
    row.rel_err = std::abs(row.analytic - row.fd) / std::max(std::abs(row.fd), 1e-300);
    rows.push_back(row);
  };
  scalar_row("lambda1", g.dLambda1, [](const Sample& s) { return s.lambda1; }, std::abs(g.dLambda1) + 1.0);
  scalar_row("tor", g.dTor, [](const Sample& s) { return s.tor; }, std::abs(g.dTor) + 1.0);
  scalar_row("vol", g.dVol, [](const Sample& s) { return s.vol; }, std::abs(g.dVol) + 1.0);

  // Barycenter: vector-valued, compared in the Euclidean norm.
  {
    GradientCheckRow row;
    row.functional = "barycenter";
    auto vec = [&](int i) {
      const double t = t0 / std::pow(2.0, i);
      return Point((plus[i].bary - minus[i].bary) / (2.0 * t));
    };
    const Point f0 = vec(0), f1 = vec(1), f2 = vec(2);
    const Point fd = (4.0 * f2 - f1) / 3.0;
    const double e0 = (f0 - f1).norm(), e1 = (f1 - f2).norm();
    const double scale = g.dBary.norm() + 1.0;
    row.analytic = g.dBary.norm();
    row.fd = fd.norm();
    row.fd_exact = e0 <= 1e-11 * scale && e1 <= 1e-11 * scale;
    row.fd_order = row.fd_exact ? std::numeric_limits<double>::infinity() : std::log2(e0 / e1);
    row.rel_err = (g.dBary - fd).norm() / std::max(fd.norm(), 1e-300);
    rows.push_back(row);
  }
  return rows;
}

FreeBoundaryResidual fb_residual(const StarDomain& d, const BoundaryTrace& traces, double torsion_coeff) {
  const std::size_t n = traces.theta.size();
  if (n == 0 || traces.grad_u.size() != n || traces.grad_w.size() != n)
    throw ValidationError("fb_residual: malformed boundary trace");
  FreeBoundaryResidual out;
  out.theta = traces.theta;
  out.q.resize(n);
  out.residual.resize(n);
  out.weight.resize(n);
  double total = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.q[i] = traces.grad_u[i] * traces.grad_u[i] + 0.5 * torsion_coeff * traces.grad_w[i] * traces.grad_w[i];
    out.weight[i] = d.boundary_tangent(traces.theta[i]).norm() * 2.0 * kPi / static_cast<double>(n);
    total += out.weight[i];
    mean += out.weight[i] * out.q[i];
  }
  out.a0 = mean / total;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.residual[i] = out.q[i] - out.a0;
    out.sup_norm = std::max(out.sup_norm, std::abs(out.residual[i]));
    var += out.weight[i] * out.residual[i] * out.residual[i];
  }
  out.cv = std::sqrt(var / total) / out.a0;
  return out;
}

}  // namespace shapelab

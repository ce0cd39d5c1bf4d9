#include "oracles.hpp"

#include "shapelab/bessel.hpp"
#include "shapelab/elliptic.hpp"
#include "shapelab/errors.hpp"
#include "shapelab/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace shapelab;

namespace {

DomainSolution disk_solution(double radius, double h) { return solve_domain(StarDomain::disk(radius), Resolution{h}); }

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double coefficient_of_variation(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size()) / m;
}

}  // namespace

TEST_CASE("Bessel zeros agree with the series oracle") {
  CHECK(bessel::j0_first_zero() == doctest::Approx(oracle::j01()).epsilon(1e-13));
  CHECK(bessel::j1_first_zero() == doctest::Approx(oracle::j11()).epsilon(1e-13));
  CHECK(oracle::j01() == doctest::Approx(2.404826).epsilon(1e-6));
  CHECK(oracle::j11() == doctest::Approx(3.831706).epsilon(1e-6));
}

TEST_CASE("disk eigenvalues at h = 0.01") {
  const DomainSolution s = disk_solution(1.0, 0.01);
  const double l1 = oracle::j01() * oracle::j01();
  const double l2 = oracle::j11() * oracle::j11();
  CHECK(std::abs(s.spectrum.lambda1 - l1) / l1 < 1e-3);
  CHECK(std::abs(s.spectrum.lambda2 - l2) / l2 < 2e-3);
  CHECK(s.spectrum.gap_ok);
  CHECK(s.spectrum.lambda2 > s.spectrum.lambda1);
}

TEST_CASE("eigenvalue and torsion scaling on the disk of radius 2") {
  const DomainSolution one = disk_solution(1.0, 0.04);
  const DomainSolution two = disk_solution(2.0, 0.08);  // same template scaled
  CHECK(two.spectrum.lambda1 == doctest::Approx(one.spectrum.lambda1 / 4).epsilon(1e-9));
  CHECK(two.torsion.tor == doctest::Approx(16 * one.torsion.tor).epsilon(1e-9));

  const DomainSolution fine = disk_solution(2.0, 0.02);
  CHECK(std::abs(fine.torsion.tor + kPi) / kPi < 1e-3);
  CHECK(std::abs(fine.spectrum.lambda1 - oracle::j01() * oracle::j01() / 4) < 1e-3 * fine.spectrum.lambda1);
}

TEST_CASE("torsion of the unit disk") {
  const DomainSolution s = disk_solution(1.0, 0.02);
  CHECK(std::abs(s.torsion.tor + kPi / 16) / (kPi / 16) < 1e-3);
  double w0 = 0.0;
  for (std::size_t i = 0; i < s.system.mesh.num_vertices(); ++i)
    if (s.system.mesh.vertices[i].norm() < 1e-14) w0 = s.torsion.w[i];
  CHECK(std::abs(w0 - 0.25) < 1e-3);
}

TEST_CASE("boundary fluxes on the disk") {
  const DomainSolution s = disk_solution(1.0, 0.02);
  const BoundaryTrace tr = boundary_trace(s.system, s.spectrum, s.torsion);
  const double ju = oracle::j01() / std::sqrt(kPi);
  CHECK(ju == doctest::Approx(1.3567775).epsilon(1e-7));
  for (std::size_t i = 0; i < tr.theta.size(); ++i) {
    CHECK(std::abs(tr.grad_u[i] - ju) / ju < 0.01);
    CHECK(std::abs(tr.grad_w[i] - 0.5) / 0.5 < 0.01);
  }
  CHECK(coefficient_of_variation(tr.grad_u) < 0.02);
  CHECK(coefficient_of_variation(tr.grad_w) < 0.02);

  const ScalarField zero = ScalarField::Zero(s.system.mesh.num_vertices());
  for (double f : boundary_flux(s.system, zero, zero)) CHECK(f == 0.0);
}

TEST_CASE("growth diagnostics on the disk") {
  const DomainSolution s = disk_solution(1.0, 0.02);
  const GrowthDiagnostics g0 = growth_diagnostics(s.domain, s.system, s.spectrum, s.torsion, 0.0);
  const double ju = oracle::j01() / std::sqrt(kPi);
  MESSAGE("UP " << g0.up << " DO " << g0.down << " reference " << ju);
  CHECK(std::abs(g0.up - ju) / ju < 0.10);
  CHECK(g0.up >= g0.down);

  const GrowthDiagnostics g = growth_diagnostics(s.domain, s.system, s.spectrum, s.torsion, 0.01);
  CHECK(std::isfinite(g.up));
  CHECK(std::isfinite(g.down));
  CHECK(g.down > 0.0);
  CHECK(g.up >= g.down);
}

TEST_CASE("UP dominates DO on random domains") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 5; ++i) {
    const StarDomain d = random_domain(rng);
    const DomainSolution s = solve_domain(d, Resolution{0.05});
    const GrowthDiagnostics g = growth_diagnostics(d, s.system, s.spectrum, s.torsion, 0.05);
    CHECK(g.up >= g.down);
    CHECK(g.down > 0.0);
  }
}

TEST_CASE("spectral invariants on a perturbed domain") {
  const DomainSolution s = solve_domain(StarDomain(Point(0.1, 0), 1.0, {{2, 0.1, 0.0}, {3, 0.0, 0.05}}), Resolution{0.03});
  const SpectralResult& sp = s.spectrum;
  const FemSystem& sys = s.system;
  CHECK(std::abs(sp.u.dot(sys.mass * sp.u) - 1.0) < 1e-10);
  CHECK(sp.u.minCoeff() >= -1e-10);
  const Eigen::VectorXd r = sys.stiffness * sp.u - sp.lambda1 * (sys.mass * sp.u);
  Eigen::VectorXd ri(sys.interior.size());
  for (std::size_t i = 0; i < sys.interior.size(); ++i) ri[i] = r[sys.interior[i]];
  CHECK(ri.norm() / (sys.mass * sp.u).norm() < 1e-9);

  const TorsionResult& t = s.torsion;
  CHECK(t.w.minCoeff() >= -1e-12);
  CHECK(std::abs(t.dirichlet - t.integral) < 1e-8 * std::abs(t.integral));
  CHECK(t.tor == doctest::Approx(-0.5 * t.dirichlet).epsilon(1e-8));
  CHECK(t.tor == doctest::Approx(0.5 * t.dirichlet - t.integral).epsilon(1e-12));
}

TEST_CASE("Poincare stability with the spectral gap") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (const StarDomain& d : {StarDomain::disk(1.0), StarDomain(Point::Zero(), 1.0, {{2, 0.08, 0.0}})}) {
    const DomainSolution s = solve_domain(d, Resolution{0.05});
    const FemSystem& sys = s.system;
    const Eigen::VectorXd u = sys.restrict_to_interior(s.spectrum.u);
    const double l1 = s.spectrum.lambda1, alpha = s.spectrum.lambda2 - l1;
    for (int i = 0; i < 50; ++i) {
      // mix of near-u and rough fields
      const double eps = (i % 2 == 0) ? 0.05 : 1.0;
      Eigen::VectorXd v(u.size());
      for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = std::max(0.0, u[j] + eps * (uni(rng) - 0.3));
      v /= std::sqrt(v.dot(sys.mass_interior * v));
      const Eigen::VectorXd e = u - v;
      const double lhs = e.dot(sys.stiffness_interior * e);
      const double rhs = (1 + 2 * l1 / alpha) * (v.dot(sys.stiffness_interior * v) - l1);
      CHECK(lhs <= rhs);
    }
  }
}

TEST_CASE("torsion controls the eigenfunction") {
  double prev = 0.0;
  for (double h : {0.04, 0.02}) {
    const DomainSolution s = solve_domain(StarDomain(Point::Zero(), 1.0, {{2, 0.1, 0.0}}), Resolution{h});
    double ratio = 0.0;
    for (int v : s.system.interior) ratio = std::max(ratio, s.spectrum.u[v] / std::max(s.torsion.w[v], 1e-14));
    CHECK(std::isfinite(ratio));
    CHECK(ratio <= 2 * s.spectrum.u.maxCoeff() * s.spectrum.lambda1);
    if (prev > 0.0) CHECK(std::abs(ratio - prev) / prev < 0.05);
    prev = ratio;
  }
}

TEST_CASE("domain monotonicity for nested disks") {
  const DomainSolution small = disk_solution(0.9, 0.02), big = disk_solution(1.0, 0.02);
  CHECK(small.spectrum.lambda1 > big.spectrum.lambda1);
  CHECK(small.torsion.tor > big.torsion.tor);
}

TEST_CASE("eigenvalue convergence is second order") {
  const double l1 = oracle::j01() * oracle::j01();
  std::vector<double> err;
  for (double h : {0.04, 0.02, 0.01}) err.push_back(std::abs(disk_solution(1.0, h).spectrum.lambda1 - l1));
  const double p1 = std::log2(err[0] / err[1]), p2 = std::log2(err[1] / err[2]);
  MESSAGE("orders " << p1 << " " << p2);
  CHECK(p1 >= 1.8);
  CHECK(p2 >= 1.8);
}

TEST_CASE("eigensolver reports non-convergence") {
  const FemSystem sys = build_system(StarDomain::disk(1.0), Resolution{0.1});
  EigenSolverOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-300;
  CHECK_THROWS_AS(solve_spectrum(sys, opts), NoConvergence);
}

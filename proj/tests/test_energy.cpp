#include "oracles.hpp"

#include "shapelab/energy.hpp"
#include "shapelab/errors.hpp"
#include "shapelab/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace shapelab;

namespace {

// |A triangle B| for two domains star-shaped about the origin.
double symmetric_difference(const StarDomain& a, const StarDomain& b) {
  const int n = 4096;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = 2 * oracle::kPi * i / n;
    s += 0.5 * std::abs(std::pow(a.radius(th), 2) - std::pow(b.radius(th), 2));
  }
  return s * 2 * oracle::kPi / n;
}

double eigenfunction_l1_distance(const DomainSolution& a, const DomainSolution& b, double g) {
  const GridSpec grid = GridSpec::covering(Point(-1.3, -1.3), Point(1.3, 1.3), g);
  GridField fa = rasterize(a.system.mesh, a.spectrum.u, grid);
  GridField fb = rasterize(b.system.mesh, b.spectrum.u, grid);
  fa.normalize_l2();
  fb.normalize_l2();
  double s = 0.0;
  for (std::size_t i = 0; i < fa.values.size(); ++i) s += std::abs(fa.values[i] - fb.values[i]);
  return s * g * g;
}

}  // namespace

TEST_CASE("volume penalty") {
  CHECK(volume_penalty(kPi, kPi, 0.1) == 0.0);
  CHECK(volume_penalty(kPi + 0.2, kPi, 0.1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(volume_penalty(kPi - 0.2, kPi, 0.1) == doctest::Approx(-0.02).epsilon(1e-12));
  const PenaltySlopes at = volume_penalty_slopes(kPi, kPi, 0.1);
  CHECK(at.lower == 0.1);
  CHECK(at.upper == doctest::Approx(10.0));
  CHECK(volume_penalty_slopes(3.0, kPi, 0.1).upper == 0.1);
  CHECK(volume_penalty_slopes(3.3, kPi, 0.1).lower == doctest::Approx(10.0));
}

TEST_CASE("nonlinearity") {
  CHECK(nonlinearity_h(0.04, 0.04) == 0.0);
  CHECK(nonlinearity_h(0.0, 0.04) == doctest::Approx(0.04 * (std::sqrt(2.0) - 1)).epsilon(1e-14));
  CHECK(nonlinearity_h(0.0, 0.04) == doctest::Approx(0.0165685).epsilon(1e-6));
  CHECK(nonlinearity_h(0.08, 0.04) == doctest::Approx(nonlinearity_h(0.0, 0.04)).epsilon(1e-14));
  for (double x : {0.0, 0.01, 0.03, 0.05, 0.2}) {
    CHECK(nonlinearity_h(x, 0.04) >= 0.0);
    CHECK(nonlinearity_h(0.04 + x, 0.04) == doctest::Approx(nonlinearity_h(0.04 - x, 0.04)).epsilon(1e-13));
    const double e = 1e-6;
    const double fd = (nonlinearity_h(x + e, 0.04) - nonlinearity_h(std::max(0.0, x - e), 0.04)) / (x + e - std::max(0.0, x - e));
    CHECK(nonlinearity_h_slope(x, 0.04) == doctest::Approx(fd).epsilon(1e-5));
    CHECK(std::abs(nonlinearity_h_slope(x, 0.04)) <= 1.0);
  }
}

TEST_CASE("energy of the unit disk") {
  EnergyParams p;
  const Resolution res{0.02};
  const EnergyReport r = evaluate(StarDomain::disk(1.0), p, res);
  const double expected = oracle::j01() * oracle::j01() - 0.05 * kPi / 16;
  CHECK(expected == doctest::Approx(5.773368).epsilon(1e-6));
  CHECK(std::abs(r.E_base - expected) < 2e-3 * expected);
  CHECK(r.E_base == doctest::Approx(r.lambda1 + 0.05 * r.tor + r.f_pen).epsilon(1e-14));
  CHECK(r.F_total == r.E_base);
  CHECK(std::abs(r.vol - kPi) < 1e-12);
  CHECK(r.gap_ok);

  p.tau = 0.01;
  p.c_nl = 0.04;
  const EnergyReport t = evaluate(StarDomain::disk(1.0), p, res);
  CHECK(t.F_total == doctest::Approx(t.E_base + 0.01 * t.h_val).epsilon(1e-14));
  CHECK(std::abs(t.F_total - (t.E_base + 0.01 * 0.0165685)) < 1e-6);
}

TEST_CASE("a perturbed domain of the same area has higher energy") {
  const EnergyParams p;
  const Resolution res{0.02};
  const double disk = evaluate(StarDomain::disk(1.0), p, res).E_base;
  const StarDomain a2 = StarDomain(Point::Zero(), 1.0, {{2, 0.1, 0.0}}).with_area(kPi);
  const EnergyReport r = evaluate(a2, p, res);
  CHECK(std::abs(r.vol - kPi) < 1e-12);
  CHECK(r.E_base > disk);
}

TEST_CASE("Faber-Krahn on random domains of fixed area") {
  const EnergyParams p;
  const Resolution res{0.04};
  const DiscretizationFloor floor = discretization_floor(p, res);
  const double lambda_ball = oracle::j01() * oracle::j01();
  const double energy_ball = lambda_ball - 0.05 * kPi / 16;
  std::mt19937_64 rng(41);
  int strict = 0;
  for (int i = 0; i < 100; ++i) {
    const StarDomain d = random_domain(rng).with_area(kPi);
    const EnergyReport r = evaluate(d, p, res);
    CHECK(r.lambda1 - lambda_ball >= -3 * floor.lambda);
    CHECK(r.E_base - energy_ball >= -3 * floor.energy);
    if (r.d_report.d0 > 0.05) {
      ++strict;
      CHECK(r.lambda1 > lambda_ball);
    }
  }
  MESSAGE(strict << " domains with d0 > 0.05");
}

TEST_CASE("nonlinearity stays in [0, 1] and is Lipschitz in the distances") {
  EnergyParams p;
  p.tau = 0.01;
  p.c_nl = 0.04;
  const Resolution res{0.025};
  std::vector<StarDomain> family;
  for (int k : {2, 3, 4})
    for (double t : {0.02, 0.04, 0.06}) family.push_back(StarDomain(Point::Zero(), 1.0, {{k, t, 0.0}}).with_area(kPi));
  std::vector<DomainSolution> sols;
  std::vector<double> h;
  for (const auto& d : family) {
    sols.push_back(solve_domain(d, res));
    const EnergyReport r = compose_report(sols.back(), p, res);
    CHECK(r.h_val >= 0.0);
    CHECK(r.h_val <= 1.0);
    if (r.d_report.d_star_sq <= 2 * p.c_nl) CHECK(r.h_val <= p.c_nl * (std::sqrt(2.0) - 1) + 1e-15);
    h.push_back(r.h_val);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double bound = symmetric_difference(family[i], family[j]) +
                           eigenfunction_l1_distance(sols[i], sols[j], res.grid_spacing());
      worst = std::max(worst, std::abs(h[i] - h[j]) / bound);
      CHECK(std::abs(h[i] - h[j]) <= 1.05 * bound);
    }
  MESSAGE("largest |dh| / bound " << worst);
}

TEST_CASE("parameter validation and the hard cap") {
  EnergyParams p;
  p.eta = 1.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.vmax = 2.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.tau = 0.01;
  p.c_nl = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.tau = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  CHECK_THROWS_AS(evaluate(StarDomain::disk(1.5), p, Resolution{0.05}), HardCapViolation);
}

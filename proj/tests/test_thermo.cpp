#include <cmath>
#include <vector>

#include "doctest.h"

#include "bosetrap/basis.hpp"
#include "bosetrap/errors.hpp"
#include "bosetrap/thermo.hpp"

using namespace bosetrap;

namespace {

// Direct summation over the 1D ideal ladder 1..levels, independent of the
// library's occupation function.
double ideal_sum(int levels, double t, bool weighted) {
  double s = 0.0;
  for (int n = 1; n <= levels; ++n) s += (weighted ? n : 1) / (std::exp(n / t) - 1.0);
  return s;
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int i = 0; lo + i * step <= hi + 1e-9; ++i) g.push_back(lo + i * step);
  return g;
}

}  // namespace

TEST_CASE("occupation") {
  CHECK(occupation(std::log(2.0), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(occupation(1.0, 1e-4) == 0.0);
  CHECK(occupation(1.0, 100.0) == doctest::Approx(99.50083333194445).epsilon(1e-14));
  // Branch point of the small-argument expansion.
  const double x = 1e-8;
  const double series = 1.0 / x - 0.5;
  const double direct = 1.0 / std::expm1(x);
  CHECK(std::abs(series - direct) / direct < 1e-10);
  CHECK(occupation(1e-9, 1.0) == doctest::Approx(1e9 - 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(occupation(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(occupation(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(occupation(1.0, 0.0), DomainError);
}

TEST_CASE("excited count and energy sums") {
  Eigen::VectorXd one(1);
  one << 3.0 * std::log(2.0);
  CHECK(excited_count(one, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(energy_sum(one, 3.0) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-14));

  Eigen::VectorXd ladder = Eigen::VectorXd::LinSpaced(200, 1.0, 200.0);
  CHECK(excited_count(ladder, 1.0) == doctest::Approx(0.820259511542417).epsilon(1e-14));
  CHECK(energy_sum(ladder, 1.0) == doctest::Approx(1.186600733514893).epsilon(1e-14));
  CHECK(excited_count(ladder, 1e-3) == 0.0);
  CHECK(energy_sum(ladder, 1e-3) == 0.0);
}

TEST_CASE("self-consistent n0, free gas decouples") {
  TrapConfig cfg;
  cfg.g = 0.0;
  const BasisSet basis = enumerate_basis(cfg, 400.0);
  for (double t : {1.0, 50.0, 150.0}) {
    const ThermoPoint p = solve_n0(cfg, basis, t, SolverKind::kPerturbative1, 1e-10);
    CHECK(p.converged);
    CHECK(p.lambda == 0.0);
    const double expected = 1000.0 - ideal_sum(400, t, false);
    CHECK(std::abs(p.n0 - expected) <= 1e-9 * expected);
    CHECK(p.energy_excess == doctest::Approx(ideal_sum(400, t, true)).epsilon(1e-12));
  }
}

TEST_CASE("self-consistent n0, interacting") {
  TrapConfig cfg;
  const BasisSet basis = enumerate_basis(cfg, 400.0);

  const ThermoPoint cold = solve_n0(cfg, basis, 0.01, SolverKind::kPerturbative1, 1e-10);
  CHECK(cold.converged);
  CHECK(cold.n0 == doctest::Approx(1000.0));
  CHECK(cold.lambda == doctest::Approx(0.1));

  for (double t : {5.0, 60.0, 120.0, 170.0}) {
    const ThermoPoint p = solve_n0(cfg, basis, t, SolverKind::kPerturbative1, 1e-10);
    const ThermoPoint ideal = solve_n0(cfg, basis, t, SolverKind::kIdeal, 1e-10);
    REQUIRE(p.converged);
    CHECK(!p.normal_phase);
    CHECK(std::abs(p.n0 + excited_count(p.levels, t) - 1000.0) < 1e-10 * 1000.0);
    CHECK(p.lambda == doctest::Approx(0.5 * cfg.g * p.n0).epsilon(1e-15));
    CHECK(p.n0 > ideal.n0);
    CHECK(p.levels.minCoeff() > 0.0);
    CHECK(energy_excess(p) == doctest::Approx(p.energy_excess));
  }

  ThermoPoint bad;
  CHECK_THROWS_AS(energy_excess(bad), DomainError);
}

TEST_CASE("normal phase above condensation") {
  TrapConfig cfg;
  const BasisSet basis = enumerate_basis(cfg, 400.0);
  const ThermoPoint p = solve_n0(cfg, basis, 200.0, SolverKind::kPerturbative1, 1e-10);
  CHECK(p.converged);
  CHECK(p.normal_phase);
  CHECK(p.n0 == 0.0);
  CHECK(p.lambda == 0.0);
  CHECK(p.fugacity < 1.0);
  CHECK(p.fugacity > 0.0);
  double total = 0.0;
  for (double e : p.levels) total += p.fugacity / (std::exp(e / 200.0) - p.fugacity);
  CHECK(total == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(energy_excess(p) == doctest::Approx(p.energy_excess).epsilon(1e-14));
}

TEST_CASE("sweep") {
  TrapConfig cfg;
  const BasisSet basis = enumerate_basis(cfg, 400.0);
  const std::vector<double> ts = grid(1.0, 200.0, 1.0);

  const ThermoCurve inter = sweep(cfg, basis, ts, SolverKind::kPerturbative1);
  const ThermoCurve ideal = sweep(cfg, basis, ts, SolverKind::kIdeal);
  CHECK(inter.all_converged());
  CHECK(ideal.all_converged());
  CHECK(inter.max_fraction_increase() <= 1e-6);
  CHECK(ideal.max_fraction_increase() <= 1e-6);
  bool strictly_above = false;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(inter.points[i].n0 >= ideal.points[i].n0);
    if (inter.points[i].n0 > ideal.points[i].n0 + 1e-6) strictly_above = true;
  }
  CHECK(strictly_above);
  CHECK(inter.points.front().n0 / 1000.0 == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(inter.points.back().n0 == 0.0);

  // A free-gas sweep equals pointwise solves.
  TrapConfig free = cfg;
  free.g = 0.0;
  const ThermoCurve fc = sweep(free, basis, grid(10.0, 100.0, 30.0), SolverKind::kPerturbative1);
  for (const ThermoPoint& p : fc.points) {
    const ThermoPoint q = solve_n0(free, basis, p.temperature, SolverKind::kPerturbative1, 1e-10);
    CHECK(p.n0 == q.n0);
  }

  CHECK_THROWS_AS(sweep(cfg, basis, {3.0, 2.0, 1.0}, SolverKind::kPerturbative1), ConfigError);
  CHECK_THROWS_AS(sweep(cfg, basis, {0.0, 1.0}, SolverKind::kPerturbative1), ConfigError);
  CHECK_THROWS_AS(sweep(cfg, basis, {}, SolverKind::kPerturbative1), ConfigError);
}

TEST_CASE("parallel cold starts agree with the warm-started sweep") {
  TrapConfig cfg;
  const BasisSet basis = enumerate_basis(cfg, 400.0);
  const std::vector<double> ts = grid(5.0, 195.0, 10.0);
  SweepOptions par;
  par.parallel = true;
  const ThermoCurve a = sweep(cfg, basis, ts, SolverKind::kPerturbative1);
  const ThermoCurve b = sweep(cfg, basis, ts, SolverKind::kPerturbative1, par);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    REQUIRE(b.points[i].converged);
    CHECK(std::abs(a.points[i].n0 - b.points[i].n0) < 2e-10 * 1000.0);
  }
}

TEST_CASE("truncation stability") {
  // Doubling the cutoff moves n0/N by < 1e-4 while T <= e_cut / 10.
  TrapConfig cfg;
  const std::vector<double> ts = grid(1.0, 20.0, 1.0);
  const ThermoCurve small = sweep(cfg, enumerate_basis(cfg, 200.0), ts, SolverKind::kPerturbative1);
  const ThermoCurve large = sweep(cfg, enumerate_basis(cfg, 400.0), ts, SolverKind::kPerturbative1);
  for (std::size_t i = 0; i < ts.size(); ++i)
    CHECK(std::abs(small.points[i].n0 - large.points[i].n0) / 1000.0 < 1e-4);
}

TEST_CASE("solver kinds agree at the paper coupling") {
  TrapConfig cfg;
  const BasisSet basis = enumerate_basis(cfg, 20.0);
  const std::vector<double> ts{0.5, 1.0, 2.0};
  const ThermoCurve p1 = sweep(cfg, basis, ts, SolverKind::kPerturbative1);
  const ThermoCurve p2 = sweep(cfg, basis, ts, SolverKind::kPerturbative2);
  const ThermoCurve ric = sweep(cfg, basis, ts, SolverKind::kRiccati);
  REQUIRE(ric.all_converged());
  REQUIRE(p2.all_converged());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(std::abs(p1.points[i].n0 - ric.points[i].n0) / 1000.0 < 1e-4);
    CHECK(std::abs(p2.points[i].n0 - ric.points[i].n0) / 1000.0 < 1e-4);
    CHECK(ric.points[i].lambda <= 0.1);
  }
}

TEST_CASE("solver kind names") {
  CHECK(parse_solver_kind("riccati") == SolverKind::kRiccati);
  CHECK(to_string(SolverKind::kPerturbative2) == "perturbative2");
  CHECK_THROWS_AS(parse_solver_kind("exact"), ConfigError);
}

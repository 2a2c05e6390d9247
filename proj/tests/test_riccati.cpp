#include <cmath>
#include <optional>
#include <random>

#include "doctest.h"

#include "bosetrap/basis.hpp"
#include "bosetrap/errors.hpp"
#include "bosetrap/perturbative.hpp"
#include "bosetrap/riccati.hpp"

using namespace bosetrap;

namespace {

SystemMatrices system_1d(double e_cut, double lambda) {
  TrapConfig cfg;
  return build_matrices_at_lambda(enumerate_basis(cfg, e_cut), cfg, lambda);
}

RiccatiProblem scalar_problem(double a, double b) {
  RiccatiProblem p;
  p.a = Eigen::MatrixXd::Constant(1, 1, a);
  p.b = Eigen::MatrixXd::Constant(1, 1, b);
  return p;
}

const Eigen::MatrixXd kOne = Eigen::MatrixXd::Identity(1, 1);
const Eigen::MatrixXd kZero = Eigen::MatrixXd::Zero(1, 1);

}  // namespace

TEST_CASE("residuals at the free solution") {
  const SystemMatrices sys = system_1d(10.0, 0.1);
  const RiccatiProblem prob = RiccatiProblem::from_system(sys);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(10, 10);
  const RiccatiResiduals r = residuals(id, Eigen::MatrixXd::Zero(10, 10), prob);
  CHECK(r.r1 == doctest::Approx(0.1 * sys.coupling.cwiseAbs().maxCoeff()));
  CHECK(r.r2 == r.r1);
  CHECK(r.r3 == 0.0);

  const RiccatiProblem free = RiccatiProblem::from_system(system_1d(10.0, 0.0));
  CHECK(residuals(id, Eigen::MatrixXd::Zero(10, 10), free).max() == 0.0);
}

TEST_CASE("scalar closed form") {
  CHECK(solve_1x1(1.0, 0.0) == std::pair<double, double>(1.0, 0.0));

  const auto [x, y] = solve_1x1(1.354490770181103, 0.0886226925452758);
  CHECK(x == doctest::Approx(1.002166005246429).epsilon(1e-13));
  CHECK(y == doctest::Approx(-0.0658536412932985).epsilon(1e-12));
  const RiccatiProblem p = scalar_problem(1.354490770181103, 0.0886226925452758);
  CHECK(residuals(kOne * x, kOne * y, p).max() < 1e-12);

  CHECK_THROWS_AS(solve_1x1(1.0, 0.6), NoSolutionError);
  CHECK_THROWS_AS(solve_1x1(0.0, 0.1), NoSolutionError);
}

TEST_CASE("Newton solve: free theory takes zero iterations") {
  const SystemMatrices sys = system_1d(10.0, 0.0);
  const RiccatiSolution sol = solve_xy(sys);
  CHECK(sol.converged);
  CHECK(sol.iterations == 0);
  CHECK(sol.x == Eigen::MatrixXd::Identity(10, 10));
  CHECK(sol.y.isZero(0.0));
  const Eigen::VectorXd lv = exact_spectrum(sol, sys);
  for (Eigen::Index i = 0; i < lv.size(); ++i) CHECK(lv(i) == sys.energies(i));
}

TEST_CASE("Newton solve matches the scalar oracle on random 1x1 problems") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ua(0.5, 5.0);
  std::uniform_real_distribution<double> ur(-0.45, 0.45);
  RiccatiOptions opt;
  opt.tol = 1e-14;
  for (int ansatz = 0; ansatz < 2; ++ansatz) {
    opt.ansatz = ansatz == 0 ? RiccatiAnsatz::kGeneral : RiccatiAnsatz::kSymmetric;
    for (int k = 0; k < 20; ++k) {
      const double a = ua(rng);
      const double b = ur(rng) * a;
      const auto [x, y] = solve_1x1(a, b);
      const RiccatiSolution sol = solve_xy(scalar_problem(a, b), kOne, kZero, opt);
      REQUIRE(sol.converged);
      CHECK(std::abs(sol.x(0, 0) - x) < 1e-12);
      CHECK(std::abs(sol.y(0, 0) - y) < 1e-12);
    }
  }
}

TEST_CASE("scalar exact spectrum") {
  const double c = 0.886226925452758;
  const SystemMatrices sys = system_1d(1.0, 0.1);
  const RiccatiSolution sol = solve_xy(sys);
  REQUIRE(sol.converged);
  const Eigen::VectorXd lv = exact_spectrum(sol, sys);
  CHECK(lv(0) == doctest::Approx(1.342843743690940).epsilon(1e-12));
  const auto [x, y] = solve_1x1(1.0 + 0.4 * c, 0.1 * c);
  CHECK(lv(0) == doctest::Approx(x * x + y * y + 0.4 * c * (x * x + y * y) +
                                 0.4 * c * x * y)
                     .epsilon(1e-12));
}

TEST_CASE("Newton solve on a 1D cutoff-10 basis") {
  const SystemMatrices sys = system_1d(10.0, 0.01);
  const RiccatiSolution sol = solve_xy(sys);
  CHECK(sol.converged);
  CHECK(sol.iterations <= 8);
  CHECK(sol.residuals.r1 < 1e-10);
  CHECK(sol.residuals.r3 < 1e-13);
  for (double r3 : sol.constraint_history) CHECK(r3 < 1e-13);
  // The second equation cannot vanish on the same branch.
  CHECK(sol.residuals.r2 > 1e-4);
  CHECK(sol.transpose_defect > 1e-4);
}

TEST_CASE("symmetric ansatz keeps the transpose identity but not the first equation") {
  RiccatiOptions opt;
  opt.ansatz = RiccatiAnsatz::kSymmetric;
  const SystemMatrices sys = system_1d(10.0, 0.01);
  const RiccatiSolution sol = solve_xy(sys, opt);
  CHECK(sol.converged);
  CHECK(sol.x == sol.x.transpose());
  CHECK(sol.y == sol.y.transpose());
  CHECK(sol.transpose_defect < 1e-12);
  for (double r3 : sol.constraint_history) CHECK(r3 < 1e-13);
  CHECK(sol.residuals.r1 > 1e-4);
}

TEST_CASE("Riccati and perturbative branches differ at O(lambda^3)") {
  std::vector<double> dist;
  std::vector<double> level_gap;
  for (double lam : {0.02, 0.01, 0.005}) {
    const SystemMatrices sys = system_1d(10.0, lam);
    const RiccatiSolution sol = solve_xy(sys);
    REQUIRE(sol.converged);
    const PerturbativeXY xy = perturbative_xy(sys);
    dist.push_back(std::max((sol.x - xy.x).cwiseAbs().maxCoeff(),
                            (sol.y - xy.y).cwiseAbs().maxCoeff()));
    level_gap.push_back((exact_spectrum(sol, sys) -
                         quasiparticle_levels(spectrum_matrix(sys)))
                            .cwiseAbs()
                            .maxCoeff());
  }
  for (int i = 0; i < 2; ++i) {
    CHECK(dist[i] / dist[i + 1] >= 6.0);
    CHECK(dist[i] / dist[i + 1] <= 10.0);
    CHECK(level_gap[i] / level_gap[i + 1] >= 6.0);
    CHECK(level_gap[i] / level_gap[i + 1] <= 10.0);
  }
}

TEST_CASE("matrix-free GMRES path agrees with the dense Jacobian") {
  const SystemMatrices sys = system_1d(12.0, 0.02);
  RiccatiOptions dense;
  RiccatiOptions krylov;
  krylov.dense_jacobian_limit = 4;
  const RiccatiSolution a = solve_xy(sys, dense);
  const RiccatiSolution b = solve_xy(sys, krylov);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() < 1e-9);

  const SystemMatrices large = system_1d(40.0, 0.05);
  const RiccatiSolution c = solve_xy(large);
  CHECK(c.converged);
  CHECK(c.residuals.r1 < 1e-10);
}

TEST_CASE("spectrum continuity in lambda") {
  // Adjacent grid points move every sorted level by at most
  // 10 * dlambda * max c_nn.
  const double dl = 0.005;
  Eigen::VectorXd prev;
  double cmax = 0.0;
  std::optional<RiccatiSolution> warm;
  for (int k = 0; k <= 20; ++k) {
    const SystemMatrices sys = system_1d(20.0, k * dl);
    cmax = sys.coupling.diagonal().maxCoeff();
    const RiccatiSolution sol =
        warm ? solve_xy(RiccatiProblem::from_system(sys), warm->x, warm->y)
             : solve_xy(sys);
    REQUIRE(sol.converged);
    const Eigen::VectorXd lv = exact_spectrum(sol, sys);
    if (prev.size()) CHECK((lv - prev).cwiseAbs().maxCoeff() < 10 * dl * cmax);
    prev = lv;
    warm = sol;
  }
}

TEST_CASE("solver preconditions and failures") {
  const RiccatiProblem p = scalar_problem(1.0, 0.1);
  CHECK_THROWS_AS(solve_xy(p, kOne * 2.0, kZero), DomainError);
  CHECK_THROWS_AS(exact_spectrum(RiccatiSolution{}, system_1d(1.0, 0.1)),
                  ConvergenceError);

  // Beyond the scalar branch (|2b/a| >= 1) Newton cannot converge.
  RiccatiOptions opt;
  opt.max_iter = 30;
  bool failed = false;
  try {
    failed = !solve_xy(scalar_problem(1.0, 0.7), kOne, kZero, opt).converged;
  } catch (const ConvergenceError&) {
    failed = true;
  }
  CHECK(failed);
}

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bosetrap/basis.hpp"
#include "bosetrap/perturbative.hpp"

namespace bosetrap {

// Coupled system
//   X A Y + X B X + Y B Y = 0
//   Y A X + X B X + Y B Y = 0
//   X^2 - Y^2 - I = 0
// with A = E + 4 lambda C and B = lambda C.
struct RiccatiProblem {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;

  Eigen::Index size() const { return a.rows(); }

  static RiccatiProblem from_system(const SystemMatrices& sys);
};

struct RiccatiResiduals {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;

  double max() const;
};

// X = cosh T, Y = sinh T, so the constraint holds identically.
// kGeneral: T is a general real matrix and Newton drives the full first
//   equation to zero. This is the branch continuous with the lambda
//   expansion (Y = -lambda E^-1 C + ...), which is not symmetric.
// kSymmetric: T symmetric, Newton on the symmetric part of the first
//   equation. The second equation is then the transpose of the first, but
//   the antisymmetric part of the first equation stays O(lambda).
enum class RiccatiAnsatz { kGeneral, kSymmetric };

struct RiccatiOptions {
  double tol = 1e-10;
  int max_iter = 50;
  RiccatiAnsatz ansatz = RiccatiAnsatz::kGeneral;
  double fd_step = 1e-7;
  // Basis size above which the Newton step uses matrix-free GMRES.
  Eigen::Index dense_jacobian_limit = 30;
};

struct RiccatiSolution {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  Eigen::MatrixXd generator;  // T
  RiccatiResiduals residuals;
  int iterations = 0;
  bool converged = false;
  RiccatiAnsatz ansatz = RiccatiAnsatz::kGeneral;
  // max |eq2 - eq1^T| at the returned iterate.
  double transpose_defect = 0.0;
  // Constraint residual r3 at every iterate, starting with the initial one.
  std::vector<double> constraint_history;
  // Convergence measure (see solve_xy) at every iterate.
  std::vector<double> residual_history;
};

RiccatiResiduals residuals(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::MatrixXd>& y,
                           const RiccatiProblem& prob);

// First and second equation residual matrices.
Eigen::MatrixXd first_equation(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::MatrixXd>& y,
                               const RiccatiProblem& prob);
Eigen::MatrixXd second_equation(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                const Eigen::Ref<const Eigen::MatrixXd>& y,
                                const RiccatiProblem& prob);

// Scalar branch: tanh 2t = -2b/a, returns (cosh t, sinh t). Throws
// NoSolutionError when |2b/a| >= 1.
std::pair<double, double> solve_1x1(double a, double b);

// Newton iteration with backtracking on the generator T, started from
// T0 = log(X0 + Y0) (symmetrized for kSymmetric). Converged means
// max(r1, r3) < tol for kGeneral and max(|sym eq1|, r3) < tol for
// kSymmetric. Non-convergence within max_iter is reported through
// `converged == false` with the best iterate; a failed line search throws
// ConvergenceError. Throws DomainError if the initial guess has r3 >= 0.1.
RiccatiSolution solve_xy(const RiccatiProblem& prob,
                         const Eigen::Ref<const Eigen::MatrixXd>& x0,
                         const Eigen::Ref<const Eigen::MatrixXd>& y0,
                         const RiccatiOptions& options = {});

// Convenience: initial guess from perturbative_xy.
RiccatiSolution solve_xy(const SystemMatrices& sys,
                         const RiccatiOptions& options = {});

// Spectrum matrix X E X + Y E Y + 4 lambda (X C X + Y C Y)
//   + 2 lambda (X C Y + Y C X).
Eigen::MatrixXd exact_spectrum_matrix(const RiccatiSolution& sol,
                                      const SystemMatrices& sys);

// Eigenvalues of exact_spectrum_matrix with the quasiparticle_levels
// contract. Throws ConvergenceError if sol is not converged.
Eigen::VectorXd exact_spectrum(const RiccatiSolution& sol,
                               const SystemMatrices& sys,
                               double tol_imag = kDefaultImagTol);

}  // namespace bosetrap

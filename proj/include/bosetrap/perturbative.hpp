#pragma once

#include <Eigen/Dense>

#include "bosetrap/basis.hpp"

namespace bosetrap {

inline constexpr double kDefaultImagTol = 1e-8;

// Perturbative Bogoliubov matrices, expansion in lambda.
struct PerturbativeSolution {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  Eigen::VectorXd z;
  Eigen::MatrixXd chi;
  Eigen::MatrixXd upsilon;
  Eigen::MatrixXd upsilon1;
  Eigen::MatrixXd spectrum_matrix;
  Eigen::VectorXd levels;  // ascending
  int order = 2;
  // max |Y - Y^T|; Y is generally not symmetric at finite lambda.
  double y_asymmetry = 0.0;
};

struct PerturbativeXY {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  Eigen::MatrixXd chi;
  Eigen::MatrixXd upsilon;
  Eigen::MatrixXd upsilon1;
};

// z = -2 lambda sqrt(n0) (E + 6 lambda C)^-1 d by LU solve. Throws
// SingularSystemError when the reciprocal condition estimate is below 1e-12.
Eigen::VectorXd shift_vector(const SystemMatrices& sys, double n0);

// Coefficient vector of the terms linear in the new operators,
// E z + 6 lambda C z + 2 lambda sqrt(n0) d. Vanishes for z = shift_vector.
Eigen::VectorXd linear_term_residual(const SystemMatrices& sys,
                                     const Eigen::VectorXd& z, double n0);

// chi = -E^-1 C / 2, upsilon = 2 chi, upsilon1 = 4 E^-1 C E^-1 C,
// X = I + 2 lambda^2 chi^2, Y = lambda upsilon + lambda^2 upsilon1.
PerturbativeXY perturbative_xy(const SystemMatrices& sys);

// Spectrum matrix to the given order in lambda (1 or 2):
//   E + 4 lambda C + lambda^2/2 { (E^-1 C)^2 E - 3 C E^-1 C - 2 E^-1 C^2 }.
Eigen::MatrixXd spectrum_matrix(const SystemMatrices& sys, int order = 2);

// First-order levels eps_n + 4 lambda c_nn, sorted ascending.
Eigen::VectorXd first_order_levels(const SystemMatrices& sys);

// Eigenvalues of a general real matrix, sorted ascending. Throws
// ComplexSpectrumError if max |Im| >= tol_imag * max |Re|.
Eigen::VectorXd quasiparticle_levels(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                     double tol_imag = kDefaultImagTol);

// max |X^2 - Y^2 - I|.
double constraint_residual(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::MatrixXd>& y);

PerturbativeSolution solve_perturbative(const SystemMatrices& sys,
                                        int order = 2,
                                        double tol_imag = kDefaultImagTol);

}  // namespace bosetrap

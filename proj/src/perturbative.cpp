#include "bosetrap/perturbative.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bosetrap/errors.hpp"

namespace bosetrap {

namespace {

// E^-1 C, applied as a row scaling.
Eigen::MatrixXd scaled_coupling(const SystemMatrices& sys) {
  return sys.energies.cwiseInverse().asDiagonal() * sys.coupling;
}

void require_positive_energies(const SystemMatrices& sys) {
  if (sys.size() == 0) throw DomainError("empty system");
  if (!(sys.energies.minCoeff() > 0.0))
    throw DomainError("energy matrix must be positive on the diagonal");
}

constexpr double kMinReciprocalCondition = 1e-12;

}  // namespace

Eigen::VectorXd shift_vector(const SystemMatrices& sys, double n0) {
  require_positive_energies(sys);
  if (!(n0 >= 0.0)) throw DomainError("n0 must be >= 0");
  const Eigen::Index size = sys.size();
  if (sys.lambda == 0.0) return Eigen::VectorXd::Zero(size);

  Eigen::MatrixXd m = 6.0 * sys.lambda * sys.coupling;
  m.diagonal() += sys.energies;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > kMinReciprocalCondition)) {
    std::ostringstream msg;
    msg << "E + 6 lambda C is ill-conditioned (rcond " << rcond
        << ") at lambda = " << sys.lambda;
    throw SingularSystemError(msg.str());
  }
  return -2.0 * sys.lambda * std::sqrt(n0) * lu.solve(sys.source);
}

Eigen::VectorXd linear_term_residual(const SystemMatrices& sys,
                                     const Eigen::VectorXd& z, double n0) {
  return sys.energies.cwiseProduct(z) + 6.0 * sys.lambda * (sys.coupling * z) +
         2.0 * sys.lambda * std::sqrt(n0) * sys.source;
}

PerturbativeXY perturbative_xy(const SystemMatrices& sys) {
  require_positive_energies(sys);
  const Eigen::Index size = sys.size();
  const double lam = sys.lambda;
  const Eigen::MatrixXd k = scaled_coupling(sys);

  PerturbativeXY out;
  out.chi = -0.5 * k;
  out.upsilon = 2.0 * out.chi;
  out.upsilon1 = 4.0 * (k * k);
  out.x = Eigen::MatrixXd::Identity(size, size) +
          2.0 * lam * lam * (out.chi * out.chi);
  out.y = lam * out.upsilon + lam * lam * out.upsilon1;
  return out;
}

Eigen::MatrixXd spectrum_matrix(const SystemMatrices& sys, int order) {
  require_positive_energies(sys);
  if (order != 1 && order != 2)
    throw DomainError("expansion order must be 1 or 2");
  const double lam = sys.lambda;
  Eigen::MatrixXd out = 4.0 * lam * sys.coupling;
  out.diagonal() += sys.energies;
  if (order == 1 || lam == 0.0) return out;

  const Eigen::MatrixXd k = scaled_coupling(sys);
  const Eigen::MatrixXd kk_e = (k * k) * sys.energies.asDiagonal();
  const Eigen::MatrixXd c_k = sys.coupling * k;  // C E^-1 C
  const Eigen::MatrixXd k_c = k * sys.coupling;  // E^-1 C^2
  out += 0.5 * lam * lam * (kk_e - 3.0 * c_k - 2.0 * k_c);
  return out;
}

Eigen::VectorXd first_order_levels(const SystemMatrices& sys) {
  require_positive_energies(sys);
  Eigen::VectorXd levels =
      sys.energies + 4.0 * sys.lambda * sys.coupling.diagonal();
  std::sort(levels.begin(), levels.end());
  return levels;
}

Eigen::VectorXd quasiparticle_levels(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                     double tol_imag) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DomainError("spectrum matrix must be square and non-empty");
  if (!(tol_imag > 0.0)) throw DomainError("tol_imag must be > 0");

  if (m.isDiagonal(0.0)) {
    Eigen::VectorXd levels = m.diagonal();
    std::sort(levels.begin(), levels.end());
    return levels;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw ComplexSpectrumError("eigensolver did not converge");
  const Eigen::VectorXcd& ev = es.eigenvalues();
  const double max_re = ev.real().cwiseAbs().maxCoeff();
  const double max_im = ev.imag().cwiseAbs().maxCoeff();
  if (max_im > 0.0 && !(max_im < tol_imag * max_re)) {
    std::ostringstream msg;
    msg << "spectrum has imaginary parts up to " << max_im
        << " (max |Re| = " << max_re << ")";
    throw ComplexSpectrumError(msg.str());
  }
  Eigen::VectorXd levels = ev.real();
  std::sort(levels.begin(), levels.end());
  return levels;
}

double constraint_residual(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::MatrixXd>& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw DomainError("X and Y must be square and of equal size");
  Eigen::MatrixXd r = x * x - y * y;
  r.diagonal().array() -= 1.0;
  return r.cwiseAbs().maxCoeff();
}

PerturbativeSolution solve_perturbative(const SystemMatrices& sys, int order,
                                        double tol_imag) {
  PerturbativeXY xy = perturbative_xy(sys);
  PerturbativeSolution sol;
  sol.order = order;
  sol.z = shift_vector(sys, sys.n0);
  sol.chi = std::move(xy.chi);
  sol.upsilon = std::move(xy.upsilon);
  sol.upsilon1 = std::move(xy.upsilon1);
  if (order == 1) {
    sol.x = Eigen::MatrixXd::Identity(sys.size(), sys.size());
    sol.y = sys.lambda * sol.upsilon;
  } else {
    sol.x = std::move(xy.x);
    sol.y = std::move(xy.y);
  }
  sol.y_asymmetry = (sol.y - sol.y.transpose()).cwiseAbs().maxCoeff();
  sol.spectrum_matrix = spectrum_matrix(sys, order);
  sol.levels = quasiparticle_levels(sol.spectrum_matrix, tol_imag);
  if (!(sol.levels(0) > 0.0)) {
    std::ostringstream msg;
    msg << "non-positive quasiparticle level " << sol.levels(0)
        << " at lambda = " << sys.lambda;
    throw DomainError(msg.str());
  }
  return sol;
}

}  // namespace bosetrap

#include "bosetrap/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "bosetrap/errors.hpp"

namespace bosetrap {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using LinearMap = std::function<Vec(const Vec&)>;

// Restarted GMRES with right preconditioning, x0 = 0. Returns the
// approximate solution of op(precond(u)) = rhs, mapped back through precond.
Vec gmres(const LinearMap& op, const LinearMap& precond, const Vec& rhs,
          double rtol, int restart, int max_iter) {
  const Eigen::Index n = rhs.size();
  Vec x = Vec::Zero(n);
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return x;

  int total = 0;
  Vec r = rhs;
  while (total < max_iter) {
    const double beta = r.norm();
    if (beta <= rtol * rhs_norm) break;
    const int m = std::min(restart, max_iter - total);
    Mat v(n, m + 1);
    Mat h = Mat::Zero(m + 1, m);
    Vec cs = Vec::Zero(m);
    Vec sn = Vec::Zero(m);
    Vec g = Vec::Zero(m + 1);
    g(0) = beta;
    v.col(0) = r / beta;

    int k = 0;
    for (; k < m; ++k) {
      Vec w = op(precond(v.col(k)));
      for (int i = 0; i <= k; ++i) {
        h(i, k) = w.dot(v.col(i));
        w -= h(i, k) * v.col(i);
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) > 0.0) v.col(k + 1) = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double tmp = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
        h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
        h(i, k) = tmp;
      }
      const double denom = std::hypot(h(k, k), h(k + 1, k));
      cs(k) = h(k, k) / denom;
      sn(k) = h(k + 1, k) / denom;
      h(k, k) = denom;
      h(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);
      ++total;
      if (std::abs(g(k + 1)) <= rtol * rhs_norm || h(k, k) == 0.0) {
        ++k;
        break;
      }
    }
    const Vec y = h.topLeftCorner(k, k)
                      .triangularView<Eigen::Upper>()
                      .solve(g.head(k));
    x += precond(v.leftCols(k) * y);
    r = rhs - op(x);
  }
  return x;
}

// Maps between the Newton parameter vector and the generator T, and
// evaluates the residual vector for one ansatz.
class GeneratorSystem {
 public:
  GeneratorSystem(const RiccatiProblem& prob, RiccatiAnsatz ansatz)
      : prob_(prob), ansatz_(ansatz), n_(prob.size()) {}

  Eigen::Index parameter_count() const {
    return ansatz_ == RiccatiAnsatz::kGeneral ? n_ * n_ : n_ * (n_ + 1) / 2;
  }

  Vec pack(const Mat& t) const {
    if (ansatz_ == RiccatiAnsatz::kGeneral)
      return Eigen::Map<const Vec>(t.data(), n_ * n_);
    Vec p(parameter_count());
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n_; ++j)
      for (Eigen::Index i = 0; i <= j; ++i) p(k++) = t(i, j);
    return p;
  }

  Mat unpack(const Vec& p) const {
    if (ansatz_ == RiccatiAnsatz::kGeneral)
      return Eigen::Map<const Mat>(p.data(), n_, n_);
    Mat t(n_, n_);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n_; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        t(i, j) = p(k);
        t(j, i) = p(k);
        ++k;
      }
    }
    return t;
  }

  // X = cosh T, Y = sinh T.
  std::pair<Mat, Mat> hyperbolic(const Mat& t) const {
    if (ansatz_ == RiccatiAnsatz::kGeneral) {
      const Mat ep = t.exp();
      const Mat em = (-t).exp();
      return {0.5 * (ep + em), 0.5 * (ep - em)};
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(t);
    const Mat& v = es.eigenvectors();
    const Vec& w = es.eigenvalues();
    Mat x = v * w.array().cosh().matrix().asDiagonal() * v.transpose();
    Mat y = v * w.array().sinh().matrix().asDiagonal() * v.transpose();
    x = (0.5 * (x + x.transpose())).eval();
    y = (0.5 * (y + y.transpose())).eval();
    return {std::move(x), std::move(y)};
  }

  Vec residual(const Vec& p) const {
    const auto [x, y] = hyperbolic(unpack(p));
    return residual_from(first_equation(x, y, prob_));
  }

  Vec residual_from(const Mat& eq1) const {
    if (ansatz_ == RiccatiAnsatz::kGeneral)
      return Eigen::Map<const Vec>(eq1.data(), n_ * n_);
    return pack(0.5 * (eq1 + eq1.transpose()));
  }

  // Approximate inverse of the Jacobian at T = 0 with B = 0, i.e. of
  // dT -> A dT (general) or dT -> sym(A dT) (symmetric).
  LinearMap preconditioner() const {
    if (ansatz_ == RiccatiAnsatz::kGeneral) {
      auto lu = std::make_shared<Eigen::PartialPivLU<Mat>>(prob_.a);
      return [this, lu](const Vec& v) -> Vec {
        const Mat r = Eigen::Map<const Mat>(v.data(), n_, n_);
        const Mat s = lu->solve(r);
        return Eigen::Map<const Vec>(s.data(), n_ * n_);
      };
    }
    auto es = std::make_shared<Eigen::SelfAdjointEigenSolver<Mat>>(
        0.5 * (prob_.a + prob_.a.transpose()));
    return [this, es](const Vec& v) -> Vec {
      const Mat& q = es->eigenvectors();
      const Vec& a = es->eigenvalues();
      Mat r = q.transpose() * unpack(v) * q;
      for (Eigen::Index j = 0; j < n_; ++j) {
        for (Eigen::Index i = 0; i < n_; ++i) {
          const double denom = 0.5 * (a(i) + a(j));
          if (std::abs(denom) > 1e-12) r(i, j) /= denom;
        }
      }
      return pack(q * r * q.transpose());
    };
  }

 private:
  const RiccatiProblem& prob_;
  RiccatiAnsatz ansatz_;
  Eigen::Index n_;
};

double max_abs(const Vec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace

RiccatiProblem RiccatiProblem::from_system(const SystemMatrices& sys) {
  RiccatiProblem prob;
  prob.a = 4.0 * sys.lambda * sys.coupling;
  prob.a.diagonal() += sys.energies;
  prob.b = sys.lambda * sys.coupling;
  return prob;
}

double RiccatiResiduals::max() const { return std::max({r1, r2, r3}); }

Eigen::MatrixXd first_equation(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::MatrixXd>& y,
                               const RiccatiProblem& prob) {
  return x * prob.a * y + x * prob.b * x + y * prob.b * y;
}

Eigen::MatrixXd second_equation(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                const Eigen::Ref<const Eigen::MatrixXd>& y,
                                const RiccatiProblem& prob) {
  return y * prob.a * x + x * prob.b * x + y * prob.b * y;
}

RiccatiResiduals residuals(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::MatrixXd>& y,
                           const RiccatiProblem& prob) {
  const Eigen::Index n = prob.size();
  if (x.rows() != n || x.cols() != n || y.rows() != n || y.cols() != n)
    throw DomainError("X, Y and the problem matrices must have equal shape");
  RiccatiResiduals r;
  r.r1 = first_equation(x, y, prob).cwiseAbs().maxCoeff();
  r.r2 = second_equation(x, y, prob).cwiseAbs().maxCoeff();
  Mat c = x * x - y * y;
  c.diagonal().array() -= 1.0;
  r.r3 = c.cwiseAbs().maxCoeff();
  return r;
}

std::pair<double, double> solve_1x1(double a, double b) {
  if (a == 0.0 || !(std::abs(2.0 * b / a) < 1.0)) {
    std::ostringstream msg;
    msg << "no real solution: |2b/a| = " << std::abs(2.0 * b / a) << " >= 1";
    throw NoSolutionError(msg.str());
  }
  const double t = 0.5 * std::atanh(-2.0 * b / a);
  return {std::cosh(t), std::sinh(t)};
}

RiccatiSolution solve_xy(const RiccatiProblem& prob,
                         const Eigen::Ref<const Eigen::MatrixXd>& x0,
                         const Eigen::Ref<const Eigen::MatrixXd>& y0,
                         const RiccatiOptions& options) {
  const Eigen::Index n = prob.size();
  if (n == 0 || prob.a.cols() != n || prob.b.rows() != n || prob.b.cols() != n)
    throw DomainError("A and B must be square and of equal size");
  if (!(options.tol > 0.0)) throw DomainError("tol must be > 0");
  const double r3_init = residuals(x0, y0, prob).r3;
  if (!(r3_init < 0.1)) {
    std::ostringstream msg;
    msg << "initial guess violates X^2 - Y^2 = I by " << r3_init;
    throw DomainError(msg.str());
  }

  const GeneratorSystem system(prob, options.ansatz);
  Mat t0;
  if (x0.isIdentity(0.0) && y0.isZero(0.0)) {
    t0 = Mat::Zero(n, n);
  } else {
    t0 = Mat(x0 + y0).log();
  }
  if (options.ansatz == RiccatiAnsatz::kSymmetric)
    t0 = (0.5 * (t0 + t0.transpose())).eval();

  RiccatiSolution sol;
  sol.ansatz = options.ansatz;

  Vec p = system.pack(t0);
  Vec f = system.residual(p);

  auto measure = [&](const Vec& params, const Vec& resid) {
    const auto [x, y] = system.hyperbolic(system.unpack(params));
    Mat c = x * x - y * y;
    c.diagonal().array() -= 1.0;
    const double r3 = c.cwiseAbs().maxCoeff();
    return std::make_pair(std::max(max_abs(resid), r3), r3);
  };

  auto [m, r3] = measure(p, f);
  sol.residual_history.push_back(m);
  sol.constraint_history.push_back(r3);
  Vec best_p = p;
  double best_m = m;

  const bool dense = n <= options.dense_jacobian_limit;
  const LinearMap precond = dense ? LinearMap{} : system.preconditioner();
  int iter = 0;
  while (m >= options.tol && iter < options.max_iter) {
    Vec step;
    if (dense) {
      const Eigen::Index np = p.size();
      Mat jac(np, np);
      for (Eigen::Index k = 0; k < np; ++k) {
        Vec pk = p;
        const double h = options.fd_step * std::max(1.0, std::abs(p(k)));
        pk(k) += h;
        jac.col(k) = (system.residual(pk) - f) / h;
      }
      step = jac.colPivHouseholderQr().solve(-f);
    } else {
      const double p_norm = p.norm();
      const LinearMap jv = [&](const Vec& v) -> Vec {
        const double v_norm = v.norm();
        if (v_norm == 0.0) return Vec::Zero(v.size());
        const double eps = options.fd_step * (1.0 + p_norm) / v_norm;
        return (system.residual(p + eps * v) - f) / eps;
      };
      step = gmres(jv, precond, -f, 1e-10, 60, 600);
    }

    const double f_norm = f.norm();
    double alpha = 1.0;
    Vec p_new;
    Vec f_new;
    for (;;) {
      p_new = p + alpha * step;
      f_new = system.residual(p_new);
      if (f_new.allFinite() && f_new.norm() <= (1.0 - 1e-4 * alpha) * f_norm)
        break;
      alpha *= 0.5;
      if (alpha < 1e-10) {
        std::ostringstream msg;
        msg << "line search failed at iteration " << iter
            << " (best residual " << best_m << ")";
        throw ConvergenceError(msg.str());
      }
    }
    p = std::move(p_new);
    f = std::move(f_new);
    ++iter;
    std::tie(m, r3) = measure(p, f);
    sol.residual_history.push_back(m);
    sol.constraint_history.push_back(r3);
    if (m < best_m) {
      best_m = m;
      best_p = p;
    }
  }

  sol.iterations = iter;
  sol.converged = best_m < options.tol;
  sol.generator = system.unpack(best_p);
  std::tie(sol.x, sol.y) = system.hyperbolic(sol.generator);
  sol.residuals = residuals(sol.x, sol.y, prob);
  sol.transpose_defect =
      (second_equation(sol.x, sol.y, prob) -
       first_equation(sol.x, sol.y, prob).transpose())
          .cwiseAbs()
          .maxCoeff();
  return sol;
}

RiccatiSolution solve_xy(const SystemMatrices& sys,
                         const RiccatiOptions& options) {
  const PerturbativeXY init = perturbative_xy(sys);
  return solve_xy(RiccatiProblem::from_system(sys), init.x, init.y, options);
}

Eigen::MatrixXd exact_spectrum_matrix(const RiccatiSolution& sol,
                                      const SystemMatrices& sys) {
  const Mat& x = sol.x;
  const Mat& y = sol.y;
  const Mat e = sys.energy_matrix();
  const Mat& c = sys.coupling;
  const double lam = sys.lambda;
  return x * e * x + y * e * y + 4.0 * lam * (x * c * x + y * c * y) +
         2.0 * lam * (x * c * y + y * c * x);
}

Eigen::VectorXd exact_spectrum(const RiccatiSolution& sol,
                               const SystemMatrices& sys, double tol_imag) {
  if (!sol.converged)
    throw ConvergenceError("Riccati solution is not converged");
  return quasiparticle_levels(exact_spectrum_matrix(sol, sys), tol_imag);
}

}  // namespace bosetrap

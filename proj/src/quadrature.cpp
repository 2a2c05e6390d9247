#include "bosetrap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bosetrap/errors.hpp"

namespace bosetrap {

namespace {

// Hermite polynomials orthonormal with respect to exp(-x^2), p_0 .. p_n.
void normalized_hermite(int n, double x, std::vector<double>& p) {
  p.assign(static_cast<std::size_t>(n) + 1, 0.0);
  p[0] = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  if (n == 0) return;
  p[1] = std::sqrt(2.0) * x * p[0];
  for (int k = 1; k < n; ++k) {
    p[k + 1] = std::sqrt(2.0 / (k + 1)) * x * p[k] -
               std::sqrt(static_cast<double>(k) / (k + 1)) * p[k - 1];
  }
}

}  // namespace

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1) throw DomainError("Gauss-Hermite order must be >= 1");
  const int n = order;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  tri.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  std::vector<double> p;
  for (int i = 0; i < n; ++i) {
    double x = tri.eigenvalues()(i);
    for (int it = 0; it < 8; ++it) {
      normalized_hermite(n, x, p);
      const double deriv = std::sqrt(2.0 * n) * p[static_cast<std::size_t>(n - 1)];
      const double dx = p[static_cast<std::size_t>(n)] / deriv;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    normalized_hermite(n - 1, x, p);
    double norm = 0.0;
    for (double v : p) norm += v * v;
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / norm;
  }
  return rule;
}

double quadrature_oracle_element(const MultiIndex& m, const MultiIndex& n,
                                 const TrapConfig& cfg) {
  if (static_cast<int>(m.dimension()) != cfg.dimension ||
      static_cast<int>(n.dimension()) != cfg.dimension) {
    throw DomainError("multi-index dimension does not match the trap");
  }
  const int top = std::max(m.max_component(), n.max_component());
  if (top > kQuadratureMaxIndex) {
    std::ostringstream msg;
    msg << "quadrature oracle supports indices <= " << kQuadratureMaxIndex
        << " (got " << top << ")";
    throw IndexTooLargeError(msg.str());
  }

  // With xi = sqrt(m omega / hbar) x and xi = u / sqrt(2), each factor is
  //   sqrt(m omega / hbar) / sqrt(2 pi) * sum_i w_i p_m(u_i/sqrt2) p_n(u_i/sqrt2).
  double result = 1.0;
  std::vector<double> p;
  for (std::size_t j = 0; j < m.dimension(); ++j) {
    const int mj = m[j];
    const int nj = n[j];
    const GaussHermiteRule rule = gauss_hermite(2 * std::max(mj, nj) + 20);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      normalized_hermite(std::max(mj, nj), rule.nodes[i] / std::sqrt(2.0), p);
      sum += rule.weights[i] * p[static_cast<std::size_t>(mj)] *
             p[static_cast<std::size_t>(nj)];
    }
    const double scale = std::sqrt(cfg.mass * cfg.omega[j] / cfg.hbar) /
                         std::sqrt(2.0 * std::numbers::pi);
    result *= scale * sum;
  }
  return result;
}

}  // namespace bosetrap

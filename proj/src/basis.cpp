#include "bosetrap/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bosetrap/errors.hpp"

namespace bosetrap {

namespace {

void check_dimension(const MultiIndex& n, const TrapConfig& cfg) {
  if (static_cast<int>(n.dimension()) != cfg.dimension) {
    std::ostringstream msg;
    msg << "multi-index " << n.to_string() << " does not match dimension "
        << cfg.dimension;
    throw DomainError(msg.str());
  }
}

// Relative slack so that a cutoff placed exactly on a level keeps it.
constexpr double kCutoffSlack = 1e-12;

void enumerate_rec(const TrapConfig& cfg, double e_cut, std::size_t dim,
                   double energy, std::vector<int>& current,
                   std::vector<MultiIndex>& out) {
  if (dim == current.size()) {
    MultiIndex idx(current);
    if (!idx.is_ground()) out.push_back(std::move(idx));
    return;
  }
  const double quantum = cfg.hbar * cfg.omega[dim];
  for (int k = 0;; ++k) {
    const double e = energy + quantum * k;
    if (e > e_cut * (1.0 + kCutoffSlack)) break;
    current[dim] = k;
    enumerate_rec(cfg, e_cut, dim + 1, e, current, out);
  }
  current[dim] = 0;
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> n) : n_(std::move(n)) {
  for (int v : n_) {
    if (v < 0) throw DomainError("multi-index components must be >= 0");
  }
}

bool MultiIndex::is_ground() const {
  return std::all_of(n_.begin(), n_.end(), [](int v) { return v == 0; });
}

int MultiIndex::max_component() const {
  return n_.empty() ? 0 : *std::max_element(n_.begin(), n_.end());
}

std::string MultiIndex::to_string() const {
  std::ostringstream s;
  s << '(';
  for (std::size_t j = 0; j < n_.size(); ++j) {
    if (j) s << ',';
    s << n_[j];
  }
  s << ')';
  return s.str();
}

double oscillator_energy(const MultiIndex& n, const TrapConfig& cfg) {
  check_dimension(n, cfg);
  double e = 0.0;
  for (std::size_t j = 0; j < n.dimension(); ++j) e += cfg.omega[j] * n[j];
  return cfg.hbar * e;
}

BasisSet enumerate_basis(const TrapConfig& cfg, double e_cut) {
  validate(cfg);
  std::vector<MultiIndex> states;
  std::vector<int> current(static_cast<std::size_t>(cfg.dimension), 0);
  enumerate_rec(cfg, e_cut, 0, 0.0, current, states);
  if (states.empty()) {
    std::ostringstream msg;
    msg << "no excited state at or below e_cut = " << e_cut
        << " (lowest is " << cfg.hbar * cfg.min_omega() << ")";
    throw EmptyBasisError(msg.str());
  }

  std::vector<std::pair<double, MultiIndex>> keyed;
  keyed.reserve(states.size());
  for (auto& s : states) keyed.emplace_back(oscillator_energy(s, cfg), s);
  std::sort(keyed.begin(), keyed.end());

  BasisSet basis;
  basis.cutoff = e_cut;
  basis.states.reserve(keyed.size());
  basis.energies.reserve(keyed.size());
  for (auto& [e, s] : keyed) {
    basis.energies.push_back(e);
    basis.states.push_back(std::move(s));
  }
  return basis;
}

double interaction_prefactor(const TrapConfig& cfg) {
  constexpr double pi = std::numbers::pi;
  const double base = cfg.mass * cfg.mean_omega() / (2.0 * pi * pi * cfg.hbar);
  return std::pow(base, 0.5 * cfg.dimension);
}

double coupling_coefficient(const MultiIndex& m, const MultiIndex& n,
                            const TrapConfig& cfg) {
  check_dimension(m, cfg);
  check_dimension(n, cfg);
  double log_mag = 0.0;
  int sign = 1;
  for (std::size_t j = 0; j < m.dimension(); ++j) {
    const int mj = m[j];
    const int nj = n[j];
    if ((mj + nj) % 2 != 0) return 0.0;
    if (((3 * mj + nj) / 2) % 2 != 0) sign = -sign;
    log_mag += std::lgamma(0.5 * (mj + nj + 1)) -
               0.5 * (std::lgamma(mj + 1.0) + std::lgamma(nj + 1.0));
  }
  return interaction_prefactor(cfg) * sign * std::exp(log_mag);
}

double source_coefficient(const MultiIndex& n, const TrapConfig& cfg) {
  check_dimension(n, cfg);
  double log_mag = 0.0;
  int sign = 1;
  for (std::size_t j = 0; j < n.dimension(); ++j) {
    const int nj = n[j];
    if (nj % 2 != 0) return 0.0;
    if ((nj / 2) % 2 != 0) sign = -sign;
    log_mag += std::lgamma(0.5 * (nj + 1)) - 0.5 * std::lgamma(nj + 1.0);
  }
  return interaction_prefactor(cfg) * sign * std::exp(log_mag);
}

SystemMatrices build_matrices(const BasisSet& basis, const TrapConfig& cfg,
                              double n0) {
  validate(cfg);
  if (basis.size() == 0) throw EmptyBasisError("basis is empty");
  if (!(n0 >= 0.0) || n0 > cfg.n_particles)
    throw ConfigError("n0 must lie in [0, n_particles]");

  const auto size = static_cast<Eigen::Index>(basis.size());
  SystemMatrices sys;
  sys.basis = basis;
  sys.n0 = n0;
  sys.lambda = 0.5 * cfg.g * n0;
  sys.energies.resize(size);
  sys.coupling.resize(size, size);
  sys.source.resize(size);

  for (Eigen::Index i = 0; i < size; ++i) {
    const MultiIndex& si = basis.states[static_cast<std::size_t>(i)];
    sys.energies(i) = oscillator_energy(si, cfg);
    if (!(sys.energies(i) > 0.0))
      throw DomainError("basis contains a non-positive energy");
    sys.source(i) = source_coefficient(si, cfg);
    for (Eigen::Index k = i; k < size; ++k) {
      const double c = coupling_coefficient(
          si, basis.states[static_cast<std::size_t>(k)], cfg);
      sys.coupling(i, k) = c;
      sys.coupling(k, i) = c;
    }
    if (!(sys.coupling(i, i) > 0.0)) {
      throw DomainError("diagonal coupling c_nn is not positive for " +
                        si.to_string());
    }
  }
  return sys;
}

SystemMatrices build_matrices_at_lambda(const BasisSet& basis,
                                        const TrapConfig& cfg, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  SystemMatrices sys = build_matrices(basis, cfg, cfg.n_particles);
  sys.lambda = lambda;
  return sys;
}

}  // namespace bosetrap

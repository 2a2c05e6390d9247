#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bosetrap/trap_config.hpp"

namespace bosetrap {

// Oscillator quantum numbers (n_1, ..., n_D). The all-zero index is the
// condensate mode.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> n);
  MultiIndex(std::initializer_list<int> n) : MultiIndex(std::vector<int>(n)) {}

  std::size_t dimension() const { return n_.size(); }
  int operator[](std::size_t j) const { return n_[j]; }
  const std::vector<int>& values() const { return n_; }
  bool is_ground() const;
  int max_component() const;
  std::string to_string() const;

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> n_;
};

// Excited states with oscillator energy <= cutoff, ordered by
// (energy, lexicographic index).
struct BasisSet {
  std::vector<MultiIndex> states;
  std::vector<double> energies;
  double cutoff = 0.0;

  std::size_t size() const { return states.size(); }
};

// Truncated quadratic Hamiltonian for one condensate occupation.
struct SystemMatrices {
  Eigen::VectorXd energies;  // diagonal of the energy matrix
  Eigen::MatrixXd coupling;  // C, symmetric
  Eigen::VectorXd source;    // d
  double lambda = 0.0;       // g * n0 / 2
  double n0 = 0.0;
  BasisSet basis;

  Eigen::Index size() const { return energies.size(); }
  Eigen::MatrixXd energy_matrix() const { return energies.asDiagonal(); }
};

// hbar * sum_j omega_j n_j, measured from the ground state.
double oscillator_energy(const MultiIndex& n, const TrapConfig& cfg);

// Throws EmptyBasisError if no excited state lies at or below e_cut.
BasisSet enumerate_basis(const TrapConfig& cfg, double e_cut);

// (m omega / 2 pi^2 hbar)^(D/2) with omega the geometric-mean frequency.
double interaction_prefactor(const TrapConfig& cfg);

// Contact-interaction overlap c_mn. Exactly zero unless every m_j + n_j is
// even. Gamma and factorial magnitudes are combined in log space.
double coupling_coefficient(const MultiIndex& m, const MultiIndex& n,
                            const TrapConfig& cfg);

// d_n = c_{n,0}. Exactly zero unless every n_j is even.
double source_coefficient(const MultiIndex& n, const TrapConfig& cfg);

// Assembles energies, C and d over the basis with lambda = g * n0 / 2.
// Throws ConfigError if n0 is outside [0, N].
SystemMatrices build_matrices(const BasisSet& basis, const TrapConfig& cfg,
                              double n0);

// Same as build_matrices but with lambda given directly and n0 = N, i.e. the
// coupling g is rescaled to 2 lambda / N. Used by lambda-scaling experiments.
SystemMatrices build_matrices_at_lambda(const BasisSet& basis,
                                        const TrapConfig& cfg, double lambda);

}  // namespace bosetrap

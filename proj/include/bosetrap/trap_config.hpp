#pragma once

#include <numbers>
#include <vector>

namespace bosetrap {

// Physical parameters of the trapped gas. Defaults reproduce the 1D model
// instance with hbar = omega = 1, m = 2 pi^2, N = 1000, g = 0.0002.
struct TrapConfig {
  int dimension = 1;
  std::vector<double> omega{1.0};
  double mass = 2.0 * std::numbers::pi * std::numbers::pi;
  double hbar = 1.0;
  double g = 0.0002;
  int n_particles = 1000;

  // Geometric mean (omega_1 ... omega_D)^(1/D).
  double mean_omega() const;
  double min_omega() const;
};

// Largest numerator/denominator scanned when rejecting commensurate
// frequency pairs, and the closeness tolerance.
inline constexpr int kCommensurabilityMaxInt = 12;
inline constexpr double kCommensurabilityTol = 1e-9;

// Throws ConfigError naming the violated invariant.
void validate(const TrapConfig& cfg);

// True if omega_a / omega_b is within kCommensurabilityTol of p/q for some
// 1 <= p, q <= kCommensurabilityMaxInt.
bool commensurate(double omega_a, double omega_b);

}  // namespace bosetrap

#pragma once

#include <vector>

#include "bosetrap/basis.hpp"
#include "bosetrap/trap_config.hpp"

namespace bosetrap {

struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // for the weight function exp(-x^2)
};

// Golub-Welsch nodes refined by Newton on the normalized Hermite recurrence.
GaussHermiteRule gauss_hermite(int order);

inline constexpr int kQuadratureMaxIndex = 40;

// Overlap integral of phi_m phi_n phi_0^2 over R^D for normalized oscillator
// eigenfunctions, one Gauss-Hermite rule per dimension with the trap's own
// frequency in that dimension. Independent of the closed-form coefficients;
// coincides with coupling_coefficient for isotropic traps.
// Throws IndexTooLargeError if any component exceeds kQuadratureMaxIndex.
double quadrature_oracle_element(const MultiIndex& m, const MultiIndex& n,
                                 const TrapConfig& cfg);

}  // namespace bosetrap

#include "bosetrap/trap_config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bosetrap/errors.hpp"

namespace bosetrap {

double TrapConfig::mean_omega() const {
  double log_sum = 0.0;
  for (double w : omega) log_sum += std::log(w);
  return std::exp(log_sum / static_cast<double>(omega.size()));
}

double TrapConfig::min_omega() const {
  return *std::min_element(omega.begin(), omega.end());
}

bool commensurate(double omega_a, double omega_b) {
  const double ratio = omega_a / omega_b;
  for (int p = 1; p <= kCommensurabilityMaxInt; ++p) {
    for (int q = 1; q <= kCommensurabilityMaxInt; ++q) {
      if (std::abs(ratio - static_cast<double>(p) / q) < kCommensurabilityTol)
        return true;
    }
  }
  return false;
}

void validate(const TrapConfig& cfg) {
  if (cfg.dimension < 1) throw ConfigError("dimension must be >= 1");
  if (static_cast<int>(cfg.omega.size()) != cfg.dimension) {
    std::ostringstream msg;
    msg << "omega must list one frequency per dimension (got "
        << cfg.omega.size() << " for dimension " << cfg.dimension << ")";
    throw ConfigError(msg.str());
  }
  for (double w : cfg.omega) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw ConfigError("omega must be > 0 in every dimension");
  }
  if (!(cfg.mass > 0.0)) throw ConfigError("mass must be > 0");
  if (!(cfg.hbar > 0.0)) throw ConfigError("hbar must be > 0");
  if (!(cfg.g >= 0.0) || !std::isfinite(cfg.g))
    throw ConfigError("g must be >= 0");
  if (cfg.n_particles < 1) throw ConfigError("n_particles must be >= 1");
  for (std::size_t i = 0; i < cfg.omega.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.omega.size(); ++j) {
      if (commensurate(cfg.omega[i], cfg.omega[j])) {
        std::ostringstream msg;
        msg << "omega ratio omega_" << i + 1 << "/omega_" << j + 1
            << " is commensurate (degenerate levels are unsupported)";
        throw ConfigError(msg.str());
      }
    }
  }
}

}  // namespace bosetrap

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bosetrap/basis.hpp"
#include "bosetrap/riccati.hpp"
#include "bosetrap/trap_config.hpp"

namespace bosetrap {

// How the quasiparticle levels are obtained for a given lambda.
enum class SolverKind {
  kPerturbative1,  // eps_n + 4 lambda c_nn
  kPerturbative2,  // eigenvalues of the O(lambda^2) spectrum matrix
  kRiccati,        // eigenvalues from the Newton solution of the Riccati set
  kIdeal,          // g forced to zero
};

std::string_view to_string(SolverKind kind);
// Throws ConfigError for unknown names.
SolverKind parse_solver_kind(std::string_view name);

// Levels as a function of lambda for a fixed basis. The Riccati variant keeps
// the previous solution as a warm start, so an instance is not thread-safe.
class LevelModel {
 public:
  LevelModel(const TrapConfig& cfg, const BasisSet& basis, SolverKind kind,
             RiccatiOptions riccati = {});

  Eigen::VectorXd levels(double lambda);
  const Eigen::VectorXd& ideal_levels() const { return ideal_; }
  SolverKind kind() const { return kind_; }
  double g() const { return g_; }

 private:
  SystemMatrices at(double lambda) const;

  SystemMatrices base_;
  Eigen::VectorXd ideal_;
  Eigen::VectorXd diag_c_;
  SolverKind kind_;
  double g_;
  RiccatiOptions riccati_;
  std::optional<RiccatiSolution> warm_;
};

struct ThermoPoint {
  double temperature = 0.0;
  double n0 = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd levels;
  double energy_excess = 0.0;  // E - E0
  int iterations = 0;
  bool converged = false;
  // Above condensation: n0 = 0 and the excited levels are filled with
  // fugacity < 1.
  bool normal_phase = false;
  double fugacity = 1.0;
  std::string error;
};

struct ThermoCurve {
  std::vector<ThermoPoint> points;
  TrapConfig config;
  SolverKind solver = SolverKind::kPerturbative1;
  double cutoff = 0.0;

  bool all_converged() const;
  // Largest increase of n0/N between consecutive points (0 if monotone).
  double max_fraction_increase() const;
};

// 1 / (exp(eps/T) - 1). Returns 0 for eps/T > 700 and T/eps - 1/2 for
// eps/T < 1e-8. Throws DomainError if eps <= 0 or T <= 0.
double occupation(double eps, double temperature);

// Sum of occupation over levels.
double excited_count(const Eigen::Ref<const Eigen::VectorXd>& levels,
                     double temperature);

// sum_n levels_n * occupation(levels_n, T), i.e. E - E0.
double energy_sum(const Eigen::Ref<const Eigen::VectorXd>& levels,
                  double temperature);

inline constexpr int kMaxSelfConsistentIterations = 500;
inline constexpr double kFixedPointDamping = 0.5;

// Self-consistent n0 = N - excited_count(levels(g n0 / 2), T) in [0, N].
// Damped fixed-point iteration from n0_start with a bisection fallback.
// Converged means |n0 + excited_count - N| < tol * N. Falls back to the
// normal phase when the excited count at n0 = 0 already exceeds N.
// Throws ConvergenceError after kMaxSelfConsistentIterations.
ThermoPoint solve_n0(LevelModel& model, int n_particles, double temperature,
                     double tol, std::optional<double> n0_start = {});

ThermoPoint solve_n0(const TrapConfig& cfg, const BasisSet& basis,
                     double temperature, SolverKind kind, double tol);

// E - E0 of a converged point. Throws DomainError if not converged.
double energy_excess(const ThermoPoint& point);

struct SweepOptions {
  double tol = 1e-10;
  // Cold-start each point on its own thread instead of warm-starting from
  // the previous temperature.
  bool parallel = false;
  RiccatiOptions riccati = {};
};

// One point per temperature. Throws ConfigError unless the grid is strictly
// increasing and positive. Per-point failures are recorded on the point.
ThermoCurve sweep(const TrapConfig& cfg, const BasisSet& basis,
                  const std::vector<double>& temperatures, SolverKind kind,
                  const SweepOptions& options = {});

}  // namespace bosetrap

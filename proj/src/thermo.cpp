#include "bosetrap/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "bosetrap/errors.hpp"
#include "bosetrap/perturbative.hpp"

namespace bosetrap {

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kPerturbative1:
      return "perturbative1";
    case SolverKind::kPerturbative2:
      return "perturbative2";
    case SolverKind::kRiccati:
      return "riccati";
    case SolverKind::kIdeal:
      return "ideal";
  }
  return "unknown";
}

SolverKind parse_solver_kind(std::string_view name) {
  for (SolverKind k : {SolverKind::kPerturbative1, SolverKind::kPerturbative2,
                       SolverKind::kRiccati, SolverKind::kIdeal}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("solver must be one of perturbative1, perturbative2, "
                    "riccati, ideal (got '" + std::string(name) + "')");
}

LevelModel::LevelModel(const TrapConfig& cfg, const BasisSet& basis,
                       SolverKind kind, RiccatiOptions riccati)
    : base_(build_matrices(basis, cfg, 0.0)),
      kind_(kind),
      g_(kind == SolverKind::kIdeal ? 0.0 : cfg.g),
      riccati_(riccati) {
  ideal_ = base_.energies;
  std::sort(ideal_.begin(), ideal_.end());
  diag_c_ = base_.coupling.diagonal();
}

SystemMatrices LevelModel::at(double lambda) const {
  SystemMatrices sys = base_;
  sys.lambda = lambda;
  return sys;
}

Eigen::VectorXd LevelModel::levels(double lambda) {
  if (lambda == 0.0 || kind_ == SolverKind::kIdeal) return ideal_;

  Eigen::VectorXd out;
  switch (kind_) {
    case SolverKind::kPerturbative1:
      out = base_.energies + 4.0 * lambda * diag_c_;
      std::sort(out.begin(), out.end());
      break;
    case SolverKind::kPerturbative2:
      out = quasiparticle_levels(spectrum_matrix(at(lambda), 2));
      break;
    case SolverKind::kRiccati: {
      const SystemMatrices sys = at(lambda);
      const RiccatiProblem prob = RiccatiProblem::from_system(sys);
      std::optional<RiccatiSolution> sol;
      if (warm_) {
        try {
          sol = solve_xy(prob, warm_->x, warm_->y, riccati_);
        } catch (const Error&) {
          sol.reset();
        }
      }
      if (!sol || !sol->converged) sol = solve_xy(sys, riccati_);
      if (!sol->converged) {
        std::ostringstream msg;
        msg << "Riccati solve did not converge at lambda = " << lambda
            << " (residual " << sol->residual_history.back() << ")";
        throw ConvergenceError(msg.str());
      }
      out = exact_spectrum(*sol, sys);
      warm_ = std::move(sol);
      break;
    }
    case SolverKind::kIdeal:
      break;
  }
  if (!(out.minCoeff() > 0.0)) {
    std::ostringstream msg;
    msg << "non-positive quasiparticle level " << out.minCoeff()
        << " at lambda = " << lambda;
    throw DomainError(msg.str());
  }
  return out;
}

bool ThermoCurve::all_converged() const {
  return std::all_of(points.begin(), points.end(),
                     [](const ThermoPoint& p) { return p.converged; });
}

double ThermoCurve::max_fraction_increase() const {
  const double n = config.n_particles;
  double worst = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    worst = std::max(worst, (points[i].n0 - points[i - 1].n0) / n);
  return worst;
}

double occupation(double eps, double temperature) {
  if (!(temperature > 0.0)) throw DomainError("temperature must be > 0");
  if (!(eps > 0.0)) throw DomainError("level energy must be > 0");
  const double x = eps / temperature;
  if (x > 700.0) return 0.0;
  if (x < 1e-8) return 1.0 / x - 0.5;
  return 1.0 / std::expm1(x);
}

double excited_count(const Eigen::Ref<const Eigen::VectorXd>& levels,
                     double temperature) {
  double sum = 0.0;
  for (double e : levels) sum += occupation(e, temperature);
  return sum;
}

double energy_sum(const Eigen::Ref<const Eigen::VectorXd>& levels,
                  double temperature) {
  double sum = 0.0;
  for (double e : levels) sum += e * occupation(e, temperature);
  return sum;
}

namespace {

// Excited levels filled with fugacity exp(-u): occupation(eps + T u, T).
double count_at_shift(const Eigen::VectorXd& levels, double temperature,
                      double u) {
  double sum = 0.0;
  for (double e : levels) sum += occupation(e + temperature * u, temperature);
  return sum;
}

ThermoPoint normal_phase_point(const Eigen::VectorXd& ideal, int n_particles,
                               double temperature) {
  const double n = n_particles;
  auto excess = [&](double u) {
    return count_at_shift(ideal, temperature, u) - n;
  };
  double hi = 1.0;
  while (excess(hi) > 0.0) hi *= 2.0;

  std::uintmax_t max_iter = 200;
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() *
                                  std::max(1.0, std::abs(a));
  };
  const auto [lo_u, hi_u] = boost::math::tools::toms748_solve(
      excess, 0.0, hi, excess(0.0), excess(hi), tol, max_iter);
  const double u = 0.5 * (lo_u + hi_u);

  ThermoPoint p;
  p.temperature = temperature;
  p.n0 = 0.0;
  p.lambda = 0.0;
  p.levels = ideal;
  p.normal_phase = true;
  p.fugacity = std::exp(-u);
  p.iterations = static_cast<int>(max_iter);
  p.converged = true;
  double e = 0.0;
  for (double eps : ideal) e += eps * occupation(eps + temperature * u, temperature);
  p.energy_excess = e;
  return p;
}

}  // namespace

ThermoPoint solve_n0(LevelModel& model, int n_particles, double temperature,
                     double tol, std::optional<double> n0_start) {
  if (!(temperature > 0.0)) throw DomainError("temperature must be > 0");
  if (!(tol > 0.0)) throw DomainError("tol must be > 0");
  const double n = n_particles;
  const double g = model.g();

  const double ideal_count = excited_count(model.ideal_levels(), temperature);
  if (ideal_count > n)
    return normal_phase_point(model.ideal_levels(), n_particles, temperature);

  ThermoPoint p;
  p.temperature = temperature;

  if (g == 0.0) {
    p.n0 = n - ideal_count;
    p.iterations = 1;
    p.converged = true;
  } else {
    // h(n0) = N - S(levels(g n0 / 2)) - n0 is decreasing with h(0) >= 0.
    auto residual = [&](double n0) {
      return n - excited_count(model.levels(0.5 * g * n0), temperature) - n0;
    };
    double lo = 0.0;
    double hi = n;
    double n0 = std::clamp(n0_start.value_or(n), 0.0, n);
    int sign_flips = 0;
    double prev_h = 0.0;
    for (int it = 1;; ++it) {
      const double h = residual(n0);
      if (std::abs(h) < tol * n) {
        p.n0 = n0;
        p.iterations = it;
        p.converged = true;
        break;
      }
      if (it >= kMaxSelfConsistentIterations) {
        std::ostringstream msg;
        msg << "self-consistent n0 did not converge at T = " << temperature
            << " (residual " << h << ")";
        throw ConvergenceError(msg.str());
      }
      if (h > 0.0) {
        lo = n0;
      } else {
        hi = n0;
      }
      if (it > 1 && (h > 0.0) != (prev_h > 0.0)) ++sign_flips;
      prev_h = h;
      double next = n0 + kFixedPointDamping * h;
      // Oscillation or a step leaving the bracket switches to bisection.
      if (sign_flips >= 3 || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
      n0 = next;
    }
  }

  p.lambda = 0.5 * g * p.n0;
  p.levels = model.levels(p.lambda);
  p.energy_excess = energy_sum(p.levels, temperature);
  return p;
}

ThermoPoint solve_n0(const TrapConfig& cfg, const BasisSet& basis,
                     double temperature, SolverKind kind, double tol) {
  LevelModel model(cfg, basis, kind);
  return solve_n0(model, cfg.n_particles, temperature, tol);
}

double energy_excess(const ThermoPoint& point) {
  if (!point.converged) throw DomainError("point is not converged");
  if (!point.normal_phase) return energy_sum(point.levels, point.temperature);
  const double u = -std::log(point.fugacity);
  double e = 0.0;
  for (double eps : point.levels)
    e += eps * occupation(eps + point.temperature * u, point.temperature);
  return e;
}

namespace {

ThermoPoint failed_point(double temperature, const std::string& what) {
  ThermoPoint p;
  p.temperature = temperature;
  p.converged = false;
  p.error = what;
  p.n0 = std::numeric_limits<double>::quiet_NaN();
  p.lambda = std::numeric_limits<double>::quiet_NaN();
  p.energy_excess = std::numeric_limits<double>::quiet_NaN();
  return p;
}

ThermoPoint guarded_point(LevelModel& model, int n_particles, double t,
                          double tol, std::optional<double> start) {
  try {
    return solve_n0(model, n_particles, t, tol, start);
  } catch (const Error& e) {
    return failed_point(t, e.what());
  }
}

}  // namespace

ThermoCurve sweep(const TrapConfig& cfg, const BasisSet& basis,
                  const std::vector<double>& temperatures, SolverKind kind,
                  const SweepOptions& options) {
  if (temperatures.empty()) throw ConfigError("temperature grid is empty");
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    if (!(temperatures[i] > 0.0))
      throw ConfigError("temperatures must be > 0");
    if (i > 0 && !(temperatures[i] > temperatures[i - 1]))
      throw ConfigError("temperature grid must be strictly increasing");
  }

  ThermoCurve curve;
  curve.config = cfg;
  curve.solver = kind;
  curve.cutoff = basis.cutoff;
  curve.points.resize(temperatures.size());

  if (!options.parallel) {
    LevelModel model(cfg, basis, kind, options.riccati);
    std::optional<double> start;
    for (std::size_t i = 0; i < temperatures.size(); ++i) {
      curve.points[i] = guarded_point(model, cfg.n_particles, temperatures[i],
                                      options.tol, start);
      const ThermoPoint& p = curve.points[i];
      if (p.converged && !p.normal_phase) {
        start = p.n0;
      } else {
        start.reset();
      }
    }
    return curve;
  }

  const std::size_t workers = std::clamp<std::size_t>(
      std::thread::hardware_concurrency(), 1, temperatures.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      LevelModel model(cfg, basis, kind, options.riccati);
      for (std::size_t i = w; i < temperatures.size(); i += workers) {
        curve.points[i] = guarded_point(model, cfg.n_particles,
                                        temperatures[i], options.tol, {});
      }
    });
  }
  for (auto& t : pool) t.join();
  return curve;
}

}  // namespace bosetrap

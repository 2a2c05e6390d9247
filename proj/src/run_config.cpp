#include "bosetrap/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "bosetrap/basis.hpp"
#include "bosetrap/errors.hpp"
#include "bosetrap/perturbative.hpp"
#include "bosetrap/quadrature.hpp"
#include "bosetrap/riccati.hpp"

namespace bosetrap {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string line_error(int line, std::string_view what) {
  std::ostringstream msg;
  msg << "line " << line << ": " << what;
  return msg.str();
}

double parse_double(std::string_view text, int line, std::string_view key) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(line_error(
        line, "invalid number '" + std::string(text) + "' for " + std::string(key)));
  }
  return v;
}

int parse_int(std::string_view text, int line, std::string_view key) {
  text = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(line_error(
        line, "invalid integer '" + std::string(text) + "' for " + std::string(key)));
  }
  return v;
}

std::vector<double> parse_list(std::string_view text, int line,
                               std::string_view key) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma), line, key));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

bool parse_bool(std::string_view text, int line, std::string_view key) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(line_error(
      line, "invalid boolean '" + std::string(text) + "' for " + std::string(key)));
}

const std::set<std::string_view> kKeys = {
    "dimension", "omega",  "mass",   "hbar",   "g",   "n_particles",
    "e_cut",     "t_min",  "t_max",  "t_step", "solver", "tol",
    "output",    "emit_diagnostics"};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::vector<double> RunConfig::temperature_grid() const {
  std::vector<double> grid;
  for (long i = 0;; ++i) {
    const double t = t_min + static_cast<double>(i) * t_step;
    if (t > t_max * (1.0 + 1e-12)) break;
    grid.push_back(t);
  }
  return grid;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  bool omega_given = false;
  std::set<std::string> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line_error(line_no, "expected 'key = value'"));
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!kKeys.count(key))
      throw ConfigError(line_error(line_no, "unknown key '" + std::string(key) + "'"));
    if (!seen.insert(std::string(key)).second)
      throw ConfigError(line_error(line_no, "duplicate key '" + std::string(key) + "'"));
    if (value.empty())
      throw ConfigError(line_error(line_no, "missing value for " + std::string(key)));

    if (key == "dimension") {
      cfg.trap.dimension = parse_int(value, line_no, key);
    } else if (key == "omega") {
      cfg.trap.omega = parse_list(value, line_no, key);
      omega_given = true;
    } else if (key == "mass") {
      cfg.trap.mass = parse_double(value, line_no, key);
    } else if (key == "hbar") {
      cfg.trap.hbar = parse_double(value, line_no, key);
    } else if (key == "g") {
      cfg.trap.g = parse_double(value, line_no, key);
    } else if (key == "n_particles") {
      cfg.trap.n_particles = parse_int(value, line_no, key);
    } else if (key == "e_cut") {
      cfg.e_cut = parse_double(value, line_no, key);
    } else if (key == "t_min") {
      cfg.t_min = parse_double(value, line_no, key);
    } else if (key == "t_max") {
      cfg.t_max = parse_double(value, line_no, key);
    } else if (key == "t_step") {
      cfg.t_step = parse_double(value, line_no, key);
    } else if (key == "solver") {
      try {
        cfg.solver = parse_solver_kind(value);
      } catch (const ConfigError& e) {
        throw ConfigError(line_error(line_no, e.what()));
      }
    } else if (key == "tol") {
      cfg.tol = parse_double(value, line_no, key);
    } else if (key == "output") {
      cfg.output_path = std::string(value);
    } else if (key == "emit_diagnostics") {
      cfg.emit_diagnostics = parse_bool(value, line_no, key);
    }
  }
  if (!omega_given && cfg.trap.dimension >= 1) {
    if (cfg.trap.dimension > 1)
      throw ConfigError("omega must be given when dimension > 1");
    cfg.trap.omega.assign(1, 1.0);
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& config) {
  validate(config.trap);
  if (!(config.e_cut > 0.0)) throw ConfigError("e_cut must be > 0");
  if (!(config.t_min > 0.0)) throw ConfigError("t_min must be > 0");
  if (!(config.t_step > 0.0)) throw ConfigError("t_step must be > 0");
  if (!(config.t_max > config.t_min))
    throw ConfigError("t_max must be > t_min");
  if (!(config.tol > 0.0)) throw ConfigError("tol must be > 0");
  const double first = config.trap.hbar * config.trap.min_omega();
  if (config.e_cut < first * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "e_cut must be >= the first excited level " << first;
    throw ConfigError(msg.str());
  }
}

void write_csv(const ThermoCurve& curve, std::ostream& out) {
  const double n = curve.config.n_particles;
  out << kCsvHeader << '\n';
  for (const ThermoPoint& p : curve.points) {
    out << format_number(p.temperature) << ',' << format_number(p.n0 / n) << ','
        << format_number(p.energy_excess / n) << ',' << format_number(p.lambda)
        << ',' << (p.converged ? 1 : 0) << ',' << p.iterations << '\n';
  }
}

int run(const RunConfig& config, std::ostream& csv, std::ostream& log) {
  ThermoCurve curve;
  try {
    validate(config);
    const BasisSet basis = enumerate_basis(config.trap, config.e_cut);
    SweepOptions options;
    options.tol = config.tol;
    curve = sweep(config.trap, basis, config.temperature_grid(), config.solver,
                  options);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const EmptyBasisError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  write_csv(curve, csv);

  int failed = 0;
  for (const ThermoPoint& p : curve.points) {
    if (p.converged) continue;
    ++failed;
    log << "T = " << format_number(p.temperature) << ": " << p.error << '\n';
  }
  if (config.emit_diagnostics) {
    const double n = config.trap.n_particles;
    double conservation = 0.0;
    int normal = 0;
    for (const ThermoPoint& p : curve.points) {
      if (!p.converged) continue;
      if (p.normal_phase) {
        ++normal;
        continue;
      }
      conservation = std::max(
          conservation, std::abs(p.n0 + excited_count(p.levels, p.temperature) - n) / n);
    }
    log << "solver: " << to_string(config.solver) << '\n'
        << "basis cutoff: " << format_number(config.e_cut) << '\n'
        << "points: " << curve.points.size() << " (failed " << failed
        << ", normal phase " << normal << ")\n"
        << "max n0/N increase: " << format_number(curve.max_fraction_increase())
        << '\n'
        << "max particle-conservation defect / N: " << format_number(conservation)
        << '\n';
  }
  return failed == 0 ? kExitOk : kExitSolverFailure;
}

int run(const RunConfig& config, std::ostream& log) {
  if (config.output_path.empty() || config.output_path == "-")
    return run(config, std::cout, log);
  std::ofstream out(config.output_path);
  if (!out) {
    log << "cannot open output file '" << config.output_path << "'\n";
    return kExitConfigError;
  }
  const int status = run(config, out, log);
  out.close();
  if (!out) {
    log << "error writing '" << config.output_path << "'\n";
    return kExitConfigError;
  }
  return status;
}

namespace {

CheckResult check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

template <typename F>
CheckResult guarded(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return check(name, false, e.what());
  }
}

std::string ratio_text(const std::vector<double>& ratios) {
  std::ostringstream s;
  s << "ratios";
  for (double r : ratios) s << ' ' << format_number(r);
  return s.str();
}

bool ratios_within(const std::vector<double>& ratios, double lo, double hi) {
  return std::all_of(ratios.begin(), ratios.end(),
                     [&](double r) { return r >= lo && r <= hi; });
}

double xy_distance(const RiccatiSolution& r, const PerturbativeXY& p) {
  return std::max((r.x - p.x).cwiseAbs().maxCoeff(),
                  (r.y - p.y).cwiseAbs().maxCoeff());
}

}  // namespace

std::vector<CheckResult> validation_checks(const RunConfig& config) {
  validate(config);
  const TrapConfig& trap = config.trap;
  const double quantum = trap.hbar * trap.min_omega();
  const double lambda_cfg = 0.5 * trap.g * trap.n_particles;
  const double lambda_small = lambda_cfg > 0.0 ? std::min(lambda_cfg, 0.02) : 0.02;
  const double lambda_order = lambda_cfg > 0.0 ? std::min(lambda_cfg, 0.1) : 0.1;
  const double small_cut = std::min(config.e_cut, 10.0 * quantum);
  std::vector<CheckResult> out;

  // Matrix elements on the 1D reduction with the geometric-mean frequency.
  TrapConfig line = trap;
  line.dimension = 1;
  line.omega = {trap.mean_omega()};
  out.push_back(guarded("matrix-element-oracle", [&] {
    double worst = 0.0;
    for (int m = 0; m <= 12; ++m)
      for (int n = 0; n <= 12; ++n)
        worst = std::max(worst, std::abs(coupling_coefficient({m}, {n}, line) -
                                         quadrature_oracle_element({m}, {n}, line)));
    return check("matrix-element-oracle", worst < 1e-10,
                 "max |closed form - quadrature| = " + format_number(worst));
  }));
  out.push_back(guarded("parity-selection", [&] {
    bool ok = true;
    for (int m = 0; m <= 12; ++m)
      for (int n = 0; n <= 12; ++n) {
        const double c = coupling_coefficient({m}, {n}, line);
        if (((m + n) % 2 != 0) != (c == 0.0)) ok = false;
      }
    return check("parity-selection", ok, "c_mn == 0 exactly iff m+n odd");
  }));

  out.push_back(guarded("perturbative-constraint-scaling", [&] {
    const BasisSet basis = enumerate_basis(trap, small_cut);
    std::vector<double> r;
    for (double l : {lambda_small, lambda_small / 2, lambda_small / 4}) {
      const auto xy = perturbative_xy(build_matrices_at_lambda(basis, trap, l));
      r.push_back(constraint_residual(xy.x, xy.y));
    }
    std::vector<double> ratios{r[0] / r[1], r[1] / r[2]};
    return check("perturbative-constraint-scaling", ratios_within(ratios, 6, 10),
                 ratio_text(ratios) + " (expect 6..10)");
  }));

  out.push_back(guarded("first-order-level-scaling", [&] {
    const BasisSet basis = enumerate_basis(trap, std::min(config.e_cut, 20.0 * quantum));
    std::vector<double> err;
    for (double l : {lambda_order, lambda_order / 2, lambda_order / 4}) {
      const SystemMatrices sys = build_matrices_at_lambda(basis, trap, l);
      const Eigen::VectorXd lv = quasiparticle_levels(spectrum_matrix(sys, 2));
      err.push_back(std::abs(lv(0) - (sys.energies(0) + 4 * l * sys.coupling(0, 0))));
    }
    std::vector<double> ratios{err[0] / err[1], err[1] / err[2]};
    return check("first-order-level-scaling", ratios_within(ratios, 3.5, 4.5),
                 ratio_text(ratios) + " (expect 3.5..4.5)");
  }));

  out.push_back(guarded("riccati-convergence", [&] {
    const BasisSet basis = enumerate_basis(trap, small_cut);
    const SystemMatrices sys = build_matrices_at_lambda(basis, trap, lambda_cfg);
    const RiccatiSolution sol = solve_xy(sys);
    const double worst_r3 = *std::max_element(sol.constraint_history.begin(),
                                              sol.constraint_history.end());
    std::ostringstream d;
    d << "lambda " << format_number(lambda_cfg) << ", " << sol.iterations
      << " iterations, r1 " << format_number(sol.residuals.r1) << ", max r3 "
      << format_number(worst_r3);
    return check("riccati-convergence", sol.converged && worst_r3 < 1e-13, d.str());
  }));

  out.push_back(guarded("riccati-perturbative-scaling", [&] {
    const BasisSet basis = enumerate_basis(trap, small_cut);
    std::vector<double> dist;
    for (double l : {lambda_small, lambda_small / 2, lambda_small / 4}) {
      const SystemMatrices sys = build_matrices_at_lambda(basis, trap, l);
      const RiccatiSolution sol = solve_xy(sys);
      if (!sol.converged) throw ConvergenceError("Riccati solve did not converge");
      dist.push_back(xy_distance(sol, perturbative_xy(sys)));
    }
    std::vector<double> ratios{dist[0] / dist[1], dist[1] / dist[2]};
    return check("riccati-perturbative-scaling", ratios_within(ratios, 6, 10),
                 ratio_text(ratios) + " (expect 6..10)");
  }));

  out.push_back(guarded("linear-term-elimination", [&] {
    const BasisSet basis = enumerate_basis(trap, std::min(config.e_cut, 20.0 * quantum));
    const SystemMatrices sys = build_matrices(basis, trap, trap.n_particles);
    const Eigen::VectorXd z = shift_vector(sys, sys.n0);
    const double res = linear_term_residual(sys, z, sys.n0).cwiseAbs().maxCoeff();
    const double scale = sys.source.cwiseAbs().maxCoeff();
    return check("linear-term-elimination", res < 1e-10 * scale,
                 "residual " + format_number(res) + ", |d|max " + format_number(scale));
  }));

  out.push_back(guarded("truncation-doubling", [&] {
    const double cut = std::min(config.e_cut, (trap.dimension == 1 ? 40.0 : 12.0) * quantum);
    Eigen::VectorXd lv[2];
    for (int k = 0; k < 2; ++k) {
      const BasisSet basis = enumerate_basis(trap, cut * (k + 1));
      lv[k] = quasiparticle_levels(
          spectrum_matrix(build_matrices_at_lambda(basis, trap, lambda_cfg), 2));
    }
    const Eigen::Index count = std::min<Eigen::Index>(5, lv[0].size());
    const double change =
        (lv[0].head(count) - lv[1].head(count)).cwiseAbs().maxCoeff();
    return check("truncation-doubling", change < 1e-6,
                 "lowest " + std::to_string(count) + " levels change by " +
                     format_number(change) + " from e_cut " + format_number(cut) +
                     " to " + format_number(2 * cut));
  }));
  return out;
}

int validate_report(const RunConfig& config, std::ostream& out) {
  std::vector<CheckResult> results;
  try {
    results = validation_checks(config);
  } catch (const ConfigError& e) {
    out << "FAIL config: " << e.what() << '\n';
    return kExitConfigError;
  }
  bool all = true;
  for (const CheckResult& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? kExitOk : kExitSolverFailure;
}

}  // namespace bosetrap

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bosetrap/thermo.hpp"
#include "bosetrap/trap_config.hpp"

namespace bosetrap {

struct RunConfig {
  TrapConfig trap;
  double e_cut = 400.0;
  double t_min = 1.0;
  double t_max = 200.0;
  double t_step = 1.0;
  SolverKind solver = SolverKind::kPerturbative1;
  double tol = 1e-10;
  std::string output_path = "-";  // "-" is stdout
  bool emit_diagnostics = false;

  std::vector<double> temperature_grid() const;
};

// Flat "key = value" text, '#' starts a comment, lists are comma separated.
// Keys: dimension, omega, mass, hbar, g, n_particles, e_cut, t_min, t_max,
// t_step, solver, tol, output, emit_diagnostics. Throws ConfigError with the
// line number for syntax errors and a message naming the invariant for
// invalid values.
RunConfig parse_config(std::string_view text);

// Throws ConfigError.
void validate(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitSolverFailure = 2;

inline constexpr char kCsvHeader[] =
    "T,n0_over_N,energy_excess_per_N,lambda,converged,iterations";

void write_csv(const ThermoCurve& curve, std::ostream& out);

// Runs the sweep and writes the CSV to `csv`. Returns kExitOk when every
// point converged and kExitSolverFailure otherwise. Diagnostics go to `log`.
int run(const RunConfig& config, std::ostream& csv, std::ostream& log);

// Runs the sweep and writes to config.output_path; kExitConfigError on
// invalid configs or unwritable output.
int run(const RunConfig& config, std::ostream& log);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> validation_checks(const RunConfig& config);

// Writes "PASS name: detail" / "FAIL name: detail" lines. Returns kExitOk
// when all pass, kExitSolverFailure otherwise, kExitConfigError if the
// config is invalid.
int validate_report(const RunConfig& config, std::ostream& out);

}  // namespace bosetrap

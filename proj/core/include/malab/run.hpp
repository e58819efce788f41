#pragma once

#include <iosfwd>

#include "malab/config.hpp"
#include "malab/continuity_solver.hpp"

namespace malab {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumericFailure = 3;

/// Executes one configured command and writes its reports under
/// config.output_dir: config.txt (the canonical echo) and summary.txt in
/// every case, plus the command's CSV files. Returns 0, 2 (invalid input,
/// including I/O) or 3 (numeric failure; the last good state is still
/// written). Messages go to `log`.
int run(const RunConfig& config, std::ostream& log);

/// The equation a solve or check-cone run describes: omega_0 = identity,
/// chi = diag + ddbar(potential), f from the series or manufactured from
/// phi_star.
EquationSpec build_equation(const RunConfig& config, Family family);

SolverOptions solver_options(const RunConfig& config);

}  // namespace malab

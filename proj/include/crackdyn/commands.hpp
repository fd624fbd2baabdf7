#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crackdyn {

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitSolver = 3 };

/// Integrates the configured problem; writes <dir>/diagnostics.csv and, when
/// output.every > 0, VTK snapshots <dir>/state_NNNNNN.vtk. On a solver
/// failure the CSV holds the steps completed so far and the Newton log goes
/// to <dir>/failure.log. No file is created when the config is invalid.
int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Penalty sweep; writes <dir>/sweep_eps.csv and prints the fitted order.
int cmd_sweep_eps(const std::string& config_path, const std::vector<double>& eps,
                  std::ostream& out, std::ostream& err);

/// Contact-weight sweep; writes <dir>/sweep_gamma.csv.
int cmd_sweep_gamma(const std::string& config_path, const std::vector<double>& gammas,
                    std::ostream& out, std::ostream& err);

/// Prints one pass/FAIL line per property; exit 1 if any fails.
int cmd_verify(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Writes a builtin mesh ("rect:..." or "rect_crack:...") to `path`.
int cmd_mesh_gen(const std::string& spec, const std::string& path, std::ostream& out,
                 std::ostream& err);

}  // namespace crackdyn

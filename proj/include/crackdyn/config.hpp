#pragma once

#include "crackdyn/diagnostics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace crackdyn {

struct OutputParams {
  std::string dir = "out";
  /// Field snapshot cadence in steps; 0 writes none. The final state is
  /// always written when snapshots are on.
  std::size_t every = 0;
};

/// Parsed and validated run configuration.
///
///   [mesh]      builtin = rect_crack:2,1,16,8,0.25,0.75   |   file = path
///   [material]  lambda, mu, rho
///   [contact]   gamma, epsilon, g
///   [time]      t_end, dt, scheme, newmark_b, newmark_g, newton_tol,
///               newton_abs, newton_maxit, max_halvings, linear_tol
///   [data]      f, F, u0, v0       each "(expr, expr)"
///   [output]    dir, every
struct Config {
  std::string mesh_source;
  Scenario scenario;
  OutputParams output;
};

/// Throws ConfigError("line N: ...") on syntax errors, unknown sections or
/// keys, duplicates, and bad values; module invariants are checked after
/// parsing (g is sampled on the crack over the time grid). Relative mesh
/// paths resolve against `base_dir`.
Config parse_config(std::istream& in, const std::string& base_dir = ".");
Config load_config(const std::string& path);

/// Column order of diagnostics.csv.
inline constexpr const char* kCsvHeader =
    "t,kinetic,strain,penetration_L3,comp_residual,friction_gap,stick_slip_residual,newton_iters";

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r);
/// Inverse of the two above. Throws ParseError on a wrong header or row.
std::vector<DiagnosticsRecord> read_csv(std::istream& in);

/// Legacy ASCII VTK unstructured grid with point vectors u and v.
void write_vtk(std::ostream& out, const CrackedMesh& mesh, const State& state);

}  // namespace crackdyn

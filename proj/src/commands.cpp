#include "crackdyn/commands.hpp"

#include "crackdyn/config.hpp"
#include "crackdyn/verify.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace crackdyn {

namespace {

namespace fs = std::filesystem;

/// Loads and validates; on failure reports and returns false without
/// touching the filesystem.
bool load(const std::string& path, Config& cfg, std::ostream& err) {
  try {
    cfg = load_config(path);
    cfg.scenario.mode = default_assembly_mode();
    return true;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return false;
  }
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string snapshot_name(std::size_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "state_%06zu.vtk", step);
  return buf;
}

}  // namespace

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  Config cfg;
  if (!load(config_path, cfg, err)) return kExitConfig;
  const fs::path dir(cfg.output.dir);
  fs::create_directories(dir);
  std::ofstream csv(dir / "diagnostics.csv");
  write_csv_header(csv);

  const auto steps = time_grid(cfg.scenario.time).size() - 1;
  RunOptions opt;
  opt.keep_states = false;
  opt.on_step = [&](const Model& model, std::size_t k, const State& s, const DiagnosticsRecord& rec) {
    write_csv_row(csv, rec);
    csv.flush();
    const auto every = cfg.output.every;
    if (every > 0 && (k % every == 0 || k == steps)) {
      std::ofstream vtk(dir / snapshot_name(k));
      write_vtk(vtk, model.mesh(), s);
    }
  };
  try {
    const RunResult r = run(cfg.scenario, opt);
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    const auto& last = r.records.back();
    out << "completed " << steps << " steps to t = " << g17(last.t) << ", energy " << g17(last.energy())
        << ", results in " << dir.string() << '\n';
    return kExitOk;
  } catch (const StepFailure& e) {
    std::ofstream log(dir / "failure.log");
    log << e.what() << '\n' << e.dump();
    err << "solver failure: " << e.what() << " (Newton log in " << (dir / "failure.log").string() << ")\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

int cmd_sweep_eps(const std::string& config_path, const std::vector<double>& eps, std::ostream& out,
                  std::ostream& err) {
  Config cfg;
  if (!load(config_path, cfg, err)) return kExitConfig;
  SweepResult res;
  try {
    res = epsilon_sweep(cfg.scenario, eps);
  } catch (const InvariantError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  fs::create_directories(cfg.output.dir);
  std::ofstream csv(fs::path(cfg.output.dir) / "sweep_eps.csv");
  const char* header =
      "epsilon,sup_penetration_L3,int_penetration_cubed,max_accel_H,sup_stick_slip,distance_to_finest,"
      "distance_to_previous";
  csv << header << '\n';
  out << header << '\n';
  for (const auto& r : res.rows) {
    const std::string line = g17(r.epsilon) + ',' + g17(r.sup_penetration_L3) + ',' +
                             g17(r.int_penetration_cubed) + ',' + g17(r.max_accel_H) + ',' +
                             g17(r.sup_stick_slip) + ',' + g17(r.distance_to_finest) + ',' +
                             g17(r.distance_to_previous);
    csv << line << '\n';
    out << line << '\n';
  }
  out << "fitted order of int |penetration|^3 dt in eps: " << g17(res.order) << '\n';
  return kExitOk;
}

int cmd_sweep_gamma(const std::string& config_path, const std::vector<double>& gammas,
                    std::ostream& out, std::ostream& err) {
  Config cfg;
  if (!load(config_path, cfg, err)) return kExitConfig;
  std::vector<GammaRow> rows;
  try {
    for (double g : gammas)
      if (!(g >= 0.0)) throw InvariantError("contact", "gamma must be >= 0");
    rows = gamma_sweep(cfg.scenario, gammas);
  } catch (const InvariantError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  fs::create_directories(cfg.output.dir);
  std::ofstream csv(fs::path(cfg.output.dir) / "sweep_gamma.csv");
  const char* header = "gamma,sup_penetration_L3,int_penetration_cubed,max_accel_H,max_energy,final_energy";
  csv << header << '\n';
  out << header << '\n';
  for (const auto& r : rows) {
    const std::string line = g17(r.gamma) + ',' + g17(r.sup_penetration_L3) + ',' +
                             g17(r.int_penetration_cubed) + ',' + g17(r.max_accel_H) + ',' +
                             g17(r.max_energy) + ',' + g17(r.final_energy);
    csv << line << '\n';
    out << line << '\n';
  }
  return kExitOk;
}

int cmd_verify(const std::string& config_path, std::ostream& out, std::ostream& err) {
  Config cfg;
  if (!load(config_path, cfg, err)) return kExitConfig;
  VerifyReport rep;
  try {
    rep = verify(cfg.scenario);
  } catch (const Error& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  for (const auto& c : rep.checks) {
    const char* tag = c.skipped ? "skip" : (c.pass ? "pass" : "FAIL");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-4s  %-28s  ", tag, c.name.c_str());
    out << buf << c.detail << '\n';
  }
  return rep.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_mesh_gen(const std::string& spec, const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const auto mesh = generate_from_spec(spec);
    save_mesh(path, mesh);
    out << "wrote " << mesh.vertices.size() << " vertices, " << mesh.cells.size() << " cells, "
        << mesh.crack_pairs.size() << " crack pairs to " << path << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace crackdyn

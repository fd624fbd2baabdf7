// crackdyn: dynamic contact with Tresca friction on a cracked elastic body.

#include "crackdyn/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Penalty-regularized crack contact with Tresca friction for linear elastodynamics"};
  app.require_subcommand(1);

  std::string config, spec, path;
  std::vector<double> values;

  auto* run = app.add_subcommand("run", "integrate a configuration, write diagnostics.csv and snapshots");
  run->add_option("config", config, "config file")->required();

  auto* seps = app.add_subcommand("sweep-eps", "penalty sweep, fitted penetration order");
  seps->add_option("config", config, "config file")->required();
  seps->add_option("eps", values, "strictly decreasing penalty parameters (at least 3)")->required();

  auto* sgam = app.add_subcommand("sweep-gamma", "run the configuration for several gamma");
  sgam->add_option("config", config, "config file")->required();
  sgam->add_option("gamma", values, "gamma values")->required();

  auto* ver = app.add_subcommand("verify", "check the invariant suite on a configuration");
  ver->add_option("config", config, "config file")->required();

  auto* gen = app.add_subcommand("mesh-gen", "write a builtin mesh to a file");
  gen->add_option("spec", spec, "rect:W,H,NX,NY or rect_crack:W,H,NX,NY,A,B")->required();
  gen->add_option("-o,--output", path, "output mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : crackdyn::kExitConfig;
  }

  using namespace crackdyn;
  if (*run) return cmd_run(config, std::cout, std::cerr);
  if (*seps) return cmd_sweep_eps(config, values, std::cout, std::cerr);
  if (*sgam) return cmd_sweep_gamma(config, values, std::cout, std::cerr);
  if (*ver) return cmd_verify(config, std::cout, std::cerr);
  return cmd_mesh_gen(spec, path, std::cout, std::cerr);
}

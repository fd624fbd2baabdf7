#pragma once

#include "crackdyn/expr.hpp"
#include "crackdyn/model.hpp"
#include "crackdyn/timestepper.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace crackdyn {

/// How closely a state satisfies the unregularized crack conditions.
struct DiagnosticsRecord {
  double t = 0.0;
  double kinetic = 0.0;              // v^T M v / 2
  double strain = 0.0;               // u^T K u / 2
  double penetration_L3 = 0.0;       // | [gamma u_n + v_n]_- |_{L3(crack)}
  double comp_residual = 0.0;        // int |sigma_n [gamma u_n + v_n]|
  double friction_gap = 0.0;         // max (|sigma_tau| - g)_+
  double stick_slip_residual = 0.0;  // int | g |[v_tau]| - sigma_tau . [v_tau] |
  int newton_iters = 0;

  double energy() const { return kinetic + strain; }
};

DiagnosticsRecord record(const Model& model, const State& state, int newton_iters = 0);

/// Left minus right side of the regularized variational inequality at
/// `state` for the test function `trial`. Nonnegative (up to the balance
/// residual) whenever the state satisfies the regularized equation.
/// Throws InvariantError when `trial` is nonzero on a Dirichlet dof.
double vi_residual(const Model& model, const State& state, std::span<const double> trial);

// ---------------------------------------------------------------------------
// Driver

struct Scenario {
  CrackedMesh mesh;
  Material material;
  ContactParams contact;
  ProblemData data;
  TimeParams time;
  AssemblyMode mode = AssemblyMode::deterministic;
};

struct RunOptions {
  bool keep_states = true;
  /// Applied to the initial state before the initial acceleration is
  /// recomputed.
  std::function<void(const Model&, State&)> adjust_initial;
  std::function<void(const Model&, std::size_t step, const State&, const DiagnosticsRecord&)> on_step;
};

struct RunResult {
  Trajectory trajectory;
  std::vector<DiagnosticsRecord> records;
  std::vector<std::string> warnings;
};

/// Builds the model and integrates over [0, t_end], recording diagnostics
/// at every step. Deterministic for identical inputs.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Penalty sweep

struct SweepRow {
  double epsilon = 0.0;
  double sup_penetration_L3 = 0.0;
  double int_penetration_cubed = 0.0;  // int_0^T |[.]_-|_{L3}^3 dt
  double max_accel_H = 0.0;
  double sup_stick_slip = 0.0;
  double distance_to_finest = 0.0;     // energy norm of the final-state difference
  double distance_to_previous = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Least-squares slope of log(int_penetration_cubed) against log(epsilon);
  /// NaN when fewer than two runs penetrate.
  double order = 0.0;
};

/// `eps_list` must be strictly decreasing with at least three entries.
SweepResult epsilon_sweep(const Scenario& scenario, const std::vector<double>& eps_list);

struct GammaRow {
  double gamma = 0.0;
  double sup_penetration_L3 = 0.0;
  double int_penetration_cubed = 0.0;
  double max_accel_H = 0.0;
  double max_energy = 0.0;
  double final_energy = 0.0;
};

std::vector<GammaRow> gamma_sweep(const Scenario& scenario, const std::vector<double>& gammas);

// ---------------------------------------------------------------------------
// Continuous dependence on the initial data

struct StabilityRow {
  double eta = 0.0;
  double sup_distance = 0.0;  // sup_t sqrt(|dv|_M^2 + |du|_K^2)
  double ratio_to_previous = 0.0;
  double growth_rate = 0.0;   // B in a least-squares fit distance ~ A e^{B t}
};

/// Nodal perturbation direction: a smooth field continuous across the crack,
/// zero on the Dirichlet dofs, unit in the energy norm.
Vector perturbation_direction(const Model& model);

/// Runs the scenario once unperturbed and once per eta with u0 shifted by
/// eta times perturbation_direction.
std::vector<StabilityRow> stability_probe(const Scenario& scenario, const std::vector<double>& etas);

/// Max over the records of u^T K u + v^T M v differences, with the per-step
/// distance series returned through `series` when given.
double trajectory_distance(const Model& model, const Trajectory& a, const Trajectory& b,
                           std::vector<double>* series = nullptr);

/// Least-squares fit of log(y) = log(A) + B t over the positive samples.
std::pair<double, double> fit_exponential(std::span<const double> t, std::span<const double> y);

/// Least-squares slope of log(y) against log(x).
double fit_order(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Single-dof analog
//   rho u'' + k u + beta_eps(gamma u + u') + g alpha_eps(u') = f(t)

struct OneDofParams {
  double rho = 1.0;
  double k = 1.0;
  double gamma = 0.0;
  double epsilon = 1e-2;
  double g = 0.0;
  Expr f;
  double u0 = 0.0;
  double v0 = 0.0;
  double t_end = 1.0;

  double period() const;
};

struct ScalarTrajectory {
  std::vector<double> t, u, v;

  /// Cubic Hermite interpolation of u at time s.
  double u_at(double s) const;
};

/// Classical fourth-order Runge-Kutta with uniform steps. Requires
/// dt_fine <= 1e-5 * period.
ScalarTrajectory one_dof_oracle(const OneDofParams& params, double dt_fine);

/// The implicit stepper applied to the same equation.
ScalarTrajectory one_dof_implicit(const OneDofParams& params, const TimeParams& time);

/// Max |u_implicit(t_k) - u_oracle(t_k)| over the implicit time grid.
double one_dof_error(const ScalarTrajectory& implicit, const ScalarTrajectory& oracle);

}  // namespace crackdyn

#pragma once

#include "crackdyn/errors.hpp"
#include "crackdyn/fem.hpp"
#include "crackdyn/interface.hpp"

#include <functional>
#include <string>
#include <vector>

namespace crackdyn {

enum class Scheme {
  /// Trapezoidal update with interface and load terms evaluated at the step
  /// midpoint. Coincides with Newmark(1/4, 1/2) for the linear part and
  /// keeps the discrete energy balance exact.
  midpoint,
  /// Newmark(b, g) with the balance enforced at the end of the step.
  newmark,
};

struct TimeParams {
  double t_end = 1.0;
  double dt = 1e-2;
  Scheme scheme = Scheme::midpoint;
  double newmark_b = 0.25;
  double newmark_g = 0.5;
  double newton_tol = 1e-10;   // relative to the force scale of the balance
  double newton_abs = 1e-14;   // absolute floor
  int newton_maxit = 40;
  int max_halvings = 5;
  double linear_tol = 1e-12;

  /// dt > 0, t_end >= 0, 0 <= b <= 1/2, 1/2 <= g <= 1.
  void validate() const;
};

/// Nodal displacement, velocity and acceleration at time t.
struct State {
  double t = 0.0;
  Vector u;
  Vector v;
  Vector a;
};

/// Semi-discrete balance M a + K u + r(u, v, t) = load(t) on the free dofs.
/// `mass` and `stiffness` carry identity rows on constrained dofs.
struct SemiDiscreteSystem {
  const SparseMatrix* mass = nullptr;
  const SparseMatrix* stiffness = nullptr;
  std::vector<bool> constrained;
  std::function<Vector(double)> load;
  const InterfaceForces* interface = nullptr;

  std::size_t size() const { return mass->rows(); }
  /// load(t) - K u - r(u, v, t), zero on constrained dofs
  Vector net_force(std::span<const double> u, std::span<const double> v, double t) const;
};

struct StepInfo {
  int newton_iters = 0;
  int halvings = 0;
  double residual = 0.0;
};

class StepFailure : public Error {
public:
  StepFailure(const std::string& what, std::string dump) : Error(what), dump_(std::move(dump)) {}
  const std::string& dump() const noexcept { return dump_; }

private:
  std::string dump_;
};

/// Solves M a0 = load(t0) - K u0 - r(u0, v0, t0).
Vector initial_acceleration(const SemiDiscreteSystem& sys, std::span<const double> u0,
                            std::span<const double> v0, double t0, double tol = 1e-12);

/// Compatibility of the initial data with the crack law: reports every crack
/// point where |[gamma u0_n + v0_n]| or |[v0_tau]| exceeds `tol`.
std::vector<std::string> compatibility_warnings(const CrackQuadrature& quad, double gamma,
                                                std::span<const double> u0,
                                                std::span<const double> v0, double tol = 1e-10);

class Stepper {
public:
  Stepper(const SemiDiscreteSystem& sys, TimeParams params);

  /// Advances `state` to `t_next`. On Newton failure the interval is split
  /// in halves, at most `max_halvings` levels deep, before StepFailure.
  State step(const State& state, double t_next, StepInfo* info = nullptr) const;

  const TimeParams& params() const { return params_; }

private:
  bool attempt(const State& s, double t_next, State& out, StepInfo& info,
               std::string& log) const;
  State advance(const State& s, double t_next, int depth, StepInfo& info, std::string& log) const;

  const SemiDiscreteSystem& sys_;
  TimeParams params_;
};

/// Times t_0 = 0 < t_1 < ... < t_N = t_end with t_k = k dt (last step
/// shortened when t_end is not a multiple of dt).
std::vector<double> time_grid(const TimeParams& params);

using StepObserver = std::function<void(std::size_t step, const State&, const StepInfo&)>;

struct Trajectory {
  std::vector<State> states;  // includes the initial state
  std::vector<StepInfo> infos;
};

/// Integrates from `initial` over the time grid. The observer sees the
/// initial state (step 0) and every accepted step. States are kept only when
/// `keep_states` is set.
Trajectory integrate(const SemiDiscreteSystem& sys, const TimeParams& params, State initial,
                     const StepObserver& observer = {}, bool keep_states = true);

}  // namespace crackdyn

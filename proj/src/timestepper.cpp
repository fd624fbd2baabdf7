#include "crackdyn/timestepper.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace crackdyn {

void TimeParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvariantError("time", "dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvariantError("time", "t_end must be >= 0");
  if (!(newmark_b >= 0.0 && newmark_b <= 0.5)) throw InvariantError("time", "newmark_b must lie in [0, 1/2]");
  if (!(newmark_g >= 0.5 && newmark_g <= 1.0)) throw InvariantError("time", "newmark_g must lie in [1/2, 1]");
  if (!(newton_tol > 0.0)) throw InvariantError("time", "newton_tol must be positive");
  if (newton_maxit < 1) throw InvariantError("time", "newton_maxit must be at least 1");
  if (max_halvings < 0) throw InvariantError("time", "max_halvings must be >= 0");
}

Vector SemiDiscreteSystem::net_force(std::span<const double> u, std::span<const double> v,
                                     double t) const {
  Vector f = load(t);
  const Vector ku = *stiffness * u;
  Vector r(f.size(), 0.0);
  if (interface) interface->add_residual(u, v, t, r);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = constrained[i] ? 0.0 : f[i] - ku[i] - r[i];
  return f;
}

Vector initial_acceleration(const SemiDiscreteSystem& sys, std::span<const double> u0,
                            std::span<const double> v0, double t0, double tol) {
  return solve_spd(*sys.mass, sys.net_force(u0, v0, t0), tol);
}

std::vector<std::string> compatibility_warnings(const CrackQuadrature& quad, double gamma,
                                                std::span<const double> u0,
                                                std::span<const double> v0, double tol) {
  std::vector<std::string> out;
  const auto ju = jump_eval(u0, quad);
  const auto jv = jump_eval(v0, quad);
  double worst_n = 0.0, worst_t = 0.0;
  for (std::size_t i = 0; i < ju.size(); ++i) {
    worst_n = std::max(worst_n, std::abs(gamma * ju[i].normal + jv[i].normal));
    worst_t = std::max(worst_t, std::hypot(jv[i].tangential[0], jv[i].tangential[1]));
  }
  char buf[160];
  if (worst_n > tol) {
    std::snprintf(buf, sizeof buf,
                  "initial data incompatible: |[gamma u0_n + v0_n]| reaches %.3e on the crack", worst_n);
    out.emplace_back(buf);
  }
  if (worst_t > tol) {
    std::snprintf(buf, sizeof buf, "initial data incompatible: |[v0_tau]| reaches %.3e on the crack",
                  worst_t);
    out.emplace_back(buf);
  }
  return out;
}

Stepper::Stepper(const SemiDiscreteSystem& sys, TimeParams params)
    : sys_(sys), params_(std::move(params)) {
  params_.validate();
}

bool Stepper::attempt(const State& s, double t_next, State& out, StepInfo& info,
                      std::string& log) const {
  const std::size_t n = sys_.size();
  const double h = t_next - s.t;
  const bool midpoint = params_.scheme == Scheme::midpoint;
  const double b = params_.newmark_b, g = params_.newmark_g;

  // u_eval = u_base + cu X, v_eval = v_base + cv X
  Vector u_base(n), v_base(n);
  double cu, cv, t_eval;
  if (midpoint) {
    for (std::size_t i = 0; i < n; ++i) {
      u_base[i] = s.u[i] + 0.5 * h * s.v[i];
      v_base[i] = s.v[i];
    }
    cu = 0.25 * h * h;
    cv = 0.5 * h;
    t_eval = s.t + 0.5 * h;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      u_base[i] = s.u[i] + h * s.v[i] + h * h * (0.5 - b) * s.a[i];
      v_base[i] = s.v[i] + h * (1.0 - g) * s.a[i];
    }
    cu = b * h * h;
    cv = g * h;
    t_eval = t_next;
  }

  const Vector load = sys_.load(t_eval);
  double load_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (!sys_.constrained[i]) load_norm += load[i] * load[i];
  load_norm = std::sqrt(load_norm);

  std::vector<Triplet> base;
  sys_.mass->append_triplets(base);
  sys_.stiffness->append_triplets(base, cu);

  Vector X = s.a;
  Vector u_eval(n), v_eval(n), R(n), r_if(n);
  std::ostringstream trace;
  for (int it = 0; it <= params_.newton_maxit; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      u_eval[i] = u_base[i] + cu * X[i];
      v_eval[i] = v_base[i] + cv * X[i];
    }
    const Vector mx = *sys_.mass * X;
    const Vector ku = *sys_.stiffness * u_eval;
    std::fill(r_if.begin(), r_if.end(), 0.0);
    if (sys_.interface) sys_.interface->add_residual(u_eval, v_eval, t_eval, r_if);
    double rn = 0.0, kn = 0.0, in = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sys_.constrained[i]) {
        R[i] = 0.0;
        continue;
      }
      R[i] = mx[i] + ku[i] + r_if[i] - load[i];
      rn += R[i] * R[i];
      kn += ku[i] * ku[i];
      in += r_if[i] * r_if[i];
    }
    rn = std::sqrt(rn);
    const double scale = load_norm + std::sqrt(kn) + std::sqrt(in);
    trace << "  iter " << it << ": |R| = " << rn << " (scale " << scale << ")\n";
    info.residual = rn;
    if (rn <= params_.newton_tol * scale + params_.newton_abs) {
      info.newton_iters += it;
      out.t = t_next;
      if (midpoint) {
        out.u.resize(n);
        out.v.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          out.u[i] = s.u[i] + h * s.v[i] + 0.5 * h * h * X[i];
          out.v[i] = s.v[i] + h * X[i];
        }
        try {
          out.a = initial_acceleration(sys_, out.u, out.v, t_next, params_.linear_tol);
        } catch (const ConvergenceError& e) {
          log += trace.str() + "  end-of-step acceleration solve failed: " + e.what() + "\n";
          return false;
        }
      } else {
        out.u = u_eval;
        out.v = v_eval;
        out.a = X;
      }
      return true;
    }
    if (it == params_.newton_maxit) break;

    std::vector<Triplet> jac = base;
    if (sys_.interface) {
      std::vector<Triplet> tangent;
      sys_.interface->add_tangent(u_eval, v_eval, t_eval, cu, cv, tangent);
      for (const auto& t : tangent)
        if (!sys_.constrained[t.row] && !sys_.constrained[t.col]) jac.push_back(t);
    }
    const auto J = SparseMatrix::from_triplets(n, jac);
    Vector dx;
    try {
      dx = solve_spd(J, R, params_.linear_tol);
    } catch (const ConvergenceError& e) {
      trace << "  linear solve failed: " << e.what() << "\n";
      break;
    }
    for (std::size_t i = 0; i < n; ++i) X[i] -= dx[i];
  }
  info.newton_iters += params_.newton_maxit;
  log += trace.str();
  return false;
}

State Stepper::advance(const State& s, double t_next, int depth, StepInfo& info,
                       std::string& log) const {
  State out;
  {
    std::ostringstream head;
    head << "step t=" << s.t << " -> " << t_next << " (halving depth " << depth << ")\n";
    log += head.str();
  }
  if (attempt(s, t_next, out, info, log)) return out;
  if (depth >= params_.max_halvings) {
    throw StepFailure("Newton did not converge on [" + std::to_string(s.t) + ", " +
                          std::to_string(t_next) + "] after " + std::to_string(depth) + " halvings",
                      log);
  }
  info.halvings = std::max(info.halvings, depth + 1);
  const double t_mid = s.t + 0.5 * (t_next - s.t);
  const State half = advance(s, t_mid, depth + 1, info, log);
  return advance(half, t_next, depth + 1, info, log);
}

State Stepper::step(const State& state, double t_next, StepInfo* info) const {
  StepInfo local;
  std::string log;
  State out = advance(state, t_next, 0, local, log);
  if (info) *info = local;
  return out;
}

std::vector<double> time_grid(const TimeParams& params) {
  std::vector<double> t{0.0};
  if (params.t_end <= 0.0) return t;
  const double ratio = params.t_end / params.dt;
  std::size_t steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - double(steps)) > 1e-9 * std::max(1.0, ratio)) {
    steps = static_cast<std::size_t>(std::ceil(ratio));
  }
  for (std::size_t k = 1; k < steps; ++k) t.push_back(double(k) * params.dt);
  t.push_back(params.t_end);
  return t;
}

Trajectory integrate(const SemiDiscreteSystem& sys, const TimeParams& params, State initial,
                     const StepObserver& observer, bool keep_states) {
  const Stepper stepper(sys, params);
  const auto grid = time_grid(params);
  Trajectory traj;
  initial.t = grid.front();
  if (observer) observer(0, initial, StepInfo{});
  State current = std::move(initial);
  if (keep_states) traj.states.push_back(current);
  traj.infos.push_back({});
  for (std::size_t k = 1; k < grid.size(); ++k) {
    StepInfo info;
    current = stepper.step(current, grid[k], &info);
    if (observer) observer(k, current, info);
    if (keep_states) traj.states.push_back(current);
    traj.infos.push_back(info);
  }
  if (!keep_states) traj.states.push_back(std::move(current));
  return traj;
}

}  // namespace crackdyn

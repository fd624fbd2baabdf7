#include "crackdyn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace crackdyn {

namespace {

double neg_part(double x) { return x < 0.0 ? -x : 0.0; }

double trapezoid(const std::vector<DiagnosticsRecord>& recs, double (*f)(const DiagnosticsRecord&)) {
  double s = 0.0;
  for (std::size_t k = 1; k < recs.size(); ++k)
    s += 0.5 * (recs[k].t - recs[k - 1].t) * (f(recs[k]) + f(recs[k - 1]));
  return s;
}

double cubed_penetration(const DiagnosticsRecord& r) {
  return r.penetration_L3 * r.penetration_L3 * r.penetration_L3;
}

double energy_distance(const Model& model, const State& a, const State& b) {
  const std::size_t n = a.u.size();
  Vector du(n), dv(n);
  for (std::size_t i = 0; i < n; ++i) {
    du[i] = a.u[i] - b.u[i];
    dv[i] = a.v[i] - b.v[i];
  }
  const double d2 = quadratic_form(model.mass_pinned(), dv) + quadratic_form(model.stiffness_pinned(), du);
  return std::sqrt(std::max(0.0, d2));
}

double max_accel(const Model& model, const Trajectory& traj) {
  double m = 0.0;
  for (const auto& s : traj.states) m = std::max(m, model.norm_H(s.a));
  return m;
}

}  // namespace

DiagnosticsRecord record(const Model& model, const State& state, int newton_iters) {
  DiagnosticsRecord r;
  r.t = state.t;
  r.kinetic = 0.5 * quadratic_form(model.mass_pinned(), state.v);
  r.strain = 0.5 * quadratic_form(model.stiffness_pinned(), state.u);
  r.newton_iters = newton_iters;

  const auto& quad = model.quadrature();
  if (quad.points.empty()) return r;
  const auto& params = model.contact();
  const auto tr = recover_tractions(state.u, state.v, state.t, params, quad);
  double l3 = 0.0;
  for (std::size_t q = 0; q < tr.size(); ++q) {
    const double w = quad.points[q].weight;
    const auto& p = tr[q];
    const double x = neg_part(p.contact_arg);
    l3 += w * x * x * x;
    r.comp_residual += w * std::abs(p.sigma_n * p.contact_arg);
    r.friction_gap = std::max(r.friction_gap, p.sigma_tau_norm - p.g);
    const double s_norm = std::hypot(p.slip[0], p.slip[1]);
    const double work = p.sigma_tau[0] * p.slip[0] + p.sigma_tau[1] * p.slip[1];
    r.stick_slip_residual += w * std::abs(p.g * s_norm - work);
  }
  r.penetration_L3 = std::cbrt(l3);
  return r;
}

double vi_residual(const Model& model, const State& state, std::span<const double> trial) {
  const auto& dofs = model.dofs();
  if (trial.size() != dofs.size()) throw InvariantError("trial", "size does not match the dof count");
  for (std::size_t i = 0; i < trial.size(); ++i) {
    if (dofs.is_constrained(i) && trial[i] != 0.0)
      throw InvariantError("dirichlet", "trial is nonzero on a Dirichlet dof");
  }
  const auto& params = model.contact();
  const double gamma = params.gamma, eps = params.epsilon;
  const std::size_t n = trial.size();

  Vector w(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = gamma * state.u[i] + state.v[i];
    d[i] = trial[i] - w[i];
  }
  const Vector ma = model.mass_pinned() * state.a;
  const Vector ku = model.stiffness_pinned() * state.u;
  const Vector load = model.load(state.t);
  double lin = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (!dofs.is_constrained(i)) lin += d[i] * (ma[i] + ku[i] - load[i]);

  const auto& quad = model.quadrature();
  if (quad.points.empty()) return lin;
  const auto g = threshold_values(params, quad, state.t);
  const auto jt = jump_eval(trial, quad);
  const auto jw = jump_eval(w, quad);
  const auto ju = jump_eval(state.u, quad);
  const auto jv = jump_eval(state.v, quad);
  double contact = 0.0, friction = 0.0;
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    const double wq = quad.points[q].weight;
    contact += wq * (psi_eps(jt[q].normal, eps) - psi_eps(jw[q].normal, eps));
    const Vec2 shifted{jt[q].tangential[0] - gamma * ju[q].tangential[0],
                       jt[q].tangential[1] - gamma * ju[q].tangential[1]};
    friction += wq * g[q] * (phi_eps(shifted, eps) - phi_eps(jv[q].tangential, eps));
  }
  return lin + contact + friction;
}

RunResult run(const Scenario& sc, const RunOptions& options) {
  sc.time.validate();
  const Model model(sc.mesh, sc.material, sc.contact, sc.data, sc.mode);
  RunResult out;
  State initial = model.initial_state(&out.warnings);
  const auto sys = model.system();
  if (options.adjust_initial) {
    options.adjust_initial(model, initial);
    initial.a = initial_acceleration(sys, initial.u, initial.v, 0.0, sc.time.linear_tol);
  }
  auto observer = [&](std::size_t k, const State& s, const StepInfo& info) {
    out.records.push_back(record(model, s, info.newton_iters));
    if (options.on_step) options.on_step(model, k, s, out.records.back());
  };
  out.trajectory = integrate(sys, sc.time, std::move(initial), observer, options.keep_states);
  return out;
}

// ---------------------------------------------------------------------------

double fit_order(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double den = m * sxx - sx * sx;
  if (m < 2 || den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / den;
}

std::pair<double, double> fit_exponential(std::span<const double> t, std::span<const double> y) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int m = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double ly = std::log(y[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
    ++m;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (m < 2) return {nan, nan};
  const double den = m * stt - st * st;
  if (den <= 0.0) return {nan, nan};
  const double B = (m * sty - st * sy) / den;
  const double logA = (sy - B * st) / m;
  return {std::exp(logA), B};
}

SweepResult epsilon_sweep(const Scenario& sc, const std::vector<double>& eps_list) {
  if (eps_list.size() < 3) throw InvariantError("eps_list", "need >= 3 entries");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw InvariantError("eps_list", "must be strictly decreasing");

  std::vector<std::future<RunResult>> jobs;
  for (double eps : eps_list) {
    Scenario s = sc;
    s.contact.epsilon = eps;
    jobs.push_back(std::async(std::launch::async, [s = std::move(s)] { return run(s); }));
  }
  std::vector<RunResult> runs;
  for (auto& j : jobs) runs.push_back(j.get());

  // operators do not depend on epsilon
  const Model ref(sc.mesh, sc.material, sc.contact, sc.data, sc.mode);
  SweepResult res;
  const State& finest = runs.back().trajectory.states.back();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    SweepRow row;
    row.epsilon = eps_list[i];
    for (const auto& rec : r.records) {
      row.sup_penetration_L3 = std::max(row.sup_penetration_L3, rec.penetration_L3);
      row.sup_stick_slip = std::max(row.sup_stick_slip, rec.stick_slip_residual);
    }
    row.int_penetration_cubed = trapezoid(r.records, cubed_penetration);
    row.max_accel_H = max_accel(ref, r.trajectory);
    row.distance_to_finest = energy_distance(ref, r.trajectory.states.back(), finest);
    if (i > 0)
      row.distance_to_previous =
          energy_distance(ref, r.trajectory.states.back(), runs[i - 1].trajectory.states.back());
    res.rows.push_back(row);
  }
  std::vector<double> x, y;
  for (const auto& row : res.rows) {
    x.push_back(row.epsilon);
    y.push_back(row.int_penetration_cubed);
  }
  res.order = fit_order(x, y);
  return res;
}

std::vector<GammaRow> gamma_sweep(const Scenario& sc, const std::vector<double>& gammas) {
  std::vector<std::future<RunResult>> jobs;
  for (double gamma : gammas) {
    Scenario s = sc;
    s.contact.gamma = gamma;
    jobs.push_back(std::async(std::launch::async, [s = std::move(s)] { return run(s); }));
  }
  const Model ref(sc.mesh, sc.material, sc.contact, sc.data, sc.mode);
  std::vector<GammaRow> rows;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const RunResult r = jobs[i].get();
    GammaRow row;
    row.gamma = gammas[i];
    for (const auto& rec : r.records) {
      row.sup_penetration_L3 = std::max(row.sup_penetration_L3, rec.penetration_L3);
      row.max_energy = std::max(row.max_energy, rec.energy());
    }
    row.final_energy = r.records.back().energy();
    row.int_penetration_cubed = trapezoid(r.records, cubed_penetration);
    row.max_accel_H = max_accel(ref, r.trajectory);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

Vector perturbation_direction(const Model& model) {
  const auto& verts = model.mesh().vertices;
  double x0 = verts.front()[0], x1 = x0, y0 = verts.front()[1], y1 = y0;
  for (const auto& p : verts) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  const double pi = std::numbers::pi;
  Vector phi(model.dofs().size(), 0.0);
  for (std::size_t v = 0; v < verts.size(); ++v) {
    const double xi = (verts[v][0] - x0) / (x1 - x0), eta = (verts[v][1] - y0) / (y1 - y0);
    phi[DofMap::dof(v, 0)] = std::sin(pi * xi) * std::cos(pi * eta);
    phi[DofMap::dof(v, 1)] = 0.5 * std::sin(2.0 * pi * xi) * std::sin(pi * eta);
  }
  model.dofs().zero_constrained(phi);
  const double nv = model.norm_V(phi);
  if (nv > 0.0)
    for (auto& x : phi) x /= nv;
  return phi;
}

double trajectory_distance(const Model& model, const Trajectory& a, const Trajectory& b,
                           std::vector<double>* series) {
  if (a.states.size() != b.states.size())
    throw InvariantError("trajectory", "trajectories have different lengths");
  double sup = 0.0;
  if (series) series->clear();
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    const double d = energy_distance(model, a.states[k], b.states[k]);
    sup = std::max(sup, d);
    if (series) series->push_back(d);
  }
  return sup;
}

std::vector<StabilityRow> stability_probe(const Scenario& sc, const std::vector<double>& etas) {
  for (double eta : etas)
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvariantError("eta", "perturbation scale must be >= 0");

  std::vector<std::future<RunResult>> jobs;
  jobs.push_back(std::async(std::launch::async, [&sc] { return run(sc); }));
  for (double eta : etas) {
    jobs.push_back(std::async(std::launch::async, [&sc, eta] {
      RunOptions opt;
      opt.adjust_initial = [eta](const Model& m, State& s) {
        if (eta == 0.0) return;
        const Vector phi = perturbation_direction(m);
        for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] += eta * phi[i];
      };
      return run(sc, opt);
    }));
  }
  const RunResult base = jobs.front().get();
  const Model ref(sc.mesh, sc.material, sc.contact, sc.data, sc.mode);
  std::vector<double> times;
  for (const auto& s : base.trajectory.states) times.push_back(s.t);

  std::vector<StabilityRow> rows;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const RunResult r = jobs[i + 1].get();
    StabilityRow row;
    row.eta = etas[i];
    std::vector<double> series;
    row.sup_distance = trajectory_distance(ref, base.trajectory, r.trajectory, &series);
    row.growth_rate = fit_exponential(times, series).second;
    if (i > 0) {
      row.ratio_to_previous = row.sup_distance > 0.0 ? rows.back().sup_distance / row.sup_distance
                                                     : std::numeric_limits<double>::infinity();
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

double OneDofParams::period() const { return 2.0 * std::numbers::pi * std::sqrt(rho / k); }

double ScalarTrajectory::u_at(double s) const {
  if (t.empty()) throw InvariantError("trajectory", "empty");
  if (s <= t.front()) return u.front();
  if (s >= t.back()) return u.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const std::size_t i = std::size_t(it - t.begin()) - 1;
  const double h = t[i + 1] - t[i];
  const double x = (s - t[i]) / h;
  const double h00 = (1 + 2 * x) * (1 - x) * (1 - x), h10 = x * (1 - x) * (1 - x);
  const double h01 = x * x * (3 - 2 * x), h11 = x * x * (x - 1);
  return h00 * u[i] + h10 * h * v[i] + h01 * u[i + 1] + h11 * h * v[i + 1];
}

namespace {

double friction_1d(double v, double eps) { return v / std::sqrt(v * v + eps * eps); }

const double origin[2] = {0.0, 0.0};

/// beta_eps(gamma u + v) + g alpha_eps(v) for a single scalar dof.
class ScalarInterface final : public InterfaceForces {
public:
  explicit ScalarInterface(const OneDofParams& p) : p_(p) {}

  void add_residual(std::span<const double> u, std::span<const double> v, double,
                    std::span<double> out) const override {
    out[0] += beta_eps(p_.gamma * u[0] + v[0], p_.epsilon) + p_.g * friction_1d(v[0], p_.epsilon);
  }

  void add_tangent(std::span<const double> u, std::span<const double> v, double, double cu, double cv,
                   std::vector<Triplet>& out) const override {
    const double e = p_.epsilon;
    const double phi = std::sqrt(v[0] * v[0] + e * e);
    const double d = dbeta_eps(p_.gamma * u[0] + v[0], e) * (p_.gamma * cu + cv) +
                     p_.g * cv * e * e / (phi * phi * phi);
    out.push_back({0, 0, d});
  }

private:
  const OneDofParams& p_;
};

}  // namespace

ScalarTrajectory one_dof_oracle(const OneDofParams& p, double dt_fine) {
  if (!(dt_fine > 0.0) || dt_fine > 1e-5 * p.period())
    throw InvariantError("dt_fine", "must satisfy 0 < dt_fine <= 1e-5 * period");
  auto accel = [&p](double t, double u, double v) {
    const double f = p.f.eval(t, origin);
    return (f - p.k * u - beta_eps(p.gamma * u + v, p.epsilon) - p.g * friction_1d(v, p.epsilon)) / p.rho;
  };
  const auto steps = std::max<std::size_t>(1, std::size_t(std::ceil(p.t_end / dt_fine - 1e-9)));
  const double h = p.t_end / double(steps);
  ScalarTrajectory tr;
  tr.t.reserve(steps + 1);
  tr.u.reserve(steps + 1);
  tr.v.reserve(steps + 1);
  double u = p.u0, v = p.v0;
  tr.t.push_back(0.0);
  tr.u.push_back(u);
  tr.v.push_back(v);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = double(k) * h;
    const double k1u = v, k1v = accel(t, u, v);
    const double k2u = v + 0.5 * h * k1v, k2v = accel(t + 0.5 * h, u + 0.5 * h * k1u, k2u);
    const double k3u = v + 0.5 * h * k2v, k3v = accel(t + 0.5 * h, u + 0.5 * h * k2u, k3u);
    const double k4u = v + h * k3v, k4v = accel(t + h, u + h * k3u, k4u);
    u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    tr.t.push_back(double(k + 1) * h);
    tr.u.push_back(u);
    tr.v.push_back(v);
  }
  return tr;
}

ScalarTrajectory one_dof_implicit(const OneDofParams& p, const TimeParams& time) {
  const auto M = SparseMatrix::from_triplets(1, std::vector<Triplet>{{0, 0, p.rho}});
  const auto K = SparseMatrix::from_triplets(1, std::vector<Triplet>{{0, 0, p.k}});
  const ScalarInterface iface(p);
  SemiDiscreteSystem sys;
  sys.mass = &M;
  sys.stiffness = &K;
  sys.constrained = {false};
  sys.load = [&p](double t) { return Vector{p.f.eval(t, origin)}; };
  sys.interface = &iface;

  TimeParams tp = time;
  tp.t_end = p.t_end;
  State s;
  s.u = {p.u0};
  s.v = {p.v0};
  s.a = initial_acceleration(sys, s.u, s.v, 0.0, tp.linear_tol);
  ScalarTrajectory tr;
  integrate(sys, tp, std::move(s), [&tr](std::size_t, const State& st, const StepInfo&) {
    tr.t.push_back(st.t);
    tr.u.push_back(st.u[0]);
    tr.v.push_back(st.v[0]);
  }, false);
  return tr;
}

double one_dof_error(const ScalarTrajectory& implicit, const ScalarTrajectory& oracle) {
  double e = 0.0;
  for (std::size_t k = 0; k < implicit.t.size(); ++k)
    e = std::max(e, std::abs(implicit.u[k] - oracle.u_at(implicit.t[k])));
  return e;
}

}  // namespace crackdyn

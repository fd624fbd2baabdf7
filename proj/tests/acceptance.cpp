// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and runtime
// limits are fixed below. The process exits nonzero when a criterion fails
// that is not listed in kKnownRed.

#include "crackdyn/diagnostics.hpp"
#include "fixtures.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace crackdyn;

namespace {

// --- tolerances --------------------------------------------------------------
constexpr double kMonotoneTol = -1e-12;
constexpr double kFdRelTol = 1e-6;
constexpr double kKernelTol = 1e-12;
constexpr double kPatchTol = 1e-10;
constexpr double kEnergyStepTol = 1e-8;     // times E(0)
constexpr double kPenetrationOrder = 0.8;
constexpr double kStickSlipRatio = 1e-2;
constexpr double kViFactor = 10.0;          // times newton_tol
constexpr double kRatioLo = 1.5, kRatioHi = 2.5;
constexpr double kOneDofOrder = 1.8;
constexpr double kSpatialOrder = 1.7;

// Criteria expected to fail, with the reason printed next to the FAIL line.
const std::map<int, std::string> kKnownRed = {
    {10, "with gamma > 0 the contact force does work beta([gamma u_n + v_n]) [v_n] of "
         "indefinite sign, so kinetic + strain energy is not a Lyapunov function; "
         "the energy part of criterion 3 cannot hold for gamma = 10 at eps = 1e-2"},
};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// --- criterion 1 -----------------------------------------------------------

// Central-difference check with one halving of the step. Passes when the
// error at h/2 is small, and when above roundoff it shrank by at least 3x
// (second order would give 4x).
bool fd_ok(double e1, double e2, double scale, double& order) {
  const double floor = 1e-9 * (scale + 1.0);
  if (e1 > floor) order = std::log2(e1 / std::max(e2, 1e-300));
  if (e2 > kFdRelTol * (scale + 1e-300)) return false;
  return e1 <= floor || e2 <= e1 / 3.0 || e2 <= floor;
}

Outcome regularization_calculus() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  Outcome o;
  double worst_order = 4.0;
  int fd_fail = 0, mono_fail = 0;
  for (double eps : {1.0, 1e-2, 1e-4}) {
    for (int i = 0; i < 100; ++i) {
      // beta: smooth away from 0, keep the stencil on one side of the kink
      double x = uni(rng);
      const double hb = 0.1 * std::abs(x);
      auto fd_beta = [&](double h) { return (beta_eps(x + h, eps) - beta_eps(x - h, eps)) / (2 * h); };
      const double db = dbeta_eps(x, eps);
      double ob = 2.0;
      if (!fd_ok(std::abs(fd_beta(hb) - db), std::abs(fd_beta(hb / 2) - db), std::abs(db), ob)) ++fd_fail;

      // alpha: directional derivative in a random direction
      const Vec2 p{uni(rng), uni(rng)};
      const Vec2 dir{uni(rng), uni(rng)};
      // alpha varies on the length scale phi_eps(p); |J dir| <= |dir| / phi_eps(p)
      const double ldir = std::hypot(dir[0], dir[1]);
      const double ha = 3e-4 * phi_eps(p, eps) / ldir;
      const Mat2 J = dalpha_eps(p, eps);
      const Vec2 exact{J[0][0] * dir[0] + J[0][1] * dir[1], J[1][0] * dir[0] + J[1][1] * dir[1]};
      auto err = [&](double h) {
        const Vec2 a = alpha_eps({p[0] + h * dir[0], p[1] + h * dir[1]}, eps);
        const Vec2 b = alpha_eps({p[0] - h * dir[0], p[1] - h * dir[1]}, eps);
        return std::hypot((a[0] - b[0]) / (2 * h) - exact[0], (a[1] - b[1]) / (2 * h) - exact[1]);
      };
      double oa = 2.0;
      const double scale = ldir / phi_eps(p, eps);
      if (!fd_ok(err(ha), err(ha / 2), scale, oa)) ++fd_fail;
      worst_order = std::min(worst_order, oa);
    }
    for (int i = 0; i < 10000; ++i) {
      const double x = uni(rng) * std::sqrt(eps), y = uni(rng) * std::sqrt(eps);
      if ((beta_eps(x, eps) - beta_eps(y, eps)) * (x - y) < kMonotoneTol) ++mono_fail;
      const Vec2 p{uni(rng) * eps, uni(rng) * eps}, q{uni(rng), uni(rng)};
      const Vec2 ap = alpha_eps(p, eps), aq = alpha_eps(q, eps);
      if ((ap[0] - aq[0]) * (p[0] - q[0]) + (ap[1] - aq[1]) * (p[1] - q[1]) < kMonotoneTol) ++mono_fail;
    }
  }
  o.pass = fd_fail == 0 && mono_fail == 0 && worst_order >= 1.8;
  o.detail = "fd failures " + std::to_string(fd_fail) + ", monotonicity failures " +
             std::to_string(mono_fail) + ", min observed alpha FD order" + fmt(" %.2f", worst_order);
  return o;
}

// --- criterion 2 -----------------------------------------------------------

Outcome kernel_and_patch() {
  Outcome o;
  const Material mat{2.0, 1.0, 1.0};
  const auto mesh = generate_rect_crack(2.0, 1.0, 4, 4, {0.2, 0.8});
  const auto K = assemble_stiffness(mesh, mat);
  double kmax = 0.0;
  for (double v : K.values()) kmax = std::max(kmax, std::abs(v));
  double worst = 0.0;
  const std::size_t n = K.rows();
  for (int mode = 0; mode < 3; ++mode) {
    Vector r(n);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      const auto& p = mesh.vertices[v];
      const double rx[3] = {1.0, 0.0, -p[1]}, ry[3] = {0.0, 1.0, p[0]};
      r[DofMap::dof(v, 0)] = rx[mode];
      r[DofMap::dof(v, 1)] = ry[mode];
    }
    double rinf = 0.0, kinf = 0.0;
    for (double x : r) rinf = std::max(rinf, std::abs(x));
    for (double x : K * r) kinf = std::max(kinf, std::abs(x));
    worst = std::max(worst, kinf / (kmax * rinf));
  }

  // Uniaxial strain u = (a x, 0): clamp the exact values on the left/right
  // edges, apply sigma.n = (0, lambda a n_y) on top/bottom, solve densely.
  const double a = 1e-3;
  const auto rect = generate_rect(2.0, 2.0, 2, 2);
  const auto Kr = assemble_stiffness(rect, mat);
  const DofMap dofs(rect);
  VectorExpr f{Expr(), Expr()};
  VectorExpr F{Expr(), Expr::parse(fmt("%.17g*(y-1)", mat.lambda * a))};
  const Vector load = assemble_load(rect, mat, f, F, 0.0);
  const std::size_t m = Kr.rows();
  Vector exact(m, 0.0);
  for (std::size_t v = 0; v < rect.vertices.size(); ++v) exact[DofMap::dof(v, 0)] = a * rect.vertices[v][0];
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(long(m), long(m));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(long(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (dofs.is_constrained(i)) {
      A(long(i), long(i)) = 1.0;
      b(long(i)) = exact[i];
      continue;
    }
    b(long(i)) = load[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double kij = Kr.at(i, j);
      if (dofs.is_constrained(j)) b(long(i)) -= kij * exact[j];
      else A(long(i), long(j)) = kij;
    }
  }
  const Eigen::VectorXd x = A.partialPivLu().solve(b);
  const Vector u(x.data(), x.data() + x.size());
  const double target = (mat.lambda + 2 * mat.mu) * a;
  double patch = 0.0;
  for (const auto& s : cell_stresses(rect, mat, u)) patch = std::max(patch, std::abs(s[0] - target) / target);

  o.pass = worst <= kKernelTol && patch <= kPatchTol;
  o.detail = "rigid-mode residual" + fmt(" %.2e", worst) + ", patch sigma_xx rel error" + fmt(" %.2e", patch);
  return o;
}

// --- criteria 3 to 6 on the impact fixture ----------------------------------

struct Traced {
  RunResult result;
  double max_sigma_n = -1.0;   // over all steps and crack points
  double max_gap = 0.0;
};

Traced traced_run(const Scenario& sc) {
  Traced tr;
  RunOptions opt;
  opt.on_step = [&tr](const Model& m, std::size_t, const State& s, const DiagnosticsRecord& rec) {
    for (const auto& p : recover_tractions(s.u, s.v, s.t, m.contact(), m.quadrature()))
      tr.max_sigma_n = std::max(tr.max_sigma_n, p.sigma_n);
    tr.max_gap = std::max(tr.max_gap, rec.friction_gap);
  };
  tr.result = run(sc, opt);
  return tr;
}

Outcome energy_dissipation(double gamma) {
  const auto r = run(fixtures::impact(gamma));
  const double e0 = r.records.front().energy();
  double worst = -1e300;
  std::size_t at = 0;
  for (std::size_t k = 1; k < r.records.size(); ++k) {
    const double inc = (r.records[k].energy() - r.records[k - 1].energy()) / e0;
    if (inc > worst) {
      worst = inc;
      at = k;
    }
  }
  Outcome o;
  o.pass = worst <= kEnergyStepTol;
  o.detail = "max step increase / E(0)" + fmt(" %.2e", worst) + " at step " + std::to_string(at) +
             ", E(T)/E(0)" + fmt(" %.3f", r.records.back().energy() / e0);
  return o;
}

Outcome penetration_decay(double gamma, std::vector<SweepRow>* rows_out) {
  const auto sweep = epsilon_sweep(fixtures::impact(gamma), {1e-1, 1e-2, 1e-3, 1e-4});
  if (rows_out) *rows_out = sweep.rows;
  Outcome o;
  o.pass = std::isfinite(sweep.order) && sweep.order >= kPenetrationOrder;
  o.detail = "fitted order" + fmt(" %.3f", sweep.order) + ", int pen^3 at eps=1e-4" +
             fmt(" %.2e", sweep.rows.back().int_penetration_cubed);
  return o;
}

Outcome interface_conditions(double gamma, const std::vector<SweepRow>& rows) {
  double max_sn = -1.0, max_gap = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto tr = traced_run(fixtures::impact(gamma, eps));
    max_sn = std::max(max_sn, tr.max_sigma_n);
    max_gap = std::max(max_gap, tr.max_gap);
  }
  const double ratio = rows.back().sup_stick_slip / rows.front().sup_stick_slip;
  Outcome o;
  o.pass = max_sn <= 0.0 && max_gap == 0.0 && ratio <= kStickSlipRatio;
  o.detail = "max sigma_n" + fmt(" %.1e", max_sn) + ", max friction_gap" + fmt(" %.1e", max_gap) +
             ", stick-slip ratio 1e-4/1e-1" + fmt(" %.2e", ratio);
  return o;
}

Outcome vi_equivalence(double gamma) {
  const Scenario sc = fixtures::impact(gamma);
  const Model model(sc.mesh, sc.material, sc.contact, sc.data, sc.mode);
  const auto r = run(sc);
  const auto& states = r.trajectory.states;
  std::mt19937_64 rng(7 + std::uint64_t(gamma * 100));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> logscale(-6.0, 0.0);
  const double tol = -kViFactor * sc.time.newton_tol;
  double worst = 1e300, at_min = 1e300;
  int below = 0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t idx = 1 + std::size_t(k) * (states.size() - 2) / 19;
    const State& s = states[idx];
    Vector w(s.u.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = sc.contact.gamma * s.u[i] + s.v[i];
    at_min = std::min(at_min, std::abs(vi_residual(model, s, w)));
    double wmax = 1e-3;
    for (double x : w) wmax = std::max(wmax, std::abs(x));
    for (int j = 0; j < 100; ++j) {
      const double scale = wmax * std::pow(10.0, logscale(rng));
      Vector trial(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) trial[i] = w[i] + scale * normal(rng);
      model.dofs().zero_constrained(trial);
      const double res = vi_residual(model, s, trial);
      worst = std::min(worst, res);
      if (res < tol) ++below;
    }
  }
  Outcome o;
  o.pass = below == 0;
  o.detail = "min residual" + fmt(" %.2e", worst) + " (bound" + fmt(" %.0e)", tol) +
             ", |residual| at trial = w" + fmt(" %.1e", at_min);
  return o;
}

// --- criterion 7 -----------------------------------------------------------

Outcome continuous_dependence() {
  const auto rows = stability_probe(fixtures::impact(), {1e-5, 5e-6, 2.5e-6});
  Outcome o;
  std::string d;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d += fmt(" d(%.2g)=", rows[i].eta) + fmt("%.3e", rows[i].sup_distance);
    if (i == 0) continue;
    if (!(rows[i].sup_distance < rows[i - 1].sup_distance)) o.pass = false;
    const double ratio = rows[i].ratio_to_previous;
    if (!(ratio >= kRatioLo && ratio <= kRatioHi)) o.pass = false;
    d += fmt(" (ratio %.3f)", ratio);
  }
  o.detail = d.substr(1) + fmt(", growth rate B %.3f", rows.back().growth_rate);
  return o;
}

// --- criterion 8 -----------------------------------------------------------

Outcome one_dof() {
  OneDofParams p;
  p.rho = 1.0;
  p.k = 4.0;
  p.gamma = 1.0;
  p.epsilon = 1e-2;
  p.g = 0.1;
  p.f = Expr::parse("0.3*cos(2.5*t)");
  p.u0 = -0.3;
  p.v0 = 0.4;
  p.t_end = 2.0;
  const auto oracle = one_dof_oracle(p, 1e-5 * p.period());
  std::vector<double> dts{1e-2, 5e-3, 2.5e-3}, errs;
  TimeParams tp;
  for (double dt : dts) {
    tp.dt = dt;
    errs.push_back(one_dof_error(one_dof_implicit(p, tp), oracle));
  }
  const double order = fit_order(dts, errs);
  Outcome o;
  o.pass = order >= kOneDofOrder;
  o.detail = fmt("errors %.2e", errs[0]) + fmt(" %.2e", errs[1]) + fmt(" %.2e", errs[2]) +
             fmt(", observed order %.3f", order);
  return o;
}

// --- criterion 9 -----------------------------------------------------------

// Strings generated by tests/oracles/manufactured.py.
const char* kExact[2] = {"sin(pi*x)*cos(t)*cos(y)", "(y^2 + 1)*sin(pi*x)*sin(t + 1)/2"};
const char* kV0[2] = {"0", "(y^2 + 1)*sin(pi*x)*cos(1)/2"};
const char* kBody[2] = {
    "pi*(-3*y*sin(t + 1)*cos(pi*x) + 4*pi*sin(pi*x)*cos(t)*cos(y))",
    "-(y^2 + 1)*sin(pi*x)*sin(t + 1)/2 + pi^2*(y^2 + 1)*sin(pi*x)*sin(t + 1)/2 + "
    "3*pi*sin(y)*cos(t)*cos(pi*x) - 4*sin(pi*x)*sin(t + 1)"};
const char* kTraction[2] = {
    "(y - 1/2)*(pi*(y^2 + 1)*sin(t + 1)*cos(pi*x) - 2*sin(y)*sin(pi*x)*cos(t))",
    "(4*y - 2)*(2*y*sin(pi*x)*sin(t + 1) + pi*cos(t)*cos(y)*cos(pi*x))"};

// L2 error of the P1 field against the exact one, six-point degree-4 rule.
double l2_error(const CrackedMesh& mesh, std::span<const double> u, const VectorExpr& exact, double t) {
  static const double A = 0.445948490915965, B = 0.091576213509771;
  static const double WA = 0.223381589678011, WB = 0.109951743655322;
  const double bary[6][3] = {{1 - 2 * A, A, A}, {A, 1 - 2 * A, A}, {A, A, 1 - 2 * A},
                             {1 - 2 * B, B, B}, {B, 1 - 2 * B, B}, {B, B, 1 - 2 * B}};
  double e2 = 0.0;
  for (const auto& c : mesh.cells) {
    const double area = signed_area(mesh, c);
    for (int q = 0; q < 6; ++q) {
      double p[2] = {0, 0}, uh[2] = {0, 0};
      for (int k = 0; k < 3; ++k) {
        const auto& x = mesh.vertices[c.v[k]];
        p[0] += bary[q][k] * x[0];
        p[1] += bary[q][k] * x[1];
        uh[0] += bary[q][k] * u[DofMap::dof(c.v[k], 0)];
        uh[1] += bary[q][k] * u[DofMap::dof(c.v[k], 1)];
      }
      const double w = area * (q < 3 ? WA : WB);
      for (int a = 0; a < 2; ++a) {
        const double d = uh[a] - exact[std::size_t(a)].eval(t, p);
        e2 += w * d * d;
      }
    }
  }
  return std::sqrt(e2);
}

Outcome manufactured_convergence() {
  Scenario sc;
  sc.material = {2.0, 1.0, 1.0};
  sc.contact.epsilon = 1e-2;
  const VectorExpr exact{Expr::parse(kExact[0]), Expr::parse(kExact[1])};
  sc.data.u0 = {exact[0], Expr::parse("(y^2 + 1)*sin(pi*x)*sin(1)/2")};
  sc.data.v0 = {Expr::parse(kV0[0]), Expr::parse(kV0[1])};
  sc.data.f = {Expr::parse(kBody[0]), Expr::parse(kBody[1])};
  sc.data.F = {Expr::parse(kTraction[0]), Expr::parse(kTraction[1])};
  sc.time.t_end = 0.5;
  std::vector<double> hs, errs;
  for (std::size_t n : {4u, 8u, 16u, 32u}) {
    sc.mesh = generate_rect(1.0, 1.0, n, n);
    sc.time.dt = 0.4 / double(n);
    const auto r = run(sc, {.keep_states = false});
    const State& s = r.trajectory.states.back();
    hs.push_back(1.0 / double(n));
    errs.push_back(l2_error(sc.mesh, s.u, exact, s.t));
  }
  // order over the three refinements
  const double order = std::log2(errs[2] / errs[3]);
  const double fitted = fit_order(hs, errs);
  Outcome o;
  o.pass = order >= kSpatialOrder && fitted >= kSpatialOrder;
  o.detail = fmt("L2 errors %.2e", errs[0]) + fmt(" %.2e", errs[1]) + fmt(" %.2e", errs[2]) +
             fmt(" %.2e", errs[3]) + fmt(", finest order %.3f", order) + fmt(", fitted %.3f", fitted);
  return o;
}

// --- criterion 10 ----------------------------------------------------------

Outcome gamma_family(std::string& sub) {
  Outcome o;
  for (double gamma : {1.0, 10.0}) {
    std::vector<SweepRow> rows;
    const Outcome c3 = energy_dissipation(gamma);
    const Outcome c4 = penetration_decay(gamma, &rows);
    const Outcome c5 = interface_conditions(gamma, rows);
    const Outcome c6 = vi_equivalence(gamma);
    const Outcome* cs[4] = {&c3, &c4, &c5, &c6};
    for (int i = 0; i < 4; ++i) {
      sub += fmt("    gamma=%g", gamma) + " criterion " + std::to_string(i + 3) + ": " +
             (cs[i]->pass ? "pass" : "FAIL") + "  " + cs[i]->detail + "\n";
      o.pass = o.pass && cs[i]->pass;
    }
  }
  o.detail = "criteria 3-6 at gamma in {1, 10} (gamma = 0 is criteria 3-6 themselves)";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome(std::string&)> body;
  };
  std::vector<SweepRow> rows0;
  const std::vector<Criterion> criteria = {
      {1, "regularization calculus", 1.0, [](std::string&) { return regularization_calculus(); }},
      {2, "rigid-body kernel and patch test", 1.0, [](std::string&) { return kernel_and_patch(); }},
      {3, "energy dissipativity (gamma=0)", 30.0, [](std::string&) { return energy_dissipation(0.0); }},
      {4, "penetration decay in eps", 300.0, [&](std::string&) { return penetration_decay(0.0, &rows0); }},
      {5, "strong-form interface conditions", 300.0,
       [&](std::string&) { return interface_conditions(0.0, rows0); }},
      {6, "VE/VI equivalence", 30.0, [](std::string&) { return vi_equivalence(0.0); }},
      {7, "continuous dependence", 120.0, [](std::string&) { return continuous_dependence(); }},
      {8, "one-dof oracle equivalence", 60.0, [](std::string&) { return one_dof(); }},
      {9, "manufactured-solution convergence", 300.0, [](std::string&) { return manufactured_convergence(); }},
      {10, "gamma-family coverage", 900.0, [](std::string& s) { return gamma_family(s); }},
  };

  int unexpected = 0, red = 0;
  for (const auto& c : criteria) {
    std::string sub;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body(sub);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt(" [runtime limit %.0f s exceeded]", c.limit_s);
    }
    std::printf("%s criterion %2d %-34s %6.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    if (!sub.empty()) std::printf("%s", sub.c_str());
    if (!o.pass) {
      const auto it = kKnownRed.find(c.id);
      if (it != kKnownRed.end()) {
        ++red;
        std::printf("    known red: %s\n", it->second.c_str());
      } else {
        ++unexpected;
      }
    }
    std::fflush(stdout);
  }
  std::printf("%d unexpected failure(s), %d known red\n", unexpected, red);
  return unexpected == 0 ? 0 : 1;
}

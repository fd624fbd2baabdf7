#include "crackdyn/interface.hpp"

#include "crackdyn/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace crackdyn {

namespace {
double neg_part(double x) { return x < 0.0 ? -x : 0.0; }
}  // namespace

double psi_eps(double x, double eps) {
  const double m = neg_part(x);
  return m * m * m / (3.0 * eps);
}

double beta_eps(double x, double eps) {
  const double m = neg_part(x);
  return -(m * m) / eps;
}

double dbeta_eps(double x, double eps) { return 2.0 * neg_part(x) / eps; }

double phi_eps(const Vec2& x, double eps) {
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + eps * eps);
}

Vec2 alpha_eps(const Vec2& x, double eps) {
  const double phi = phi_eps(x, eps);
  return {x[0] / phi, x[1] / phi};
}

Mat2 dalpha_eps(const Vec2& x, double eps) {
  const double phi = phi_eps(x, eps);
  const Vec2 a{x[0] / phi, x[1] / phi};
  return {{{(1.0 - a[0] * a[0]) / phi, -a[0] * a[1] / phi},
           {-a[1] * a[0] / phi, (1.0 - a[1] * a[1]) / phi}}};
}

// ---------------------------------------------------------------------------

void ContactParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvariantError("contact", "gamma must be >= 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvariantError("contact", "epsilon must be > 0");
}

double ContactParams::delta() const {
  return gamma == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / gamma;
}

CrackQuadrature CrackQuadrature::build(const CrackedMesh& mesh) {
  CrackQuadrature quad;
  const double g = 0.5 / std::sqrt(3.0);
  for (const auto& pair : mesh.crack_pairs) {
    const auto& p = mesh.vertices[pair.plus[0]];
    const auto& q = mesh.vertices[pair.plus[1]];
    const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
    for (double s : {0.5 - g, 0.5 + g}) {
      quad.points.push_back({0.5 * len,
                             {p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])},
                             pair.normal,
                             pair.plus,
                             pair.minus,
                             {1.0 - s, s}});
    }
  }
  return quad;
}

double CrackQuadrature::total_weight() const {
  double s = 0.0;
  for (const auto& q : points) s += q.weight;
  return s;
}

namespace {

Vec2 jump_at(std::span<const double> w, const CrackPoint& q) {
  Vec2 j{0.0, 0.0};
  for (int k = 0; k < 2; ++k)
    for (int a = 0; a < 2; ++a)
      j[a] += q.shape[k] * (w[DofMap::dof(q.plus[k], a)] - w[DofMap::dof(q.minus[k], a)]);
  return j;
}

Jump split(const Vec2& j, const Vec2& n) {
  const double jn = j[0] * n[0] + j[1] * n[1];
  return {j, jn, {j[0] - jn * n[0], j[1] - jn * n[1]}};
}

// out += J^T f for the jump operator at q
void scatter(const CrackPoint& q, const Vec2& f, std::span<double> out) {
  for (int k = 0; k < 2; ++k)
    for (int a = 0; a < 2; ++a) {
      out[DofMap::dof(q.plus[k], a)] += q.shape[k] * f[a];
      out[DofMap::dof(q.minus[k], a)] -= q.shape[k] * f[a];
    }
}

// out += J^T B J for the jump operator at q
void scatter_block(const CrackPoint& q, const Mat2& B, std::vector<Triplet>& out) {
  struct Entry {
    std::size_t vertex;
    double coeff;
  };
  const Entry entries[4] = {{q.plus[0], q.shape[0]},
                            {q.plus[1], q.shape[1]},
                            {q.minus[0], -q.shape[0]},
                            {q.minus[1], -q.shape[1]}};
  for (const auto& ei : entries)
    for (const auto& ej : entries)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double v = ei.coeff * ej.coeff * B[a][b];
          if (v != 0.0) out.push_back({DofMap::dof(ei.vertex, a), DofMap::dof(ej.vertex, b), v});
        }
}

double contact_argument(std::span<const double> u, std::span<const double> v, double gamma,
                        const CrackPoint& q) {
  const Vec2 ju = jump_at(u, q);
  const Vec2 jv = jump_at(v, q);
  const double un = ju[0] * q.normal[0] + ju[1] * q.normal[1];
  const double vn = jv[0] * q.normal[0] + jv[1] * q.normal[1];
  return gamma * un + vn;
}

}  // namespace

std::vector<Jump> jump_eval(std::span<const double> w, const CrackQuadrature& quad) {
  std::vector<Jump> out;
  out.reserve(quad.points.size());
  for (const auto& q : quad.points) out.push_back(split(jump_at(w, q), q.normal));
  return out;
}

std::vector<double> threshold_values(const ContactParams& params, const CrackQuadrature& quad,
                                     double t) {
  std::vector<double> g;
  g.reserve(quad.points.size());
  const bool constant = params.g.is_constant();
  const double g0 = constant ? params.g.eval(t, {}) : 0.0;
  for (const auto& q : quad.points) {
    const double value = constant ? g0 : params.g.eval(t, q.x);
    if (value < 0.0) {
      throw DomainError("friction threshold g is negative (" + std::to_string(value) + ") at t=" +
                        std::to_string(t));
    }
    g.push_back(value);
  }
  return g;
}

Vector contact_residual(std::span<const double> u, std::span<const double> v,
                        const ContactParams& params, const CrackQuadrature& quad) {
  Vector r(u.size(), 0.0);
  for (const auto& q : quad.points) {
    const double b = beta_eps(contact_argument(u, v, params.gamma, q), params.epsilon);
    if (b == 0.0) continue;
    scatter(q, {q.weight * b * q.normal[0], q.weight * b * q.normal[1]}, r);
  }
  return r;
}

Vector friction_residual(std::span<const double> v, double t, const ContactParams& params,
                         const CrackQuadrature& quad) {
  Vector r(v.size(), 0.0);
  const auto g = threshold_values(params, quad, t);
  for (std::size_t i = 0; i < quad.points.size(); ++i) {
    const auto& q = quad.points[i];
    if (g[i] == 0.0) continue;
    const Vec2 s = split(jump_at(v, q), q.normal).tangential;
    const Vec2 a = alpha_eps(s, params.epsilon);
    scatter(q, {q.weight * g[i] * a[0], q.weight * g[i] * a[1]}, r);
  }
  return r;
}

std::vector<Triplet> contact_tangent(std::span<const double> u, std::span<const double> v,
                                     const ContactParams& params, const CrackQuadrature& quad,
                                     double coeff_u, double coeff_v) {
  std::vector<Triplet> out;
  const double chain = params.gamma * coeff_u + coeff_v;
  for (const auto& q : quad.points) {
    const double db = dbeta_eps(contact_argument(u, v, params.gamma, q), params.epsilon);
    const double c = q.weight * db * chain;
    if (c == 0.0) continue;
    const auto& n = q.normal;
    scatter_block(q, {{{c * n[0] * n[0], c * n[0] * n[1]}, {c * n[1] * n[0], c * n[1] * n[1]}}}, out);
  }
  return out;
}

std::vector<Triplet> friction_tangent(std::span<const double> v, double t,
                                      const ContactParams& params, const CrackQuadrature& quad,
                                      double coeff_v) {
  std::vector<Triplet> out;
  if (coeff_v == 0.0) return out;
  const auto g = threshold_values(params, quad, t);
  for (std::size_t i = 0; i < quad.points.size(); ++i) {
    const auto& q = quad.points[i];
    if (g[i] == 0.0) continue;
    const auto& n = q.normal;
    const Vec2 s = split(jump_at(v, q), n).tangential;
    const Mat2 D = dalpha_eps(s, params.epsilon);
    const Mat2 P{{{1.0 - n[0] * n[0], -n[0] * n[1]}, {-n[1] * n[0], 1.0 - n[1] * n[1]}}};
    // P D P, scaled
    Mat2 B{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double s_ab = 0.0;
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) s_ab += P[a][c] * D[c][d] * P[d][b];
        B[a][b] = q.weight * g[i] * coeff_v * s_ab;
      }
    // symmetrize exactly; P D P is symmetric up to rounding
    const double off = 0.5 * (B[0][1] + B[1][0]);
    B[0][1] = B[1][0] = off;
    scatter_block(q, B, out);
  }
  return out;
}

std::vector<Traction> recover_tractions(std::span<const double> u, std::span<const double> v,
                                        double t, const ContactParams& params,
                                        const CrackQuadrature& quad) {
  const auto g = threshold_values(params, quad, t);
  std::vector<Traction> out;
  out.reserve(quad.points.size());
  for (std::size_t i = 0; i < quad.points.size(); ++i) {
    const auto& q = quad.points[i];
    const double x = contact_argument(u, v, params.gamma, q);
    const Vec2 s = split(jump_at(v, q), q.normal).tangential;
    const double s2 = s[0] * s[0] + s[1] * s[1];
    const double phi = std::sqrt(s2 + params.epsilon * params.epsilon);
    // |s| <= phi holds after rounding since sqrt is monotone; the ratio is <= 1
    const double ratio = std::sqrt(s2) / phi;
    out.push_back({beta_eps(x, params.epsilon),
                   {g[i] * (s[0] / phi), g[i] * (s[1] / phi)},
                   g[i] * ratio,
                   g[i],
                   x,
                   s});
  }
  return out;
}

// ---------------------------------------------------------------------------

void CrackInterface::add_residual(std::span<const double> u, std::span<const double> v, double t,
                                  std::span<double> out) const {
  if (quad_.points.empty()) return;
  const auto rc = contact_residual(u, v, params_, quad_);
  const auto rf = friction_residual(v, t, params_, quad_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += rc[i] + rf[i];
}

void CrackInterface::add_tangent(std::span<const double> u, std::span<const double> v, double t,
                                 double coeff_u, double coeff_v, std::vector<Triplet>& out) const {
  if (quad_.points.empty()) return;
  auto tc = contact_tangent(u, v, params_, quad_, coeff_u, coeff_v);
  auto tf = friction_tangent(v, t, params_, quad_, coeff_v);
  out.insert(out.end(), tc.begin(), tc.end());
  out.insert(out.end(), tf.begin(), tf.end());
}

}  // namespace crackdyn

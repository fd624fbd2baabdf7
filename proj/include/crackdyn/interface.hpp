#pragma once

#include "crackdyn/expr.hpp"
#include "crackdyn/fem.hpp"
#include "crackdyn/mesh.hpp"

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace crackdyn {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;

// ---------------------------------------------------------------------------
// Smooth convex approximations of the non-penetration indicator psi and the
// norm phi, with their derivatives. [x]_- = max(-x, 0).

/// psi_eps(x) = [x]_-^3 / (3 eps)
double psi_eps(double x, double eps);
/// beta_eps = psi_eps' = -[x]_-^2 / eps, nondecreasing and <= 0
double beta_eps(double x, double eps);
/// beta_eps' = 2 [x]_- / eps >= 0
double dbeta_eps(double x, double eps);

/// phi_eps(x) = sqrt(|x|^2 + eps^2)
double phi_eps(const Vec2& x, double eps);
/// alpha_eps = grad phi_eps = x / phi_eps(x), |alpha_eps| < 1
Vec2 alpha_eps(const Vec2& x, double eps);
/// grad alpha_eps = (I - alpha alpha^T) / phi_eps, symmetric positive definite
Mat2 dalpha_eps(const Vec2& x, double eps);

// ---------------------------------------------------------------------------

/// Crack law parameters. gamma = 1/delta weighs displacement against
/// velocity in the contact condition; gamma = 0 is pure velocity contact.
struct ContactParams {
  double gamma = 0.0;
  double epsilon = 1e-2;
  Expr g;  // Tresca threshold g(t, x, y) >= 0

  void validate() const;
  /// 1/gamma, infinite when gamma == 0.
  double delta() const;
};

/// Gauss point on a crack pair. The jump of a nodal field at the point is
/// sum_k shape[k] * (w[plus[k]] - w[minus[k]]).
struct CrackPoint {
  double weight;
  Point x;
  Vec2 normal;
  std::array<std::size_t, 2> plus;
  std::array<std::size_t, 2> minus;
  std::array<double, 2> shape;
};

/// Two Gauss points per crack pair.
struct CrackQuadrature {
  std::vector<CrackPoint> points;

  static CrackQuadrature build(const CrackedMesh& mesh);
  double total_weight() const;
};

struct Jump {
  Vec2 value;
  double normal;
  Vec2 tangential;
};

/// Jump of a nodal vector at every crack point, split into normal part
/// [w].n and tangential part [w] - ([w].n) n.
std::vector<Jump> jump_eval(std::span<const double> w, const CrackQuadrature& quad);

/// g at every crack point. Throws DomainError on a negative sample.
std::vector<double> threshold_values(const ContactParams& params, const CrackQuadrature& quad,
                                     double t);

/// r with r.w = sum_q weight beta_eps([gamma u_n + v_n]) [w_n].
Vector contact_residual(std::span<const double> u, std::span<const double> v,
                        const ContactParams& params, const CrackQuadrature& quad);

/// r with r.w = sum_q weight g alpha_eps([v_tau]) . [w_tau].
Vector friction_residual(std::span<const double> v, double t, const ContactParams& params,
                         const CrackQuadrature& quad);

/// Derivative of contact_residual(u0 + coeff_u X, v0 + coeff_v X) in X.
std::vector<Triplet> contact_tangent(std::span<const double> u, std::span<const double> v,
                                     const ContactParams& params, const CrackQuadrature& quad,
                                     double coeff_u, double coeff_v);

/// Derivative of friction_residual(v0 + coeff_v X) in X.
std::vector<Triplet> friction_tangent(std::span<const double> v, double t,
                                      const ContactParams& params, const CrackQuadrature& quad,
                                      double coeff_v);

struct Traction {
  double sigma_n;        // beta_eps([gamma u_n + v_n]) <= 0
  Vec2 sigma_tau;        // g alpha_eps([v_tau])
  double sigma_tau_norm; // g |s| / phi_eps(s) <= g
  double g;
  double contact_arg;    // [gamma u_n + v_n]
  Vec2 slip;             // [v_tau]
};

std::vector<Traction> recover_tractions(std::span<const double> u, std::span<const double> v,
                                        double t, const ContactParams& params,
                                        const CrackQuadrature& quad);

// ---------------------------------------------------------------------------

/// Nonlinear interface forces entering the semi-discrete balance
///   M a + K u + r(u, v, t) = load(t).
class InterfaceForces {
public:
  virtual ~InterfaceForces() = default;

  /// out += r(u, v, t)
  virtual void add_residual(std::span<const double> u, std::span<const double> v, double t,
                            std::span<double> out) const = 0;

  /// Appends d r(u + coeff_u X, v + coeff_v X, t) / dX.
  virtual void add_tangent(std::span<const double> u, std::span<const double> v, double t,
                           double coeff_u, double coeff_v, std::vector<Triplet>& out) const = 0;
};

/// Regularized contact plus Tresca friction on the crack.
class CrackInterface final : public InterfaceForces {
public:
  CrackInterface(CrackQuadrature quad, ContactParams params)
      : quad_(std::move(quad)), params_(std::move(params)) {}

  void add_residual(std::span<const double> u, std::span<const double> v, double t,
                    std::span<double> out) const override;
  void add_tangent(std::span<const double> u, std::span<const double> v, double t, double coeff_u,
                   double coeff_v, std::vector<Triplet>& out) const override;

  const CrackQuadrature& quadrature() const { return quad_; }
  const ContactParams& params() const { return params_; }

private:
  CrackQuadrature quad_;
  ContactParams params_;
};

}  // namespace crackdyn

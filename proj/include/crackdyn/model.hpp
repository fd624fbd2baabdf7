#pragma once

#include "crackdyn/expr.hpp"
#include "crackdyn/fem.hpp"
#include "crackdyn/interface.hpp"
#include "crackdyn/mesh.hpp"
#include "crackdyn/timestepper.hpp"

#include <string>
#include <vector>

namespace crackdyn {

/// Data functions of the initial boundary value problem, each a pair of
/// scalar expressions.
struct ProblemData {
  VectorExpr f{Expr(), Expr()};   // body force per unit mass
  VectorExpr F{Expr(), Expr()};   // traction on the Neumann boundary
  VectorExpr u0{Expr(), Expr()};
  VectorExpr v0{Expr(), Expr()};
};

/// Assembled discrete problem on a cracked mesh.
class Model {
public:
  Model(CrackedMesh mesh, Material material, ContactParams contact, ProblemData data,
        AssemblyMode mode = AssemblyMode::deterministic);

  const CrackedMesh& mesh() const { return mesh_; }
  const Material& material() const { return material_; }
  const ContactParams& contact() const { return interface_.params(); }
  const ProblemData& data() const { return data_; }
  const DofMap& dofs() const { return dofs_; }
  const CrackQuadrature& quadrature() const { return interface_.quadrature(); }
  const CrackInterface& interface() const { return interface_; }

  /// Unconstrained assembled matrices.
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  /// Same with identity rows/columns on the Dirichlet dofs.
  const SparseMatrix& mass_pinned() const { return mass_pinned_; }
  const SparseMatrix& stiffness_pinned() const { return stiffness_pinned_; }

  /// Load vector with constrained entries zeroed.
  Vector load(double t) const;

  /// Nodal interpolant; constrained entries are zeroed.
  Vector interpolate(const VectorExpr& e, double t = 0.0) const;

  /// References this model; do not outlive it.
  SemiDiscreteSystem system() const;

  /// u0, v0 interpolated, consistent initial acceleration. Compatibility
  /// problems and nonzero Dirichlet samples are appended to `warnings`.
  State initial_state(std::vector<std::string>* warnings = nullptr) const;

  /// Discrete norms: |w|_V^2 = w^T K w, |w|_H^2 = w^T M w / rho.
  double norm_V(std::span<const double> w) const;
  double norm_H(std::span<const double> w) const;

private:
  CrackedMesh mesh_;
  Material material_;
  ProblemData data_;
  DofMap dofs_;
  SparseMatrix mass_, stiffness_, mass_pinned_, stiffness_pinned_;
  CrackInterface interface_;
};

}  // namespace crackdyn

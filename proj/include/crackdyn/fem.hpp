#pragma once

#include "crackdyn/expr.hpp"
#include "crackdyn/mesh.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace crackdyn {

using Vector = std::vector<double>;

/// Isotropic linear elastic material. In 2D the Lamé constants are used
/// as given (plane strain); no plane-stress conversion is applied.
struct Material {
  double lambda = 1.0;
  double mu = 1.0;
  double rho = 1.0;

  /// Throws InvariantError unless mu > 0, 3 lambda + 2 mu > 0 and rho > 0.
  void validate() const;
};

/// Two displacement components per vertex, dof = 2 * vertex + component.
/// Every dof of a vertex lying on a Dirichlet facet is constrained.
class DofMap {
public:
  DofMap() = default;
  explicit DofMap(const CrackedMesh& mesh);

  std::size_t size() const { return constrained_.size(); }
  std::size_t free_count() const { return free_count_; }
  bool is_constrained(std::size_t dof) const { return constrained_[dof]; }
  const std::vector<bool>& constrained() const { return constrained_; }

  /// Zeroes the constrained entries of `v`.
  void zero_constrained(std::span<double> v) const;

  static std::size_t dof(std::size_t vertex, int component) { return 2 * vertex + std::size_t(component); }

private:
  std::vector<bool> constrained_;
  std::size_t free_count_ = 0;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Square matrix in compressed sparse row layout with sorted, unique
/// column indices per row.
class SparseMatrix {
public:
  SparseMatrix() = default;

  /// Duplicate (row, col) entries are summed in input order, so the same
  /// triplet sequence always gives a bitwise identical matrix.
  static SparseMatrix from_triplets(std::size_t n, std::span<const Triplet> triplets);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }

  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;

  double at(std::size_t row, std::size_t col) const;
  Vector diagonal() const;

  /// Appends every stored entry, scaled, to `out`.
  void append_triplets(std::vector<Triplet>& out, double scale = 1.0) const;

  /// Copy with constrained rows and columns removed and a unit diagonal in
  /// their place.
  SparseMatrix pinned(const std::vector<bool>& constrained) const;

  bool is_symmetric(double rel_tol) const;
  bool operator==(const SparseMatrix&) const = default;

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

enum class AssemblyMode { deterministic, parallel };

/// Parallel when more than one hardware thread is available, unless
/// CRACKDYN_DETERMINISTIC is set to anything but "0". Both modes produce
/// identical matrices.
AssemblyMode default_assembly_mode();

/// Consistent P1 mass matrix scaled by rho; both components share the
/// scalar block (1 + delta_ij) |T| / 12.
SparseMatrix assemble_mass(const CrackedMesh& mesh, const Material& mat,
                           AssemblyMode mode = AssemblyMode::deterministic);

/// Stiffness of a(u, v) = lambda (div u, div v) + 2 mu (E(u), E(v)).
SparseMatrix assemble_stiffness(const CrackedMesh& mesh, const Material& mat,
                                AssemblyMode mode = AssemblyMode::deterministic);

/// Consistent load rho (f, w) + (F, w) on the Neumann facets. Cell integrals
/// use the three-edge-midpoint rule, facet integrals two Gauss points.
Vector assemble_load(const CrackedMesh& mesh, const Material& mat, const VectorExpr& f,
                     const VectorExpr& F, double t);

/// Per-cell stress (sigma_xx, sigma_yy, sigma_xy) of a nodal displacement.
std::vector<std::array<double, 3>> cell_stresses(const CrackedMesh& mesh, const Material& mat,
                                                 std::span<const double> u);

struct SolveInfo {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Throws ConvergenceError with
/// the achieved relative residual after `maxit` iterations.
Vector solve_spd(const SparseMatrix& A, std::span<const double> rhs, double tol = 1e-12,
                 std::size_t maxit = 0, SolveInfo* info = nullptr);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// a^T A a
double quadratic_form(const SparseMatrix& A, std::span<const double> a);

}  // namespace crackdyn

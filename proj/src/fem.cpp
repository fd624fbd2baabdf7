#include "crackdyn/fem.hpp"

#include "crackdyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>

namespace crackdyn {

void Material::validate() const {
  if (!(mu > 0.0)) throw InvariantError("material", "mu must be positive");
  if (!(3.0 * lambda + 2.0 * mu > 0.0)) throw InvariantError("material", "3 lambda + 2 mu must be positive");
  if (!(rho > 0.0)) throw InvariantError("material", "rho must be positive");
}

DofMap::DofMap(const CrackedMesh& mesh) : constrained_(2 * mesh.vertices.size(), false) {
  for (const auto& f : mesh.dirichlet) {
    for (auto v : f) {
      constrained_[dof(v, 0)] = true;
      constrained_[dof(v, 1)] = true;
    }
  }
  free_count_ = static_cast<std::size_t>(std::count(constrained_.begin(), constrained_.end(), false));
}

void DofMap::zero_constrained(std::span<double> v) const {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (constrained_[i]) v[i] = 0.0;
}

// ---------------------------------------------------------------------------

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::span<const Triplet> triplets) {
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = triplets[a];
    const auto& tb = triplets[b];
    return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
  });
  SparseMatrix m;
  m.n_ = n;
  m.row_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& t = triplets[order[k]];
    if (t.row >= n || t.col >= n) throw Error("sparse triplet out of range");
    if (k > 0) {
      const auto& prev = triplets[order[k - 1]];
      if (prev.row == t.row && prev.col == t.col) {
        m.values_.back() += t.value;
        continue;
      }
    }
    m.col_idx_.push_back(t.col);
    m.values_.push_back(t.value);
    ++m.row_ptr_[t.row + 1];
  }
  for (std::size_t r = 0; r < n; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, t);
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < n_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[r] = s;
  }
}

Vector SparseMatrix::operator*(std::span<const double> x) const {
  Vector y(n_);
  multiply(x, y);
  return y;
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
  const auto begin = col_idx_.begin() + std::ptrdiff_t(row_ptr_[row]);
  const auto end = col_idx_.begin() + std::ptrdiff_t(row_ptr_[row + 1]);
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return values_[std::size_t(it - col_idx_.begin())];
}

Vector SparseMatrix::diagonal() const {
  Vector d(n_);
  for (std::size_t r = 0; r < n_; ++r) d[r] = at(r, r);
  return d;
}

void SparseMatrix::append_triplets(std::vector<Triplet>& out, double scale) const {
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out.push_back({r, col_idx_[k], scale * values_[k]});
}

SparseMatrix SparseMatrix::pinned(const std::vector<bool>& constrained) const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (std::size_t r = 0; r < n_; ++r) {
    if (constrained[r]) {
      t.push_back({r, r, 1.0});
      continue;
    }
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      if (!constrained[col_idx_[k]]) t.push_back({r, col_idx_[k], values_[k]});
  }
  return from_triplets(n_, t);
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
  double scale = 0.0;
  for (double v : values_) scale = std::max(scale, std::abs(v));
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      if (std::abs(values_[k] - at(col_idx_[k], r)) > rel_tol * scale) return false;
  return true;
}

// ---------------------------------------------------------------------------

AssemblyMode default_assembly_mode() {
  const char* env = std::getenv("CRACKDYN_DETERMINISTIC");
  if (env && std::string(env) != "0") return AssemblyMode::deterministic;
  return std::thread::hardware_concurrency() > 1 ? AssemblyMode::parallel
                                                 : AssemblyMode::deterministic;
}

namespace {

struct CellGeometry {
  double area;
  std::array<double, 3> dx;  // d N_i / dx
  std::array<double, 3> dy;  // d N_i / dy
};

CellGeometry geometry(const CrackedMesh& mesh, std::size_t c) {
  const auto& cell = mesh.cells[c];
  const double area = signed_area(mesh, cell);
  if (!(area > 0.0)) throw Error("inverted cell " + std::to_string(c) + " (non-positive area)");
  CellGeometry g{area, {}, {}};
  for (int i = 0; i < 3; ++i) {
    const auto& pj = mesh.vertices[cell.v[(i + 1) % 3]];
    const auto& pk = mesh.vertices[cell.v[(i + 2) % 3]];
    g.dx[i] = (pj[1] - pk[1]) / (2.0 * area);
    g.dy[i] = (pk[0] - pj[0]) / (2.0 * area);
  }
  return g;
}

template <typename CellKernel>
SparseMatrix assemble(const CrackedMesh& mesh, AssemblyMode mode, CellKernel kernel) {
  const std::size_t n = 2 * mesh.vertices.size();
  const std::size_t ncells = mesh.cells.size();
  std::size_t chunks = 1;
  if (mode == AssemblyMode::parallel) {
    chunks = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), ncells / 64));
  }
  std::vector<std::vector<Triplet>> parts(chunks);
  auto work = [&](std::size_t chunk) {
    const std::size_t begin = ncells * chunk / chunks;
    const std::size_t end = ncells * (chunk + 1) / chunks;
    parts[chunk].reserve((end - begin) * 36);
    for (std::size_t c = begin; c < end; ++c) kernel(c, parts[chunk]);
  };
  if (chunks == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t k = 0; k < chunks; ++k) threads.emplace_back(work, k);
    for (auto& th : threads) th.join();
  }
  std::vector<Triplet> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return SparseMatrix::from_triplets(n, all);
}

}  // namespace

SparseMatrix assemble_mass(const CrackedMesh& mesh, const Material& mat, AssemblyMode mode) {
  return assemble(mesh, mode, [&](std::size_t c, std::vector<Triplet>& out) {
    const auto g = geometry(mesh, c);
    const auto& v = mesh.cells[c].v;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double m = mat.rho * g.area / 12.0 * (i == j ? 2.0 : 1.0);
        for (int a = 0; a < 2; ++a) out.push_back({DofMap::dof(v[i], a), DofMap::dof(v[j], a), m});
      }
  });
}

SparseMatrix assemble_stiffness(const CrackedMesh& mesh, const Material& mat, AssemblyMode mode) {
  return assemble(mesh, mode, [&](std::size_t c, std::vector<Triplet>& out) {
    const auto g = geometry(mesh, c);
    const auto& v = mesh.cells[c].v;
    for (int i = 0; i < 3; ++i) {
      const double gi[2] = {g.dx[i], g.dy[i]};
      for (int j = 0; j < 3; ++j) {
        const double gj[2] = {g.dx[j], g.dy[j]};
        const double grad_dot = gi[0] * gj[0] + gi[1] * gj[1];
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const double k = g.area * (mat.lambda * gi[a] * gj[b] +
                                       mat.mu * ((a == b ? grad_dot : 0.0) + gi[b] * gj[a]));
            out.push_back({DofMap::dof(v[i], a), DofMap::dof(v[j], b), k});
          }
      }
    }
  });
}

Vector assemble_load(const CrackedMesh& mesh, const Material& mat, const VectorExpr& f,
                     const VectorExpr& F, double t) {
  if (f.size() != 2 || F.size() != 2) throw Error("body force and traction need 2 components");
  Vector load(2 * mesh.vertices.size(), 0.0);

  auto is_zero = [](const VectorExpr& e) {
    return std::all_of(e.begin(), e.end(), [](const Expr& c) {
      return c.is_constant() && c.eval(0.0, {}) == 0.0;
    });
  };

  if (!is_zero(f)) {
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
      const auto& cell = mesh.cells[c];
      const double area = signed_area(mesh, cell);
      if (!(area > 0.0)) throw Error("inverted cell " + std::to_string(c) + " (non-positive area)");
      for (int e = 0; e < 3; ++e) {
        // midpoint of the edge opposite vertex e: basis values 0, 1/2, 1/2
        const auto& p = mesh.vertices[cell.v[(e + 1) % 3]];
        const auto& q = mesh.vertices[cell.v[(e + 2) % 3]];
        const double x[2] = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
        const double w = mat.rho * area / 3.0;
        for (int a = 0; a < 2; ++a) {
          const double fa = f[std::size_t(a)].eval(t, x);
          load[DofMap::dof(cell.v[(e + 1) % 3], a)] += w * 0.5 * fa;
          load[DofMap::dof(cell.v[(e + 2) % 3], a)] += w * 0.5 * fa;
        }
      }
    }
  }

  if (!is_zero(F)) {
    const double g = 0.5 / std::sqrt(3.0);
    const double xi[2] = {0.5 - g, 0.5 + g};
    for (const auto& facet : mesh.neumann) {
      const auto& p = mesh.vertices[facet[0]];
      const auto& q = mesh.vertices[facet[1]];
      const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
      for (double s : xi) {
        const double x[2] = {p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])};
        for (int a = 0; a < 2; ++a) {
          const double Fa = F[std::size_t(a)].eval(t, x);
          load[DofMap::dof(facet[0], a)] += 0.5 * len * (1.0 - s) * Fa;
          load[DofMap::dof(facet[1], a)] += 0.5 * len * s * Fa;
        }
      }
    }
  }
  return load;
}

std::vector<std::array<double, 3>> cell_stresses(const CrackedMesh& mesh, const Material& mat,
                                                 std::span<const double> u) {
  std::vector<std::array<double, 3>> out;
  out.reserve(mesh.cells.size());
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto g = geometry(mesh, c);
    double exx = 0, eyy = 0, exy = 0;
    for (int i = 0; i < 3; ++i) {
      const double ux = u[DofMap::dof(mesh.cells[c].v[i], 0)];
      const double uy = u[DofMap::dof(mesh.cells[c].v[i], 1)];
      exx += g.dx[i] * ux;
      eyy += g.dy[i] * uy;
      exy += 0.5 * (g.dy[i] * ux + g.dx[i] * uy);
    }
    const double div = exx + eyy;
    out.push_back({mat.lambda * div + 2.0 * mat.mu * exx, mat.lambda * div + 2.0 * mat.mu * eyy,
                   2.0 * mat.mu * exy});
  }
  return out;
}

// ---------------------------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double quadratic_form(const SparseMatrix& A, std::span<const double> a) {
  return dot(a, A * a);
}

Vector solve_spd(const SparseMatrix& A, std::span<const double> rhs, double tol, std::size_t maxit,
                 SolveInfo* info) {
  const std::size_t n = A.rows();
  if (rhs.size() != n) throw Error("solve_spd: size mismatch");
  if (maxit == 0) maxit = 10 * n + 100;
  Vector x(n, 0.0);
  const double bnorm = norm(rhs);
  if (info) *info = {};
  if (bnorm == 0.0) return x;

  Vector inv_diag = A.diagonal();
  for (auto& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

  Vector r(rhs.begin(), rhs.end());
  Vector z(n), p(n), Ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  double rnorm = bnorm;
  for (std::size_t it = 1; it <= maxit; ++it) {
    A.multiply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) {
      throw ConvergenceError("solve_spd: matrix is not positive definite", rnorm / bnorm);
    }
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    rnorm = norm(r);
    if (rnorm <= tol * bnorm) {
      if (info) *info = {it, rnorm / bnorm};
      return x;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw ConvergenceError("solve_spd: no convergence after " + std::to_string(maxit) +
                             " iterations (relative residual " + std::to_string(rnorm / bnorm) + ")",
                         rnorm / bnorm);
}

}  // namespace crackdyn

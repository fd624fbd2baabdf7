#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace crackdyn {

using Point = std::array<double, 2>;
using Facet = std::array<std::size_t, 2>;

enum class Side { plus, minus };

struct Cell {
  std::array<std::size_t, 3> v;
  Side side;
};

/// Two geometrically coincident facets on the crack. `plus[i]` and
/// `minus[i]` sit at the same position; `normal` points from the minus
/// subdomain into the plus subdomain.
struct CrackPair {
  Facet plus;
  Facet minus;
  Point normal;
};

/// Triangulation of the cracked domain. Vertices on the open crack are
/// duplicated: plus cells reference one copy, minus cells the other. Crack
/// tips and the rest of the interface keep a single vertex, so the jump of a
/// nodal field vanishes there automatically.
///
/// Only plane (dim == 2) meshes are supported.
struct CrackedMesh {
  int dim = 2;
  std::vector<Point> vertices;
  std::vector<Cell> cells;
  std::vector<Facet> dirichlet;
  std::vector<Facet> neumann;
  std::vector<CrackPair> crack_pairs;
};

/// Throws InvariantError naming the first invariant that fails.
void validate(const CrackedMesh& mesh);

double signed_area(const CrackedMesh& mesh, const Cell& cell);
Point centroid(const CrackedMesh& mesh, const Cell& cell);

/// Open sub-interval of (0, 1) along the interface occupied by the crack.
struct CrackSpan {
  double begin;
  double end;
};

/// Structured triangulation of [0, width] x [0, height] split by the
/// horizontal midline. Left/right edges are clamped, top/bottom edges carry
/// tractions. No crack: every interface vertex is shared.
CrackedMesh generate_rect(double width, double height, std::size_t nx, std::size_t ny);

/// Same rectangle with a crack along the midline. Midline vertices whose
/// relative abscissa lies strictly inside `span` are duplicated; every
/// midline edge touching a duplicated vertex becomes a crack pair with
/// normal (0, 1).
CrackedMesh generate_rect_crack(double width, double height, std::size_t nx, std::size_t ny,
                                CrackSpan span);

/// Builtin generator spec: "rect:W,H,NX,NY" or "rect_crack:W,H,NX,NY,A,B".
CrackedMesh generate_from_spec(const std::string& spec);

CrackedMesh read_mesh(std::istream& in);
CrackedMesh load_mesh(const std::string& path);
void write_mesh(std::ostream& out, const CrackedMesh& mesh);
void save_mesh(const std::string& path, const CrackedMesh& mesh);

/// Per crack pair, the aligned plus/minus vertex lists realizing the jump
/// u+ - u- at the pair's vertices.
struct TraceMaps {
  std::vector<std::vector<std::size_t>> plus;
  std::vector<std::vector<std::size_t>> minus;
};

TraceMaps crack_trace_maps(const CrackedMesh& mesh);

/// Identifies every minus-side crack vertex with its plus counterpart and
/// drops the crack pairs. Vertex numbering is preserved; duplicated minus
/// vertices become unreferenced.
CrackedMesh merge_crack(const CrackedMesh& mesh);

/// True when every facet of the mesh is shared by at most two cells and the
/// facets owned by a single cell are exactly the tagged boundary facets
/// (crack facets count as boundary of the unmerged mesh).
bool is_conforming(const CrackedMesh& mesh);

}  // namespace crackdyn

#include "crackdyn/mesh.hpp"

#include "crackdyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace crackdyn {

namespace {

Facet sorted(Facet f) {
  if (f[0] > f[1]) std::swap(f[0], f[1]);
  return f;
}

double bbox_diagonal(const CrackedMesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Point lo = mesh.vertices.front(), hi = lo;
  for (const auto& p : mesh.vertices) {
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  return std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
}

bool cell_has_facet(const Cell& c, const Facet& f) {
  auto has = [&](std::size_t v) { return std::find(c.v.begin(), c.v.end(), v) != c.v.end(); };
  return has(f[0]) && has(f[1]);
}

std::map<Facet, int> facet_counts(const CrackedMesh& mesh) {
  std::map<Facet, int> counts;
  for (const auto& c : mesh.cells) {
    for (int k = 0; k < 3; ++k) ++counts[sorted({c.v[k], c.v[(k + 1) % 3]})];
  }
  return counts;
}

}  // namespace

double signed_area(const CrackedMesh& mesh, const Cell& cell) {
  const auto& a = mesh.vertices[cell.v[0]];
  const auto& b = mesh.vertices[cell.v[1]];
  const auto& c = mesh.vertices[cell.v[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

Point centroid(const CrackedMesh& mesh, const Cell& cell) {
  Point c{0.0, 0.0};
  for (auto v : cell.v) {
    c[0] += mesh.vertices[v][0] / 3.0;
    c[1] += mesh.vertices[v][1] / 3.0;
  }
  return c;
}

bool is_conforming(const CrackedMesh& mesh) {
  std::set<Facet> boundary;
  for (const auto& f : mesh.dirichlet) boundary.insert(sorted(f));
  for (const auto& f : mesh.neumann) boundary.insert(sorted(f));
  for (const auto& p : mesh.crack_pairs) {
    boundary.insert(sorted(p.plus));
    boundary.insert(sorted(p.minus));
  }
  std::size_t singles = 0;
  for (const auto& [facet, count] : facet_counts(mesh)) {
    if (count > 2) return false;
    if (count == 1) {
      if (!boundary.count(facet)) return false;
      ++singles;
    }
  }
  return singles == boundary.size();
}

CrackedMesh merge_crack(const CrackedMesh& mesh) {
  std::unordered_map<std::size_t, std::size_t> to_plus;
  for (const auto& p : mesh.crack_pairs) {
    for (int i = 0; i < 2; ++i) {
      if (p.minus[i] != p.plus[i]) to_plus[p.minus[i]] = p.plus[i];
    }
  }
  auto map = [&](std::size_t v) {
    auto it = to_plus.find(v);
    return it == to_plus.end() ? v : it->second;
  };
  CrackedMesh merged = mesh;
  merged.crack_pairs.clear();
  for (auto& c : merged.cells)
    for (auto& v : c.v) v = map(v);
  for (auto* list : {&merged.dirichlet, &merged.neumann})
    for (auto& f : *list)
      for (auto& v : f) v = map(v);
  return merged;
}

void validate(const CrackedMesh& mesh) {
  if (mesh.dim != 2) {
    throw InvariantError("dimension", "only dim 2 is supported, got " + std::to_string(mesh.dim));
  }
  const std::size_t nv = mesh.vertices.size();
  if (nv == 0 || mesh.cells.empty()) throw InvariantError("nonempty mesh", "no vertices or cells");
  auto check_index = [&](std::size_t v, const char* where) {
    if (v >= nv) {
      throw InvariantError("vertex index", std::string(where) + " references vertex " +
                                               std::to_string(v) + " of " + std::to_string(nv));
    }
  };
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    for (auto v : cell.v) check_index(v, "cell");
    if (!(signed_area(mesh, cell) > 0.0)) {
      throw InvariantError("cell orientation",
                           "cell " + std::to_string(c) + " has non-positive signed area");
    }
  }
  for (const auto& f : mesh.dirichlet) for (auto v : f) check_index(v, "dirichlet facet");
  for (const auto& f : mesh.neumann) for (auto v : f) check_index(v, "neumann facet");
  if (mesh.dirichlet.empty()) throw InvariantError("dirichlet boundary", "Γ_D must be nonempty");

  const double scale = bbox_diagonal(mesh);
  std::vector<int> vertex_side(nv, 0);  // bit 1: plus cell, bit 2: minus cell
  for (const auto& c : mesh.cells)
    for (auto v : c.v) vertex_side[v] |= (c.side == Side::plus ? 1 : 2);

  for (std::size_t k = 0; k < mesh.crack_pairs.size(); ++k) {
    const auto& p = mesh.crack_pairs[k];
    const std::string tag = "crack pair " + std::to_string(k);
    for (int i = 0; i < 2; ++i) {
      check_index(p.plus[i], "crack pair");
      check_index(p.minus[i], "crack pair");
      const auto& a = mesh.vertices[p.plus[i]];
      const auto& b = mesh.vertices[p.minus[i]];
      if (std::hypot(a[0] - b[0], a[1] - b[1]) > 1e-12 * scale) {
        throw InvariantError("crack pair coincidence", tag + " facets are not coincident");
      }
      if (p.plus[i] != p.minus[i]) {
        if (vertex_side[p.plus[i]] != 1 || vertex_side[p.minus[i]] != 2) {
          throw InvariantError("crack duplication",
                               tag + ": duplicated vertex shared across subdomains");
        }
      }
    }
    if (p.plus[0] == p.plus[1]) throw InvariantError("crack pair facet", tag + " is degenerate");
    const double nn = std::hypot(p.normal[0], p.normal[1]);
    if (std::abs(nn - 1.0) > 1e-12) throw InvariantError("crack normal", tag + " normal is not unit");

    auto adjacent = [&](const Facet& f, Side side) -> const Cell* {
      for (const auto& c : mesh.cells)
        if (c.side == side && cell_has_facet(c, f)) return &c;
      return nullptr;
    };
    const Cell* minus_cell = adjacent(p.minus, Side::minus);
    const Cell* plus_cell = adjacent(p.plus, Side::plus);
    if (!minus_cell || !plus_cell) {
      throw InvariantError("crack pair adjacency", tag + " lacks an adjacent plus or minus cell");
    }
    const auto& a = mesh.vertices[p.minus[0]];
    const auto& b = mesh.vertices[p.minus[1]];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    Point geo{-(b[1] - a[1]) / len, (b[0] - a[0]) / len};
    const Point mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    const Point cm = centroid(mesh, *minus_cell);
    if (geo[0] * (cm[0] - mid[0]) + geo[1] * (cm[1] - mid[1]) > 0.0) {
      geo = {-geo[0], -geo[1]};
    }
    if (std::hypot(geo[0] - p.normal[0], geo[1] - p.normal[1]) > 1e-10) {
      throw InvariantError("crack normal",
                           tag + " normal is not the outward normal of the minus facet");
    }
  }

  std::set<Facet> seen;
  for (const auto* list : {&mesh.dirichlet, &mesh.neumann}) {
    for (const auto& f : *list) {
      if (!seen.insert(sorted(f)).second) {
        throw InvariantError("boundary tagging", "facet tagged more than once");
      }
    }
  }
  if (!is_conforming(mesh) || !is_conforming(merge_crack(mesh))) {
    throw InvariantError("merged mesh conformity",
                         "merging crack duplicates does not give a conforming, fully tagged mesh");
  }
}

namespace {

struct Grid {
  std::size_t nx, ny;
  std::size_t at(std::size_t i, std::size_t j) const { return j * (nx + 1) + i; }
};

CrackedMesh build_rect(double width, double height, std::size_t nx, std::size_t ny,
                       const CrackSpan* span) {
  if (!(width > 0.0) || !(height > 0.0)) throw Error("degenerate extents: width and height must be positive");
  if (nx < 2 || ny < 2) throw Error("degenerate extents: nx and ny must be at least 2");
  if (ny % 2 != 0) throw Error("ny must be even so that the interface is a grid line");
  if (span) {
    if (!(span->end > span->begin)) throw Error("degenerate extents: crack span has no length");
    if (span->begin <= 0.0 || span->end >= 1.0) throw Error("crack reaches interface boundary");
  }

  CrackedMesh mesh;
  const Grid grid{nx, ny};
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i)
      mesh.vertices.push_back({width * double(i) / double(nx), height * double(j) / double(ny)});

  const std::size_t mid = ny / 2;
  // minus-side copy of each midline vertex (identity where not duplicated)
  std::vector<std::size_t> minus_copy(nx + 1);
  std::vector<bool> duplicated(nx + 1, false);
  for (std::size_t i = 0; i <= nx; ++i) {
    minus_copy[i] = grid.at(i, mid);
    const double s = double(i) / double(nx);
    if (span && s > span->begin && s < span->end) {
      duplicated[i] = true;
      minus_copy[i] = mesh.vertices.size();
      mesh.vertices.push_back(mesh.vertices[grid.at(i, mid)]);
    }
  }
  if (span && std::none_of(duplicated.begin(), duplicated.end(), [](bool b) { return b; })) {
    throw Error("crack span contains no interface vertex at this resolution");
  }

  for (std::size_t j = 0; j < ny; ++j) {
    const Side side = j < mid ? Side::minus : Side::plus;
    auto vid = [&](std::size_t i, std::size_t jj) {
      if (side == Side::minus && jj == mid) return minus_copy[i];
      return grid.at(i, jj);
    };
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      mesh.cells.push_back({{a, b, c}, side});
      mesh.cells.push_back({{a, c, d}, side});
    }
  }
  for (std::size_t j = 0; j < ny; ++j) {
    mesh.dirichlet.push_back({grid.at(0, j), grid.at(0, j + 1)});
    mesh.dirichlet.push_back({grid.at(nx, j), grid.at(nx, j + 1)});
  }
  for (std::size_t i = 0; i < nx; ++i) {
    mesh.neumann.push_back({grid.at(i, 0), grid.at(i + 1, 0)});
    mesh.neumann.push_back({grid.at(i, ny), grid.at(i + 1, ny)});
  }
  if (span) {
    for (std::size_t i = 0; i < nx; ++i) {
      if (!duplicated[i] && !duplicated[i + 1]) continue;
      mesh.crack_pairs.push_back(
          {{grid.at(i, mid), grid.at(i + 1, mid)}, {minus_copy[i], minus_copy[i + 1]}, {0.0, 1.0}});
    }
  }
  return mesh;
}

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error("mesh spec: bad number '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error("mesh spec: bad number '" + item + "'");
    }
    out.push_back(value);
  }
  return out;
}

std::size_t as_count(double v) {
  if (v < 0.0 || v != std::floor(v)) throw Error("mesh spec: expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

CrackedMesh generate_rect(double width, double height, std::size_t nx, std::size_t ny) {
  return build_rect(width, height, nx, ny, nullptr);
}

CrackedMesh generate_rect_crack(double width, double height, std::size_t nx, std::size_t ny,
                                CrackSpan span) {
  return build_rect(width, height, nx, ny, &span);
}

CrackedMesh generate_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error("mesh spec: expected '<kind>:<args>'");
  const std::string kind = spec.substr(0, colon);
  const auto args = split_numbers(spec.substr(colon + 1));
  if (kind == "rect") {
    if (args.size() != 4) throw Error("mesh spec: rect takes W,H,NX,NY");
    return generate_rect(args[0], args[1], as_count(args[2]), as_count(args[3]));
  }
  if (kind == "rect_crack") {
    if (args.size() != 6) throw Error("mesh spec: rect_crack takes W,H,NX,NY,A,B");
    return generate_rect_crack(args[0], args[1], as_count(args[2]), as_count(args[3]),
                               {args[4], args[5]});
  }
  throw Error("mesh spec: unknown kind '" + kind + "'");
}

TraceMaps crack_trace_maps(const CrackedMesh& mesh) {
  TraceMaps maps;
  for (const auto& p : mesh.crack_pairs) {
    std::vector<std::size_t> plus(p.plus.begin(), p.plus.end());
    std::vector<std::size_t> minus(p.minus.begin(), p.minus.end());
    for (std::size_t i = 0; i < plus.size(); ++i) {
      const auto& a = mesh.vertices.at(plus[i]);
      const auto& b = mesh.vertices.at(minus[i]);
      if (a != b) {
        throw InvariantError("crack pair coincidence",
                             "unmatched vertex " + std::to_string(minus[i]));
      }
    }
    maps.plus.push_back(std::move(plus));
    maps.minus.push_back(std::move(minus));
  }
  return maps;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line with comments stripped; false at end of input.
  bool next(std::istringstream& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      tokens.clear();
      tokens.str(line);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(line_no_) + ": " + msg, line_no_);
  }

  std::size_t line() const { return line_no_; }

private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

template <typename T>
T take(std::istringstream& tokens, LineReader& reader, const char* what) {
  T value{};
  if (!(tokens >> value)) reader.fail(std::string("expected ") + what);
  return value;
}

void expect_end(std::istringstream& tokens, LineReader& reader) {
  std::string extra;
  if (tokens >> extra) reader.fail("unexpected token '" + extra + "'");
}

}  // namespace

CrackedMesh read_mesh(std::istream& in) {
  LineReader reader(in);
  std::istringstream tokens;
  CrackedMesh mesh;

  if (!reader.next(tokens)) reader.fail("empty mesh file");
  if (take<std::string>(tokens, reader, "header") != "crackmesh") reader.fail("missing 'crackmesh' header");
  if (take<int>(tokens, reader, "format version") != 1) reader.fail("unsupported format version");
  mesh.dim = take<int>(tokens, reader, "dimension");
  expect_end(tokens, reader);
  if (mesh.dim != 2) reader.fail("only dimension 2 is supported");

  std::set<std::string> seen;
  while (reader.next(tokens)) {
    const auto section = take<std::string>(tokens, reader, "section name");
    const auto count = take<std::size_t>(tokens, reader, "section count");
    expect_end(tokens, reader);
    if (!seen.insert(section).second) reader.fail("duplicate section '" + section + "'");
    static const std::set<std::string> known = {"vertices", "cells", "dirichlet", "neumann", "crackpairs"};
    if (!known.count(section)) reader.fail("unknown section '" + section + "'");
    for (std::size_t k = 0; k < count; ++k) {
      if (!reader.next(tokens)) reader.fail("unexpected end of file in section '" + section + "'");
      if (section == "vertices") {
        const double x = take<double>(tokens, reader, "coordinate");
        const double y = take<double>(tokens, reader, "coordinate");
        mesh.vertices.push_back({x, y});
      } else if (section == "cells") {
        Cell c{};
        for (auto& v : c.v) v = take<std::size_t>(tokens, reader, "vertex index");
        const auto side = take<std::string>(tokens, reader, "side tag");
        if (side == "plus") c.side = Side::plus;
        else if (side == "minus") c.side = Side::minus;
        else reader.fail("side must be 'plus' or 'minus'");
        mesh.cells.push_back(c);
      } else if (section == "dirichlet" || section == "neumann") {
        Facet f{};
        for (auto& v : f) v = take<std::size_t>(tokens, reader, "vertex index");
        (section == "dirichlet" ? mesh.dirichlet : mesh.neumann).push_back(f);
      } else if (section == "crackpairs") {
        CrackPair p{};
        for (auto& v : p.plus) v = take<std::size_t>(tokens, reader, "vertex index");
        for (auto& v : p.minus) v = take<std::size_t>(tokens, reader, "vertex index");
        for (auto& c : p.normal) c = take<double>(tokens, reader, "normal component");
        mesh.crack_pairs.push_back(p);
      }
      expect_end(tokens, reader);
    }
  }
  validate(mesh);
  return mesh;
}

CrackedMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const CrackedMesh& mesh) {
  char buf[96];
  out << "crackmesh 1 " << mesh.dim << "\n";
  out << "vertices " << mesh.vertices.size() << "\n";
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p[0], p[1]);
    out << buf;
  }
  out << "cells " << mesh.cells.size() << "\n";
  for (const auto& c : mesh.cells) {
    out << c.v[0] << ' ' << c.v[1] << ' ' << c.v[2] << ' '
        << (c.side == Side::plus ? "plus" : "minus") << "\n";
  }
  out << "dirichlet " << mesh.dirichlet.size() << "\n";
  for (const auto& f : mesh.dirichlet) out << f[0] << ' ' << f[1] << "\n";
  out << "neumann " << mesh.neumann.size() << "\n";
  for (const auto& f : mesh.neumann) out << f[0] << ' ' << f[1] << "\n";
  out << "crackpairs " << mesh.crack_pairs.size() << "\n";
  for (const auto& p : mesh.crack_pairs) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.normal[0], p.normal[1]);
    out << p.plus[0] << ' ' << p.plus[1] << ' ' << p.minus[0] << ' ' << p.minus[1] << ' ' << buf;
  }
}

void save_mesh(const std::string& path, const CrackedMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file '" + path + "'");
  write_mesh(out, mesh);
}

}  // namespace crackdyn

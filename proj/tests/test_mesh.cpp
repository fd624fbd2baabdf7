#include "crackdyn/mesh.hpp"
#include "crackdyn/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace crackdyn;

namespace {

bool same_mesh(const CrackedMesh& a, const CrackedMesh& b) {
  if (a.dim != b.dim || a.vertices != b.vertices || a.dirichlet != b.dirichlet || a.neumann != b.neumann)
    return false;
  if (a.cells.size() != b.cells.size() || a.crack_pairs.size() != b.crack_pairs.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i)
    if (a.cells[i].v != b.cells[i].v || a.cells[i].side != b.cells[i].side) return false;
  for (std::size_t i = 0; i < a.crack_pairs.size(); ++i) {
    const auto &p = a.crack_pairs[i], &q = b.crack_pairs[i];
    if (p.plus != q.plus || p.minus != q.minus || p.normal != q.normal) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("generate_rect_crack: small example") {
  const auto m = generate_rect_crack(2, 1, 2, 2, {0.25, 0.75});
  CHECK(m.cells.size() == 8);
  CHECK(m.vertices.size() == 9 + 1);  // one midline vertex duplicated
  REQUIRE_FALSE(m.crack_pairs.empty());
  for (const auto& p : m.crack_pairs) {
    CHECK(p.normal[0] == 0.0);
    CHECK(p.normal[1] == 1.0);
  }
  CHECK(is_conforming(merge_crack(m)));
  CHECK_NOTHROW(validate(m));
}

TEST_CASE("generate_rect_crack: preconditions") {
  CHECK_THROWS_WITH(generate_rect_crack(2, 1, 4, 4, {0.0, 0.5}), "crack reaches interface boundary");
  CHECK_THROWS_WITH(generate_rect_crack(2, 1, 4, 4, {0.5, 1.0}), "crack reaches interface boundary");
  CHECK_THROWS_AS(generate_rect_crack(0, 1, 4, 4, {0.25, 0.75}), Error);
  CHECK_THROWS_AS(generate_rect_crack(2, 1, 1, 4, {0.25, 0.75}), Error);
  CHECK_THROWS_AS(generate_rect_crack(2, 1, 4, 3, {0.25, 0.75}), Error);
  CHECK_THROWS_AS(generate_rect_crack(2, 1, 4, 4, {0.6, 0.4}), Error);
  // span between two grid vertices
  CHECK_THROWS_AS(generate_rect_crack(2, 1, 2, 2, {0.1, 0.2}), Error);
}

TEST_CASE("builtin spec strings") {
  const auto a = generate_from_spec("rect_crack:2,1,8,4,0.25,0.75");
  const auto b = generate_rect_crack(2, 1, 8, 4, {0.25, 0.75});
  CHECK(same_mesh(a, b));
  CHECK(generate_from_spec("rect:1,1,3,2").crack_pairs.empty());
  CHECK_THROWS_AS(generate_from_spec("rect:1,1,3"), Error);
  CHECK_THROWS_AS(generate_from_spec("disk:1"), Error);
  CHECK_THROWS_AS(generate_from_spec("rect:1,1,x,2"), Error);
}

TEST_CASE("mesh file round trip") {
  const auto m = generate_rect_crack(3, 2, 6, 4, {0.3, 0.8});
  std::stringstream ss;
  write_mesh(ss, m);
  const auto back = read_mesh(ss);
  CHECK(same_mesh(m, back));
}

TEST_CASE("mesh reader: invariant violations are named") {
  const auto m = generate_rect_crack(2, 1, 4, 2, {0.3, 0.7});

  SUBCASE("empty dirichlet section") {
    auto bad = m;
    bad.dirichlet.clear();
    std::stringstream ss;
    write_mesh(ss, bad);
    CHECK_THROWS_WITH(read_mesh(ss), doctest::Contains("Γ_D must be nonempty"));
  }
  SUBCASE("non-coincident crack pair") {
    auto bad = m;
    // move a duplicated (non-tip) vertex of the minus face
    const auto it = std::find_if(bad.crack_pairs.begin(), bad.crack_pairs.end(),
                                 [](const CrackPair& p) { return p.plus[0] != p.minus[0]; });
    REQUIRE(it != bad.crack_pairs.end());
    bad.vertices[it->minus[0]][0] += 1e-3;
    std::stringstream ss;
    write_mesh(ss, bad);
    try {
      read_mesh(ss);
      FAIL("expected an invariant error");
    } catch (const InvariantError& e) {
      CHECK(e.invariant() == "crack pair coincidence");
    }
  }
  SUBCASE("flipped normal") {
    auto bad = m;
    bad.crack_pairs[0].normal = {0.0, -1.0};
    CHECK_THROWS_WITH(validate(bad), doctest::Contains("crack normal"));
  }
  SUBCASE("non-unit normal") {
    auto bad = m;
    bad.crack_pairs[0].normal = {0.0, 0.5};
    CHECK_THROWS_WITH(validate(bad), doctest::Contains("crack normal"));
  }
  SUBCASE("inverted cell") {
    auto bad = m;
    std::swap(bad.cells[0].v[1], bad.cells[0].v[2]);
    CHECK_THROWS_WITH(validate(bad), doctest::Contains("cell orientation"));
  }
  SUBCASE("three dimensions") {
    auto bad = m;
    bad.dim = 3;
    CHECK_THROWS_WITH(validate(bad), doctest::Contains("dimension"));
  }
}

TEST_CASE("mesh reader: syntax errors carry the line number") {
  std::stringstream a("crackmesh 1 2\nvertices 2\n0 0\n1 x\n");
  try {
    read_mesh(a);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.location() == 4);
  }
  std::stringstream b("mesh 1 2\n");
  CHECK_THROWS_AS(read_mesh(b), ParseError);
  std::stringstream c("crackmesh 1 2\nvertices 3\n0 0\n");
  CHECK_THROWS_AS(read_mesh(c), ParseError);
  std::stringstream d("crackmesh 1 2\nbogus 0\n");
  CHECK_THROWS_AS(read_mesh(d), ParseError);
}

TEST_CASE("mesh reader accepts comments and any section order") {
  const auto m = generate_rect_crack(2, 1, 4, 2, {0.3, 0.7});
  std::stringstream ss;
  write_mesh(ss, m);
  // move the crackpairs section to the front, sprinkle comments
  std::string text = ss.str();
  const auto cp = text.find("crackpairs");
  const auto header_end = text.find('\n') + 1;
  const std::string reordered = text.substr(0, header_end) + "# crack first\n" + text.substr(cp) +
                                text.substr(header_end, cp - header_end) + "# trailing comment\n";
  std::stringstream in(reordered);
  CHECK(same_mesh(read_mesh(in), m));
}

TEST_CASE("crack_trace_maps") {
  SUBCASE("pairs are coincident") {
    const auto m = generate_rect_crack(2, 1, 8, 4, {0.2, 0.7});
    const auto maps = crack_trace_maps(m);
    REQUIRE(maps.plus.size() == m.crack_pairs.size());
    for (std::size_t i = 0; i < maps.plus.size(); ++i) {
      REQUIRE(maps.plus[i].size() == maps.minus[i].size());
      for (std::size_t k = 0; k < maps.plus[i].size(); ++k)
        CHECK(m.vertices[maps.plus[i][k]] == m.vertices[maps.minus[i][k]]);
    }
  }
  SUBCASE("merged mesh has none") {
    const auto maps = crack_trace_maps(merge_crack(generate_rect_crack(2, 1, 4, 2, {0.3, 0.7})));
    CHECK(maps.plus.empty());
    CHECK(maps.minus.empty());
  }
  SUBCASE("three pairs") {
    // midline vertices at k/6; 2/6 and 3/6 lie in the span
    const auto m = generate_rect_crack(6, 2, 6, 2, {0.3, 0.6});
    const auto maps = crack_trace_maps(m);
    CHECK(maps.plus.size() == 3);
    CHECK(maps.minus.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(maps.plus[i].size() == maps.minus[i].size());
  }
}

TEST_CASE("property: crack normal points from minus to plus") {
  for (auto [nx, ny] : {std::pair{4, 2}, {8, 4}, {10, 6}, {16, 8}}) {
    const auto m = generate_rect_crack(2, 1, std::size_t(nx), std::size_t(ny), {0.25, 0.75});
    for (const auto& p : m.crack_pairs) {
      const Cell* plus = nullptr;
      const Cell* minus = nullptr;
      for (const auto& c : m.cells) {
        auto has = [&c](std::size_t v) { return std::find(c.v.begin(), c.v.end(), v) != c.v.end(); };
        if (has(p.plus[0]) && has(p.plus[1]) && c.side == Side::plus) plus = &c;
        if (has(p.minus[0]) && has(p.minus[1]) && c.side == Side::minus) minus = &c;
      }
      REQUIRE(plus);
      REQUIRE(minus);
      const auto cp = centroid(m, *plus), cm = centroid(m, *minus);
      CHECK(p.normal[0] * (cp[0] - cm[0]) + p.normal[1] * (cp[1] - cm[1]) > 0.0);
    }
    CHECK(is_conforming(merge_crack(m)));
  }
}

TEST_CASE("property: refinement keeps the coarse vertices") {
  const auto coarse = generate_rect_crack(2, 1, 4, 2, {0.3, 0.7});
  const auto fine = generate_rect_crack(2, 1, 8, 4, {0.3, 0.7});
  std::set<Point> fine_set(fine.vertices.begin(), fine.vertices.end());
  for (const auto& p : coarse.vertices) CHECK(fine_set.count(p) == 1);
}

TEST_CASE("merge without crack is the identity on a plain rectangle") {
  const auto m = generate_rect(2, 1, 4, 2);
  CHECK(is_conforming(m));
  CHECK(same_mesh(merge_crack(m), m));
}

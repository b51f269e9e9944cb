#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "avem/mesh.hpp"

using namespace avem;

namespace {

PolygonalMesh unit_square_mesh() {
  return build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
}

PolygonalMesh two_squares_mesh() {
  return build_mesh({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}},
                    {{0, 1, 4, 5}, {1, 2, 3, 4}});
}

// edge-count consistency: sum of loop lengths = 2 * interior + boundary
void check_edge_topology(const PolygonalMesh& m) {
  int loop_edges = 0;
  for (const auto& c : m.cells) loop_edges += static_cast<int>(c.size());
  const int nb = m.n_boundary_edges();
  const int ni = m.n_edges() - nb;
  CHECK(loop_edges == 2 * ni + nb);
}

}  // namespace

TEST_CASE("single square cell: 4 edges, all boundary") {
  const PolygonalMesh m = unit_square_mesh();
  CHECK(m.n_edges() == 4);
  CHECK(m.n_boundary_edges() == 4);
  check_edge_topology(m);
}

TEST_CASE("two squares sharing an edge: 7 edges, 1 interior") {
  const PolygonalMesh m = two_squares_mesh();
  CHECK(m.n_edges() == 7);
  CHECK(m.n_edges() - m.n_boundary_edges() == 1);
  check_edge_topology(m);
}

TEST_CASE("clockwise cell is rejected") {
  CHECK_THROWS_AS(build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 3, 2, 1}}), NegativeArea);
}

TEST_CASE("non-manifold and dangling configurations are rejected") {
  // three cells sharing one edge
  CHECK_THROWS_AS(build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0}, {2, 1}},
                             {{0, 1, 2, 3}, {1, 4, 2}, {1, 5, 2}}),
                  NonManifoldEdge);
  // unused vertex
  CHECK_THROWS_AS(build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {5, 5}}, {{0, 1, 2, 3}}),
                  DanglingVertex);
  // bowtie (asymmetric, so its signed area stays positive)
  CHECK_THROWS_AS(build_mesh({{0, 0}, {3, 1}, {3, 0}, {0, 2}}, {{0, 1, 2, 3}}), NonSimplePolygon);
}

TEST_CASE("duplicate vertices are merged") {
  const PolygonalMesh m = build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {1.0 + 1e-15, 0}},
                                     {{0, 4, 2, 3}});
  CHECK(m.n_vertices() == 4);
}

TEST_CASE("cell geometry invariants") {
  const PolygonalMesh m = two_squares_mesh();
  for (int c = 0; c < m.n_cells(); ++c) {
    const CellGeometry g = cell_geometry(m, c);
    CHECK(g.area == Catch::Approx(1.0));
    Point2 closure{0, 0};
    double perim = 0.0;
    for (const auto& e : g.edges) {
      closure = closure + e.length * e.normal;
      perim += e.length;
      CHECK(norm(e.normal) == Catch::Approx(1.0));
      // tangent is the normal rotated by +90 degrees
      CHECK(e.tangent.x == Catch::Approx(-e.normal.y).margin(1e-15));
      CHECK(e.tangent.y == Catch::Approx(e.normal.x).margin(1e-15));
    }
    CHECK(norm(closure) < 1e-12 * perim);
  }
}

TEST_CASE("regularity report on the unit square") {
  const QualityReport rep = check_regularity(unit_square_mesh(), 0.1);
  REQUIRE(rep.cells.size() == 1);
  CHECK(rep.pass);
  CHECK(rep.cells[0].min_edge_ratio == Catch::Approx(1.0 / std::numbers::sqrt2));
  CHECK(rep.cells[0].star_radius_ratio == Catch::Approx(0.5 / std::numbers::sqrt2));
}

TEST_CASE("sliver triangle fails regularity") {
  const PolygonalMesh m = build_mesh({{0, 0}, {1, 0}, {1.001, 0.001}}, {{0, 1, 2}});
  const QualityReport rep = check_regularity(m, 0.1);
  CHECK_FALSE(rep.pass);
  CHECK(rep.cells[0].min_edge_ratio < 0.1);
}

TEST_CASE("refining an isolated square gives 4 quads of area 1/4") {
  const RefinementResult r = refine_cells(unit_square_mesh(), {0});
  CHECK(r.mesh.n_cells() == 4);
  for (int c = 0; c < 4; ++c) {
    CHECK(signed_area(r.mesh.cell_polygon(c)) == Catch::Approx(0.25));
    CHECK(r.parent[c] == 0);
  }
  CHECK(r.mesh.total_area() == Catch::Approx(1.0).epsilon(1e-13));
  check_edge_topology(r.mesh);
}

TEST_CASE("refining one of two squares splices the hanging node") {
  const RefinementResult r = refine_cells(two_squares_mesh(), {0});
  REQUIRE(r.mesh.n_cells() == 5);
  // the unmarked neighbor gained exactly one vertex on the shared side
  int five_gons = 0;
  for (const auto& loop : r.mesh.cells) five_gons += loop.size() == 5 ? 1 : 0;
  CHECK(five_gons == 1);
  CHECK(r.mesh.total_area() == Catch::Approx(2.0).epsilon(1e-13));
  check_edge_topology(r.mesh);
  // parents: 4 quads from cell 0, then cell 1
  CHECK(r.parent == std::vector<int>{0, 0, 0, 0, 1});
}

TEST_CASE("a marked triangle becomes 3 quadrilaterals") {
  const PolygonalMesh m = build_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  const RefinementResult r = refine_cells(m, {0});
  CHECK(r.mesh.n_cells() == 3);
  for (const auto& loop : r.mesh.cells) CHECK(loop.size() == 4);
  CHECK(r.mesh.total_area() == Catch::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("uniform refinement multiplies quad counts by 4 and hexagons by 6") {
  PolygonalMesh m = unit_square_mesh();
  m = uniform_refine(m).mesh;   // 4
  m = uniform_refine(m).mesh;   // 16
  CHECK(m.n_cells() == 16);
  m = uniform_refine(m).mesh;
  CHECK(m.n_cells() == 64);
  CHECK(m.generation == 3);

  Polygon hexv;
  for (int k = 0; k < 6; ++k) {
    const double a = std::numbers::pi / 3.0 * k;
    hexv.push_back({std::cos(a), std::sin(a)});
  }
  const PolygonalMesh hexm = build_mesh(hexv, {{0, 1, 2, 3, 4, 5}});
  CHECK(uniform_refine(hexm).mesh.n_cells() == 6);
}

TEST_CASE("refinement of a non-star-shaped cell fails") {
  const Polygon u = {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
  const PolygonalMesh m = build_mesh(u, {{0, 1, 2, 3, 4, 5, 6, 7}});
  CHECK_THROWS_AS(refine_cells(m, {0}), NotStarShapedAtBarycenter);
}

TEST_CASE("area and boundary are preserved across repeated local refinement") {
  PolygonalMesh m = two_squares_mesh();
  const double area0 = m.total_area();
  const int nb0 = m.n_boundary_edges();
  std::set<int> mark = {0};
  for (int step = 0; step < 4; ++step) {
    const RefinementResult r = refine_cells(m, mark);
    m = r.mesh;
    CHECK(m.total_area() == Catch::Approx(area0).epsilon(1e-12));
    check_edge_topology(m);
    // regularity ratios stay positive
    const QualityReport rep = check_regularity(m, 1e-6);
    for (const auto& q : rep.cells) {
      CHECK(q.min_edge_ratio > 0.0);
      CHECK(q.star_radius_ratio > 0.0);
    }
    mark = {m.n_cells() - 1};
  }
  CHECK(m.n_boundary_edges() >= nb0);  // boundary vertex set only grows
}

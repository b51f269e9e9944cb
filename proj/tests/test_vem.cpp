#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "avem/assemble.hpp"
#include "avem/generate.hpp"

using namespace avem;

namespace {

PolygonalMesh square_grid(int n) {
  return generate_mesh(make_domain(DomainName::unit_square), MeshPattern::squares, n);
}

// Independent projector oracle: evaluates the defining identity
//   |K| Pi(tau) . e_q = sum_l dof_l |l| q(m_l) - (div tau) int_K q,   q in {x, y}
// with int_K q computed by fan triangulation (exact linear moment per triangle).
Eigen::Vector2d projector_oracle(const Polygon& poly, const Eigen::VectorXd& dofs) {
  const double area = signed_area(poly);
  const Point2 apex = poly[0];
  double ix = 0.0, iy = 0.0;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const Point2 b = poly[i], c = poly[i + 1];
    const double t2 = cross(b - apex, c - apex);  // 2 |T|
    ix += t2 / 2.0 * (apex.x + b.x + c.x) / 3.0;
    iy += t2 / 2.0 * (apex.y + b.y + c.y) / 3.0;
  }
  double divergence = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    divergence += dofs(i) * dist(poly[i], poly[(i + 1) % poly.size()]);
  divergence /= area;
  Eigen::Vector2d pi;
  pi.setZero();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
    const Point2 m = 0.5 * (a + b);
    const double len = dist(a, b);
    pi(0) += dofs(i) * len * m.x;
    pi(1) += dofs(i) * len * m.y;
  }
  pi(0) -= divergence * ix;
  pi(1) -= divergence * iy;
  return pi / area;
}

}  // namespace

TEST_CASE("dof map counts") {
  const DofMap single = build_dof_map(build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}}));
  CHECK(single.n_total == 4);
  CHECK(single.n_free == 0);

  const PolygonalMesh m = square_grid(2);
  const DofMap dm = build_dof_map(m);
  CHECK(dm.n_total == 12);
  CHECK(dm.n_free == 4);
  CHECK_THROWS_AS(build_dof_map(m, 1), UnsupportedDegree);
}

TEST_CASE("interior edge carries opposite signs in its two cells") {
  const PolygonalMesh m = build_mesh({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}},
                                     {{0, 1, 4, 5}, {1, 2, 3, 4}});
  for (int e = 0; e < m.n_edges(); ++e) {
    if (m.edges[e].boundary()) continue;
    int s_left = 0, s_right = 0;
    for (int c : {m.edges[e].left, m.edges[e].right})
      for (std::size_t i = 0; i < m.cells[c].size(); ++i)
        if (m.cell_edges[c][i] == e)
          (c == m.edges[e].left ? s_left : s_right) = m.orientation_sign(c, static_cast<int>(i));
    CHECK(s_left * s_right == -1);
  }
}

TEST_CASE("local operators on the unit square") {
  const CellGeometry g =
      cell_geometry(build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}}), 0);
  const LocalOperators ops = local_operators(g);

  // edge order: bottom, right, top, left (outward dofs)
  SECTION("constant field (1,0): zero divergence, exact projection, zero stabilization part") {
    Eigen::VectorXd dofs(4);
    dofs << 0, 1, 0, -1;
    CHECK(std::abs(ops.d * dofs) < 1e-14);
    const Eigen::Vector2d pi = ops.P * dofs;
    CHECK(pi(0) == Catch::Approx(1.0));
    CHECK(pi(1) == Catch::Approx(0.0).margin(1e-14));
    const Eigen::VectorXd s_part = dofs - ops.Pi_dof * dofs;
    CHECK(s_part.norm() < 1e-14);
  }

  SECTION("field (x,y): divergence 2, projection (1/2,1/2), matches quadrature oracle") {
    Eigen::VectorXd dofs(4);
    dofs << 0, 1, 1, 0;
    CHECK((ops.d * dofs) == Catch::Approx(2.0));
    const Eigen::Vector2d pi = ops.P * dofs;
    CHECK(pi(0) == Catch::Approx(0.5));
    CHECK(pi(1) == Catch::Approx(0.5));
    const Eigen::Vector2d oracle = projector_oracle({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, dofs);
    CHECK((pi - oracle).norm() < 1e-13);
  }

  SECTION("matrix structure") {
    CHECK((ops.M - ops.M.transpose()).norm() < 1e-14);
    CHECK((ops.B - ops.B.transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops.M);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(ops.B);
    int rank = 0;
    for (int i = 0; i < 4; ++i) rank += eb.eigenvalues()(i) > 1e-12 ? 1 : 0;
    CHECK(rank == 1);
  }
}

TEST_CASE("projector matches the quadrature oracle on irregular polygons") {
  const PolygonalMesh m =
      generate_mesh(make_domain(DomainName::l_shape), MeshPattern::voronoi, 24, 5);
  std::mt19937_64 rng(17);
  for (int c = 0; c < m.n_cells(); ++c) {
    const Polygon poly = m.cell_polygon(c);
    const LocalOperators ops = local_operators(cell_geometry(m, c));
    Eigen::VectorXd dofs(poly.size());
    for (int i = 0; i < dofs.size(); ++i) dofs(i) = 2.0 * detail::next_unit_double(rng) - 1.0;
    const Eigen::Vector2d pi = ops.P * dofs;
    const Eigen::Vector2d oracle = projector_oracle(poly, dofs);
    CHECK((pi - oracle).norm() < 1e-12 * std::max(1.0, dofs.norm()));
    // divergence of the interpolant of any constant field vanishes
    Eigen::VectorXd cdofs(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
      const Point2 t = (1.0 / dist(a, b)) * (b - a);
      cdofs(i) = dot({0.3, -0.7}, Point2{t.y, -t.x});
    }
    CHECK(std::abs(ops.d * cdofs) < 1e-12);
  }
}

TEST_CASE("assembled system on the 2x2 grid") {
  const PolygonalMesh m = square_grid(2);
  const DofMap dm = build_dof_map(m);
  const GlobalSystem sys = assemble(m, dm);
  REQUIRE(sys.n() == 4);
  const Eigen::MatrixXd B = Eigen::MatrixXd(sys.B);
  const Eigen::MatrixXd M = Eigen::MatrixXd(sys.M);
  CHECK((B - B.transpose()).norm() < 1e-13 * B.norm());
  CHECK((M - M.transpose()).norm() < 1e-13 * M.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(B);
  int positive = 0;
  for (int i = 0; i < 4; ++i) positive += eb.eigenvalues()(i) > 1e-10 ? 1 : 0;
  CHECK(positive == 3);  // rank of div onto zero-mean piecewise constants
}

TEST_CASE("single cell assembles to an empty system") {
  const PolygonalMesh m = build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
  const GlobalSystem sys = assemble(m, build_dof_map(m));
  CHECK(sys.n() == 0);
}

TEST_CASE("mass matrix is positive definite on the 3x3 grid") {
  const PolygonalMesh m = square_grid(3);
  const GlobalSystem sys = assemble(m, build_dof_map(m));
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(sys.M)};
  CHECK(llt.info() == Eigen::Success);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(sys.M)};
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("patch test: constant interpolants across generators") {
  const Point2 cvec{0.8, -0.6};
  const double c2 = dot(cvec, cvec);
  struct Case {
    DomainName dom;
    MeshPattern pat;
    int res;
  };
  for (const Case& tc : {Case{DomainName::unit_square, MeshPattern::trapezoids, 5},
                         Case{DomainName::l_shape, MeshPattern::voronoi, 30},
                         Case{DomainName::l_shape, MeshPattern::hexagons, 7},
                         Case{DomainName::h_shape, MeshPattern::square_triangle_mix, 24}}) {
    const DomainSpec d = make_domain(tc.dom);
    PolygonalMesh m = generate_mesh(d, tc.pat, tc.res, 2);
    // refine two convex cells so hanging nodes participate in the patch test
    std::set<int> marks;
    for (int c = 0; c < m.n_cells() && marks.size() < 2; ++c) {
      const Polygon poly = m.cell_polygon(c);
      bool convex = true;
      for (std::size_t i = 0; i < poly.size(); ++i)
        if (cross(poly[(i + 1) % poly.size()] - poly[i], poly[(i + 2) % poly.size()] - poly[i]) <
            -1e-14)
          convex = false;
      if (convex) marks.insert(c);
    }
    m = refine_cells(m, marks).mesh;
    const DofMap dm = build_dof_map(m);
    const Eigen::VectorXd ci = interpolate_constant(m, dm, cvec, /*full=*/true);
    // the patch test lives on the space without the boundary condition:
    // evaluate B c_I and a_h(c_I, c_I) cellwise from the full interpolant
    double ah = 0.0, b_norm_sq = 0.0;
    for (int cell = 0; cell < m.n_cells(); ++cell) {
      const LocalOperators ops = local_operators(cell_geometry(m, cell));
      const int n = static_cast<int>(m.cells[cell].size());
      Eigen::VectorXd g(n);
      for (int i = 0; i < n; ++i)
        g(i) = m.orientation_sign(cell, i) * ci(m.cell_edges[cell][i]);
      ah += g.dot(ops.M * g);
      b_norm_sq += (ops.B * g).squaredNorm();
    }
    CHECK(std::sqrt(b_norm_sq) < 1e-12 * std::max(1.0, c2));
    CHECK(ah == Catch::Approx(d.area * c2).epsilon(1e-12));
  }
}

TEST_CASE("stability: eigenvalues of M_K / |K| stay within [1e-3, 1e3]") {
  for (const MeshPattern pat : {MeshPattern::voronoi, MeshPattern::hexagons}) {
    const PolygonalMesh m = generate_mesh(make_domain(DomainName::l_shape), pat, 25, 4);
    for (int c = 0; c < m.n_cells(); ++c) {
      const CellGeometry g = cell_geometry(m, c);
      const LocalOperators ops = local_operators(g);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops.M / g.area);
      CHECK(es.eigenvalues().minCoeff() > 1e-3);
      CHECK(es.eigenvalues().maxCoeff() < 1e3);
    }
  }
}

TEST_CASE("spectrum is invariant under global orientation flips") {
  // relisting the cells in reverse order flips the stored orientation of
  // every shared edge whose first owner changes
  const DomainSpec d = make_domain(DomainName::l_shape);
  const PolygonalMesh m = generate_mesh(d, MeshPattern::triangles, 4);
  std::vector<std::vector<int>> reversed(m.cells.rbegin(), m.cells.rend());
  const PolygonalMesh m2 = build_mesh(m.vertices, reversed);
  const GlobalSystem s1 = assemble(m, build_dof_map(m));
  const GlobalSystem s2 = assemble(m2, build_dof_map(m2));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> e1(Eigen::MatrixXd(s1.B),
                                                               Eigen::MatrixXd(s1.M));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> e2(Eigen::MatrixXd(s2.B),
                                                               Eigen::MatrixXd(s2.M));
  REQUIRE(e1.eigenvalues().size() == e2.eigenvalues().size());
  const double scale = std::max(1.0, e1.eigenvalues().cwiseAbs().maxCoeff());
  for (int i = 0; i < e1.eigenvalues().size(); ++i)
    CHECK(e1.eigenvalues()(i) == Catch::Approx(e2.eigenvalues()(i)).margin(1e-10 * scale));
}

TEST_CASE("field reconstruction") {
  const PolygonalMesh m = square_grid(3);
  const DofMap dm = build_dof_map(m);

  SECTION("constant interpolant reproduces the constant with zero pressure") {
    const Eigen::VectorXd w = interpolate_constant(m, dm, {1, 0}, /*full=*/true);
    const FieldReconstruction f = reconstruct_fields(m, dm, w, 1.0, /*want_u=*/false);
    for (int c = 0; c < m.n_cells(); ++c) {
      CHECK(f.pi_w[c].x == Catch::Approx(1.0));
      CHECK(std::abs(f.pi_w[c].y) < 1e-13);
      CHECK(std::abs(f.p[c]) < 1e-12);
    }
  }

  SECTION("u-proxy requires a positive eigenvalue") {
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(dm.n_free);
    CHECK_THROWS_AS(reconstruct_fields(m, dm, w, 0.0, /*want_u=*/true), ZeroEigenvalue);
  }

  SECTION("dimension mismatch is rejected") {
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(dm.n_free + 1);
    CHECK_THROWS_AS(reconstruct_fields(m, dm, w, 1.0, false), DimensionMismatch);
  }
}

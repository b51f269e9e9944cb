#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "avem/geometry.hpp"

using namespace avem;

TEST_CASE("shoelace area and centroid on closed forms") {
  const Polygon square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(square) == Catch::Approx(1.0));
  CHECK(polygon_centroid(square).x == Catch::Approx(0.5));
  CHECK(polygon_centroid(square).y == Catch::Approx(0.5));
  CHECK(polygon_diameter(square) == Catch::Approx(std::numbers::sqrt2));

  const Polygon tri = {{0, 0}, {1, 0}, {0, 1}};
  CHECK(signed_area(tri) == Catch::Approx(0.5));
  CHECK(polygon_centroid(tri).x == Catch::Approx(1.0 / 3.0));
  CHECK(polygon_centroid(tri).y == Catch::Approx(1.0 / 3.0));
  CHECK(polygon_diameter(tri) == Catch::Approx(std::numbers::sqrt2));
}

TEST_CASE("regular hexagon area from exact vertex coordinates") {
  Polygon hex;
  for (int k = 0; k < 6; ++k) {
    const double a = std::numbers::pi / 3.0 * k;
    hex.push_back({std::cos(a), std::sin(a)});
  }
  // circumradius 1: area = 3 sqrt(3) / 2
  CHECK(signed_area(hex) == Catch::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("clockwise loop has negative area") {
  const Polygon cw = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  CHECK(signed_area(cw) < 0.0);
}

TEST_CASE("simplicity detects self-intersection") {
  CHECK(polygon_is_simple(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  CHECK_FALSE(polygon_is_simple(Polygon{{0, 0}, {1, 1}, {1, 0}, {0, 1}}));  // bowtie
  // collinear hanging vertex stays simple
  CHECK(polygon_is_simple(Polygon{{0, 0}, {0.5, 0.0}, {1, 0}, {1, 1}, {0, 1}}));
}

TEST_CASE("convex clipping") {
  const Polygon square = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const Polygon window = {{1, -1}, {3, -1}, {3, 1}, {1, 1}};
  const Polygon piece = clip_convex(square, window);
  CHECK(signed_area(piece) == Catch::Approx(1.0));
}

TEST_CASE("kernel of a convex polygon is the polygon; ball radius is the inradius") {
  const Polygon tri = {{0, 0}, {1, 0}, {0, 1}};
  const Polygon ker = polygon_kernel(tri);
  CHECK(signed_area(ker) == Catch::Approx(signed_area(tri)).epsilon(1e-12));
  // right triangle inradius: (a + b - c) / 2
  const double inr = (1.0 + 1.0 - std::numbers::sqrt2) / 2.0;
  CHECK(kernel_ball_radius(tri) == Catch::Approx(inr).epsilon(1e-10));

  const Polygon square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(kernel_ball_radius(square) == Catch::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("kernel of a U-shaped polygon is empty") {
  const Polygon u = {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
  CHECK(polygon_kernel(u).empty());
}

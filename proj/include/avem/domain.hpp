#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "avem/geometry.hpp"

namespace avem {

enum class DomainName { unit_square, l_shape, h_shape, circle_obstacles };

/// Computational domain described as a disjoint union of convex CCW zones.
/// Cells of any generated mesh conform to the zone seams, so the union of the
/// per-zone tilings covers the domain exactly.
struct DomainSpec {
  DomainName name = DomainName::unit_square;
  std::vector<Polygon> zones;
  std::vector<Point2> singular_corners;  // reentrant/obstacle corners of interest
  double area = 0.0;
  double ref_length = 0.0;  // max bounding-box side; lattice pitch is ref_length / resolution

  Polygon bounding_box() const {
    double x0 = zones[0][0].x, x1 = x0, y0 = zones[0][0].y, y1 = y0;
    for (const Polygon& z : zones)
      for (const Point2& p : z) {
        x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
      }
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  }

  bool contains(Point2 q, double tol = 0.0) const {
    for (const Polygon& z : zones)
      if (point_in_convex(z, q, tol)) return true;
    return false;
  }
};

inline DomainSpec make_domain(DomainName name, int n_circle_segments = 64) {
  DomainSpec d;
  d.name = name;
  auto rect = [](double x0, double y0, double x1, double y1) -> Polygon {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  };
  switch (name) {
    case DomainName::unit_square:
      d.zones = {rect(0, 0, 1, 1)};
      d.ref_length = 1.0;
      break;
    case DomainName::l_shape:
      // (0,1)^2 \ [1/2,1]^2
      d.zones = {rect(0, 0, 0.5, 1), rect(0.5, 0, 1, 0.5)};
      d.singular_corners = {{0.5, 0.5}};
      d.ref_length = 1.0;
      break;
    case DomainName::h_shape:
      // (0,3/2)x(0,3) \ ([1/2,1]x[0,5/4] u [1/2,1]x[15/8,3])
      d.zones = {rect(0, 0, 0.5, 3), rect(1, 0, 1.5, 3), rect(0.5, 1.25, 1, 1.875)};
      d.singular_corners = {{0.5, 1.25}, {1.0, 1.25}, {0.5, 1.875}, {1.0, 1.875}};
      d.ref_length = 3.0;
      break;
    case DomainName::circle_obstacles: {
      // unit disk (inscribed regular n-gon) minus four squares [±1/5,±3/5]^2
      Polygon disk;
      disk.reserve(n_circle_segments);
      for (int k = 0; k < n_circle_segments; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n_circle_segments;
        disk.push_back({std::cos(a), std::sin(a)});
      }
      const double cuts[6] = {-2.0, -0.6, -0.2, 0.2, 0.6, 2.0};
      auto is_obstacle = [](int i, int j) {
        // obstacle bands are x,y in [1/5,3/5] or [-3/5,-1/5] -> band indices 1 and 3
        return (i == 1 || i == 3) && (j == 1 || j == 3);
      };
      for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) {
          if (is_obstacle(i, j)) continue;
          const Polygon box = rect(cuts[i], cuts[j], cuts[i + 1], cuts[j + 1]);
          Polygon piece = clip_convex(disk, box);
          piece = dedup_loop(piece, 1e-14);
          if (piece.size() >= 3 && signed_area(piece) > 1e-14) d.zones.push_back(std::move(piece));
        }
      for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0})
          for (double cx : {0.2, 0.6})
            for (double cy : {0.2, 0.6}) d.singular_corners.push_back({sx * cx, sy * cy});
      d.ref_length = 2.0;
      break;
    }
  }
  for (const Polygon& z : d.zones) d.area += signed_area(z);
  return d;
}

inline DomainSpec make_domain(const std::string& name) {
  if (name == "square") return make_domain(DomainName::unit_square);
  if (name == "lshape") return make_domain(DomainName::l_shape);
  if (name == "hshape") return make_domain(DomainName::h_shape);
  if (name == "circle") return make_domain(DomainName::circle_obstacles);
  throw ConfigError("unknown domain: " + name);
}

}  // namespace avem

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "avem/domain.hpp"
#include "avem/mesh.hpp"

namespace avem {

enum class MeshPattern { triangles, squares, hexagons, trapezoids, square_triangle_mix, voronoi };

inline MeshPattern pattern_from_string(const std::string& s) {
  if (s == "triangles") return MeshPattern::triangles;
  if (s == "squares") return MeshPattern::squares;
  if (s == "hexagons") return MeshPattern::hexagons;
  if (s == "trapezoids") return MeshPattern::trapezoids;
  if (s == "mix") return MeshPattern::square_triangle_mix;
  if (s == "voronoi") return MeshPattern::voronoi;
  throw ConfigError("unknown pattern: " + s);
}

namespace detail {

struct LatticeZone {
  int i0, j0, i1, j1;  // lattice index range of the zone rectangle
};

// Lattice-aligned rectangle zones, or UnsupportedCombination.
inline std::vector<LatticeZone> lattice_zones(const DomainSpec& d, double s, Point2 origin) {
  std::vector<LatticeZone> out;
  for (const Polygon& z : d.zones) {
    if (z.size() != 4) throw UnsupportedCombination("pattern requires rectangular zones");
    double x0 = z[0].x, x1 = x0, y0 = z[0].y, y1 = y0;
    for (const Point2& p : z) {
      x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
    }
    if (std::abs((x1 - x0) * (y1 - y0) - signed_area(z)) > 1e-12 * (x1 - x0) * (y1 - y0))
      throw UnsupportedCombination("pattern requires axis-aligned rectangular zones");
    auto idx = [&](double v, double o) {
      const double t = (v - o) / s;
      const double r = std::round(t);
      if (std::abs(t - r) > 1e-9)
        throw UnsupportedCombination("resolution does not conform to the domain's feature lines");
      return static_cast<int>(r);
    };
    out.push_back({idx(x0, origin.x), idx(y0, origin.y), idx(x1, origin.x), idx(y1, origin.y)});
  }
  return out;
}

class LatticeBuilder {
 public:
  LatticeBuilder(Point2 origin, double pitch) : origin_(origin), s_(pitch) {}

  int vertex(int i, int j, Point2 shift = {0, 0}) {
    const auto key = std::make_pair(i, j);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    const int id = static_cast<int>(verts_.size());
    verts_.push_back({origin_.x + s_ * i + shift.x, origin_.y + s_ * j + shift.y});
    ids_.emplace(key, id);
    return id;
  }

  std::vector<Point2>& vertices() { return verts_; }

 private:
  Point2 origin_;
  double s_;
  std::map<std::pair<int, int>, int> ids_;
  std::vector<Point2> verts_;
};

inline PolygonalMesh generate_lattice_mesh(const DomainSpec& d, MeshPattern pattern, int resolution) {
  const Polygon bbox = d.bounding_box();
  const Point2 origin = bbox[0];
  const double s = d.ref_length / resolution;
  const auto zones = lattice_zones(d, s, origin);

  LatticeBuilder lb(origin, s);
  std::vector<std::vector<int>> cells;

  // trapezoid pattern shifts lattice columns that are strictly inside a zone
  auto trapezoid_shift = [&](int i, int j) -> Point2 {
    const double x = origin.x + s * i;
    const double y = origin.y + s * j;
    for (const auto& z : zones) {
      const double zx0 = origin.x + s * z.i0, zx1 = origin.x + s * z.i1;
      const double zy0 = origin.y + s * z.j0, zy1 = origin.y + s * z.j1;
      const double eps = 1e-9 * s;
      if (x > zx0 + eps && x < zx1 - eps && y > zy0 - eps && y < zy1 + eps)
        return {((i + j) % 2 == 0 ? -0.25 : 0.25) * s, 0.0};
    }
    return {0.0, 0.0};
  };

  for (const auto& z : zones) {
    for (int j = z.j0; j < z.j1; ++j)
      for (int i = z.i0; i < z.i1; ++i) {
        int a, b, c, e;
        if (pattern == MeshPattern::trapezoids) {
          a = lb.vertex(i, j, trapezoid_shift(i, j));
          b = lb.vertex(i + 1, j, trapezoid_shift(i + 1, j));
          c = lb.vertex(i + 1, j + 1, trapezoid_shift(i + 1, j + 1));
          e = lb.vertex(i, j + 1, trapezoid_shift(i, j + 1));
        } else {
          a = lb.vertex(i, j);
          b = lb.vertex(i + 1, j);
          c = lb.vertex(i + 1, j + 1);
          e = lb.vertex(i, j + 1);
        }
        const bool even = (i + j) % 2 == 0;
        switch (pattern) {
          case MeshPattern::squares:
          case MeshPattern::trapezoids:
            cells.push_back({a, b, c, e});
            break;
          case MeshPattern::triangles:
            if (even) {
              cells.push_back({a, b, c});
              cells.push_back({a, c, e});
            } else {
              cells.push_back({a, b, e});
              cells.push_back({b, c, e});
            }
            break;
          case MeshPattern::square_triangle_mix:
            if (even) {
              cells.push_back({a, b, c, e});
            } else {
              cells.push_back({a, b, e});
              cells.push_back({b, c, e});
            }
            break;
          default:
            throw UnsupportedCombination("not a lattice pattern");
        }
      }
  }
  return build_mesh(lb.vertices(), cells);
}

inline PolygonalMesh generate_hexagon_mesh(const DomainSpec& d, int resolution) {
  const Polygon bbox = d.bounding_box();
  const double r = d.ref_length / resolution;  // hexagon circumradius (= side)
  // small lattice offset so hexagon edges do not graze zone boundary lines
  const Point2 o{bbox[0].x + 0.0123456789 * r, bbox[0].y + 0.0054321987 * r};
  const double dx = 1.5 * r;
  const double dy = std::numbers::sqrt3 * r;
  const int ni = static_cast<int>(std::ceil((bbox[1].x - bbox[0].x) / dx)) + 2;
  const int nj = static_cast<int>(std::ceil((bbox[2].y - bbox[0].y) / dy)) + 2;

  std::vector<Point2> verts;
  std::vector<std::vector<int>> cells;
  for (int i = -2; i <= ni; ++i)
    for (int j = -2; j <= nj; ++j) {
      const Point2 c{o.x + dx * i, o.y + dy * (j + 0.5 * (((i % 2) + 2) % 2))};
      Polygon hex;
      hex.reserve(6);
      for (int k = 0; k < 6; ++k) {
        const double a = std::numbers::pi / 3.0 * k;
        hex.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
      }
      for (const Polygon& zone : d.zones) {
        Polygon piece = dedup_loop(clip_convex(hex, zone), 1e-12 * r);
        if (piece.size() >= 3 && signed_area(piece) > 1e-13 * r * r) {
          std::vector<int> loop;
          loop.reserve(piece.size());
          for (const Point2& p : piece) {
            loop.push_back(static_cast<int>(verts.size()));
            verts.push_back(p);
          }
          cells.push_back(std::move(loop));
        }
      }
    }
  if (cells.empty()) throw UnsupportedCombination("hexagon pitch too coarse for this domain");
  return build_mesh(verts, cells);
}

// --- Voronoi generation -----------------------------------------------------

inline double next_unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Union of convex pieces that partition a (possibly non-convex) region:
// cancel shared interior edges and stitch the outer loop. Returns false when
// the union is not a single simple loop.
inline bool stitch_pieces(const std::vector<Polygon>& pieces, double tol, Polygon& out) {
  if (pieces.size() == 1) {
    out = pieces[0];
    return true;
  }
  std::vector<Point2> pts;
  std::vector<std::vector<int>> loops;
  VertexDedup dd(tol);
  for (const Polygon& pc : pieces) {
    std::vector<int> loop;
    for (const Point2& p : pc) {
      const int id = dd.insert(p, pts);
      if (loop.empty() || loop.back() != id) loop.push_back(id);
    }
    while (loop.size() > 1 && loop.back() == loop.front()) loop.pop_back();
    if (loop.size() < 3) continue;
    loops.push_back(std::move(loop));
  }
  // split every directed edge at deduped vertices lying strictly inside it
  std::map<std::pair<int, int>, int> count;
  std::vector<std::pair<int, int>> dir_edges;
  for (const auto& loop : loops) {
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int u = loop[i], v = loop[(i + 1) % n];
      const Point2 a = pts[u], b = pts[v];
      std::vector<std::pair<double, int>> inner;
      for (int w = 0; w < static_cast<int>(pts.size()); ++w) {
        if (w == u || w == v) continue;
        const Point2 q = pts[w];
        if (std::abs(cross(b - a, q - a)) > tol * dist(a, b)) continue;
        const double t = dot(q - a, b - a) / dot(b - a, b - a);
        if (t > 1e-9 && t < 1.0 - 1e-9) inner.emplace_back(t, w);
      }
      std::sort(inner.begin(), inner.end());
      int prev = u;
      for (const auto& [t, w] : inner) {
        dir_edges.emplace_back(prev, w);
        prev = w;
      }
      dir_edges.emplace_back(prev, v);
    }
  }
  for (const auto& e : dir_edges) ++count[e];
  // cancel opposite pairs
  std::map<int, std::vector<int>> succ;
  int n_boundary = 0;
  for (const auto& [e, c] : count) {
    const auto rev = std::make_pair(e.second, e.first);
    const int cr = count.count(rev) ? count.at(rev) : 0;
    if (c - cr > 0) {
      if (c - cr != 1) return false;  // overlapping pieces; give up
      succ[e.first].push_back(e.second);
      ++n_boundary;
    }
  }
  for (const auto& [v, nexts] : succ)
    if (nexts.size() != 1) return false;
  if (succ.empty()) return false;
  // walk the unique cycle
  const int start = succ.begin()->first;
  std::vector<int> cycle;
  int cur = start;
  do {
    cycle.push_back(cur);
    auto it = succ.find(cur);
    if (it == succ.end()) return false;
    cur = it->second[0];
    if (static_cast<int>(cycle.size()) > n_boundary) return false;
  } while (cur != start);
  if (static_cast<int>(cycle.size()) != n_boundary) return false;  // disconnected or holed
  out.clear();
  for (int v : cycle) out.push_back(pts[v]);
  return signed_area(out) > 0.0;
}

inline PolygonalMesh generate_voronoi_mesh(const DomainSpec& d, int n_sites, std::uint64_t seed,
                                           int lloyd_iterations = 3) {
  const Polygon bbox = d.bounding_box();
  const double w = bbox[1].x - bbox[0].x;
  const double h = bbox[2].y - bbox[0].y;
  const double diam = std::hypot(w, h);

  std::mt19937_64 rng(seed);
  std::vector<Point2> sites;
  sites.reserve(n_sites);
  int guard = 0;
  while (static_cast<int>(sites.size()) < n_sites) {
    if (++guard > 1000000) throw Error("voronoi site sampling failed");
    const Point2 p{bbox[0].x + w * next_unit_double(rng), bbox[0].y + h * next_unit_double(rng)};
    if (d.contains(p)) sites.push_back(p);
  }

  const Polygon big = {{bbox[0].x - diam, bbox[0].y - diam},
                       {bbox[1].x + diam, bbox[0].y - diam},
                       {bbox[1].x + diam, bbox[2].y + diam},
                       {bbox[0].x - diam, bbox[2].y + diam}};

  auto voronoi_region = [&](int i) {
    Polygon region = big;
    for (int j = 0; j < static_cast<int>(sites.size()) && !region.empty(); ++j) {
      if (j == i) continue;
      const Point2 dvec = sites[j] - sites[i];
      const Point2 mid = 0.5 * (sites[i] + sites[j]);
      region = clip_halfplane(region, mid, mid + perp(dvec));
    }
    return region;
  };

  auto domain_pieces = [&](const Polygon& region) {
    std::vector<Polygon> pieces;
    for (const Polygon& zone : d.zones) {
      Polygon piece = dedup_loop(clip_convex(region, zone), 1e-12 * diam);
      if (piece.size() >= 3 && signed_area(piece) > 1e-13 * diam * diam) pieces.push_back(std::move(piece));
    }
    return pieces;
  };

  for (int it = 0; it < lloyd_iterations; ++it) {
    std::vector<Point2> next = sites;
    for (int i = 0; i < static_cast<int>(sites.size()); ++i) {
      const auto pieces = domain_pieces(voronoi_region(i));
      if (pieces.empty()) continue;
      double atot = 0.0;
      Point2 c{0, 0};
      for (const Polygon& pc : pieces) {
        const double a = signed_area(pc);
        const Point2 pcn = polygon_centroid(pc);
        atot += a;
        c = c + a * pcn;
      }
      c = (1.0 / atot) * c;
      if (d.contains(c)) next[i] = c;
    }
    sites = std::move(next);
  }

  std::vector<Point2> verts;
  std::vector<std::vector<int>> cells;
  for (int i = 0; i < static_cast<int>(sites.size()); ++i) {
    const auto pieces = domain_pieces(voronoi_region(i));
    if (pieces.empty()) continue;
    Polygon merged;
    std::vector<Polygon> cell_polys;
    if (stitch_pieces(pieces, 1e-12 * diam, merged))
      cell_polys.push_back(std::move(merged));
    else
      cell_polys = pieces;
    for (const Polygon& cp : cell_polys) {
      std::vector<int> loop;
      loop.reserve(cp.size());
      for (const Point2& p : cp) {
        loop.push_back(static_cast<int>(verts.size()));
        verts.push_back(p);
      }
      cells.push_back(std::move(loop));
    }
  }
  return build_mesh(verts, cells);
}

}  // namespace detail

/// Generates a mesh of the given pattern. Deterministic for fixed
/// (pattern, resolution, seed); lattice patterns must conform to the domain's
/// feature lines or UnsupportedCombination is thrown.
inline PolygonalMesh generate_mesh(const DomainSpec& domain, MeshPattern pattern, int resolution,
                                   std::uint64_t seed = 0) {
  if (resolution < 1) throw ConfigError("resolution must be >= 1");
  switch (pattern) {
    case MeshPattern::squares:
    case MeshPattern::triangles:
    case MeshPattern::trapezoids:
    case MeshPattern::square_triangle_mix:
      return detail::generate_lattice_mesh(domain, pattern, resolution);
    case MeshPattern::hexagons:
      return detail::generate_hexagon_mesh(domain, resolution);
    case MeshPattern::voronoi:
      return detail::generate_voronoi_mesh(domain, resolution, seed);
  }
  throw UnsupportedCombination("unknown pattern");
}

}  // namespace avem

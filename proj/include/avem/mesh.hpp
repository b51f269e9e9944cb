#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "avem/geometry.hpp"

namespace avem {

/// Polygonal mesh: vertices plus CCW vertex loops, with derived edge topology.
/// Values are immutable after construction; refinement returns a new mesh.
struct PolygonalMesh {
  struct Edge {
    int a = -1;          // stored orientation a -> b (traversal direction of `left`)
    int b = -1;
    int left = -1;       // cell traversing a -> b
    int right = -1;      // second incident cell, or -1 on the boundary
    bool boundary() const { return right < 0; }
  };

  std::vector<Point2> vertices;
  std::vector<std::vector<int>> cells;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> cell_edges;  // cell -> edge index per loop position
  int generation = 0;

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  int n_boundary_edges() const {
    int k = 0;
    for (const Edge& e : edges) k += e.boundary() ? 1 : 0;
    return k;
  }

  /// +1 when `cell` traverses edge `e` in its stored a->b direction, else -1.
  int orientation_sign(int cell, int local_edge) const {
    const auto& loop = cells[cell];
    const int a = loop[local_edge];
    return edges[cell_edges[cell][local_edge]].a == a ? +1 : -1;
  }

  Polygon cell_polygon(int cell) const {
    Polygon p;
    p.reserve(cells[cell].size());
    for (int v : cells[cell]) p.push_back(vertices[v]);
    return p;
  }

  double total_area() const {
    double a = 0.0;
    for (int c = 0; c < n_cells(); ++c) a += signed_area(cell_polygon(c));
    return a;
  }

  double domain_diameter() const {
    double x0 = vertices[0].x, x1 = x0, y0 = vertices[0].y, y1 = y0;
    for (const Point2& p : vertices) {
      x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
    }
    return std::hypot(x1 - x0, y1 - y0);
  }
};

/// Per-cell geometric data used by the local operators.
struct CellGeometry {
  struct EdgeGeom {
    double length = 0.0;
    Point2 midpoint;
    Point2 normal;   // outward unit normal
    Point2 tangent;  // normal rotated by +90 degrees (= CCW traversal direction)
  };
  double area = 0.0;
  Point2 centroid;
  double diameter = 0.0;
  std::vector<EdgeGeom> edges;
};

struct QualityReport {
  struct CellQuality {
    double min_edge_ratio = 0.0;    // shortest edge / h_K
    double star_radius_ratio = 0.0; // largest star ball radius / h_K
  };
  std::vector<CellQuality> cells;
  bool pass = false;
};

namespace detail {

// Spatial hash with first-come canonical representatives; tolerance-based merge.
class VertexDedup {
 public:
  VertexDedup(double tol) : tol_(std::max(tol, 1e-300)) {}

  int insert(Point2 p, std::vector<Point2>& verts) {
    const std::int64_t ix = static_cast<std::int64_t>(std::floor(p.x / (2.0 * tol_)));
    const std::int64_t iy = static_cast<std::int64_t>(std::floor(p.y / (2.0 * tol_)));
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid_.find(key(ix + dx, iy + dy));
        if (it == grid_.end()) continue;
        for (int id : it->second)
          if (dist(verts[id], p) <= tol_) return id;
      }
    const int id = static_cast<int>(verts.size());
    verts.push_back(p);
    grid_[key(ix, iy)].push_back(id);
    return id;
  }

 private:
  static std::uint64_t key(std::int64_t ix, std::int64_t iy) {
    return static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(iy);
  }
  double tol_;
  std::unordered_map<std::uint64_t, std::vector<int>> grid_;
};

}  // namespace detail

/// Builds a validated mesh from raw vertices and CCW vertex loops.
/// Duplicate vertices (within 1e-12 * domain diameter) are merged; edge
/// topology is derived and all structural invariants are checked.
inline PolygonalMesh build_mesh(const std::vector<Point2>& raw_vertices,
                                const std::vector<std::vector<int>>& raw_cells) {
  for (const Point2& p : raw_vertices)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("non-finite vertex coordinate");

  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  if (!raw_vertices.empty()) {
    x0 = x1 = raw_vertices[0].x;
    y0 = y1 = raw_vertices[0].y;
    for (const Point2& p : raw_vertices) {
      x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
    }
  }
  const double diam = std::hypot(x1 - x0, y1 - y0);
  const double tol = 1e-12 * diam;

  PolygonalMesh mesh;
  detail::VertexDedup dedup(tol);
  std::vector<int> remap(raw_vertices.size());
  for (std::size_t i = 0; i < raw_vertices.size(); ++i)
    remap[i] = dedup.insert(raw_vertices[i], mesh.vertices);

  mesh.cells.reserve(raw_cells.size());
  for (const auto& loop : raw_cells) {
    std::vector<int> c;
    c.reserve(loop.size());
    for (int v : loop) {
      if (v < 0 || v >= static_cast<int>(raw_vertices.size()))
        throw Error("cell references invalid vertex index");
      const int m = remap[v];
      if (!c.empty() && m == c.back()) continue;
      c.push_back(m);
    }
    while (c.size() > 1 && c.back() == c.front()) c.pop_back();
    if (c.size() < 3) throw NonSimplePolygon("cell has fewer than 3 distinct vertices");
    mesh.cells.push_back(std::move(c));
  }

  // per-cell validation
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const Polygon poly = mesh.cell_polygon(ci);
    const double a = signed_area(poly);
    if (a <= 0.0)
      throw NegativeArea("cell " + std::to_string(ci) + " has non-positive signed area (loops must be CCW)");
    if (!polygon_is_simple(poly))
      throw NonSimplePolygon("cell " + std::to_string(ci) + " is self-intersecting");
  }

  // derived edge topology
  std::map<std::pair<int, int>, int> edge_of;
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const auto& loop = mesh.cells[ci];
    const int n = static_cast<int>(loop.size());
    std::vector<int> ce(n);
    for (int i = 0; i < n; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % n];
      const auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        const int e = mesh.n_edges();
        mesh.edges.push_back({a, b, ci, -1});
        edge_of.emplace(key, e);
        ce[i] = e;
      } else {
        PolygonalMesh::Edge& e = mesh.edges[it->second];
        if (e.right >= 0)
          throw NonManifoldEdge("edge shared by more than two cells");
        e.right = ci;
        ce[i] = it->second;
      }
    }
    mesh.cell_edges.push_back(std::move(ce));
  }

  std::vector<bool> used(mesh.vertices.size(), false);
  for (const auto& loop : mesh.cells)
    for (int v : loop) used[v] = true;
  for (std::size_t v = 0; v < used.size(); ++v)
    if (!used[v]) throw DanglingVertex("vertex " + std::to_string(v) + " not referenced by any cell");

  return mesh;
}

inline CellGeometry cell_geometry(const PolygonalMesh& mesh, int cell) {
  const Polygon poly = mesh.cell_polygon(cell);
  CellGeometry g;
  g.area = signed_area(poly);
  g.centroid = polygon_centroid(poly);
  g.diameter = polygon_diameter(poly);
  const std::size_t n = poly.size();
  g.edges.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % n];
    auto& e = g.edges[i];
    e.length = dist(a, b);
    e.midpoint = 0.5 * (a + b);
    const Point2 t = (1.0 / e.length) * (b - a);
    e.normal = {t.y, -t.x};  // outward for CCW loops
    e.tangent = perp(e.normal);
  }
  return g;
}

/// Mesh-regularity report for the shape constant C_T: per cell, the ratio of
/// the shortest edge to the diameter, and the ratio of the largest ball of
/// admissible star centers (Chebyshev ball of the kernel) to the diameter.
inline QualityReport check_regularity(const PolygonalMesh& mesh, double c_t) {
  if (!(c_t > 0.0 && c_t < 1.0)) throw Error("C_T must lie in (0,1)");
  QualityReport rep;
  rep.cells.resize(mesh.n_cells());
  rep.pass = true;
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const Polygon poly = mesh.cell_polygon(ci);
    const double h = polygon_diameter(poly);
    double emin = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < poly.size(); ++i)
      emin = std::min(emin, dist(poly[i], poly[(i + 1) % poly.size()]));
    auto& q = rep.cells[ci];
    q.min_edge_ratio = emin / h;
    const Polygon ker = polygon_kernel(poly);
    q.star_radius_ratio = ker.empty() ? 0.0 : kernel_ball_radius(poly) / h;
    if (q.min_edge_ratio < c_t || q.star_radius_ratio < c_t) rep.pass = false;
  }
  return rep;
}

/// Result of refine_cells: the new mesh plus, for each new cell, the index of
/// the cell it came from (unmarked cells map to themselves).
struct RefinementResult {
  PolygonalMesh mesh;
  std::vector<int> parent;
};

/// Splits each marked n-gon into n quadrilaterals by connecting its barycenter
/// to the midpoint of every edge. A midpoint falling on the shared side of an
/// unmarked neighbor is spliced into that neighbor's loop, so hanging nodes
/// become explicit vertices and the topology stays manifold.
inline RefinementResult refine_cells(const PolygonalMesh& mesh, const std::set<int>& marked) {
  if (marked.empty()) throw Error("refine_cells: empty marked set");
  for (int ci : marked)
    if (ci < 0 || ci >= mesh.n_cells()) throw Error("refine_cells: invalid cell index");

  std::vector<Point2> verts = mesh.vertices;
  std::vector<int> mid_of_edge(mesh.n_edges(), -1);

  for (int ci : marked) {
    const Polygon poly = mesh.cell_polygon(ci);
    const Point2 bary = polygon_centroid(poly);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      // star-shaped w.r.t. the barycenter: barycenter strictly left of every edge
      const Point2 a = poly[i], b = poly[(i + 1) % n];
      if (cross(b - a, bary - a) <= 0.0)
        throw NotStarShapedAtBarycenter("cell " + std::to_string(ci) +
                                        " is not star-shaped with respect to its barycenter");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int e = mesh.cell_edges[ci][i];
      if (mid_of_edge[e] < 0) {
        const Point2 m = 0.5 * (verts[mesh.edges[e].a] + verts[mesh.edges[e].b]);
        mid_of_edge[e] = static_cast<int>(verts.size());
        verts.push_back(m);
      }
    }
  }

  std::vector<std::vector<int>> cells_out;
  std::vector<int> parent;
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const auto& loop = mesh.cells[ci];
    const int n = static_cast<int>(loop.size());
    if (marked.count(ci)) {
      const Point2 bary = polygon_centroid(mesh.cell_polygon(ci));
      const int bc = static_cast<int>(verts.size());
      verts.push_back(bary);
      for (int i = 0; i < n; ++i) {
        const int mprev = mid_of_edge[mesh.cell_edges[ci][(i + n - 1) % n]];
        const int mnext = mid_of_edge[mesh.cell_edges[ci][i]];
        cells_out.push_back({mprev, loop[i], mnext, bc});
        parent.push_back(ci);
      }
    } else {
      std::vector<int> nl;
      nl.reserve(loop.size() * 2);
      for (int i = 0; i < n; ++i) {
        nl.push_back(loop[i]);
        const int m = mid_of_edge[mesh.cell_edges[ci][i]];
        if (m >= 0) nl.push_back(m);
      }
      cells_out.push_back(std::move(nl));
      parent.push_back(ci);
    }
  }

  RefinementResult out{build_mesh(verts, cells_out), std::move(parent)};
  out.mesh.generation = mesh.generation + 1;
  return out;
}

inline RefinementResult uniform_refine(const PolygonalMesh& mesh) {
  std::set<int> all;
  for (int c = 0; c < mesh.n_cells(); ++c) all.insert(c);
  return refine_cells(mesh, all);
}

}  // namespace avem

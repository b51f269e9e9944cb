#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "avem/errors.hpp"

namespace avem {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return s * a; }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }
/// Rotates by +90 degrees: (x,y) -> (-y,x).
inline Point2 perp(Point2 a) { return {-a.y, a.x}; }

using Polygon = std::vector<Point2>;

/// Shoelace signed area; positive for counterclockwise loops.
inline double signed_area(std::span<const Point2> p) {
  double a = 0.0;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& u = p[i];
    const Point2& v = p[(i + 1) % n];
    a += cross(u, v);
  }
  return 0.5 * a;
}

inline Point2 polygon_centroid(std::span<const Point2> p) {
  const std::size_t n = p.size();
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& u = p[i];
    const Point2& v = p[(i + 1) % n];
    const double w = cross(u, v);
    a += w;
    cx += (u.x + v.x) * w;
    cy += (u.y + v.y) * w;
  }
  a *= 0.5;
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

/// Max pairwise vertex distance.
inline double polygon_diameter(std::span<const Point2> p) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) d = std::max(d, dist(p[i], p[j]));
  return d;
}

namespace detail {

inline bool on_segment(Point2 a, Point2 b, Point2 q, double tol) {
  if (std::abs(cross(b - a, q - a)) > tol * dist(a, b)) return false;
  const double t = dot(q - a, b - a) / dot(b - a, b - a);
  return t > -1e-12 && t < 1.0 + 1e-12;
}

// Proper or improper intersection of open segments (shared endpoints excluded by caller).
inline bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  const double eps = 1e-14 * (norm(p2 - p1) + norm(q2 - q1));
  auto between = [&](Point2 a, Point2 b, Point2 c) {
    return std::abs(cross(b - a, c - a)) <= eps * dist(a, b) &&
           dot(c - a, b - a) > eps && dot(c - b, a - b) > eps;
  };
  return between(p1, p2, q1) || between(p1, p2, q2) || between(q1, q2, p1) || between(q1, q2, p2);
}

}  // namespace detail

/// A loop is simple when no two non-adjacent edges touch or cross.
inline bool polygon_is_simple(std::span<const Point2> p) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent
      if (detail::segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

/// Clips a polygon by the half-plane {q : cross(b-a, q-a) >= 0} (left of a->b).
inline Polygon clip_halfplane(std::span<const Point2> poly, Point2 a, Point2 b) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = poly[i];
    const Point2 q = poly[(i + 1) % n];
    const double dp = cross(b - a, p - a);
    const double dq = cross(b - a, q - a);
    if (dp >= 0.0) out.push_back(p);
    if ((dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

/// Intersection of a polygon with a convex CCW clip polygon (Sutherland-Hodgman).
inline Polygon clip_convex(std::span<const Point2> subject, std::span<const Point2> clip) {
  Polygon cur(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t i = 0; i < m && !cur.empty(); ++i)
    cur = clip_halfplane(cur, clip[i], clip[(i + 1) % m]);
  return cur;
}

/// Drops consecutive duplicate vertices (within tol) from a loop.
inline Polygon dedup_loop(std::span<const Point2> p, double tol) {
  Polygon out;
  for (const Point2& q : p) {
    if (out.empty() || dist(out.back(), q) > tol) out.push_back(q);
  }
  while (out.size() > 1 && dist(out.front(), out.back()) <= tol) out.pop_back();
  return out;
}

/// Kernel of a polygon: intersection of the inner half-planes of its edges.
/// Empty result means the polygon is not star-shaped with respect to any point.
inline Polygon polygon_kernel(std::span<const Point2> p) {
  // start from the bounding box, inflated
  double x0 = p[0].x, x1 = p[0].x, y0 = p[0].y, y1 = p[0].y;
  for (const Point2& q : p) {
    x0 = std::min(x0, q.x); x1 = std::max(x1, q.x);
    y0 = std::min(y0, q.y); y1 = std::max(y1, q.y);
  }
  const double pad = std::max(x1 - x0, y1 - y0);
  Polygon ker = {{x0 - pad, y0 - pad}, {x1 + pad, y0 - pad}, {x1 + pad, y1 + pad}, {x0 - pad, y1 + pad}};
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n && !ker.empty(); ++i)
    ker = clip_halfplane(ker, p[i], p[(i + 1) % n]);
  return ker;
}

/// Radius of the largest ball contained in the intersection of half-planes
/// {n_i . x <= c_i}; the inner half-planes of `p` here. This is the Chebyshev
/// radius of the kernel, found by enumerating triples of active constraints.
inline double kernel_ball_radius(std::span<const Point2> p) {
  const std::size_t n = p.size();
  struct Hp { Point2 nrm; double c; };
  std::vector<Hp> hp;
  hp.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = p[i], b = p[(i + 1) % n];
    const double len = dist(a, b);
    if (len <= 0.0) continue;
    // inner side of a CCW edge is the left side; constraint nrm.x <= c with nrm outward
    const Point2 t = (1.0 / len) * (b - a);
    const Point2 nrm{t.y, -t.x};  // outward
    hp.push_back({nrm, dot(nrm, a)});
  }
  const std::size_t m = hp.size();
  double best = 0.0;
  auto feasible = [&](Point2 q, double r) {
    for (const Hp& h : hp)
      if (dot(h.nrm, q) + r > h.c + 1e-12 * (std::abs(h.c) + 1.0)) return false;
    return true;
  };
  // candidate centers equidistant from three constraint lines
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        // solve  n_a.x + r = c_a  for a in {i,j,k}
        const double A[3][3] = {{hp[i].nrm.x, hp[i].nrm.y, 1.0},
                                {hp[j].nrm.x, hp[j].nrm.y, 1.0},
                                {hp[k].nrm.x, hp[k].nrm.y, 1.0}};
        const double rhs[3] = {hp[i].c, hp[j].c, hp[k].c};
        const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                           A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                           A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
        if (std::abs(det) < 1e-14) continue;
        auto solve = [&](int col) {
          double B[3][3];
          for (int r2 = 0; r2 < 3; ++r2)
            for (int c2 = 0; c2 < 3; ++c2) B[r2][c2] = (c2 == col) ? rhs[r2] : A[r2][c2];
          return (B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                  B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                  B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0])) / det;
        };
        const Point2 q{solve(0), solve(1)};
        const double r = solve(2);
        if (r > best && feasible(q, r)) best = r;
      }
  return best;
}

inline bool point_in_convex(std::span<const Point2> poly, Point2 q, double tol = 0.0) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    if (cross(poly[(i + 1) % n] - poly[i], q - poly[i]) < -tol) return false;
  return true;
}

}  // namespace avem

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <vector>

#include "avem/assemble.hpp"

namespace avem {

/// Residual-type local indicator: rot term (identically zero at k = 0),
/// stabilization term, and tangential jumps of the projected field. Each
/// interior edge contributes h_K ||J||^2 to both incident cells.
struct LocalIndicator {
  int cell = -1;
  double r_sq = 0.0;
  double theta_sq = 0.0;
  double jump_sq = 0.0;
  double eta_sq = 0.0;
};

struct EstimatorReport {
  std::vector<LocalIndicator> indicators;
  double eta = 0.0;          // sqrt(sum eta_sq)
  double theta_total = 0.0;  // sum theta_sq
  double jump_total = 0.0;   // sum jump_sq
};

inline EstimatorReport local_indicators(const PolygonalMesh& mesh, const DofMap& dm,
                                        const Eigen::VectorXd& w) {
  if (w.size() != dm.n_free) throw DimensionMismatch("DOF vector size mismatch");
  EstimatorReport rep;
  rep.indicators.resize(mesh.n_cells());

  std::vector<Point2> pi(mesh.n_cells());
  std::vector<double> hK(mesh.n_cells());
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const CellGeometry geom = cell_geometry(mesh, ci);
    const LocalOperators ops = local_operators(geom);
    const int n = static_cast<int>(mesh.cells[ci].size());
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
      const int f = dm.free_index[mesh.cell_edges[ci][i]];
      g(i) = f < 0 ? 0.0 : mesh.orientation_sign(ci, i) * w(f);
    }
    auto& ind = rep.indicators[ci];
    ind.cell = ci;
    // rot of a constant vector vanishes; keep the assertion cheap and explicit
    ind.r_sq = 0.0;
    ind.theta_sq = g.dot(ops.S * g);
    const Eigen::Vector2d p = ops.P * g;
    pi[ci] = {p(0), p(1)};
    hK[ci] = geom.diameter;
  }

  for (const PolygonalMesh::Edge& e : mesh.edges) {
    if (e.boundary()) continue;
    const Point2 a = mesh.vertices[e.a];
    const Point2 b = mesh.vertices[e.b];
    const double len = dist(a, b);
    const Point2 t = (1.0 / len) * (b - a);
    const double j = dot(pi[e.left] - pi[e.right], t);
    const double j_norm_sq = len * j * j;  // constant jump along the edge
    rep.indicators[e.left].jump_sq += hK[e.left] * j_norm_sq;
    rep.indicators[e.right].jump_sq += hK[e.right] * j_norm_sq;
  }

  double eta_sq = 0.0;
  for (auto& ind : rep.indicators) {
    ind.eta_sq = ind.r_sq + ind.theta_sq + ind.jump_sq;
    eta_sq += ind.eta_sq;
    rep.theta_total += ind.theta_sq;
    rep.jump_total += ind.jump_sq;
  }
  rep.eta = std::sqrt(eta_sq);
  return rep;
}

/// Maximum-strategy marking: cells with eta_K >= theta_mark * max eta_K'.
/// Comparison is on eta_K = sqrt(eta_sq) unless `on_squared` is set.
inline std::set<int> mark_cells(const std::vector<LocalIndicator>& indicators, double theta_mark,
                                bool on_squared = false) {
  if (indicators.empty()) throw EmptyIndicators("no indicators to mark");
  if (!(theta_mark > 0.0 && theta_mark <= 1.0)) throw ConfigError("theta_mark must lie in (0,1]");
  double mx = 0.0;
  for (const auto& ind : indicators)
    mx = std::max(mx, on_squared ? ind.eta_sq : std::sqrt(ind.eta_sq));
  std::set<int> marked;
  for (const auto& ind : indicators) {
    const double v = on_squared ? ind.eta_sq : std::sqrt(ind.eta_sq);
    if (v >= theta_mark * mx) marked.insert(ind.cell);
  }
  return marked;  // the argmax cell always satisfies v >= theta_mark * mx
}

inline double effectivity(double lambda_ref, double lambda_h, double eta) {
  if (!(eta > 0.0)) throw ZeroEstimator("effectivity undefined for eta <= 0");
  return std::abs(lambda_ref - lambda_h) / (eta * eta);
}

}  // namespace avem

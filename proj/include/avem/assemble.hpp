#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "avem/dof.hpp"
#include "avem/local_ops.hpp"

namespace avem {

/// Assembled discrete eigenproblem B x = lambda M x on the free DOFs:
/// B the div-div stiffness, M the stabilized a_h mass. Boundary DOFs are
/// eliminated (w . n = 0 on Gamma).
struct GlobalSystem {
  Eigen::SparseMatrix<double> B;
  Eigen::SparseMatrix<double> M;
  DofMap dofmap;
  const PolygonalMesh* mesh = nullptr;

  int n() const { return dofmap.n_free; }
};

inline GlobalSystem assemble(const PolygonalMesh& mesh, const DofMap& dofmap) {
  GlobalSystem sys;
  sys.dofmap = dofmap;
  sys.mesh = &mesh;
  const int nf = dofmap.n_free;
  std::vector<Eigen::Triplet<double>> tb, tm;

  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const CellGeometry geom = cell_geometry(mesh, ci);
    const LocalOperators ops = local_operators(geom);
    const int n = static_cast<int>(mesh.cells[ci].size());
    for (int i = 0; i < n; ++i) {
      const int ei = mesh.cell_edges[ci][i];
      const int fi = dofmap.free_index[ei];
      if (fi < 0) continue;
      const double si = mesh.orientation_sign(ci, i);
      for (int j = 0; j < n; ++j) {
        const int ej = mesh.cell_edges[ci][j];
        const int fj = dofmap.free_index[ej];
        if (fj < 0) continue;
        const double sj = mesh.orientation_sign(ci, j);
        tb.emplace_back(fi, fj, si * sj * ops.B(i, j));
        tm.emplace_back(fi, fj, si * sj * ops.M(i, j));
      }
    }
  }

  sys.B.resize(nf, nf);
  sys.M.resize(nf, nf);
  sys.B.setFromTriplets(tb.begin(), tb.end());
  sys.M.setFromTriplets(tm.begin(), tm.end());
  return sys;
}

/// DOF vector interpolating a globally constant field c: dof_e = c . n_e with
/// n_e the edge's stored global normal. `full` selects all-edge DOFs (length
/// n_total, the space without the essential boundary condition) instead of the
/// zero-boundary free vector.
inline Eigen::VectorXd interpolate_constant(const PolygonalMesh& mesh, const DofMap& dm, Point2 c,
                                            bool full = false) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(full ? dm.n_total : dm.n_free);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const int idx = full ? e : dm.free_index[e];
    if (idx < 0) continue;
    const Point2 a = mesh.vertices[mesh.edges[e].a];
    const Point2 b = mesh.vertices[mesh.edges[e].b];
    const Point2 t = (1.0 / dist(a, b)) * (b - a);
    x(idx) = dot(c, Point2{t.y, -t.x});
  }
  return x;
}

/// Per-cell reconstruction of the discrete solution: the projected constant
/// field Pi_h w_h, the pressure p_h = -div w_h, and the proxy u_h = p_h / lambda.
struct FieldReconstruction {
  std::vector<Point2> pi_w;   // per cell
  std::vector<double> p;      // per cell
  std::vector<double> u;      // per cell (empty when lambda <= tol)
};

inline FieldReconstruction reconstruct_fields(const PolygonalMesh& mesh, const DofMap& dm,
                                              const Eigen::VectorXd& w, double lambda,
                                              bool want_u = true, double zero_tol = 1e-12) {
  const bool full = w.size() == dm.n_total && dm.n_total != dm.n_free;
  if (w.size() != dm.n_free && !full) throw DimensionMismatch("DOF vector size mismatch");
  FieldReconstruction out;
  out.pi_w.resize(mesh.n_cells());
  out.p.resize(mesh.n_cells());
  if (want_u && !(lambda > zero_tol)) throw ZeroEigenvalue("u-proxy requested for lambda <= tol");
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const CellGeometry geom = cell_geometry(mesh, ci);
    const LocalOperators ops = local_operators(geom);
    const int n = static_cast<int>(mesh.cells[ci].size());
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
      const int e = mesh.cell_edges[ci][i];
      const int f = full ? e : dm.free_index[e];
      g(i) = f < 0 ? 0.0 : mesh.orientation_sign(ci, i) * w(f);
    }
    const Eigen::Vector2d pi = ops.P * g;
    out.pi_w[ci] = {pi(0), pi(1)};
    out.p[ci] = -(ops.d * g)(0);
  }
  if (want_u) {
    out.u.resize(mesh.n_cells());
    for (int ci = 0; ci < mesh.n_cells(); ++ci) out.u[ci] = out.p[ci] / lambda;
  }
  return out;
}

/// L2 norm of the cellwise-constant u field.
inline double cellwise_l2_norm(const PolygonalMesh& mesh, const std::vector<double>& u) {
  double s = 0.0;
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const double a = signed_area(mesh.cell_polygon(ci));
    s += a * u[ci] * u[ci];
  }
  return std::sqrt(s);
}

}  // namespace avem

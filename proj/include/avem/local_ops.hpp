#pragma once

#include <Eigen/Dense>

#include "avem/mesh.hpp"

namespace avem {

/// Local k = 0 virtual element operators on one polygon, acting on the local
/// DOF vector (edge-average outward normal traces, cell ordering).
///
///   d      divergence functional:      div tau|_K = d . dofs
///   P      projector onto constants:   Pi_h^K tau = P . dofs  (2-vector)
///   Pi_dof DOF values of Pi_h^K tau:   N P, with N the outward normal rows
///   S      stabilization matrix        |K| (I - Pi_dof)^T (I - Pi_dof)
///   M      local a_h^K matrix          |K| P^T P + S
///   B      local stiffness             |K| d^T d   (rank 1)
struct LocalOperators {
  Eigen::RowVectorXd d;
  Eigen::Matrix<double, 2, Eigen::Dynamic> P;
  Eigen::MatrixXd Pi_dof;
  Eigen::MatrixXd S;
  Eigen::MatrixXd M;
  Eigen::MatrixXd B;
};

inline LocalOperators local_operators(const CellGeometry& geom) {
  const int n = static_cast<int>(geom.edges.size());
  const double area = geom.area;
  if (area < 1e-14 * geom.diameter * geom.diameter)
    throw DegenerateCell("cell area below 1e-14 * h_K^2");

  LocalOperators ops;
  ops.d.resize(n);
  ops.P.resize(2, n);
  Eigen::MatrixXd N(n, 2);
  for (int i = 0; i < n; ++i) {
    const auto& e = geom.edges[i];
    ops.d(i) = e.length / area;
    // integration by parts of the projector identity, specialized to q in {x,y}:
    //   |K| (Pi tau) = sum_l dof_l |l| m_l  -  (div tau) |K| centroid
    ops.P(0, i) = e.length * (e.midpoint.x - geom.centroid.x) / area;
    ops.P(1, i) = e.length * (e.midpoint.y - geom.centroid.y) / area;
    N(i, 0) = e.normal.x;
    N(i, 1) = e.normal.y;
  }
  ops.Pi_dof = N * ops.P;
  const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n, n) - ops.Pi_dof;
  ops.S = area * R.transpose() * R;
  ops.M = area * ops.P.transpose() * ops.P + ops.S;
  ops.B = area * ops.d.transpose() * ops.d;
  return ops;
}

}  // namespace avem

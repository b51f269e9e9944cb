#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "avem/assemble.hpp"
#include "avem/eig.hpp"

namespace avem {

/// Blocks of the discrete mixed formulation with piecewise-constant pressures:
///   A  = a_h block (equals the primal M),
///   Bt = divergence block, row K has entries |l| * sigma on K's free edges,
///   C  = diagonal pressure mass, |K| per cell.
/// The primal stiffness factors exactly as B = Bt^T C^{-1} Bt.
struct MixedSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::SparseMatrix<double> Bt;   // n_cells x n_free
  Eigen::VectorXd C;                // diagonal
  DofMap dofmap;
  const PolygonalMesh* mesh = nullptr;
};

inline MixedSystem assemble_mixed(const PolygonalMesh& mesh, const DofMap& dm) {
  MixedSystem mx;
  mx.dofmap = dm;
  mx.mesh = &mesh;
  mx.A = assemble(mesh, dm).M;
  mx.C.resize(mesh.n_cells());
  std::vector<Eigen::Triplet<double>> tb;
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const Polygon poly = mesh.cell_polygon(ci);
    mx.C(ci) = signed_area(poly);
    const int n = static_cast<int>(mesh.cells[ci].size());
    for (int i = 0; i < n; ++i) {
      const int f = dm.free_index[mesh.cell_edges[ci][i]];
      if (f < 0) continue;
      const double len = dist(poly[i], poly[(i + 1) % n]);
      tb.emplace_back(ci, f, mesh.orientation_sign(ci, i) * len);
    }
  }
  mx.Bt.resize(mesh.n_cells(), dm.n_free);
  mx.Bt.setFromTriplets(tb.begin(), tb.end());
  return mx;
}

struct EquivalenceReport {
  double max_eigenvalue_discrepancy = 0.0;  // relative, over compared modes
  double max_u_relation_residual = 0.0;     // cellwise |u_h - (-div w_h / lambda_h)|
  double factorization_identity_error = 0.0;  // ||B - Bt^T C^{-1} Bt||_max
  int compared_modes = 0;
};

/// Verifies numerically that the mixed problem has the same positive spectrum
/// as the primal one. The mixed eigenproblem is reduced by the Schur
/// complement to (Bt A^{-1} Bt^T) u = lambda C u on the pressure space; for
/// dense-feasible sizes this is solved directly and compared mode by mode.
inline EquivalenceReport check_equivalence(const PolygonalMesh& mesh,
                                           const std::vector<EigenPair>& primal_pairs,
                                           double zero_tol = 1e-10) {
  EquivalenceReport rep;
  const DofMap dm = build_dof_map(mesh, 0);
  const MixedSystem mx = assemble_mixed(mesh, dm);
  const GlobalSystem sys = assemble(mesh, dm);

  // algebraic identity B = Bt^T C^{-1} Bt
  {
    const Eigen::MatrixXd Bt = Eigen::MatrixXd(mx.Bt);
    const Eigen::MatrixXd lhs = Eigen::MatrixXd(sys.B);
    const Eigen::MatrixXd rhs = Bt.transpose() * mx.C.cwiseInverse().asDiagonal() * Bt;
    rep.factorization_identity_error = (lhs - rhs).cwiseAbs().maxCoeff();
  }

  // Schur-complement eigenproblem on the pressure space
  const Eigen::MatrixXd A = Eigen::MatrixXd(mx.A);
  const Eigen::MatrixXd Bt = Eigen::MatrixXd(mx.Bt);
  const Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw SolveFailure("a_h block not positive definite");
  const Eigen::MatrixXd S = Bt * llt.solve(Bt.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      S, Eigen::MatrixXd(mx.C.asDiagonal()));
  if (es.info() != Eigen::Success) throw SolveFailure("mixed eigendecomposition failed");

  std::vector<double> mixed_pos;
  std::vector<Eigen::VectorXd> mixed_u;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > zero_tol) {
      mixed_pos.push_back(es.eigenvalues()(i));
      mixed_u.push_back(es.eigenvectors().col(i));
    }
  }

  rep.compared_modes = static_cast<int>(std::min(primal_pairs.size(), mixed_pos.size()));
  for (int m = 0; m < rep.compared_modes; ++m) {
    const double lp = primal_pairs[m].lambda;
    const double lm = mixed_pos[m];
    rep.max_eigenvalue_discrepancy =
        std::max(rep.max_eigenvalue_discrepancy, std::abs(lp - lm) / std::abs(lp));
    // recover w = -A^{-1} Bt^T u and check u = -div w / lambda cellwise
    const Eigen::VectorXd u = mixed_u[m];
    const Eigen::VectorXd w = -llt.solve(Bt.transpose() * u);
    const Eigen::VectorXd divw = mx.C.cwiseInverse().asDiagonal() * (Bt * w);
    const Eigen::VectorXd viol = (u + divw / lm).cwiseAbs();
    rep.max_u_relation_residual =
        std::max(rep.max_u_relation_residual, viol.maxCoeff() / u.cwiseAbs().maxCoeff());
  }
  return rep;
}

/// Direct dense solve of the indefinite saddle-point eigenproblem
///   [A Bt^T; Bt 0] [w; u] = lambda [0 0; 0 -C] [w; u],
/// retained as a cross-check on small systems (<= ~200 DOFs).
inline std::vector<double> saddle_point_eigenvalues(const PolygonalMesh& mesh, int n_modes,
                                                    double zero_tol = 1e-8) {
  const DofMap dm = build_dof_map(mesh, 0);
  const MixedSystem mx = assemble_mixed(mesh, dm);
  const int nf = dm.n_free;
  const int nc = mesh.n_cells();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nf + nc, nf + nc);
  K.topLeftCorner(nf, nf) = Eigen::MatrixXd(mx.A);
  K.topRightCorner(nf, nc) = Eigen::MatrixXd(mx.Bt).transpose();
  K.bottomLeftCorner(nc, nf) = Eigen::MatrixXd(mx.Bt);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nf + nc, nf + nc);
  R.bottomRightCorner(nc, nc) = -Eigen::MatrixXd(mx.C.asDiagonal());
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(K, R);
  if (ges.info() != Eigen::Success) throw SolveFailure("saddle-point QZ failed");
  std::vector<double> lams;
  for (int i = 0; i < ges.alphas().size(); ++i) {
    const std::complex<double> a = ges.alphas()(i);
    const double b = ges.betas()(i);
    if (std::abs(b) < 1e-14) continue;  // infinite eigenvalue (kernel block)
    const std::complex<double> lam = a / b;
    if (std::abs(lam.imag()) > 1e-8 * std::max(1.0, std::abs(lam.real()))) continue;
    if (lam.real() > zero_tol) lams.push_back(lam.real());
  }
  std::sort(lams.begin(), lams.end());
  if (static_cast<int>(lams.size()) > n_modes) lams.resize(n_modes);
  return lams;
}

}  // namespace avem

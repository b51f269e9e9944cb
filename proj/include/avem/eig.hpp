#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "avem/assemble.hpp"

namespace avem {

/// One converged discrete eigenpair. The eigenvector is normalized so that
/// ||u_h||_0 = ||div w_h||_0 / lambda = 1, with the sign fixed by the first
/// nonzero pressure component.
struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXd w;
  double residual = 0.0;
};

struct SolverConfig {
  int n_eigs = 1;
  double shift = 1.0;            // sigma > 0; zero modes land at sigma in the shifted pencil
  int dense_threshold = 2000;    // dense generalized eigendecomposition below this size
  double zero_tol = 1e-8;        // |lambda| < zero_tol * shift is treated as the kernel
  int max_iter = 200;            // Krylov expansion steps
  int krylov_dim = 180;          // max subspace size
};

namespace detail {

inline void fix_sign_and_normalize(const GlobalSystem& sys, EigenPair& pair) {
  const FieldReconstruction f =
      reconstruct_fields(*sys.mesh, sys.dofmap, pair.w, pair.lambda, /*want_u=*/false);
  double un2 = 0.0, pmax = 0.0;
  std::vector<double> areas(sys.mesh->n_cells());
  for (int ci = 0; ci < sys.mesh->n_cells(); ++ci) {
    areas[ci] = signed_area(sys.mesh->cell_polygon(ci));
    un2 += areas[ci] * f.p[ci] * f.p[ci];
    pmax = std::max(pmax, std::abs(f.p[ci]));
  }
  un2 /= pair.lambda * pair.lambda;  // ||u||^2 = ||p/lambda||^2
  double scale = 1.0 / std::sqrt(un2);
  for (int ci = 0; ci < sys.mesh->n_cells(); ++ci) {
    if (std::abs(f.p[ci]) > 1e-12 * pmax) {
      if (f.p[ci] < 0.0) scale = -scale;
      break;
    }
  }
  pair.w *= scale;
}

inline double relative_residual(const GlobalSystem& sys, double lambda, const Eigen::VectorXd& x) {
  const Eigen::VectorXd bx = sys.B * x;
  const Eigen::VectorXd r = bx - lambda * (sys.M * x);
  const double nb = bx.norm();
  return nb > 0.0 ? r.norm() / nb : r.norm();
}

inline std::vector<EigenPair> solve_dense(const GlobalSystem& sys, const SolverConfig& cfg) {
  const Eigen::MatrixXd B = Eigen::MatrixXd(sys.B);
  const Eigen::MatrixXd M = Eigen::MatrixXd(sys.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, M);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("dense eigendecomposition failed");
  std::vector<EigenPair> out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < cfg.zero_tol * cfg.shift) continue;  // kernel cluster (and numeric negatives)
    EigenPair p;
    p.lambda = lam;
    p.w = es.eigenvectors().col(i);
    fix_sign_and_normalize(sys, p);
    p.residual = relative_residual(sys, p.lambda, p.w);
    out.push_back(std::move(p));
    if (static_cast<int>(out.size()) == cfg.n_eigs) break;
  }
  if (static_cast<int>(out.size()) < cfg.n_eigs)
    throw InsufficientSpectrum("fewer positive modes than requested");
  return out;
}

// Shift-invert block Krylov with full reorthogonalization in the M inner
// product: Rayleigh-Ritz on span{V, Op V, ...} with Op = (B + sigma M)^{-1} M.
// The huge zero eigenspace of B collapses to at most `block` directions at
// nu = 1/sigma, so the wanted modes sit directly below the top of Op's
// spectrum.
inline std::vector<EigenPair> solve_krylov(const GlobalSystem& sys, const SolverConfig& cfg) {
  const int n = sys.n();
  const int block = 3;
  const int max_m = std::min(n, std::max(cfg.krylov_dim, 6 * cfg.n_eigs + 30));

  Eigen::SparseMatrix<double> K = sys.B + cfg.shift * sys.M;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw ConvergenceFailure("factorization of B + sigma M failed");

  Eigen::MatrixXd V(n, 0);   // M-orthonormal basis
  Eigen::MatrixXd MV(n, 0);  // M * V, cached
  Eigen::MatrixXd T(0, 0);   // projected operator V^T M Op V

  auto append_block = [&](Eigen::MatrixXd Z) {
    // full reorthogonalization (twice) + M-orthonormalization within the block
    std::vector<int> kept;
    for (int pass = 0; pass < 2; ++pass)
      if (V.cols() > 0) Z -= V * (MV.transpose() * Z);
    for (int c = 0; c < Z.cols(); ++c) {
      Eigen::VectorXd z = Z.col(c);
      for (int prev : kept) {
        const Eigen::VectorXd mzk = sys.M * Z.col(prev);
        z -= Z.col(prev) * (mzk.dot(z));
      }
      const Eigen::VectorXd mz = sys.M * z;
      const double nz = std::sqrt(std::max(0.0, z.dot(mz)));
      if (nz < 1e-12) continue;  // linearly dependent direction; drop
      z /= nz;
      Z.col(c) = z;
      kept.push_back(c);
    }
    if (kept.empty()) return false;
    Eigen::MatrixXd Vnew(n, kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) Vnew.col(i) = Z.col(kept[i]);
    const int m0 = static_cast<int>(V.cols());
    const int mb = static_cast<int>(Vnew.cols());
    V.conservativeResize(n, m0 + mb);
    MV.conservativeResize(n, m0 + mb);
    V.rightCols(mb) = Vnew;
    for (int c = 0; c < mb; ++c) MV.col(m0 + c) = sys.M * Vnew.col(c);
    // extend projected matrix: columns Op * v_new
    Eigen::MatrixXd OpVnew(n, mb);
    for (int c = 0; c < mb; ++c) OpVnew.col(c) = ldlt.solve(MV.col(m0 + c));
    T.conservativeResize(m0 + mb, m0 + mb);
    const Eigen::MatrixXd Tnew = MV.transpose() * OpVnew;  // (m0+mb) x mb
    T.rightCols(mb) = Tnew;
    T.bottomLeftCorner(mb, m0) = Tnew.topRows(m0).transpose();
    return true;
  };

  // deterministic start block: all-ones plus fixed patterns
  Eigen::MatrixXd V0(n, block);
  for (int i = 0; i < n; ++i) {
    V0(i, 0) = 1.0;
    V0(i, 1) = (i % 2 == 0) ? 1.0 : -1.0;
    V0(i, 2) = std::sin(1.0 + i);
  }
  if (!append_block(V0)) throw ConvergenceFailure("start block degenerate");

  std::vector<EigenPair> out;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const int m = static_cast<int>(V.cols());
    // Ritz step
    Eigen::MatrixXd Tsym = 0.5 * (T + T.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tsym);
    // nu descending = wanted modes first (kernel at 1/sigma on top)
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return es.eigenvalues()(a) > es.eigenvalues()(b); });

    out.clear();
    bool all_converged = true;
    for (int oi = 0; oi < m && static_cast<int>(out.size()) < cfg.n_eigs; ++oi) {
      const double nu = es.eigenvalues()(order[oi]);
      if (nu <= 0.0) break;
      const double lam = 1.0 / nu - cfg.shift;
      if (std::abs(lam) < cfg.zero_tol * cfg.shift) continue;  // kernel images
      if (lam < 0.0) continue;
      EigenPair p;
      p.lambda = lam;
      p.w = V * es.eigenvectors().col(order[oi]);
      p.residual = relative_residual(sys, lam, p.w);
      if (p.residual > 1e-9 && m < n) {
        all_converged = false;
        break;
      }
      out.push_back(std::move(p));
    }
    if (all_converged && static_cast<int>(out.size()) == cfg.n_eigs) {
      for (EigenPair& p : out) {
        fix_sign_and_normalize(sys, p);
        p.residual = relative_residual(sys, p.lambda, p.w);
      }
      return out;
    }
    if (m >= max_m) break;
    // expand with Op applied to the newest block
    const int mb = std::min(block, m);
    Eigen::MatrixXd Z(n, mb);
    for (int c = 0; c < mb; ++c) Z.col(c) = ldlt.solve(MV.col(m - mb + c));
    if (!append_block(std::move(Z))) break;
  }
  throw ConvergenceFailure("Krylov iteration did not converge within the subspace budget");
}

}  // namespace detail

/// Smallest positive eigenvalues of B x = lambda M x in ascending order,
/// skipping the divergence-free kernel.
inline std::vector<EigenPair> solve_smallest_positive(const GlobalSystem& sys,
                                                      const SolverConfig& cfg = {}) {
  if (sys.n() == 0) throw InsufficientSpectrum("empty system");
  if (!(cfg.shift > 0.0)) throw ConfigError("shift must be positive");
  const int max_modes = sys.mesh ? sys.mesh->n_cells() - 1 : sys.n();
  if (cfg.n_eigs > max_modes)
    throw InsufficientSpectrum("requested more modes than #cells - 1");
  if (sys.n() <= cfg.dense_threshold) return detail::solve_dense(sys, cfg);
  return detail::solve_krylov(sys, cfg);
}

/// Number of (numerically) zero generalized eigenvalues; dense sizes only.
inline int kernel_dimension(const GlobalSystem& sys, double zero_tol = 1e-8,
                            int dense_threshold = 2000) {
  if (sys.n() == 0) return 0;
  if (sys.n() > dense_threshold) throw SizeExceeded("kernel_dimension requires a dense-feasible system");
  const Eigen::MatrixXd B = Eigen::MatrixXd(sys.B);
  const Eigen::MatrixXd M = Eigen::MatrixXd(sys.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, M, Eigen::EigenvaluesOnly);
  int k = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) < zero_tol) ++k;
  return k;
}

/// Multiplicity clusters among ascending eigenvalues (relative gap tolerance).
inline std::vector<int> cluster_multiplicities(const std::vector<EigenPair>& pairs,
                                               double rel_tol = 1e-8) {
  std::vector<int> mult;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0 && std::abs(pairs[i].lambda - pairs[i - 1].lambda) <=
                     rel_tol * std::max(1.0, std::abs(pairs[i].lambda)))
      ++mult.back();
    else
      mult.push_back(1);
  }
  return mult;
}

}  // namespace avem

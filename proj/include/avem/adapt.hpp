#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "avem/eig.hpp"
#include "avem/estimator.hpp"
#include "avem/generate.hpp"

namespace avem {

enum class RunMode { uniform, adaptive };

struct RunConfig {
  DomainSpec domain;
  MeshPattern pattern = MeshPattern::triangles;
  int resolution = 4;
  std::uint64_t seed = 0;
  RunMode mode = RunMode::adaptive;
  int eig_index = 1;        // 1-based among the positive eigenvalues
  double theta_mark = 0.5;
  int max_ndof = 20000;
  int max_steps = 40;
  SolverConfig solver;
  bool mark_on_squared = false;  // maximum strategy on eta_K^2 instead of eta_K
};

struct StepRecord {
  int n = 0;  // free DOFs
  double lambda_h = 0.0;
  double eta_sq = 0.0;
  double theta_sq = 0.0;
  double jump_sq = 0.0;
  std::optional<double> error;        // |lambda_ref - lambda_h|, filled after extrapolation
  std::optional<double> effectivity;  // error / eta^2
};

struct ConvergenceHistory {
  std::vector<StepRecord> steps;
  std::string failure;  // non-empty when the run stopped on an error
  bool failed() const { return !failure.empty(); }
};

struct ExtrapolationResult {
  double lambda_star = 0.0;
  double coefficient = 0.0;
  double alpha = 0.0;
  double fit_residual = 0.0;
};

/// Fits lambda_h(N) = lambda* + C * N^(-alpha) over the last max(4, n-2)
/// steps: alpha by grid search on [0.3, 2.0] (step 0.005), (lambda*, C) by
/// closed-form least squares at each alpha.
inline ExtrapolationResult extrapolate(const ConvergenceHistory& hist) {
  const int n = static_cast<int>(hist.steps.size());
  if (n < 4) throw InsufficientData("extrapolation needs at least 4 steps");
  const int use = std::max(4, n - 2);
  const int first = n - use;
  std::vector<double> N(use), L(use);
  for (int i = 0; i < use; ++i) {
    N[i] = hist.steps[first + i].n;
    L[i] = hist.steps[first + i].lambda_h;
  }
  ExtrapolationResult best;
  double best_r = std::numeric_limits<double>::max();
  for (double alpha = 0.3; alpha <= 2.0 + 1e-12; alpha += 0.005) {
    // least squares for lambda_h = a + c * N^(-alpha)
    double s1 = use, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (int i = 0; i < use; ++i) {
      const double x = std::pow(N[i], -alpha);
      sx += x; sxx += x * x; sy += L[i]; sxy += x * L[i];
    }
    const double det = s1 * sxx - sx * sx;
    if (std::abs(det) < 1e-300) continue;
    const double a = (sxx * sy - sx * sxy) / det;
    const double c = (s1 * sxy - sx * sy) / det;
    double r = 0.0;
    for (int i = 0; i < use; ++i) {
      const double e = a + c * std::pow(N[i], -alpha) - L[i];
      r += e * e;
    }
    if (r < best_r) {
      best_r = r;
      best = {a, c, alpha, std::sqrt(r)};
    }
  }
  return best;
}

/// Least-squares slope of log|lambda_ref - lambda_h| against log N over the
/// last half of the history.
inline double estimate_rate(const ConvergenceHistory& hist, double lambda_ref) {
  const int n = static_cast<int>(hist.steps.size());
  std::vector<double> lx, ly;
  for (int i = n / 2; i < n; ++i) {
    const double err = std::abs(lambda_ref - hist.steps[i].lambda_h);
    if (err <= 0.0) continue;
    lx.push_back(std::log(static_cast<double>(hist.steps[i].n)));
    ly.push_back(std::log(err));
  }
  if (lx.size() < 3) throw InsufficientData("rate estimate needs >= 3 steps with nonzero error");
  const int m = static_cast<int>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Everything the driver knows about one completed step; handed to the
/// observer before the mesh is refined.
struct StepContext {
  int step = 0;
  const PolygonalMesh* mesh = nullptr;
  const DofMap* dofmap = nullptr;
  const EigenPair* pair = nullptr;
  const EstimatorReport* report = nullptr;
  const std::set<int>* marked = nullptr;
};

using StepObserver = std::function<void(const StepContext&)>;

namespace detail {

inline int select_tracked_mode(const PolygonalMesh& mesh, const DofMap& dm,
                               const std::vector<EigenPair>& pairs, int default_index,
                               const std::vector<double>& prev_u, const std::vector<int>& parent) {
  if (prev_u.empty()) return default_index;
  std::vector<double> areas(mesh.n_cells());
  for (int ci = 0; ci < mesh.n_cells(); ++ci) areas[ci] = signed_area(mesh.cell_polygon(ci));
  double prev_norm_sq = 0.0;
  std::vector<double> uo(mesh.n_cells());
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    uo[ci] = prev_u[parent[ci]];
    prev_norm_sq += areas[ci] * uo[ci] * uo[ci];
  }
  int best = default_index;
  double best_corr = -1.0;
  for (int k = 0; k < static_cast<int>(pairs.size()); ++k) {
    const FieldReconstruction f = reconstruct_fields(mesh, dm, pairs[k].w, pairs[k].lambda);
    double num = 0.0, nrm = 0.0;
    for (int ci = 0; ci < mesh.n_cells(); ++ci) {
      num += areas[ci] * f.u[ci] * uo[ci];
      nrm += areas[ci] * f.u[ci] * f.u[ci];
    }
    const double den = std::sqrt(nrm * prev_norm_sq);
    const double corr = den > 0.0 ? std::abs(num) / den : 0.0;
    if (corr > best_corr) {
      best_corr = corr;
      best = k;
    }
  }
  return best;
}

}  // namespace detail

/// Drives the solve -> estimate -> mark -> refine loop. Deterministic for a
/// fixed config. The tracked mode is re-identified each step by correlating
/// u_h with the previous step's field (cell-constant injection through the
/// refinement parent map), which guards against eigenvalue crossings.
inline ConvergenceHistory run(const RunConfig& cfg, const StepObserver& observer = {}) {
  ConvergenceHistory hist;
  if (cfg.eig_index < 1) throw ConfigError("eig_index must be >= 1");
  PolygonalMesh mesh;
  std::vector<double> prev_u;
  std::vector<int> parent;

  try {
    mesh = generate_mesh(cfg.domain, cfg.pattern, cfg.resolution, cfg.seed);
    for (int step = 0; step < cfg.max_steps; ++step) {
      const DofMap dm = build_dof_map(mesh, 0);
      if (step > 0 && dm.n_free > cfg.max_ndof) break;
      SolverConfig scfg = cfg.solver;
      scfg.n_eigs = std::min(cfg.eig_index + 3, mesh.n_cells() - 1);
      if (scfg.n_eigs < cfg.eig_index) throw InsufficientSpectrum("mesh too coarse for eig_index");
      const GlobalSystem sys = assemble(mesh, dm);
      const std::vector<EigenPair> pairs = solve_smallest_positive(sys, scfg);
      const int sel = detail::select_tracked_mode(mesh, dm, pairs, cfg.eig_index - 1, prev_u, parent);
      const EigenPair& pair = pairs[sel];

      const EstimatorReport rep = local_indicators(mesh, dm, pair.w);
      StepRecord rec;
      rec.n = dm.n_free;
      rec.lambda_h = pair.lambda;
      rec.eta_sq = rep.eta * rep.eta;
      rec.theta_sq = rep.theta_total;
      rec.jump_sq = rep.jump_total;
      hist.steps.push_back(rec);

      std::set<int> marked;
      if (cfg.mode == RunMode::uniform) {
        for (int c = 0; c < mesh.n_cells(); ++c) marked.insert(c);
      } else {
        marked = mark_cells(rep.indicators, cfg.theta_mark, cfg.mark_on_squared);
      }

      if (observer) {
        StepContext ctx{step, &mesh, &dm, &pair, &rep, &marked};
        observer(ctx);
      }

      if (step + 1 >= cfg.max_steps || dm.n_free >= cfg.max_ndof) break;

      const FieldReconstruction f = reconstruct_fields(mesh, dm, pair.w, pair.lambda);
      RefinementResult ref = refine_cells(mesh, marked);
      prev_u = f.u;
      parent = std::move(ref.parent);
      mesh = std::move(ref.mesh);
    }
  } catch (const Error& e) {
    hist.failure = e.what();
    return hist;
  }

  // error/effectivity columns against the extrapolated reference
  if (hist.steps.size() >= 4) {
    const ExtrapolationResult ex = extrapolate(hist);
    for (StepRecord& r : hist.steps) {
      r.error = std::abs(ex.lambda_star - r.lambda_h);
      if (r.eta_sq > 0.0) r.effectivity = *r.error / r.eta_sq;
    }
  }
  return hist;
}

}  // namespace avem

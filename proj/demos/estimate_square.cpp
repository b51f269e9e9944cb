// Smallest acoustic eigenvalue of the unit square cavity on a sequence of
// uniformly refined quad meshes, compared against the separable reference
// value pi^2.
#include <cstdio>
#include <numbers>

#include "avem/avem.hpp"

int main() {
  using namespace avem;
  const double exact = std::numbers::pi * std::numbers::pi;
  PolygonalMesh mesh = generate_mesh(make_domain(DomainName::unit_square), MeshPattern::squares, 8);
  std::printf("%8s %10s %14s %12s\n", "cells", "N", "lambda_h1", "rel.err");
  for (int step = 0; step < 4; ++step) {
    const DofMap dm = build_dof_map(mesh, 0);
    const GlobalSystem sys = assemble(mesh, dm);
    SolverConfig cfg;
    cfg.n_eigs = 1;
    const auto pairs = solve_smallest_positive(sys, cfg);
    std::printf("%8d %10d %14.8f %12.3e\n", mesh.n_cells(), dm.n_free, pairs[0].lambda,
                std::abs(pairs[0].lambda - exact) / exact);
    mesh = uniform_refine(mesh).mesh;
  }
  return 0;
}

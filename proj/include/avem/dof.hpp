#pragma once

#include <vector>

#include "avem/mesh.hpp"

namespace avem {

/// Degree-of-freedom map for the lowest-order space: one DOF per edge, the
/// edge-average normal trace. Global DOFs are oriented along each edge's
/// stored normal; a cell sees the DOF through the sign sigma = +1 when the
/// global normal is its outward normal.
struct DofMap {
  int k = 0;
  int n_total = 0;               // all edge DOFs
  int n_free = 0;                // after eliminating boundary DOFs
  std::vector<int> free_index;   // edge -> free DOF index, -1 on the boundary
  std::vector<bool> boundary;    // edge -> on Gamma

  int n_boundary() const { return n_total - n_free; }
};

inline DofMap build_dof_map(const PolygonalMesh& mesh, int k = 0) {
  if (k != 0) throw UnsupportedDegree("only k = 0 is implemented");
  DofMap dm;
  dm.k = 0;
  dm.n_total = mesh.n_edges();
  dm.free_index.assign(dm.n_total, -1);
  dm.boundary.assign(dm.n_total, false);
  // deterministic ordering: free DOFs sorted by edge index
  for (int e = 0; e < dm.n_total; ++e) {
    if (mesh.edges[e].boundary())
      dm.boundary[e] = true;
    else
      dm.free_index[e] = dm.n_free++;
  }
  return dm;
}

}  // namespace avem

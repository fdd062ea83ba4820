#pragma once

#include <Eigen/Sparse>

#include "siglab/geometry.hpp"
#include "siglab/mesh.hpp"
#include "siglab/scalar_solver.hpp"

// Internal P1 helpers shared by the scalar and elastic assembly paths.
namespace siglab::fe {

struct P1Gradients {
  Vec2 g[3];
  double area = 0.0;
};

// Hat-function gradients on one CCW triangle: grad phi_i is the 90 degree
// rotation of the opposite edge over twice the area.
inline P1Gradients hat_gradients(const Mesh& mesh, int t) {
  const Vec2 a = mesh.verts[mesh.tris[t][0]];
  const Vec2 b = mesh.verts[mesh.tris[t][1]];
  const Vec2 c = mesh.verts[mesh.tris[t][2]];
  const double two_area = cross(b - a, c - a);
  if (!(two_area > 0.0)) throw GeometryError("degenerate triangle in assembly");
  P1Gradients out;
  out.area = 0.5 * two_area;
  out.g[0] = perp(c - b) / two_area;
  out.g[1] = perp(a - c) / two_area;
  out.g[2] = perp(b - a) / two_area;
  return out;
}

inline Eigen::SparseMatrix<double> csr_to_eigen(const DiscreteVI& vi) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(vi.values.size());
  for (int i = 0; i < vi.n; ++i)
    for (int k = vi.row_ptr[i]; k < vi.row_ptr[i + 1]; ++k)
      trips.emplace_back(i, vi.col_idx[k], vi.values[k]);
  Eigen::SparseMatrix<double> K(vi.n, vi.n);
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

}  // namespace siglab::fe

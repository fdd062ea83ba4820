#pragma once

#include <array>
#include <functional>
#include <vector>

#include "siglab/mesh.hpp"
#include "siglab/scalar_solver.hpp"
#include "siglab/vec2.hpp"

namespace siglab {

using VectorField = std::function<Vec2(Vec2)>;

struct LameParams {
  double mu = 1.0;
  double lambda = 1.0;
};

/// Infinitesimal rigid motion x -> c + omega * perp(x).
struct RigidMotion {
  Vec2 c{0.0, 0.0};
  double omega = 0.0;
  Vec2 apply(Vec2 p) const { return c + omega * perp(p); }
};

struct RigidFit {
  RigidMotion motion;
  double residual_linf = 0.0;
  double residual_l2 = 0.0;  // root mean square over the samples
};

/// Least-squares fit of a rigid motion to sampled boundary values.
RigidFit fit_rigid_motion(const std::vector<Vec2>& points, const std::vector<Vec2>& values);

struct ElasticSolution {
  std::vector<Vec2> u;  // per mesh vertex
  // Integrated normal traction at obstacle vertices (nonpositive where the
  // body presses on the obstacle), zero elsewhere.
  std::vector<double> p_normal;
  // Integrated tangential traction at obstacle vertices; vanishes to
  // roundoff because sliding is frictionless.
  std::vector<double> p_tangent;
  std::vector<int> active;  // obstacle vertices with the normal gap closed
  int iterations = 0;
  bool converged = false;
};

/// Vector P1 assembly with Dirichlet data g on outer and gamma vertices.
/// Obstacle vertices are rotated into their (normal, tangent) frame and the
/// normal component carries the bound u_n <= 0 (bound_sign -1).
DiscreteVI build_elastic_vi(const Mesh& mesh, const VectorField& g,
                            const LameParams& mat = LameParams{});

/// Primal-dual active set iteration for frictionless contact.
ElasticSolution solve_elastic(const Mesh& mesh, const VectorField& g,
                              const LameParams& mat = LameParams{},
                              const SolverOptions& opts = SolverOptions{});

/// Pointwise normal traction at obstacle vertices: p_normal over half the
/// length of the incident obstacle edges. Zero away from the obstacle.
std::vector<double> normal_traction(const Mesh& mesh, const ElasticSolution& sol);

/// Per-triangle stress in Voigt order (sxx, syy, sxy).
std::array<double, 3> element_stress(const Mesh& mesh, const std::vector<Vec2>& u, int t,
                                     const LameParams& mat);

/// Per-boundary-edge traction sigma . outward from the one incident
/// triangle, indexed like mesh.bedges.
std::vector<Vec2> boundary_edge_traction(const Mesh& mesh, const std::vector<Vec2>& u,
                                         const LameParams& mat);

/// Integral of sigma(u) : eps(u) over the whole mesh.
double stress_energy(const Mesh& mesh, const std::vector<Vec2>& u, const LameParams& mat);

}  // namespace siglab

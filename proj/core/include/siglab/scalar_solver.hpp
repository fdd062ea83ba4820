#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "siglab/mesh.hpp"
#include "siglab/vec2.hpp"

namespace siglab {

using ScalarField = std::function<double(Vec2)>;

/// Assembled unilateral problem after Dirichlet elimination: minimize
/// 1/2 u'Ku - rhs'u over the free dofs subject to a one-sided bound at the
/// constrained dofs (u >= 0 when bound_sign is +1, u <= 0 when -1). K is
/// CSR with sorted column indices.
///
/// The scalar assembly has one dof per free vertex. The vector assembly has
/// two: dof_component says which one (x/y in general, normal/tangent at
/// obstacle vertices), vertex_to_dof is indexed by 2 * vertex + component
/// and dirichlet by the same, both components of a boundary vertex fixed
/// together.
struct DiscreteVI {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;
  std::vector<double> rhs;
  std::vector<int> constrained;  // dof ids carrying the one-sided bound
  int bound_sign = 1;
  double data_scale = 0.0;  // max absolute Dirichlet value
  std::vector<int> dof_to_vertex;
  std::vector<std::int8_t> dof_component;  // empty for the scalar assembly
  std::vector<int> vertex_to_dof;
  std::vector<double> dirichlet;
  std::vector<std::uint8_t> is_fixed;  // per vertex
};

struct ScalarSolution {
  std::vector<double> u;       // per mesh vertex
  std::vector<double> lambda;  // per-vertex reaction, supported on the obstacle
  std::vector<int> active;     // obstacle vertices pressed onto the bound
  int iterations = 0;
  bool converged = false;
};

struct SolverOptions {
  int max_iterations = 50;
  double c_active = 1.0;  // weight in the active-set indicator lambda - c u
  // Indicator threshold relative to the data scale. Nonzero so that exactly
  // grazing contact (indicator at roundoff) cannot chatter the active set.
  double active_threshold_rel = 1e-12;
};

/// P1 stiffness assembly with the Dirichlet data f imposed on outer and
/// gamma boundary vertices; obstacle vertices become constrained dofs.
DiscreteVI build_discrete_vi(const Mesh& mesh, const ScalarField& f);

/// Primal-dual active set iteration. Throws on assembly errors; a
/// non-converged run is reported, not thrown.
ScalarSolution solve_scalar(const Mesh& mesh, const ScalarField& f,
                            const SolverOptions& opts = SolverOptions{});

/// Pointwise normal flux at obstacle vertices from the discrete reactions:
/// lambda_v divided by half the length of the incident obstacle edges.
/// Zero away from the obstacle.
std::vector<double> reaction_flux(const Mesh& mesh, const ScalarSolution& sol);

/// Per-boundary-edge normal flux grad(u) . outward from the one incident
/// triangle, indexed like mesh.bedges.
std::vector<double> boundary_edge_flux(const Mesh& mesh, const std::vector<double>& u);

/// Integral of |grad u_h|^2 over the whole mesh.
double gradient_energy(const Mesh& mesh, const std::vector<double>& u);

/// L2 norms over the mesh by edge-midpoint quadrature (exact through
/// quadratics).
double l2_error(const Mesh& mesh, const std::vector<double>& u, const ScalarField& exact);
double l2_norm(const Mesh& mesh, const ScalarField& g);

}  // namespace siglab

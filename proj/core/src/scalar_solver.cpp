#include "siglab/scalar_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "siglab/geometry.hpp"
#include "p1.hpp"

namespace siglab {
namespace {

using fe::P1Gradients;
using fe::hat_gradients;

Vec2 field_gradient(const Mesh& mesh, const std::vector<double>& u, int t) {
  const P1Gradients hg = hat_gradients(mesh, t);
  Vec2 g{0.0, 0.0};
  for (int i = 0; i < 3; ++i) g = g + u[mesh.tris[t][i]] * hg.g[i];
  return g;
}

}  // namespace

DiscreteVI build_discrete_vi(const Mesh& mesh, const ScalarField& f) {
  const int nv = mesh.n_verts();
  DiscreteVI vi;
  vi.is_fixed.assign(nv, 0);
  vi.dirichlet.assign(nv, 0.0);
  for (const int v : tagged_vertices(mesh, {BoundaryTag::kOuter, BoundaryTag::kGamma})) {
    vi.is_fixed[v] = 1;
    vi.dirichlet[v] = f(mesh.verts[v]);
    vi.data_scale = std::max(vi.data_scale, std::abs(vi.dirichlet[v]));
  }

  vi.vertex_to_dof.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (vi.is_fixed[v]) continue;
    vi.vertex_to_dof[v] = static_cast<int>(vi.dof_to_vertex.size());
    vi.dof_to_vertex.push_back(v);
  }
  vi.n = static_cast<int>(vi.dof_to_vertex.size());
  vi.rhs.assign(vi.n, 0.0);

  // Row-wise accumulation keeps the CSR deterministic and sorted.
  std::vector<std::map<int, double>> rows(vi.n);
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const P1Gradients hg = hat_gradients(mesh, t);
    for (int i = 0; i < 3; ++i) {
      const int vi_i = mesh.tris[t][i];
      const int di = vi.vertex_to_dof[vi_i];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int vj = mesh.tris[t][j];
        const double kij = hg.area * dot(hg.g[i], hg.g[j]);
        if (vi.is_fixed[vj]) {
          vi.rhs[di] -= kij * vi.dirichlet[vj];
        } else {
          rows[di][vi.vertex_to_dof[vj]] += kij;
        }
      }
    }
  }

  vi.row_ptr.assign(vi.n + 1, 0);
  for (int i = 0; i < vi.n; ++i) vi.row_ptr[i + 1] = vi.row_ptr[i] + static_cast<int>(rows[i].size());
  vi.col_idx.reserve(vi.row_ptr[vi.n]);
  vi.values.reserve(vi.row_ptr[vi.n]);
  for (int i = 0; i < vi.n; ++i) {
    for (const auto& [j, kij] : rows[i]) {
      vi.col_idx.push_back(j);
      vi.values.push_back(kij);
    }
  }

  for (const int v : tagged_vertices(mesh, {BoundaryTag::kObstacle})) {
    if (vi.vertex_to_dof[v] >= 0) vi.constrained.push_back(vi.vertex_to_dof[v]);
  }
  std::sort(vi.constrained.begin(), vi.constrained.end());
  return vi;
}

ScalarSolution solve_scalar(const Mesh& mesh, const ScalarField& f, const SolverOptions& opts) {
  const DiscreteVI vi = build_discrete_vi(mesh, f);
  const Eigen::SparseMatrix<double> K = fe::csr_to_eigen(vi);
  const double threshold = opts.active_threshold_rel * vi.data_scale;

  std::vector<std::uint8_t> constrained_mask(vi.n, 0);
  for (const int d : vi.constrained) constrained_mask[d] = 1;

  std::vector<std::uint8_t> active(vi.n, 0);  // start from the empty active set
  Eigen::VectorXd u = Eigen::VectorXd::Zero(vi.n);
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(vi.n);

  ScalarSolution sol;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    sol.iterations = iter;

    // Subsystem over inactive dofs; active dofs are pinned at zero.
    std::vector<int> sub_of_dof(vi.n, -1);
    std::vector<int> dof_of_sub;
    dof_of_sub.reserve(vi.n);
    for (int i = 0; i < vi.n; ++i) {
      if (active[i]) continue;
      sub_of_dof[i] = static_cast<int>(dof_of_sub.size());
      dof_of_sub.push_back(i);
    }
    const int ns = static_cast<int>(dof_of_sub.size());

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs_sub(ns);
    for (int s = 0; s < ns; ++s) {
      const int i = dof_of_sub[s];
      rhs_sub[s] = vi.rhs[i];
      for (int k = vi.row_ptr[i]; k < vi.row_ptr[i + 1]; ++k) {
        const int j = vi.col_idx[k];
        if (sub_of_dof[j] >= 0) trips.emplace_back(s, sub_of_dof[j], vi.values[k]);
      }
    }
    Eigen::SparseMatrix<double> Ks(ns, ns);
    Ks.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Ks);
    if (ldlt.info() != Eigen::Success) throw GeometryError("stiffness factorization failed");
    const Eigen::VectorXd us = ldlt.solve(rhs_sub);

    u.setZero();
    for (int s = 0; s < ns; ++s) u[dof_of_sub[s]] = us[s];

    // Reactions lambda = K u - rhs vanish on the solved rows up to roundoff
    // and carry the contact force on the pinned rows.
    lam = K * u;
    for (int i = 0; i < vi.n; ++i) lam[i] -= vi.rhs[i];

    std::vector<std::uint8_t> next(vi.n, 0);
    for (const int d : vi.constrained) {
      if (lam[d] - opts.c_active * u[d] > threshold) next[d] = 1;
    }
    if (next == active) {
      sol.converged = true;
      break;
    }
    active = std::move(next);
  }

  sol.u.assign(mesh.n_verts(), 0.0);
  sol.lambda.assign(mesh.n_verts(), 0.0);
  for (int v = 0; v < mesh.n_verts(); ++v) {
    if (vi.is_fixed[v]) {
      sol.u[v] = vi.dirichlet[v];
    } else {
      sol.u[v] = u[vi.vertex_to_dof[v]];
    }
  }
  for (const int d : vi.constrained) {
    if (active[d]) {
      sol.lambda[vi.dof_to_vertex[d]] = lam[d];
      sol.active.push_back(vi.dof_to_vertex[d]);
    }
  }
  std::sort(sol.active.begin(), sol.active.end());
  return sol;
}

std::vector<double> reaction_flux(const Mesh& mesh, const ScalarSolution& sol) {
  std::vector<double> weight(mesh.n_verts(), 0.0);
  for (const BoundaryEdge& be : mesh.bedges) {
    if (be.tag != BoundaryTag::kObstacle) continue;
    const double half = 0.5 * dist(mesh.verts[be.v0], mesh.verts[be.v1]);
    weight[be.v0] += half;
    weight[be.v1] += half;
  }
  std::vector<double> flux(mesh.n_verts(), 0.0);
  for (int v = 0; v < mesh.n_verts(); ++v) {
    if (weight[v] > 0.0) flux[v] = sol.lambda[v] / weight[v];
  }
  return flux;
}

std::vector<double> boundary_edge_flux(const Mesh& mesh, const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != mesh.n_verts())
    throw std::invalid_argument("boundary_edge_flux: field size mismatch");
  std::unordered_map<std::uint64_t, int> owner;
  owner.reserve(mesh.tris.size() * 3);
  const auto dir_key = [](int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  for (int t = 0; t < mesh.n_tris(); ++t) {
    for (int e = 0; e < 3; ++e) owner[dir_key(mesh.tris[t][e], mesh.tris[t][(e + 1) % 3])] = t;
  }
  std::vector<double> flux(mesh.bedges.size(), 0.0);
  for (std::size_t k = 0; k < mesh.bedges.size(); ++k) {
    const BoundaryEdge& be = mesh.bedges[k];
    const auto it = owner.find(dir_key(be.v0, be.v1));
    if (it == owner.end()) throw GeometryError("boundary edge without incident triangle");
    flux[k] = dot(field_gradient(mesh, u, it->second), be.outward);
  }
  return flux;
}

double gradient_energy(const Mesh& mesh, const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != mesh.n_verts())
    throw std::invalid_argument("gradient_energy: field size mismatch");
  double total = 0.0;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const P1Gradients hg = hat_gradients(mesh, t);
    Vec2 g{0.0, 0.0};
    for (int i = 0; i < 3; ++i) g = g + u[mesh.tris[t][i]] * hg.g[i];
    total += hg.area * norm2(g);
  }
  return total;
}

namespace {

// Edge-midpoint rule, exact for quadratics.
template <class F>
double integrate_sq(const Mesh& mesh, const F& value_at) {
  double total = 0.0;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const Vec2 a = mesh.verts[mesh.tris[t][0]];
    const Vec2 b = mesh.verts[mesh.tris[t][1]];
    const Vec2 c = mesh.verts[mesh.tris[t][2]];
    const double area = 0.5 * cross(b - a, c - a);
    const Vec2 mids[3] = {0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)};
    const int vids[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    double s = 0.0;
    for (int m = 0; m < 3; ++m) {
      const double val = value_at(t, mids[m], vids[m][0], vids[m][1]);
      s += val * val;
    }
    total += area * s / 3.0;
  }
  return std::sqrt(std::max(0.0, total));
}

}  // namespace

double l2_error(const Mesh& mesh, const std::vector<double>& u, const ScalarField& exact) {
  if (static_cast<int>(u.size()) != mesh.n_verts())
    throw std::invalid_argument("l2_error: field size mismatch");
  return integrate_sq(mesh, [&](int t, Vec2 p, int i, int j) {
    const double uh = 0.5 * (u[mesh.tris[t][i]] + u[mesh.tris[t][j]]);
    return uh - exact(p);
  });
}

double l2_norm(const Mesh& mesh, const ScalarField& g) {
  return integrate_sq(mesh, [&](int, Vec2 p, int, int) { return g(p); });
}

}  // namespace siglab

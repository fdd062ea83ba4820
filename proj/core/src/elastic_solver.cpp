#include "siglab/elastic_solver.hpp"

#include <Eigen/Cholesky>
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

using fe::hat_gradients;
using fe::P1Gradients;

// Plane-strain Voigt strain of the P1 field on triangle t: (exx, eyy, gxy).
std::array<double, 3> element_strain(const Mesh& mesh, const std::vector<Vec2>& u, int t) {
  const P1Gradients hg = hat_gradients(mesh, t);
  double exx = 0.0, eyy = 0.0, gxy = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2 ui = u[mesh.tris[t][i]];
    exx += ui.x * hg.g[i].x;
    eyy += ui.y * hg.g[i].y;
    gxy += ui.x * hg.g[i].y + ui.y * hg.g[i].x;
  }
  return {exx, eyy, gxy};
}

// Frame per vertex: identity off the obstacle, (normal, tangent) columns on
// it, so the first rotated component is the displacement into the obstacle.
struct VertexFrame {
  Vec2 col0{1.0, 0.0};
  Vec2 col1{0.0, 1.0};
  bool rotated = false;
};

std::vector<VertexFrame> build_frames(const Mesh& mesh) {
  std::vector<VertexFrame> frames(mesh.n_verts());
  for (const int v : tagged_vertices(mesh, {BoundaryTag::kObstacle})) {
    const Vec2 nu = mesh.node_normal[v];
    if (std::abs(norm(nu) - 1.0) > 1e-9)
      throw GeometryError("obstacle vertex without a unit normal");
    frames[v].col0 = nu;
    frames[v].col1 = perp(nu);
    frames[v].rotated = true;
  }
  return frames;
}

}  // namespace

RigidFit fit_rigid_motion(const std::vector<Vec2>& points, const std::vector<Vec2>& values) {
  if (points.size() != values.size() || points.size() < 2)
    throw std::invalid_argument("fit_rigid_motion: need matching sample lists");

  // Normal equations for (cx, cy, omega) against rows
  //   (1, 0, -y) and (0, 1, x).
  double m[3][3] = {{0.0}};
  double b[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2 p = points[i];
    const Vec2 g = values[i];
    m[0][0] += 1.0;
    m[0][2] += -p.y;
    m[1][1] += 1.0;
    m[1][2] += p.x;
    m[2][2] += p.x * p.x + p.y * p.y;
    b[0] += g.x;
    b[1] += g.y;
    b[2] += p.x * g.y - p.y * g.x;
  }
  m[2][0] = m[0][2];
  m[2][1] = m[1][2];

  Eigen::Matrix3d A;
  Eigen::Vector3d rhs;
  for (int r = 0; r < 3; ++r) {
    rhs[r] = b[r];
    for (int c = 0; c < 3; ++c) A(r, c) = m[r][c];
  }
  const Eigen::Vector3d theta = A.ldlt().solve(rhs);

  RigidFit fit;
  fit.motion.c = {theta[0], theta[1]};
  fit.motion.omega = theta[2];
  double sq = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2 r = values[i] - fit.motion.apply(points[i]);
    fit.residual_linf = std::max(fit.residual_linf, norm(r));
    sq += norm2(r);
  }
  fit.residual_l2 = std::sqrt(sq / static_cast<double>(points.size()));
  return fit;
}

DiscreteVI build_elastic_vi(const Mesh& mesh, const VectorField& g, const LameParams& mat) {
  const int nv = mesh.n_verts();
  const std::vector<VertexFrame> frames = build_frames(mesh);

  DiscreteVI vi;
  vi.bound_sign = -1;
  vi.is_fixed.assign(nv, 0);
  vi.dirichlet.assign(2 * nv, 0.0);
  for (const int v : tagged_vertices(mesh, {BoundaryTag::kOuter, BoundaryTag::kGamma})) {
    vi.is_fixed[v] = 1;
    const Vec2 gv = g(mesh.verts[v]);
    vi.dirichlet[2 * v] = gv.x;
    vi.dirichlet[2 * v + 1] = gv.y;
    vi.data_scale = std::max({vi.data_scale, std::abs(gv.x), std::abs(gv.y)});
  }

  vi.vertex_to_dof.assign(2 * nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (vi.is_fixed[v]) continue;
    for (int c = 0; c < 2; ++c) {
      vi.vertex_to_dof[2 * v + c] = static_cast<int>(vi.dof_to_vertex.size());
      vi.dof_to_vertex.push_back(v);
      vi.dof_component.push_back(static_cast<std::int8_t>(c));
    }
  }
  vi.n = static_cast<int>(vi.dof_to_vertex.size());
  vi.rhs.assign(vi.n, 0.0);

  const double d11 = mat.lambda + 2.0 * mat.mu;
  std::vector<std::map<int, double>> rows(vi.n);
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const P1Gradients hg = hat_gradients(mesh, t);

    // 6x6 element stiffness in the xy frame: area * B' D B with Voigt
    // D = [[l+2m, l, 0], [l, l+2m, 0], [0, 0, m]].
    double ke[6][6];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const Vec2 gi = hg.g[i];
        const Vec2 gj = hg.g[j];
        ke[2 * i][2 * j] = hg.area * (d11 * gi.x * gj.x + mat.mu * gi.y * gj.y);
        ke[2 * i][2 * j + 1] = hg.area * (mat.lambda * gi.x * gj.y + mat.mu * gi.y * gj.x);
        ke[2 * i + 1][2 * j] = hg.area * (mat.lambda * gi.y * gj.x + mat.mu * gi.x * gj.y);
        ke[2 * i + 1][2 * j + 1] = hg.area * (d11 * gi.y * gj.y + mat.mu * gi.x * gj.x);
      }
    }

    // Rotate columns and rows belonging to obstacle vertices into their
    // (normal, tangent) frame: K~ = T' K T with T block diagonal.
    double kr[6][6];
    for (int r = 0; r < 6; ++r) {
      for (int jv = 0; jv < 3; ++jv) {
        const VertexFrame& f = frames[mesh.tris[t][jv]];
        kr[r][2 * jv] = ke[r][2 * jv] * f.col0.x + ke[r][2 * jv + 1] * f.col0.y;
        kr[r][2 * jv + 1] = ke[r][2 * jv] * f.col1.x + ke[r][2 * jv + 1] * f.col1.y;
      }
    }
    double kt[6][6];
    for (int c = 0; c < 6; ++c) {
      for (int iv = 0; iv < 3; ++iv) {
        const VertexFrame& f = frames[mesh.tris[t][iv]];
        kt[2 * iv][c] = kr[2 * iv][c] * f.col0.x + kr[2 * iv + 1][c] * f.col0.y;
        kt[2 * iv + 1][c] = kr[2 * iv][c] * f.col1.x + kr[2 * iv + 1][c] * f.col1.y;
      }
    }

    for (int iv = 0; iv < 3; ++iv) {
      const int vt_i = mesh.tris[t][iv];
      for (int ci = 0; ci < 2; ++ci) {
        const int di = vi.vertex_to_dof[2 * vt_i + ci];
        if (di < 0) continue;
        for (int jv = 0; jv < 3; ++jv) {
          const int vt_j = mesh.tris[t][jv];
          for (int cj = 0; cj < 2; ++cj) {
            const double kij = kt[2 * iv + ci][2 * jv + cj];
            if (vi.is_fixed[vt_j]) {
              // Fixed vertices are never rotated, so their Dirichlet values
              // stay in xy components.
              vi.rhs[di] -= kij * vi.dirichlet[2 * vt_j + cj];
            } else {
              rows[di][vi.vertex_to_dof[2 * vt_j + cj]] += kij;
            }
          }
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
    const int d = vi.vertex_to_dof[2 * v];  // normal component
    if (d >= 0) vi.constrained.push_back(d);
  }
  std::sort(vi.constrained.begin(), vi.constrained.end());
  return vi;
}

ElasticSolution solve_elastic(const Mesh& mesh, const VectorField& g, const LameParams& mat,
                              const SolverOptions& opts) {
  const DiscreteVI vi = build_elastic_vi(mesh, g, mat);
  const Eigen::SparseMatrix<double> K = fe::csr_to_eigen(vi);
  const std::vector<VertexFrame> frames = build_frames(mesh);
  const double threshold = opts.active_threshold_rel * vi.data_scale;

  std::vector<std::uint8_t> active(vi.n, 0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(vi.n);
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(vi.n);

  ElasticSolution sol;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    sol.iterations = iter;

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

    lam = K * u;
    for (int i = 0; i < vi.n; ++i) lam[i] -= vi.rhs[i];

    // u_n <= 0 with multiplier lam <= 0: press a dof into contact when the
    // indicator c u_n - lam turns positive.
    std::vector<std::uint8_t> next(vi.n, 0);
    for (const int d : vi.constrained) {
      if (opts.c_active * u[d] - lam[d] > threshold) next[d] = 1;
    }
    if (next == active) {
      sol.converged = true;
      break;
    }
    active = std::move(next);
  }

  sol.u.assign(mesh.n_verts(), Vec2{0.0, 0.0});
  sol.p_normal.assign(mesh.n_verts(), 0.0);
  sol.p_tangent.assign(mesh.n_verts(), 0.0);
  for (int v = 0; v < mesh.n_verts(); ++v) {
    if (vi.is_fixed[v]) {
      sol.u[v] = {vi.dirichlet[2 * v], vi.dirichlet[2 * v + 1]};
      continue;
    }
    const double c0 = u[vi.vertex_to_dof[2 * v]];
    const double c1 = u[vi.vertex_to_dof[2 * v + 1]];
    sol.u[v] = c0 * frames[v].col0 + c1 * frames[v].col1;
  }
  for (const int d : vi.constrained) {
    const int v = vi.dof_to_vertex[d];
    sol.p_tangent[v] = lam[vi.vertex_to_dof[2 * v + 1]];
    if (active[d]) {
      sol.p_normal[v] = lam[d];
      sol.active.push_back(v);
    }
  }
  std::sort(sol.active.begin(), sol.active.end());
  return sol;
}

std::vector<double> normal_traction(const Mesh& mesh, const ElasticSolution& sol) {
  std::vector<double> weight(mesh.n_verts(), 0.0);
  for (const BoundaryEdge& be : mesh.bedges) {
    if (be.tag != BoundaryTag::kObstacle) continue;
    const double half = 0.5 * dist(mesh.verts[be.v0], mesh.verts[be.v1]);
    weight[be.v0] += half;
    weight[be.v1] += half;
  }
  std::vector<double> traction(mesh.n_verts(), 0.0);
  for (int v = 0; v < mesh.n_verts(); ++v) {
    if (weight[v] > 0.0) traction[v] = sol.p_normal[v] / weight[v];
  }
  return traction;
}

std::array<double, 3> element_stress(const Mesh& mesh, const std::vector<Vec2>& u, int t,
                                     const LameParams& mat) {
  const auto [exx, eyy, gxy] = element_strain(mesh, u, t);
  const double d11 = mat.lambda + 2.0 * mat.mu;
  return {d11 * exx + mat.lambda * eyy, mat.lambda * exx + d11 * eyy, mat.mu * gxy};
}

std::vector<Vec2> boundary_edge_traction(const Mesh& mesh, const std::vector<Vec2>& u,
                                         const LameParams& mat) {
  if (static_cast<int>(u.size()) != mesh.n_verts())
    throw std::invalid_argument("boundary_edge_traction: field size mismatch");
  std::unordered_map<std::uint64_t, int> owner;
  owner.reserve(mesh.tris.size() * 3);
  const auto dir_key = [](int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  for (int t = 0; t < mesh.n_tris(); ++t) {
    for (int e = 0; e < 3; ++e) owner[dir_key(mesh.tris[t][e], mesh.tris[t][(e + 1) % 3])] = t;
  }
  std::vector<Vec2> traction(mesh.bedges.size(), Vec2{0.0, 0.0});
  for (std::size_t k = 0; k < mesh.bedges.size(); ++k) {
    const BoundaryEdge& be = mesh.bedges[k];
    const auto it = owner.find(dir_key(be.v0, be.v1));
    if (it == owner.end()) throw GeometryError("boundary edge without incident triangle");
    const auto [sxx, syy, sxy] = element_stress(mesh, u, it->second, mat);
    const Vec2 n = be.outward;
    traction[k] = {sxx * n.x + sxy * n.y, sxy * n.x + syy * n.y};
  }
  return traction;
}

double stress_energy(const Mesh& mesh, const std::vector<Vec2>& u, const LameParams& mat) {
  if (static_cast<int>(u.size()) != mesh.n_verts())
    throw std::invalid_argument("stress_energy: field size mismatch");
  const double d11 = mat.lambda + 2.0 * mat.mu;
  double total = 0.0;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto [exx, eyy, gxy] = element_strain(mesh, u, t);
    const double sxx = d11 * exx + mat.lambda * eyy;
    const double syy = mat.lambda * exx + d11 * eyy;
    const double sxy = mat.mu * gxy;
    const double area = hat_gradients(mesh, t).area;
    total += area * (sxx * exx + syy * eyy + sxy * gxy);
  }
  return total;
}

}  // namespace siglab

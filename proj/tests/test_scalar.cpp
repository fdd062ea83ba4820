#include <doctest.h>

#include <cmath>
#include <numbers>

#include <siglab/geometry.hpp>
#include <siglab/mesh.hpp>
#include <siglab/scalar_solver.hpp>

#include "support/oracles.hpp"

using siglab::BoundarySource;
using siglab::BoundaryTag;
using siglab::Mesh;
using siglab::PolygonalSet;
using siglab::Vec2;

namespace {

PolygonalSet annulus_domain(double r_outer, double r_inner) {
  const PolygonalSet outer = siglab::make_circle({0.0, 0.0}, r_outer, 128, BoundarySource::kOmega);
  const PolygonalSet inner = siglab::make_circle({0.0, 0.0}, r_inner, 64, BoundarySource::kObstacle1);
  return siglab::boolean_op(outer, inner, siglab::BoolOp::kDifference);
}

int count_tag(const Mesh& mesh, BoundaryTag tag) {
  return static_cast<int>(siglab::tagged_vertices(mesh, {tag}).size());
}

double mean_obstacle_flux(const Mesh& mesh, const siglab::ScalarSolution& sol) {
  double force = 0.0, perim = 0.0;
  for (const auto& be : mesh.bedges) {
    if (be.tag != BoundaryTag::kObstacle) continue;
    perim += siglab::dist(mesh.verts[be.v0], mesh.verts[be.v1]);
  }
  for (const int v : siglab::tagged_vertices(mesh, {BoundaryTag::kObstacle}))
    force += sol.lambda[v];
  return force / perim;
}

double mean_gamma_flux(const Mesh& mesh, const std::vector<double>& edge_flux) {
  double acc = 0.0, len = 0.0;
  for (std::size_t k = 0; k < mesh.bedges.size(); ++k) {
    if (mesh.bedges[k].tag != BoundaryTag::kGamma) continue;
    const double l = siglab::dist(mesh.verts[mesh.bedges[k].v0], mesh.verts[mesh.bedges[k].v1]);
    acc += edge_flux[k] * l;
    len += l;
  }
  return acc / len;
}

}  // namespace

TEST_CASE("constant positive data floats free of the obstacles") {
  const PolygonalSet omega = siglab::make_circle({0.0, 0.0}, 1.5, 96, BoundarySource::kOmega);
  PolygonalSet holes = siglab::boolean_op(
      siglab::make_circle({-0.6, 0.3}, 0.25, 32, BoundarySource::kObstacle1),
      siglab::make_circle({0.5, 0.4}, 0.2, 32, BoundarySource::kObstacle1),
      siglab::BoolOp::kUnion);
  holes = siglab::boolean_op(
      holes, siglab::make_circle({0.1, -0.6}, 0.3, 32, BoundarySource::kObstacle1),
      siglab::BoolOp::kUnion);
  const PolygonalSet domain = siglab::boolean_op(omega, holes, siglab::BoolOp::kDifference);

  const Mesh mesh = siglab::triangulate(domain, 0.125);
  const auto sol = siglab::solve_scalar(mesh, [](Vec2) { return 0.5; });

  CHECK(sol.converged);
  CHECK(sol.iterations <= 2);
  CHECK(sol.active.empty());
  double worst_u = 0.0, worst_lambda = 0.0;
  for (int v = 0; v < mesh.n_verts(); ++v) {
    worst_u = std::max(worst_u, std::abs(sol.u[v] - 0.5));
    worst_lambda = std::max(worst_lambda, std::abs(sol.lambda[v]));
  }
  CHECK(worst_u < 1e-10);
  CHECK(worst_lambda < 1e-10);

  const auto flux = siglab::boundary_edge_flux(mesh, sol.u);
  double worst_flux = 0.0;
  for (const double f : flux) worst_flux = std::max(worst_flux, std::abs(f));
  CHECK(worst_flux < 1e-8);
}

TEST_CASE("affine data is reproduced exactly on an unobstructed domain") {
  const PolygonalSet domain = siglab::make_circle({0.0, 0.0}, 1.0, 64, BoundarySource::kOmega);
  const Mesh mesh = siglab::triangulate(domain, 0.1);
  const auto sol = siglab::solve_scalar(mesh, [](Vec2 p) { return p.x; });

  CHECK(sol.converged);
  CHECK(sol.iterations == 1);
  CHECK(sol.active.empty());
  double worst = 0.0;
  for (int v = 0; v < mesh.n_verts(); ++v)
    worst = std::max(worst, std::abs(sol.u[v] - mesh.verts[v].x));
  CHECK(worst < 1e-11);
}

TEST_CASE("radial contact solution matches the closed form") {
  const oracle::RadialSolution rad;
  const auto exact = [&](Vec2 p) { return rad.value(std::max(siglab::norm(p), 1e-12)); };

  const PolygonalSet domain = annulus_domain(1.0, rad.r0);
  const Mesh coarse = siglab::triangulate(domain, 1.0 / 16.0);
  const Mesh fine = siglab::refine(coarse);

  const auto run = [&](const Mesh& mesh) {
    const auto sol = siglab::solve_scalar(mesh, [](Vec2) { return -1.0; });
    REQUIRE(sol.converged);
    CHECK(sol.iterations <= 30);
    return sol;
  };
  const auto sol_c = run(coarse);
  const auto sol_f = run(fine);

  // The pull is downward everywhere, so the whole inner ring is in contact.
  CHECK(static_cast<int>(sol_f.active.size()) == count_tag(fine, BoundaryTag::kObstacle));

  const double norm_exact = siglab::l2_norm(fine, exact);
  const double err_c = siglab::l2_error(coarse, sol_c.u, exact) / norm_exact;
  const double err_f = siglab::l2_error(fine, sol_f.u, exact) / norm_exact;
  CHECK(err_f < 0.02);
  CHECK(err_c / err_f >= 1.8);

  // Contact pressure. The ring average converges fast; nodal values carry a
  // fixed-size wiggle because every vertex of the 64-gon hole is a slightly
  // reentrant corner of the meshed domain, so only a loose pointwise band
  // and a length-weighted L2 bound are meaningful here.
  const auto flux = siglab::reaction_flux(fine, sol_f);
  double flux_l2 = 0.0, ring_len = 0.0;
  for (const auto& be : fine.bedges) {
    if (be.tag != BoundaryTag::kObstacle) continue;
    const double l = siglab::dist(fine.verts[be.v0], fine.verts[be.v1]);
    flux_l2 += 0.5 * l * ((flux[be.v0] - rad.flux_obstacle()) * (flux[be.v0] - rad.flux_obstacle()) +
                          (flux[be.v1] - rad.flux_obstacle()) * (flux[be.v1] - rad.flux_obstacle()));
    ring_len += l;
  }
  CHECK(std::sqrt(flux_l2 / ring_len) / rad.flux_obstacle() < 0.08);
  for (const int v : siglab::tagged_vertices(fine, {BoundaryTag::kObstacle})) {
    CHECK(flux[v] == doctest::Approx(rad.flux_obstacle()).epsilon(0.25));
    CHECK(sol_f.lambda[v] > 0.0);
  }
  CHECK(mean_obstacle_flux(fine, sol_f) == doctest::Approx(rad.flux_obstacle()).epsilon(0.02));

  // Outgoing flux through the far boundary balances the contact force.
  const auto edge_flux = siglab::boundary_edge_flux(fine, sol_f.u);
  CHECK(mean_gamma_flux(fine, edge_flux) == doctest::Approx(rad.flux_gamma()).epsilon(0.02));

  CHECK(siglab::gradient_energy(fine, sol_f.u) ==
        doctest::Approx(rad.energy(rad.r0, 1.0)).epsilon(0.02));

  // Complementarity at the solver's own tolerance.
  for (int v = 0; v < fine.n_verts(); ++v) {
    CHECK(std::abs(sol_f.u[v] * sol_f.lambda[v]) < 1e-10);
    CHECK(sol_f.lambda[v] > -1e-12);
  }
}

TEST_CASE("active set solver agrees with projected Gauss-Seidel") {
  struct Scene {
    PolygonalSet domain;
    siglab::ScalarField f;
    bool partial;
  };
  const PolygonalSet disk_domain = siglab::boolean_op(
      siglab::make_circle({0.0, 0.0}, 1.0, 128, BoundarySource::kOmega),
      siglab::make_circle({0.0, 0.0}, 0.3, 48, BoundarySource::kObstacle1),
      siglab::BoolOp::kDifference);
  const Scene scenes[] = {
      {annulus_domain(1.0, 0.3), [](Vec2) { return -1.0; }, false},
      {disk_domain, [](Vec2 p) { return p.x; }, true},
  };

  for (const Scene& scene : scenes) {
    CAPTURE(scene.partial);
    const Mesh mesh = siglab::triangulate(scene.domain, 1.0 / 16.0);
    const auto vi = siglab::build_discrete_vi(mesh, scene.f);
    const auto sol = siglab::solve_scalar(mesh, scene.f);
    REQUIRE(sol.converged);
    CHECK(sol.iterations <= 30);

    const auto u_pgs = oracle::pgs_solve(vi);
    double gap = 0.0;
    for (int d = 0; d < vi.n; ++d)
      gap = std::max(gap, std::abs(sol.u[vi.dof_to_vertex[d]] - u_pgs[d]));
    CHECK(gap <= 1e-8);

    const int n_obstacle = count_tag(mesh, BoundaryTag::kObstacle);
    if (scene.partial) {
      // Sign-changing data leaves only part of the ring pressed down.
      CHECK(sol.active.size() > 0);
      CHECK(static_cast<int>(sol.active.size()) < n_obstacle);
    } else {
      CHECK(static_cast<int>(sol.active.size()) == n_obstacle);
    }

    for (const int v : siglab::tagged_vertices(mesh, {BoundaryTag::kObstacle})) {
      CHECK(sol.u[v] > -1e-12);
      CHECK(sol.lambda[v] > -1e-12);
      CHECK(std::abs(sol.u[v] * sol.lambda[v]) < 1e-10);
    }
  }
}

TEST_CASE("scalar solve is deterministic") {
  const PolygonalSet domain = siglab::boolean_op(
      siglab::make_circle({0.0, 0.0}, 1.0, 128, BoundarySource::kOmega),
      siglab::make_circle({0.0, 0.0}, 0.3, 48, BoundarySource::kObstacle1),
      siglab::BoolOp::kDifference);
  const Mesh mesh = siglab::triangulate(domain, 1.0 / 16.0);
  const auto f = [](Vec2 p) { return p.x; };
  const auto a = siglab::solve_scalar(mesh, f);
  const auto b = siglab::solve_scalar(mesh, f);
  CHECK(a.u == b.u);
  CHECK(a.lambda == b.lambda);
  CHECK(a.active == b.active);
  CHECK(a.iterations == b.iterations);
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <siglab/elastic_solver.hpp>
#include <siglab/geometry.hpp>
#include <siglab/measurement.hpp>
#include <siglab/mesh.hpp>
#include <siglab/scalar_solver.hpp>

using siglab::BoundaryMeasurement;
using siglab::BoundarySource;
using siglab::BoundaryTag;
using siglab::LameParams;
using siglab::Mesh;
using siglab::PolygonalSet;
using siglab::Vec2;

namespace {

BoundaryMeasurement synthetic(std::vector<double> s, std::vector<double> vals, double length,
                              bool closed) {
  BoundaryMeasurement m;
  m.s = std::move(s);
  for (const double v : vals) m.value.push_back({v, 0.0});
  m.length = length;
  m.closed = closed;
  return m;
}

}  // namespace

TEST_CASE("resample walks closed profiles periodically and open ones clamped") {
  const auto m = synthetic({0.0, 1.0, 2.0, 3.0}, {10.0, 20.0, 30.0, 40.0}, 4.0, true);

  const auto coarse = siglab::resample(m, 1.0);
  REQUIRE(coarse.s.size() == 4);
  CHECK(coarse.value[0].x == doctest::Approx(10.0));
  CHECK(coarse.value[2].x == doctest::Approx(30.0));

  // midpoint of the wrap segment blends last and first samples
  const auto fine = siglab::resample(m, 0.5);
  REQUIRE(fine.s.size() == 8);
  CHECK(fine.s[7] == doctest::Approx(3.5));
  CHECK(fine.value[7].x == doctest::Approx(25.0));
  CHECK(fine.value[1].x == doctest::Approx(15.0));
  CHECK(fine.closed);
  CHECK(fine.length == doctest::Approx(4.0));

  auto open = m;
  open.closed = false;
  const auto ro = siglab::resample(open, 0.5);
  REQUIRE(ro.s.size() == 7);  // spans [0,3] inclusive, no wrap point
  CHECK(ro.s.front() == doctest::Approx(0.0));
  CHECK(ro.s.back() == doctest::Approx(3.0));
  CHECK(ro.value.back().x == doctest::Approx(40.0));

  CHECK_THROWS_AS((void)siglab::resample(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)siglab::resample(BoundaryMeasurement{}, 0.5), std::invalid_argument);
}

TEST_CASE("gap norms: periodic rectangle rule and open-overlap trapezoid") {
  // constant offset d on a closed ring of length L gives linf=d, l2=d*sqrt(L)
  const auto a = synthetic({0.0, 1.0, 2.0, 3.0}, {5.0, 5.0, 5.0, 5.0}, 4.0, true);
  const auto b = synthetic({0.0, 1.0, 2.0, 3.0}, {2.0, 2.0, 2.0, 2.0}, 4.0, true);
  const auto g = siglab::gap(a, b, 0.25);
  CHECK(g.linf == doctest::Approx(3.0));
  CHECK(g.l2 == doctest::Approx(6.0));

  // open windows restrict to the overlap [1,2]
  const auto oa = synthetic({0.0, 1.0, 2.0}, {7.0, 7.0, 7.0}, 0.0, false);
  const auto ob = synthetic({1.0, 2.0, 3.0}, {4.0, 4.0, 4.0}, 0.0, false);
  const auto go = siglab::gap(oa, ob, 0.25);
  CHECK(go.linf == doctest::Approx(3.0));
  CHECK(go.l2 == doctest::Approx(3.0));

  // vector-valued differences use the euclidean norm
  BoundaryMeasurement va, vb;
  va.s = {0.0, 1.0};
  va.value = {{1.0, 2.0}, {1.0, 2.0}};
  va.length = 2.0;
  vb = va;
  vb.value = {{4.0, 6.0}, {4.0, 6.0}};
  const auto gv = siglab::gap(va, vb, 0.1);
  CHECK(gv.linf == doctest::Approx(5.0));
  CHECK(gv.l2 == doctest::Approx(5.0 * std::sqrt(2.0)));

  const auto far = synthetic({5.0, 6.0}, {1.0, 1.0}, 0.0, false);
  CHECK_THROWS_AS((void)siglab::gap(oa, far, 0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)siglab::gap(oa, ob, -1.0), std::invalid_argument);
}

TEST_CASE("scalar flux identity is exact for interpolated affine and constant fields") {
  const PolygonalSet disk = siglab::make_circle({0, 0}, 1.0, 64, BoundarySource::kOmega);
  const Mesh mesh = siglab::triangulate(disk, 0.1);
  std::vector<double> ux(mesh.n_verts());
  for (int v = 0; v < mesh.n_verts(); ++v) ux[v] = mesh.verts[v].x;

  const PolygonalSet rect = siglab::make_rectangle({-0.3, -0.2}, {0.4, 0.3}, BoundarySource::kAuxA);
  auto gg = siglab::gauss_green_scalar(mesh, ux, rect);
  // grad = e1 everywhere, so both sides equal the rectangle area
  CHECK(gg.volume == doctest::Approx(0.35).epsilon(1e-13));
  CHECK(gg.boundary == doctest::Approx(0.35).epsilon(1e-13));
  CHECK(gg.residual <= 1e-13);
  CHECK(gg.roundoff_bound > 0.0);
  CHECK(gg.roundoff_bound < 1e-10);
  CHECK(gg.residual <= gg.roundoff_bound);

  const PolygonalSet outer =
      siglab::make_rectangle({-0.4, -0.4}, {0.4, 0.4}, BoundarySource::kAuxA);
  const PolygonalSet hole =
      siglab::make_rectangle({-0.1, -0.1}, {0.1, 0.1}, BoundarySource::kAuxB);
  const PolygonalSet holed = siglab::punch_holes(outer, {&hole});
  gg = siglab::gauss_green_scalar(mesh, ux, holed);
  CHECK(gg.volume == doctest::Approx(0.60).epsilon(1e-13));
  CHECK(gg.boundary == doctest::Approx(0.60).epsilon(1e-13));
  CHECK(gg.residual <= 1e-13);

  const std::vector<double> uc(mesh.n_verts(), 0.7);
  gg = siglab::gauss_green_scalar(mesh, uc, rect);
  CHECK(std::abs(gg.volume) <= 1e-13);
  CHECK(std::abs(gg.boundary) <= 1e-13);
  CHECK(gg.residual <= 1e-13);
}

TEST_CASE("elastic work identity: rigid motions vanish, constant stress matches hand value") {
  const PolygonalSet disk = siglab::make_circle({0, 0}, 1.0, 64, BoundarySource::kOmega);
  const Mesh mesh = siglab::triangulate(disk, 0.1);
  const PolygonalSet rect = siglab::make_rectangle({-0.3, -0.2}, {0.4, 0.3}, BoundarySource::kAuxA);

  std::vector<Vec2> ur(mesh.n_verts()), ua(mesh.n_verts());
  for (int v = 0; v < mesh.n_verts(); ++v) {
    const Vec2 p = mesh.verts[v];
    ur[v] = Vec2{0.3, -0.1} + 0.2 * perp(p);  // translation plus rotation, stress-free
    ua[v] = {0.1 * p.x + 0.03 * p.y, -0.02 * p.x + 0.05 * p.y};
  }

  auto gg = siglab::gauss_green_elastic(mesh, ur, LameParams{}, rect);
  CHECK(std::abs(gg.volume) <= 1e-13);
  CHECK(std::abs(gg.boundary) <= 1e-13);
  CHECK(gg.residual <= 1e-13);

  // strain (0.1, 0.05, 0.01) with lambda=mu=1 gives stress (0.35, 0.25, 0.01);
  // both sides must equal the constant energy density times the window area
  gg = siglab::gauss_green_elastic(mesh, ua, LameParams{}, rect);
  const double dens = 0.35 * 0.1 + 0.25 * 0.05 + 0.01 * 0.01;
  CHECK(gg.volume == doctest::Approx(dens * 0.35).epsilon(1e-12));
  CHECK(gg.boundary == doctest::Approx(dens * 0.35).epsilon(1e-12));
  CHECK(gg.residual <= 1e-13);
}

TEST_CASE("integration region must stay inside the mesh") {
  const PolygonalSet disk = siglab::make_circle({0, 0}, 1.0, 64, BoundarySource::kOmega);
  const Mesh mesh = siglab::triangulate(disk, 0.1);
  const std::vector<double> u(mesh.n_verts(), 0.0);

  const PolygonalSet fully_out =
      siglab::make_rectangle({0.5, -0.2}, {1.5, 0.2}, BoundarySource::kAuxA);
  CHECK_THROWS_AS((void)siglab::gauss_green_scalar(mesh, u, fully_out), siglab::GeometryError);

  // right edge pokes through the circular boundary
  const PolygonalSet partly_out =
      siglab::make_rectangle({0.0, -0.2}, {1.05, 0.2}, BoundarySource::kAuxA);
  CHECK_THROWS_AS((void)siglab::gauss_green_scalar(mesh, u, partly_out), siglab::GeometryError);
}

TEST_CASE("sub-annulus window reproduces the radial energy") {
  const PolygonalSet outer = siglab::make_circle({0, 0}, 1.0, 128, BoundarySource::kOmega);
  const PolygonalSet inner = siglab::make_circle({0, 0}, 0.3, 64, BoundarySource::kObstacle1);
  const PolygonalSet domain = siglab::boolean_op(outer, inner, siglab::BoolOp::kDifference);
  const PolygonalSet vout = siglab::make_circle({0, 0}, 0.7, 192, BoundarySource::kAuxA);
  const PolygonalSet vin = siglab::make_circle({0, 0}, 0.4, 128, BoundarySource::kAuxB);
  const PolygonalSet window = siglab::punch_holes(vout, {&vin});

  // u = beta ln r with beta = f/ln(1/r0); energy over r in [0.4, 0.7] in closed form
  const double beta = -1.0 / std::log(1.0 / 0.3);
  const double exact = 2.0 * std::numbers::pi * beta * beta * std::log(0.7 / 0.4);

  Mesh mesh = siglab::triangulate(domain, 1.0 / 16.0);
  for (int lvl = 0; lvl < 3; ++lvl) {
    const auto sol = siglab::solve_scalar(mesh, [](Vec2) { return -1.0; });
    REQUIRE(sol.converged);
    const auto gg = siglab::gauss_green_scalar(mesh, sol.u, window);
    CHECK(std::abs(gg.volume - exact) / exact < 0.02);
    CHECK(std::abs(gg.boundary - exact) / exact < 0.02);
    CHECK(gg.residual < 1.6 * mesh.h);
    if (lvl == 2) CHECK(std::abs(gg.volume - exact) / exact < 0.005);
    if (lvl < 2) mesh = siglab::refine(mesh);
  }
}

TEST_CASE("flux profiles align across refinement levels and against the radial law") {
  const PolygonalSet outer = siglab::make_circle({0, 0}, 1.0, 128, BoundarySource::kOmega);
  const PolygonalSet inner = siglab::make_circle({0, 0}, 0.3, 64, BoundarySource::kObstacle1);
  const PolygonalSet domain = siglab::boolean_op(outer, inner, siglab::BoolOp::kDifference);

  Mesh m16 = siglab::triangulate(domain, 1.0 / 16.0);
  const auto s16 = siglab::solve_scalar(m16, [](Vec2) { return -1.0; });
  Mesh m32 = siglab::refine(m16);
  const auto s32 = siglab::solve_scalar(m32, [](Vec2) { return -1.0; });

  const auto p16 = siglab::measure_scalar_flux(m16, s16.u);
  const auto p32 = siglab::measure_scalar_flux(m32, s32.u);
  CHECK(p16.closed);
  CHECK(p32.closed);
  REQUIRE(p16.s.size() == 128);  // one sample per boundary edge of the outer ring
  REQUIRE(p32.s.size() == 256);
  // both levels parameterize arc length along the same source polygon
  CHECK(p16.length == doctest::Approx(p32.length).epsilon(1e-14));
  CHECK(p16.length == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-3));

  const auto self = siglab::gap(p16, p16, m16.h / 2.0);
  CHECK(self.linf == 0.0);
  CHECK(self.l2 == 0.0);

  const auto levels = siglab::gap(p16, p32, m16.h / 2.0);
  CHECK(levels.linf < 0.05);
  CHECK(levels.l2 < 0.08);

  // exact outward flux on the unit circle is beta, uniformly
  const double beta = -1.0 / std::log(1.0 / 0.3);
  auto law = p32;
  for (auto& v : law.value) v = {beta, 0.0};
  const auto g16 = siglab::gap(p16, law, m16.h / 2.0);
  const auto g32 = siglab::gap(p32, law, m32.h / 2.0);
  CHECK(g16.linf < 0.07);
  CHECK(g16.l2 < 0.13);
  CHECK(g32.linf < 0.04);
  CHECK(g32.l2 < 0.07);
  CHECK(g32.l2 < g16.l2);
}

TEST_CASE("measurement window must live on a single boundary ring") {
  const PolygonalSet outer = siglab::make_rectangle({-1, -1}, {1, 1}, BoundarySource::kOmega);
  const PolygonalSet hole = siglab::make_circle({0, 0}, 0.3, 32, BoundarySource::kOmega);
  const PolygonalSet domain = siglab::punch_holes(outer, {&hole});
  const Mesh mesh = siglab::triangulate(domain, 0.15);
  const std::vector<double> u(mesh.n_verts(), 0.0);
  CHECK_THROWS_AS((void)siglab::measure_scalar_flux(mesh, u), siglab::GeometryError);
}

TEST_CASE("squeezed ring traction matches the thick-cylinder law") {
  const PolygonalSet outer = siglab::make_circle({0, 0}, 1.0, 96, BoundarySource::kOmega);
  const PolygonalSet hole = siglab::make_circle({0, 0}, 0.3, 48, BoundarySource::kObstacle1);
  const PolygonalSet domain = siglab::punch_holes(outer, {&hole});

  // u_r = A r + B/r with u_r(a)=0, u_r(1)=-s; radial traction at r=1 is
  // 2A(lambda + mu(1+a^2)) for the lame parameters used here
  const double a = 0.3, s = 0.05;
  const double A = -s / (1.0 - a * a);
  const double srr1 = 2.0 * A * (1.0 + (1.0 + a * a));

  const Mesh mesh = siglab::refine(siglab::triangulate(domain, 1.0 / 16.0));
  const auto sol = siglab::solve_elastic(mesh, [s](Vec2 p) { return -s * p; });
  REQUIRE(sol.converged);

  const auto prof = siglab::measure_elastic_traction(mesh, sol.u, LameParams{});
  CHECK(prof.closed);
  CHECK(prof.s.size() == 384);

  const auto trac = siglab::boundary_edge_traction(mesh, sol.u, LameParams{});
  double force = 0.0, perim = 0.0;
  int pulling = 0;
  for (std::size_t k = 0; k < mesh.bedges.size(); ++k) {
    if (mesh.bedges[k].tag != BoundaryTag::kGamma) continue;
    const Vec2 mid = 0.5 * (mesh.verts[mesh.bedges[k].v0] + mesh.verts[mesh.bedges[k].v1]);
    const double len = siglab::dist(mesh.verts[mesh.bedges[k].v0], mesh.verts[mesh.bedges[k].v1]);
    const double radial = dot(trac[k], normalized(mid));
    if (radial >= 0.0) ++pulling;
    force += radial * len;
    perim += len;
  }
  CHECK(pulling == 0);  // squeeze pushes inward everywhere on the outer ring
  CHECK(std::abs(force / perim - srr1) / std::abs(srr1) < 0.01);
}

TEST_CASE("crescent residuals decay under refinement for both physics") {
  const PolygonalSet omega = siglab::make_circle({0, 0}, 1.2, 96, BoundarySource::kOmega);
  const PolygonalSet o1 = siglab::make_circle({-0.25, 0}, 0.45, 48, BoundarySource::kObstacle1);
  const PolygonalSet o2 = siglab::make_circle({0.25, 0}, 0.45, 48, BoundarySource::kObstacle2);
  const PolygonalSet g0 = siglab::compute_g0(omega, o1, o2);
  const PolygonalSet vv = siglab::compute_v(omega, g0, o1, o2);
  REQUIRE(vv.rings.size() == 1);
  CHECK(siglab::area(vv) == doctest::Approx(0.4249585).epsilon(1e-5));

  const PolygonalSet domain = siglab::boolean_op(omega, o2, siglab::BoolOp::kDifference);

  SUBCASE("scalar, fully active obstacle") {
    Mesh mesh = siglab::triangulate(domain, 0.08);
    double prev = 0.0;
    for (int lvl = 0; lvl < 3; ++lvl) {
      const auto sol = siglab::solve_scalar(mesh, [](Vec2) { return -1.0; });
      REQUIRE(sol.converged);
      const auto gg = siglab::gauss_green_scalar(mesh, sol.u, vv);
      if (lvl > 0) CHECK(prev / gg.residual >= 1.8);
      prev = gg.residual;
      if (lvl == 2) CHECK(gg.residual < 2e-3);
      if (lvl < 2) mesh = siglab::refine(mesh);
    }
  }

  SUBCASE("elastic, compression data") {
    Mesh mesh = siglab::refine(siglab::triangulate(domain, 0.12));
    double prev = 0.0;
    for (int lvl = 0; lvl < 3; ++lvl) {
      const auto sol = siglab::solve_elastic(mesh, [](Vec2 p) { return -0.05 * p; });
      REQUIRE(sol.converged);
      const auto gg = siglab::gauss_green_elastic(mesh, sol.u, LameParams{}, vv);
      if (lvl > 0) CHECK(prev / gg.residual >= 1.8);
      prev = gg.residual;
      if (lvl == 2) CHECK(gg.residual < 1e-5);
      if (lvl < 2) mesh = siglab::refine(mesh);
    }
  }
}

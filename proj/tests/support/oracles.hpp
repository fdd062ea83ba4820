#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <siglab/geometry.hpp>
#include <siglab/scalar_solver.hpp>

// Test-side reference implementations.  Everything here is deliberately
// independent of the production geometry kernel: membership is decided by
// counting pixels and flood filling, not by the overlay engine under test.
namespace oracle {

struct Raster {
  int nx = 0, ny = 0;
  siglab::Vec2 lo, hi;
  double cell_w = 0.0, cell_h = 0.0;
  std::vector<std::uint8_t> inside;  // row-major over cell centers

  bool at(int ix, int iy) const {
    return ix >= 0 && ix < nx && iy >= 0 && iy < ny && inside[iy * nx + ix] != 0;
  }
  siglab::Vec2 center(int ix, int iy) const {
    return {lo.x + (ix + 0.5) * cell_w, lo.y + (iy + 0.5) * cell_h};
  }
  bool cell_of(siglab::Vec2 p, int* ix, int* iy) const {
    const int cx = static_cast<int>(std::floor((p.x - lo.x) / cell_w));
    const int cy = static_cast<int>(std::floor((p.y - lo.y) / cell_h));
    if (cx < 0 || cx >= nx || cy < 0 || cy >= ny) return false;
    *ix = cx;
    *iy = cy;
    return true;
  }
};

/// Scanline rasterization: a cell is inside when its center has nonzero
/// winding number, computed by signed crossings along the center row.
Raster rasterize(const siglab::PolygonalSet& s, siglab::Vec2 lo, siglab::Vec2 hi,
                 int nx, int ny);

/// Pixel-count area over the set's own bounding box (inflated one cell).
double raster_area(const siglab::PolygonalSet& s, int res);

/// Fraction of pixels of B(p, r) that land in s.
double raster_density(const siglab::PolygonalSet& s, siglab::Vec2 p, double r,
                      int res);

struct FloodLabels {
  Raster omega, o1, o2;
  std::vector<std::int32_t> comp;  // per cell: free-region component id or -1
  int g0_id = -1;                  // component seeded from the omega boundary
  std::vector<std::int32_t> hidden;  // hidden-region component id or -1
  int v_id = -1;                   // largest hidden component adjacent to g0

  bool in_g0(int ix, int iy) const {
    return comp[iy * omega.nx + ix] == g0_id && g0_id >= 0;
  }
  bool in_v(int ix, int iy) const {
    return hidden[iy * omega.nx + ix] == v_id && v_id >= 0;
  }
};

/// Flood-fill reference for the visible component and the hidden component.
FloodLabels flood_classify(const siglab::PolygonalSet& omega,
                           const siglab::PolygonalSet& o1,
                           const siglab::PolygonalSet& o2, int res);

/// Closed form for the annulus r in [r0, 1] with u = f (a negative constant)
/// on the unit circle and full contact u = 0 at r = r0:
///   u(r) = f ln(r / r0) / ln(1 / r0).
struct RadialSolution {
  double r0 = 0.3;
  double f = -1.0;

  double beta() const { return f / std::log(1.0 / r0); }
  double value(double r) const { return beta() * std::log(r / r0); }
  /// du/dn at r = 1 with the outward normal.
  double flux_gamma() const { return beta(); }
  /// du/dnu at r = r0 with the normal pointing into the obstacle.
  double flux_obstacle() const { return -beta() / r0; }
  /// Dirichlet energy of u over the sub-annulus [ra, rb].
  double energy(double ra, double rb) const {
    return 2.0 * std::numbers::pi * beta() * beta() * std::log(rb / ra);
  }
};

struct RandomScene {
  siglab::PolygonalSet omega, o1, o2;
};

/// Star-shaped random two-obstacle configuration satisfying the library's
/// preconditions (compact containment, o1 not swallowed by o2).
RandomScene random_scene(std::mt19937& rng);

/// Projected Gauss-Seidel on the assembled unilateral problem, relaxation 1.
/// Deliberately naive: sweeps until the KKT residual drops below tol times
/// the data scale, so agreement with the active-set solver is a genuine
/// cross-check of two different algorithms on one matrix.
std::vector<double> pgs_solve(const siglab::DiscreteVI& vi, int max_sweeps = 400000,
                              double tol = 1e-12);

}  // namespace oracle

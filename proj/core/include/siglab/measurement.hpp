#pragma once

#include <vector>

#include "siglab/elastic_solver.hpp"
#include "siglab/geometry.hpp"
#include "siglab/mesh.hpp"

namespace siglab {

/// Sampled boundary profile parameterized by arc length along the source
/// ring of the domain polygon. Because every mesh of a given scene shares
/// that polygon, s coordinates from different resolutions line up exactly.
/// Scalar profiles store their value in value[i].x with y zero.
struct BoundaryMeasurement {
  std::vector<double> s;   // sample positions, ascending
  std::vector<Vec2> value;
  double length = 0.0;     // full arc length of the source ring (period)
  bool closed = true;      // window covers the whole ring
};

/// Normal flux profile sampled at gamma edge midpoints.
BoundaryMeasurement measure_scalar_flux(const Mesh& mesh, const std::vector<double>& u);

/// Traction profile sampled at gamma edge midpoints.
BoundaryMeasurement measure_elastic_traction(const Mesh& mesh, const std::vector<Vec2>& u,
                                             const LameParams& mat);

/// Piecewise-linear resampling onto a uniform grid with roughly the given
/// spacing (periodic for closed profiles, clamped at the ends otherwise).
BoundaryMeasurement resample(const BoundaryMeasurement& m, double spacing);

/// Piecewise-linear evaluation at arc-length position s: closed profiles
/// wrap with period `length`, open ones clamp at their ends. Throws
/// std::invalid_argument on an empty measurement.
Vec2 sample(const BoundaryMeasurement& m, double s);

struct MeasurementGap {
  double linf = 0.0;
  double l2 = 0.0;  // sqrt of the integrated squared gap
};

/// Gap between two profiles on a common uniform grid of the given spacing,
/// restricted to the overlap of their windows.
MeasurementGap gap(const BoundaryMeasurement& a, const BoundaryMeasurement& b, double spacing);

/// Both sides of the integration-by-parts identity on a polygonal region
/// that is never meshed itself: the volume term integrates the energy
/// density over region intersected with each triangle (exact polygon
/// clipping), the boundary term integrates the conormal flux times the
/// trace along the region boundary (per-triangle subsegments, two point
/// Gauss). For fields with elementwise zero residual the two agree up to
/// the consistency error of the discrete solution.
struct GaussGreenResult {
  double boundary = 0.0;
  double volume = 0.0;
  double residual = 0.0;  // |boundary - volume|
  /// Conservative roundoff bound on the computed residual. Two point Gauss
  /// is exact for products of P1 traces, so quadrature itself adds nothing;
  /// what remains is accumulated floating-point error, bounded by a fixed
  /// multiple of machine epsilon times the total absolute contribution.
  double roundoff_bound = 0.0;
};

GaussGreenResult gauss_green_scalar(const Mesh& mesh, const std::vector<double>& u,
                                    const PolygonalSet& region);
GaussGreenResult gauss_green_elastic(const Mesh& mesh, const std::vector<Vec2>& u,
                                     const LameParams& mat, const PolygonalSet& region);

}  // namespace siglab

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "siglab/elastic_solver.hpp"
#include "siglab/geometry.hpp"
#include "siglab/measurement.hpp"
#include "siglab/mesh.hpp"

namespace siglab {

enum class ProblemKind { kScalar, kElastic };

/// An inner contact solve ran out of active-set iterations. Distinct from
/// validation errors so callers can map it to a different exit path.
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One boundary-measurement experiment: which physics, the domain outline,
/// the measurement window on its outer boundary, the Dirichlet datum as an
/// expression over (x, y) ("fx, fy" for the elastic case) and the mesh
/// resolution. Obstacles are supplied per call so one config can drive many
/// shapes.
struct ExperimentConfig {
  ProblemKind kind = ProblemKind::kScalar;
  PolygonalSet omega;
  GammaSpec gamma;
  std::string f;
  double h = 0.1;
  LameParams lame;
  unsigned seed = 0;  // randomized parts only; forward maps stay deterministic
};

/// Solves the problem with the obstacle punched out of omega and returns
/// the outward flux (scalar) or traction (elastic) profile on the gamma
/// window. extra_refines uniformly refines the mesh that many times before
/// solving. Deterministic; an empty obstacle solves on omega alone.
BoundaryMeasurement forward_map(const ExperimentConfig& config, const PolygonalSet& obstacle,
                                int extra_refines = 0);

enum class Verdict { kDistinguished, kObstructed, kInconclusive };

std::string to_string(Verdict v);

struct GapReport {
  Verdict verdict = Verdict::kInconclusive;
  MeasurementGap gap;            // between the two obstacles' forward maps
  double error_estimate = 0.0;   // L2 drift under one refinement, worse obstacle
  std::string reason;
};

/// Compares the boundary measurements of two obstacles. Obstruction wins
/// over everything: a nonnegative-constant scalar datum, or a rigid elastic
/// datum that both obstacles admit tangentially, cannot separate any pair.
/// Otherwise the pair is distinguished when the measured gap exceeds ten
/// times the refinement drift, and inconclusive when it drowns in it.
GapReport distinguishability(const ExperimentConfig& config, const PolygonalSet& o1,
                             const PolygonalSet& o2);

struct UpsilonQuery {
  PolygonalSet obstacle;
  RigidMotion rigid;
  double tolerance = 1e-9;
};

struct UpsilonResult {
  bool member = false;
  double residual = 0.0;  // max over boundary points of |(c + A x) . nu|
};

/// Tests whether the rigid velocity field is tangential along the whole
/// obstacle boundary. The integrand is affine on each edge, so evaluating
/// at both endpoints of every edge against that edge's outward normal
/// captures the exact maximum.
UpsilonResult upsilon_membership(const UpsilonQuery& q);

/// True when |c| exceeds max over omega of |A x|, which certifies that no
/// nonempty obstacle inside omega admits the datum c + A x tangentially.
bool upsilon_empty_certificate(const RigidMotion& rigid, const PolygonalSet& omega);

/// Star-shaped obstacle about a fixed center,
/// r(theta) = r0 + sum_k (a_k cos k theta + b_k sin k theta),
/// discretized as a polygon with `segments` vertices. a and b must have
/// equal size K <= 4.
struct RadialObstacle {
  Vec2 center;
  double r0 = 0.3;
  std::vector<double> a, b;
  int segments = 64;

  PolygonalSet polygon() const;
};

enum class ReconStatus {
  kConverged,      // misfit at floor or parameter step negligible
  kStagnated,      // no descent direction; datum does not identify the shape
  kFailed,         // twenty consecutive infeasible candidates
  kMaxIterations,  // budget exhausted while still improving
};

std::string to_string(ReconStatus s);

struct ReconstructionResult {
  RadialObstacle obstacle;
  std::vector<double> misfit_history;  // initial value plus one entry per accepted step
  ReconStatus status = ReconStatus::kMaxIterations;
  int forward_evals = 0;
};

/// Fits the radial parameters to a target measurement by Gauss-Newton on
/// the L2(gamma) misfit: finite-difference Jacobian with step 1e-4 x initial
/// r0, step clamping plus backtracking, at most 60 outer iterations.
/// Candidates that leave omega, touch its boundary or need a nonpositive
/// radius are rejected and the step halves; twenty consecutive rejections
/// end the run. crime_free offsets the reconstruction mesh size by sqrt(2)
/// so the synthetic-data mesh family is never reused.
ReconstructionResult reconstruct(const ExperimentConfig& config, const BoundaryMeasurement& target,
                                 const RadialObstacle& init, bool crime_free = false);

}  // namespace siglab

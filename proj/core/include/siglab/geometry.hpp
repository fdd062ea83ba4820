#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "siglab/vec2.hpp"

namespace siglab {

/// Raised when an input violates a documented precondition.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a geometric construction cannot be completed consistently
/// (snapping moved too much area, a required component does not exist, ...).
struct GeometryError : ValidationError {
  using ValidationError::ValidationError;
};

/// Identity of the original curve a boundary edge came from.  Overlay
/// operations propagate these tags so that classification of derived sets
/// (for example the boundary of the hidden component) can be audited against
/// the construction instead of re-derived from coordinates.
enum class BoundarySource : std::uint8_t {
  kNone = 0,
  kOmega,      // outer domain boundary
  kObstacle1,  // first obstacle
  kObstacle2,  // second obstacle
  kAuxA,       // generic first operand of a boolean operation
  kAuxB,       // generic second operand
};

std::string to_string(BoundarySource s);

/// Per-edge provenance: source curve plus orientation relative to that
/// source's own boundary direction (+1 same direction, -1 reversed).
struct EdgeProvenance {
  BoundarySource source = BoundarySource::kNone;
  std::int8_t orientation = +1;
};

/// Closed polygonal ring.  Edge j runs pts[j] -> pts[(j+1) % pts.size()].
/// Counterclockwise rings bound material, clockwise rings bound holes.
struct Ring {
  std::vector<Vec2> pts;
  std::vector<EdgeProvenance> prov;  // one entry per edge, same indexing
};

/// Region bounded by rings.  The even-odd/nonzero distinction does not arise:
/// rings are pairwise non-crossing and oriented (outer CCW, holes CW), so the
/// region is the set of points with nonzero winding number.
struct PolygonalSet {
  std::vector<Ring> rings;

  bool empty() const { return rings.empty(); }
};

double signed_area(const Ring& r);
double area(const PolygonalSet& s);
double perimeter(const PolygonalSet& s);
/// Winding-number membership test (boundary points are implementation
/// defined; callers that care must stay clear of the boundary).
bool contains(const PolygonalSet& s, Vec2 p);
/// Axis-aligned bounding box as (lo, hi); undefined for empty sets.
std::pair<Vec2, Vec2> bounding_box(const PolygonalSet& s);
/// Distance from p to the nearest boundary edge of s (infinity if empty).
double boundary_distance(const PolygonalSet& s, Vec2 p);

/// Checks ring sizes, closure, nonzero areas and pairwise non-crossing;
/// throws ValidationError on failure.
void validate(const PolygonalSet& s, const std::string& what = "polygonal set");

/// Regular n-gon inscribed in the circle (center, radius); vertex 0 lies at
/// angle 0.  Edges are tagged with the given source.
PolygonalSet make_circle(Vec2 center, double radius, int segments,
                         BoundarySource source);
/// Axis-aligned rectangle [lo.x, hi.x] x [lo.y, hi.y].
PolygonalSet make_rectangle(Vec2 lo, Vec2 hi, BoundarySource source);
/// Polygon from an explicit counterclockwise vertex list.
PolygonalSet make_polygon(const std::vector<Vec2>& vertices, BoundarySource source);
/// Re-tags every edge of s with the given source (orientation +1).
PolygonalSet retag(const PolygonalSet& s, BoundarySource source);

/// Inserts each hole's boundary as clockwise rings of the domain. Vertex
/// coordinates are preserved bit for bit (no snap grid), which keeps
/// symmetry properties of the inputs such as exactly radial polygon vertex
/// normals. Holes must consist of counterclockwise rings, lie strictly
/// inside the domain and stay pairwise disjoint; violations throw.
PolygonalSet punch_holes(const PolygonalSet& domain,
                         const std::vector<const PolygonalSet*>& holes);

enum class BoolOp { kUnion, kIntersection, kDifference };

/// Snap-rounded boolean operation.  Output edges inherit the provenance of
/// the input edge they lie on; coincident contributions are resolved by the
/// source order kOmega < kObstacle1 < kObstacle2 < kAuxA < kAuxB.
PolygonalSet boolean_op(const PolygonalSet& a, const PolygonalSet& b, BoolOp op);

/// Connected component of omega \ closure(o1 union o2) whose boundary
/// contains all of the omega boundary (the region visible from outside).
/// Preconditions: obstacles compactly contained in omega, and both
/// omega \ closure(o1), omega \ closure(o2) connected; violations throw.
PolygonalSet compute_g0(const PolygonalSet& omega, const PolygonalSet& o1,
                        const PolygonalSet& o2);

/// Connected component of (omega \ closure(g0)) \ closure(o2) whose boundary
/// shares at least one positive-length edge with the g0 boundary: the part of
/// the first obstacle region hidden behind the second.  Among several
/// candidates the one with the largest area wins; exact ties fall to the
/// lexicographically smallest leftmost vertex.  Precondition: o1 is not
/// contained in closure(o2).
PolygonalSet compute_v(const PolygonalSet& omega, const PolygonalSet& g0,
                       const PolygonalSet& o1, const PolygonalSet& o2);

enum class EdgeTag : std::uint8_t {
  kSameAsO1,     // edge lies on the o1 boundary with equal outward normals
  kOppositeOfO2, // edge lies on the o2 boundary with opposite outward normals
  kCorner,       // zero-length junction between differently tagged runs
};

std::string to_string(EdgeTag t);

struct EdgeClassification {
  Vec2 a, b;          // segment of the v boundary (a == b for kCorner)
  EdgeTag tag;
  double normal_dot;  // ν_v · ν_source, +1 or -1 up to roundoff (0 for corners)
};

/// Classifies every positive-length edge of the v boundary by geometric
/// matching against the o1/o2 boundaries (normal agreement verified by
/// dot products within 1e-12).  Unclassifiable positive-length edges throw.
std::vector<EdgeClassification> classify_boundary(const PolygonalSet& v,
                                                  const PolygonalSet& o1,
                                                  const PolygonalSet& o2);

/// One omega/o1/o2 configuration to run the structural checks on.
struct StructureInstance {
  PolygonalSet omega, o1, o2;
};

struct StructureReport {
  struct Item {
    std::string check;    // which structural property was tested
    int instance = -1;    // index into the input list
    bool holds = false;
    std::string detail;   // human-readable evidence
  };
  std::vector<Item> items;
  bool all_hold = true;
};

/// Runs the structural boundary checks on each instance:
///  - the g0 boundary meets the o1 boundary away from the o2 boundary,
///  - every v boundary edge off the o2 boundary lies on both the g0 and the
///    o1 boundary (and such edges exist),
///  - a connected open subset with boundary inside the boundary of its
///    superset equals the superset (tested on g0 inside itself),
///  - shared boundary edges of the disjoint sets v and (omega minus g0
///    complement pieces) carry opposite normals.
StructureReport check_structure(const std::vector<StructureInstance>& instances);

}  // namespace siglab

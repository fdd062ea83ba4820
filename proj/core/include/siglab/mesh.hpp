#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "siglab/geometry.hpp"
#include "siglab/vec2.hpp"

namespace siglab {

/// Role of a boundary edge in the discrete problem. Outer-boundary edges
/// carry Dirichlet data; the gamma subset is where fluxes are measured;
/// obstacle edges carry the unilateral constraint.
enum class BoundaryTag : std::uint8_t { kOuter, kGamma, kObstacle };

std::string to_string(BoundaryTag t);

struct BoundaryEdge {
  int v0 = -1, v1 = -1;  // mesh vertex ids, domain on the left of v0 -> v1
  BoundaryTag tag = BoundaryTag::kOuter;
  Vec2 outward;  // unit normal pointing out of the meshed domain
  int ring = -1;         // ring index in the source polygonal set
  int parent_edge = -1;  // edge index within that ring
};

/// Angular window on the outer boundary singled out as the measurement
/// boundary. Angles are radians about `center`, counterclockwise; the
/// window may wrap past 2 pi. An empty window tags the whole outer
/// boundary as measurement boundary.
struct GammaSpec {
  bool whole = true;
  Vec2 center;
  double a0 = 0.0, a1 = 0.0;

  bool covers(Vec2 p) const;
};

/// Conforming triangle mesh of a polygonal domain. Triangles are
/// counterclockwise; every boundary subsegment lies exactly on an edge of
/// the source polygon, so red refinement needs no projection step.
struct Mesh {
  std::vector<Vec2> verts;
  std::vector<std::array<int, 3>> tris;
  std::vector<BoundaryEdge> bedges;
  /// Unit normal per vertex: angle bisector of the two incident boundary
  /// edges at obstacle vertices, zero vector elsewhere.
  std::vector<Vec2> node_normal;
  PolygonalSet domain;
  double h = 0.0;

  int n_verts() const { return static_cast<int>(verts.size()); }
  int n_tris() const { return static_cast<int>(tris.size()); }
};

/// Build a quality mesh: boundary edges are split into equal parts no
/// longer than h, interior triangles observe a minimum-angle bound of 20
/// degrees and an edge-length cap of 2 h.
Mesh triangulate(const PolygonalSet& domain, double h,
                 const GammaSpec& gamma = GammaSpec{});

/// Red refinement: every triangle splits into four via edge midpoints.
/// Boundary midpoints already lie on the polygon, so the refined mesh is
/// nested in the parent.
Mesh refine(const Mesh& mesh);

/// Structural checks: orientation, edge incidence counts, Euler relation
/// against the number of boundary rings, minimum angle, unit normals.
/// Throws ValidationError/GeometryError on violation.
void validate_mesh(const Mesh& mesh, double min_angle_deg = 20.0);

double min_angle_deg(const Mesh& mesh);

/// Sorted unique vertex ids incident to edges of the given tags.
std::vector<int> tagged_vertices(const Mesh& mesh,
                                 std::initializer_list<BoundaryTag> tags);

/// Binary cache of a mesh. load_mesh returns nullopt when the file is
/// missing or carries a different format version.
void save_mesh(const Mesh& mesh, const std::string& path);
std::optional<Mesh> load_mesh(const std::string& path);

}  // namespace siglab

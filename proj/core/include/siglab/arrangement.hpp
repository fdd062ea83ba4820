#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "siglab/geometry.hpp"

namespace siglab {

/// Planar overlay of up to a few polygonal sets with snap rounding.
///
/// All vertices (input endpoints and pairwise intersections) are snapped to a
/// grid of pitch 1e-9 times the joint bounding-box diameter, segments are
/// split at every vertex lying on them, and duplicate geometric edges are
/// merged while keeping one signed contribution per input edge.  Faces are
/// recovered as half-edge cycles; each cycle carries the exact integer
/// winding vector of the region it bounds, obtained by breadth-first
/// propagation of the per-edge winding jumps, so membership never depends on
/// floating-point point-in-polygon tests.
class Arrangement {
 public:
  struct Contribution {
    int input = -1;            // index into the inputs passed to build()
    EdgeProvenance prov;       // provenance of the originating input edge
    std::int8_t dir = +1;      // +1 if the input edge runs a->b, -1 if b->a
  };

  static constexpr int kMaxInputs = 4;

  struct Edge {
    Vec2 a, b;                               // canonical: a < b lexicographically
    std::vector<Contribution> contributions;
    std::array<int, kMaxInputs> winding_delta{};  // winding(left) - winding(right)
    int cycle_left = -1;                     // cycle bounding the face left of a->b
    int cycle_right = -1;
    int face_left = -1;
    int face_right = -1;
  };

  struct Face {
    std::vector<int> cycles;        // one positive cycle plus its holes
    std::vector<int> winding;       // per input
    double area = 0.0;
    bool unbounded = false;
  };

  /// Builds the overlay.  Throws GeometryError if snapping distorts any
  /// input area by more than 10 * pitch * perimeter.
  void build(const std::vector<const PolygonalSet*>& inputs);

  int face_count() const { return static_cast<int>(faces_.size()); }
  const Face& face(int f) const { return faces_[f]; }
  const std::vector<Edge>& edges() const { return edges_; }
  double snap_pitch() const { return pitch_; }

  /// True when the face lies inside input i (nonzero winding).
  bool face_in(int f, int input) const { return faces_[f].winding[input] != 0; }

  /// Faces selected by a predicate on the per-input membership flags.
  using Predicate = std::function<bool(const std::vector<bool>&)>;

  /// Connected components of the selected region; each component is a list
  /// of face indices, sorted deterministically (largest area first, ties by
  /// smallest contained face index).
  std::vector<std::vector<int>> components(const Predicate& pred) const;

  /// Assembles the union of the given faces into an oriented PolygonalSet
  /// with per-edge provenance (outer rings CCW, holes CW).
  PolygonalSet region_from_faces(const std::vector<int>& faces) const;

  /// Edge indices on the boundary of the given face selection.
  std::vector<int> boundary_edges(const std::vector<int>& faces) const;

 private:
  std::vector<Edge> edges_;
  std::vector<Face> faces_;
  std::vector<int> cycle_face_;             // cycle index -> face index
  std::vector<std::vector<int>> cycle_halfedges_;
  int n_inputs_ = 0;
  double pitch_ = 0.0;

  friend class ArrangementBuilder;
};

}  // namespace siglab

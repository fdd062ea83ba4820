#pragma once

#include <stdexcept>
#include <string>

#include "siglab/geometry.hpp"
#include "siglab/mesh.hpp"

namespace siglab {

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem configuration as loaded from a scene file: the domain outline,
/// up to two obstacle regions and the measurement window on the outer
/// boundary (whole boundary when absent).
struct Scene {
  PolygonalSet omega;
  PolygonalSet obstacle1;  // may be empty
  PolygonalSet obstacle2;  // may be empty
  GammaSpec gamma;
};

/// Parses the JSON scene format:
///
///   {
///     "regions": {
///       "omega":     {"circle": {"center": [x, y], "radius": r,
///                                "segments": n}},
///       "obstacle1": {"polygon": {"vertices": [[x, y], ...]}},
///       "obstacle2": { ... }
///     },
///     "gamma": {"angle_range": [a0, a1]}
///   }
///
/// omega is required, obstacles and gamma are optional. Angles are radians
/// measured about omega's circle center (polygon omegas use the area
/// centroid). Unknown keys are rejected except top-level "name" and
/// "comment". Throws SceneError on malformed input.
Scene parse_scene(const std::string& json_text);

/// parse_scene over the contents of a file; file errors become SceneError.
Scene load_scene(const std::string& path);

/// Domain for solving: omega with the scene's obstacles punched out
/// exactly (validation errors propagate from punch_holes). Obstacles keep
/// their boundary source tags so mesh vertices land on the right rings.
PolygonalSet solve_domain(const Scene& scene);

}  // namespace siglab

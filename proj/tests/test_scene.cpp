#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <siglab/geometry.hpp>
#include <siglab/mesh.hpp>
#include <siglab/scene.hpp>

using siglab::BoundarySource;
using siglab::Scene;
using siglab::SceneError;
using siglab::Vec2;

namespace {

const char* kFullScene = R"({
  "name": "two obstacles with a measurement window",
  "regions": {
    "omega": {"circle": {"center": [0.0, 0.0], "radius": 1.0, "segments": 96}},
    "obstacle1": {"polygon": {"vertices": [[-0.5, -0.1], [-0.2, -0.1], [-0.2, 0.2], [-0.5, 0.2]]}},
    "obstacle2": {"circle": {"center": [0.35, 0.0], "radius": 0.2, "segments": 32}}
  },
  "gamma": {"angle_range": [0.0, 3.141592653589793]}
})";

}  // namespace

TEST_CASE("a full scene parses into tagged regions and a gamma window") {
  const Scene scene = siglab::parse_scene(kFullScene);

  CHECK(siglab::area(scene.omega) ==
        doctest::Approx(0.5 * 96 * std::sin(2 * std::numbers::pi / 96)).epsilon(1e-12));
  CHECK(siglab::area(scene.obstacle1) == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(scene.obstacle2.rings.size() == 1);
  CHECK(scene.omega.rings[0].prov[0].source == BoundarySource::kOmega);
  CHECK(scene.obstacle1.rings[0].prov[0].source == BoundarySource::kObstacle1);
  CHECK(scene.obstacle2.rings[0].prov[0].source == BoundarySource::kObstacle2);

  CHECK_FALSE(scene.gamma.whole);
  CHECK(scene.gamma.covers({0.0, 1.0}));        // angle pi/2
  CHECK_FALSE(scene.gamma.covers({0.0, -1.0}));  // angle -pi/2

  const auto domain = siglab::solve_domain(scene);
  CHECK(domain.rings.size() == 3);
  CHECK(siglab::area(domain) ==
        doctest::Approx(siglab::area(scene.omega) - siglab::area(scene.obstacle1) -
                        siglab::area(scene.obstacle2))
            .epsilon(1e-13));

  // The window carries through to mesh boundary tags.
  const auto mesh = siglab::triangulate(domain, 0.15, scene.gamma);
  int n_gamma = 0, n_outer = 0;
  for (const auto& be : mesh.bedges) {
    n_gamma += be.tag == siglab::BoundaryTag::kGamma;
    n_outer += be.tag == siglab::BoundaryTag::kOuter;
  }
  CHECK(n_gamma > 0);
  CHECK(n_outer > 0);
}

TEST_CASE("scene files load through the same parser") {
  const char* path = "scene_roundtrip_test.json";
  {
    std::ofstream out(path);
    out << kFullScene;
  }
  const Scene scene = siglab::load_scene(path);
  CHECK(scene.obstacle2.rings.size() == 1);
  std::remove(path);

  CHECK_THROWS_AS((void)siglab::load_scene("does_not_exist.json"), SceneError);
}

TEST_CASE("malformed scenes fail loudly") {
  // Valid JSON, wrong content.
  CHECK_THROWS_AS((void)siglab::parse_scene("[1, 2]"), SceneError);
  CHECK_THROWS_AS((void)siglab::parse_scene("{}"), SceneError);
  CHECK_THROWS_AS((void)siglab::parse_scene(R"({"regions": {}})"), SceneError);
  CHECK_THROWS_AS((void)siglab::parse_scene("not json"), SceneError);

  // Typos in keys are rejected, not ignored.
  CHECK_THROWS_AS((void)siglab::parse_scene(R"({
    "regions": {"omega": {"cirlce": {"center": [0,0], "radius": 1, "segments": 8}}}
  })"),
                  SceneError);
  CHECK_THROWS_AS((void)siglab::parse_scene(R"({
    "regions": {"omega": {"circle": {"center": [0,0], "radius": 1, "segments": 8, "extra": 1}}}
  })"),
                  SceneError);

  // Shape-level validation propagates as SceneError.
  CHECK_THROWS_AS((void)siglab::parse_scene(R"({
    "regions": {"omega": {"circle": {"center": [0,0], "radius": -1, "segments": 8}}}
  })"),
                  SceneError);
  CHECK_THROWS_AS((void)siglab::parse_scene(R"({
    "regions": {"omega": {"polygon": {"vertices": [[0,0], [1,0]]}}}
  })"),
                  SceneError);
  CHECK_THROWS_AS((void)siglab::parse_scene(R"({
    "regions": {"omega": {"circle": {"center": [0,0], "radius": 1, "segments": 8}}},
    "gamma": {"angle_range": [1]}
  })"),
                  SceneError);

  // Obstacle poking out of omega fails at domain construction.
  const Scene bad = siglab::parse_scene(R"({
    "regions": {
      "omega": {"circle": {"center": [0,0], "radius": 1, "segments": 64}},
      "obstacle1": {"circle": {"center": [0.95,0], "radius": 0.2, "segments": 16}}
    }
  })");
  CHECK_THROWS_AS((void)siglab::solve_domain(bad), SceneError);
}

#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>
#include <siglab/scene.hpp>

#include "commands.hpp"

namespace siglab::cli {

/// One run directory under <out>/: named <command>-<hash16> where the hash
/// covers the command name, the canonical flag string and the raw scene
/// bytes. Identical inputs therefore land in the same directory and
/// overwrite it with bit-identical files. Commands register each file they
/// write through path(); finish() stores summary.json plus the manifest.
class RunWriter {
 public:
  RunWriter(std::string command, const std::string& out_root, const std::string& canonical_flags,
            const std::string& scene_bytes);

  const std::filesystem::path& dir() const { return dir_; }

  /// Registers `name` as an output and returns its full path.
  std::filesystem::path path(const std::string& name);

  /// Command-specific result record, serialized as summary.json.
  nlohmann::json summary;

  void finish();

 private:
  std::string command_;
  std::filesystem::path dir_;
  std::string hash_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

/// Scene file contents plus the parsed scene; the raw bytes feed the run
/// hash so editing a scene file moves its runs to a fresh directory.
struct LoadedScene {
  std::string bytes;
  Scene scene;
};

LoadedScene read_scene(const std::string& path);

/// Area centroid of the set's first ring (the outer ring by construction).
Vec2 outer_centroid(const PolygonalSet& s);

}  // namespace siglab::cli

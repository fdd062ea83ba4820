#include "run_writer.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <siglab/report.hpp>

namespace siglab::cli {

RunWriter::RunWriter(std::string command, const std::string& out_root,
                     const std::string& canonical_flags, const std::string& scene_bytes)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {
  std::uint64_t h = fnv1a64(command_);
  h = fnv1a64(canonical_flags, h);
  h = fnv1a64(scene_bytes, h);
  hash_ = hash_hex(h);
  dir_ = std::filesystem::path(out_root) / (command_ + "-" + hash_);
  std::filesystem::create_directories(dir_);
}

std::filesystem::path RunWriter::path(const std::string& name) {
  outputs_.push_back(name);
  return dir_ / name;
}

void RunWriter::finish() {
  {
    std::ofstream out(path("summary.json"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / "summary.json").string());
    out << summary.dump(2) << "\n";
  }
  RunManifest m;
  m.command = command_;
  m.config_hash = hash_;
  m.version = std::string(core_version());
  m.outputs = outputs_;
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  write_manifest(dir_, std::move(m));
}

LoadedScene read_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  LoadedScene ls;
  ls.bytes = buf.str();
  ls.scene = parse_scene(ls.bytes);
  return ls;
}

Vec2 outer_centroid(const PolygonalSet& s) {
  if (s.empty()) throw std::invalid_argument("centroid of an empty set");
  const auto& pts = s.rings[0].pts;
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 p = pts[i], q = pts[(i + 1) % n];
    const double w = p.x * q.y - q.x * p.y;
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  if (a2 == 0.0) throw std::invalid_argument("centroid of a degenerate ring");
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

}  // namespace siglab::cli

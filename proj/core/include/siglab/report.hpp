#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "siglab/mesh.hpp"
#include "siglab/vec2.hpp"

namespace siglab {

/// Library version as baked into installed artifacts and run manifests.
std::string_view core_version();

/// 64-bit FNV-1a. Run directories are named by this hash of the command
/// line plus any input file bytes, so identical inputs land in the same
/// directory. The seeded overload chains partial hashes.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed);

/// 16 lowercase hex digits.
std::string hash_hex(std::uint64_t h);

/// Shortest decimal form that round-trips the double, so equal values give
/// equal bytes and re-runs reproduce files bit for bit.
std::string format_double(double v);

/// CSV per RFC 4180: CRLF record separators, fields quoted only when they
/// contain a comma, quote, or newline. Each row must match the header width.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// VTK legacy ASCII unstructured grid of the mesh triangles. Scalar and
/// vector point fields must have one entry per mesh vertex; vectors are
/// padded with z = 0.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_scalars,
               const std::vector<std::pair<std::string, std::vector<Vec2>>>& point_vectors);

/// Gnuplot script plotting columns of a CSV that sits in the same
/// directory. Columns are 1-based; each entry pairs a column with its curve
/// title. The script renders <csv stem>.png next to itself.
void write_gnuplot(const std::filesystem::path& path, const std::string& csv_name,
                   const std::string& title, const std::string& xlabel,
                   const std::string& ylabel,
                   const std::vector<std::pair<int, std::string>>& y_columns, bool log_y = false);

struct RunManifest {
  std::string command;
  std::string config_hash;  // names the run directory
  std::string version;      // core_version() unless overridden
  std::vector<std::string> outputs;  // files written, relative to the run dir
  double wall_seconds = 0.0;
};

/// Writes dir/manifest.json with sorted keys. The manifest lists itself in
/// outputs; entries are sorted and deduplicated.
void write_manifest(const std::filesystem::path& dir, RunManifest manifest);

}  // namespace siglab

#include "siglab/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace siglab {

namespace {

std::ofstream open_binary(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

// quote only when RFC 4180 requires it
std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (const char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string_view core_version() {
#ifdef SIGLAB_VERSION
  return SIGLAB_VERSION;
#else
  return "0.0.0";
#endif
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  return fnv1a64(bytes, 14695981039346656037ULL);
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (header.empty()) throw std::invalid_argument("write_csv: empty header");
  for (const auto& row : rows)
    if (row.size() != header.size())
      throw std::invalid_argument("write_csv: row width does not match the header");

  auto out = open_binary(path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << csv_field(header[i]);
  }
  out << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << "\r\n";
  }
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_scalars,
               const std::vector<std::pair<std::string, std::vector<Vec2>>>& point_vectors) {
  const std::size_t nv = mesh.verts.size();
  for (const auto& [name, data] : point_scalars)
    if (data.size() != nv) throw std::invalid_argument("write_vtk: scalar field " + name);
  for (const auto& [name, data] : point_vectors)
    if (data.size() != nv) throw std::invalid_argument("write_vtk: vector field " + name);

  auto out = open_binary(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "siglab mesh\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const Vec2 p : mesh.verts)
    out << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
  out << "CELLS " << mesh.tris.size() << ' ' << 4 * mesh.tris.size() << "\n";
  for (const auto& t : mesh.tris) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  out << "CELL_TYPES " << mesh.tris.size() << "\n";
  for (std::size_t i = 0; i < mesh.tris.size(); ++i) out << "5\n";

  if (point_scalars.empty() && point_vectors.empty()) return;
  out << "POINT_DATA " << nv << "\n";
  for (const auto& [name, data] : point_scalars) {
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (const double v : data) out << format_double(v) << "\n";
  }
  for (const auto& [name, data] : point_vectors) {
    out << "VECTORS " << name << " double\n";
    for (const Vec2 v : data)
      out << format_double(v.x) << ' ' << format_double(v.y) << " 0\n";
  }
}

void write_gnuplot(const std::filesystem::path& path, const std::string& csv_name,
                   const std::string& title, const std::string& xlabel,
                   const std::string& ylabel,
                   const std::vector<std::pair<int, std::string>>& y_columns, bool log_y) {
  if (y_columns.empty()) throw std::invalid_argument("write_gnuplot: no curves");
  const std::string png =
      std::filesystem::path(csv_name).stem().string() + ".png";

  auto out = open_binary(path);
  out << "set terminal pngcairo size 900,600\n";
  out << "set output '" << png << "'\n";
  out << "set title \"" << title << "\"\n";
  out << "set xlabel \"" << xlabel << "\"\n";
  out << "set ylabel \"" << ylabel << "\"\n";
  out << "set datafile separator \",\"\n";
  out << "set key top right\n";
  if (log_y) out << "set logscale y\n";
  out << "plot";
  for (std::size_t i = 0; i < y_columns.size(); ++i) {
    if (i) out << ',';
    out << " '" << csv_name << "' using 1:" << y_columns[i].first
        << " skip 1 with linespoints title \"" << y_columns[i].second << "\"";
  }
  out << "\n";
}

void write_manifest(const std::filesystem::path& dir, RunManifest manifest) {
  if (manifest.version.empty()) manifest.version = std::string(core_version());
  manifest.outputs.push_back("manifest.json");
  std::sort(manifest.outputs.begin(), manifest.outputs.end());
  manifest.outputs.erase(std::unique(manifest.outputs.begin(), manifest.outputs.end()),
                         manifest.outputs.end());

  nlohmann::json j;
  j["command"] = manifest.command;
  j["config_hash"] = manifest.config_hash;
  j["outputs"] = manifest.outputs;
  j["version"] = manifest.version;
  j["wall_seconds"] = manifest.wall_seconds;

  auto out = open_binary(dir / "manifest.json");
  out << j.dump(2) << "\n";
}

}  // namespace siglab

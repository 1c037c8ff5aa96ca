#include "meshpress/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace meshpress {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw MeshError("line " + std::to_string(line) + ": " + what);
}

double to_double(const std::string& token, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) parse_error(line, "malformed number '" + token + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_error(line, "malformed number '" + token + "'");
  }
}

long long to_integer(std::string_view token, std::size_t line) {
  long long v = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end) parse_error(line, "malformed index '" + std::string(token) + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  std::string t;
  while (ss >> t) tokens.push_back(t);
  return tokens;
}

/// Reads the next line that is neither blank nor a '#' comment.
bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  return false;
}

TriMesh finish(std::vector<Vec3> vertices, std::vector<Face> faces) {
  TriMesh mesh(std::move(vertices), std::move(faces));
  require_manifold(mesh);
  return mesh;
}

VertexId checked_index(long long idx, std::size_t vertex_count, std::size_t line) {
  if (idx < 0 || static_cast<std::size_t>(idx) >= vertex_count) {
    parse_error(line, "vertex index " + std::to_string(idx) + " out of range [0, " +
                          std::to_string(vertex_count) + ")");
  }
  return static_cast<VertexId>(idx);
}

TriMesh read_obj(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<std::pair<std::array<long long, 3>, std::size_t>> raw_faces;
  std::string line;
  std::size_t line_no = 0;
  while (next_content_line(in, line, line_no)) {
    const auto tokens = split(line);
    if (tokens[0] == "v") {
      if (tokens.size() < 4) parse_error(line_no, "vertex needs three coordinates");
      vertices.emplace_back(to_double(tokens[1], line_no), to_double(tokens[2], line_no),
                            to_double(tokens[3], line_no));
    } else if (tokens[0] == "f") {
      if (tokens.size() != 4) {
        parse_error(line_no, "face with " + std::to_string(tokens.size() - 1) +
                                 " corners; only triangles are supported");
      }
      std::array<long long, 3> idx{};
      for (int k = 0; k < 3; ++k) {
        const auto& tok = tokens[k + 1];
        const long long i = to_integer(std::string_view(tok).substr(0, tok.find('/')), line_no);
        if (i == 0) parse_error(line_no, "OBJ indices are 1-based");
        // Negative indices count back from the most recent vertex.
        idx[k] = i > 0 ? i - 1 : static_cast<long long>(vertices.size()) + i;
      }
      raw_faces.push_back({idx, line_no});
    }
    // vn, vt, g, o, s, usemtl, mtllib: ignored.
  }
  std::vector<Face> faces;
  faces.reserve(raw_faces.size());
  for (const auto& [idx, ln] : raw_faces) {
    faces.push_back({checked_index(idx[0], vertices.size(), ln), checked_index(idx[1], vertices.size(), ln),
                     checked_index(idx[2], vertices.size(), ln)});
  }
  return finish(std::move(vertices), std::move(faces));
}

TriMesh read_off(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_content_line(in, line, line_no)) throw MeshError("empty OFF file");
  auto tokens = split(line);
  if (tokens[0] == "OFF") {
    tokens.erase(tokens.begin());
    if (tokens.empty()) {
      if (!next_content_line(in, line, line_no)) parse_error(line_no, "missing OFF counts");
      tokens = split(line);
    }
  } else if (tokens[0].size() >= 3 && tokens[0].substr(tokens[0].size() - 3) == "OFF") {
    parse_error(line_no, "unsupported OFF variant '" + tokens[0] + "'");
  }
  if (tokens.size() < 2) parse_error(line_no, "OFF counts line needs vertex and face counts");
  const long long nv = to_integer(tokens[0], line_no);
  const long long nf = to_integer(tokens[1], line_no);
  if (nv < 0 || nf < 0) parse_error(line_no, "negative element count");

  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    if (!next_content_line(in, line, line_no)) parse_error(line_no, "unexpected end of file in vertex list");
    const auto t = split(line);
    if (t.size() < 3) parse_error(line_no, "vertex needs three coordinates");
    vertices.emplace_back(to_double(t[0], line_no), to_double(t[1], line_no), to_double(t[2], line_no));
  }
  std::vector<Face> faces;
  faces.reserve(static_cast<std::size_t>(nf));
  for (long long i = 0; i < nf; ++i) {
    if (!next_content_line(in, line, line_no)) parse_error(line_no, "unexpected end of file in face list");
    const auto t = split(line);
    const long long n = to_integer(t[0], line_no);
    if (n != 3) {
      parse_error(line_no, "face with " + std::to_string(n) + " corners; only triangles are supported");
    }
    if (t.size() < 4) parse_error(line_no, "face line is missing indices");
    faces.push_back({checked_index(to_integer(t[1], line_no), vertices.size(), line_no),
                     checked_index(to_integer(t[2], line_no), vertices.size(), line_no),
                     checked_index(to_integer(t[3], line_no), vertices.size(), line_no)});
  }
  return finish(std::move(vertices), std::move(faces));
}

TriMesh read_ply(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || lower(split(line).empty() ? "" : split(line)[0]) != "ply") {
    throw MeshError("missing 'ply' magic");
  }
  ++line_no;

  struct Element {
    std::string name;
    long long count = 0;
    std::vector<std::string> properties;
    bool has_list = false;
  };
  std::vector<Element> elements;
  bool ascii = false;
  while (true) {
    if (!std::getline(in, line)) parse_error(line_no, "unterminated PLY header");
    ++line_no;
    const auto t = split(line);
    if (t.empty() || t[0] == "comment" || t[0] == "obj_info") continue;
    if (t[0] == "end_header") break;
    if (t[0] == "format") {
      if (t.size() < 2 || t[1] != "ascii") parse_error(line_no, "only ascii PLY is supported");
      ascii = true;
    } else if (t[0] == "element") {
      if (t.size() < 3) parse_error(line_no, "malformed element line");
      elements.push_back({t[1], to_integer(t[2], line_no), {}, false});
    } else if (t[0] == "property") {
      if (elements.empty()) parse_error(line_no, "property before element");
      if (t.size() >= 2 && t[1] == "list") {
        elements.back().has_list = true;
        elements.back().properties.push_back(t.back());
      } else {
        elements.back().properties.push_back(t.back());
      }
    }
  }
  if (!ascii) throw MeshError("PLY header lacks 'format ascii 1.0'");

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<std::pair<std::array<long long, 3>, std::size_t>> raw_faces;
  for (const auto& el : elements) {
    if (el.name == "vertex") {
      auto find = [&](const char* name) -> std::size_t {
        auto it = std::find(el.properties.begin(), el.properties.end(), name);
        if (it == el.properties.end()) parse_error(line_no, std::string("vertex element lacks '") + name + "'");
        return static_cast<std::size_t>(it - el.properties.begin());
      };
      const auto ix = find("x"), iy = find("y"), iz = find("z");
      for (long long i = 0; i < el.count; ++i) {
        if (!next_content_line(in, line, line_no)) parse_error(line_no, "unexpected end of vertex data");
        const auto t = split(line);
        if (t.size() < el.properties.size()) parse_error(line_no, "short vertex record");
        vertices.emplace_back(to_double(t[ix], line_no), to_double(t[iy], line_no), to_double(t[iz], line_no));
      }
    } else if (el.name == "face") {
      for (long long i = 0; i < el.count; ++i) {
        if (!next_content_line(in, line, line_no)) parse_error(line_no, "unexpected end of face data");
        const auto t = split(line);
        const long long n = to_integer(t[0], line_no);
        if (n != 3) {
          parse_error(line_no, "face with " + std::to_string(n) + " corners; only triangles are supported");
        }
        if (t.size() < 4) parse_error(line_no, "face record is missing indices");
        raw_faces.push_back({{to_integer(t[1], line_no), to_integer(t[2], line_no), to_integer(t[3], line_no)},
                             line_no});
      }
    } else {
      for (long long i = 0; i < el.count; ++i) {
        if (!next_content_line(in, line, line_no)) parse_error(line_no, "unexpected end of element data");
      }
    }
  }
  for (const auto& [idx, ln] : raw_faces) {
    faces.push_back({checked_index(idx[0], vertices.size(), ln), checked_index(idx[1], vertices.size(), ln),
                     checked_index(idx[2], vertices.size(), ln)});
  }
  return finish(std::move(vertices), std::move(faces));
}

}  // namespace

std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".off") return MeshFormat::Off;
  if (ext == ".ply") return MeshFormat::PlyAscii;
  return std::nullopt;
}

TriMesh read_mesh(std::istream& in, MeshFormat format) {
  switch (format) {
    case MeshFormat::Obj:
      return read_obj(in);
    case MeshFormat::Off:
      return read_off(in);
    case MeshFormat::PlyAscii:
      return read_ply(in);
  }
  throw MeshError("unknown mesh format");
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path.string());
  try {
    return read_mesh(in, format);
  } catch (const MeshError& e) {
    throw MeshError(path.string() + ": " + e.what());
  }
}

TriMesh load_mesh(const std::filesystem::path& path) {
  const auto format = format_from_extension(path);
  if (!format) throw MeshError("cannot infer mesh format from '" + path.string() + "'");
  return load_mesh(path, *format);
}

void write_mesh(std::ostream& out, const TriMesh& mesh, MeshFormat format) {
  out << std::setprecision(9);
  const auto vertices = mesh.vertices();
  const auto faces = mesh.faces();
  switch (format) {
    case MeshFormat::Obj:
      for (const auto& v : vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
      for (const auto& f : faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
      break;
    case MeshFormat::Off:
      out << "OFF\n" << vertices.size() << ' ' << faces.size() << " 0\n";
      for (const auto& v : vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
      for (const auto& f : faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
      break;
    case MeshFormat::PlyAscii:
      out << "ply\nformat ascii 1.0\n"
          << "element vertex " << vertices.size() << "\n"
          << "property double x\nproperty double y\nproperty double z\n"
          << "element face " << faces.size() << "\n"
          << "property list uchar int vertex_indices\nend_header\n";
      for (const auto& v : vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
      for (const auto& f : faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
      break;
  }
}

void save_mesh(const std::filesystem::path& path, const TriMesh& mesh, MeshFormat format) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write " + path.string());
  write_mesh(out, mesh, format);
  if (!out) throw MeshError("write failed for " + path.string());
}

void save_mesh(const std::filesystem::path& path, const TriMesh& mesh) {
  const auto format = format_from_extension(path);
  if (!format) throw MeshError("cannot infer mesh format from '" + path.string() + "'");
  save_mesh(path, mesh, *format);
}

}  // namespace meshpress

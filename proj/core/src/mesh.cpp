#include "meshpress/mesh.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace meshpress {
namespace {

std::uint64_t directed_key(VertexId from, VertexId to) {
  return (static_cast<std::uint64_t>(from) << 32) | to;
}

std::uint64_t undirected_key(VertexId a, VertexId b) {
  return a < b ? directed_key(a, b) : directed_key(b, a);
}

}  // namespace

Adjacency build_adjacency(std::span<const Face> faces, std::size_t vertex_count) {
  Adjacency adj;

  std::vector<std::pair<std::uint64_t, FaceId>> half_edges;
  half_edges.reserve(faces.size() * 3);
  for (FaceId f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      half_edges.emplace_back(directed_key(faces[f][k], faces[f][(k + 1) % 3]), f);
    }
  }
  std::sort(half_edges.begin(), half_edges.end());

  adj.face_neighbors.assign(faces.size(), {kInvalidIndex, kInvalidIndex, kInvalidIndex});
  for (FaceId f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const auto twin = directed_key(faces[f][(k + 1) % 3], faces[f][k]);
      auto it = std::lower_bound(half_edges.begin(), half_edges.end(),
                                 std::make_pair(twin, FaceId{0}));
      if (it != half_edges.end() && it->first == twin) {
        adj.face_neighbors[f][k] = it->second;
      }
    }
  }

  adj.star_offsets.assign(vertex_count + 1, 0);
  for (const auto& face : faces) {
    for (VertexId v : face) ++adj.star_offsets[v + 1];
  }
  for (std::size_t v = 0; v < vertex_count; ++v) {
    adj.star_offsets[v + 1] += adj.star_offsets[v];
  }
  adj.star_faces.resize(adj.star_offsets.back());
  std::vector<std::uint32_t> cursor(adj.star_offsets.begin(), adj.star_offsets.end() - 1);
  for (FaceId f = 0; f < faces.size(); ++f) {
    for (VertexId v : faces[f]) adj.star_faces[cursor[v]++] = f;
  }
  return adj;
}

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const auto n = vertices_.size();
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& t = faces_[f];
    for (VertexId v : t) {
      if (v >= n) {
        throw MeshError("face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                        " but the mesh has " + std::to_string(n) + " vertices");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0]) {
      throw MeshError("face " + std::to_string(f) + " is degenerate (repeated vertex index)");
    }
  }
  adjacency_ = build_adjacency(faces_, n);
}

std::span<const FaceId> TriMesh::star(VertexId v) const {
  const auto begin = adjacency_.star_offsets[v];
  const auto end = adjacency_.star_offsets[v + 1];
  return std::span<const FaceId>(adjacency_.star_faces).subspan(begin, end - begin);
}

bool TriMesh::is_boundary_vertex(VertexId v) const {
  for (FaceId f : star(v)) {
    for (int k = 0; k < 3; ++k) {
      const auto& t = faces_[f];
      if ((t[k] == v || t[(k + 1) % 3] == v) && neighbor(f, k) == kInvalidIndex) return true;
    }
  }
  return false;
}

TriMesh TriMesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw MeshError("with_vertices: vertex count mismatch");
  }
  TriMesh copy;
  copy.vertices_ = std::move(vertices);
  copy.faces_ = faces_;
  copy.adjacency_ = adjacency_;
  return copy;
}

BBox bounding_box(std::span<const Vec3> points) {
  if (points.empty()) throw MeshError("bounding box of an empty point set");
  BBox box{points[0], points[0]};
  for (const auto& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

BBox bounding_box(const TriMesh& mesh) { return bounding_box(mesh.vertices()); }

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NonManifoldEdge:
      return "non-manifold edge";
    case ViolationKind::InconsistentOrientation:
      return "inconsistent orientation";
    case ViolationKind::NonManifoldVertex:
      return "non-manifold vertex";
  }
  return "unknown";
}

ManifoldReport validate_manifold(const TriMesh& mesh) {
  ManifoldReport report;
  const auto faces = mesh.faces();

  // (undirected key, direction flag) per half-edge.
  std::vector<std::pair<std::uint64_t, bool>> edges;
  edges.reserve(faces.size() * 3);
  for (const auto& t : faces) {
    for (int k = 0; k < 3; ++k) {
      const VertexId a = t[k];
      const VertexId b = t[(k + 1) % 3];
      edges.emplace_back(undirected_key(a, b), a < b);
    }
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j].first == edges[i].first) ++j;
    const auto a = static_cast<VertexId>(edges[i].first >> 32);
    const auto b = static_cast<VertexId>(edges[i].first & 0xffffffffu);
    const auto count = j - i;
    if (count == 1) {
      ++report.boundary_edges;
    } else if (count > 2) {
      report.violations.push_back({ViolationKind::NonManifoldEdge, a, b,
                                   "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                       ") is shared by " + std::to_string(count) + " faces"});
    } else if (edges[i].second == edges[i + 1].second) {
      report.violations.push_back({ViolationKind::InconsistentOrientation, a, b,
                                   "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                       ") is traversed twice in the same direction"});
    }
    i = j;
  }

  // Vertex links: for every face (v, x, y) around v, the link edge x -> y.
  // A manifold star links into exactly one path or one cycle.
  std::vector<std::pair<VertexId, VertexId>> link;
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    const auto star = mesh.star(v);
    if (star.empty()) {
      report.violations.push_back(
          {ViolationKind::NonManifoldVertex, v, kInvalidIndex, "vertex " + std::to_string(v) + " is isolated"});
      continue;
    }
    link.clear();
    for (FaceId f : star) {
      const auto& t = faces[f];
      const int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
      link.emplace_back(t[(k + 1) % 3], t[(k + 2) % 3]);
    }
    std::sort(link.begin(), link.end());
    bool bad = false;
    for (std::size_t i = 1; i < link.size(); ++i) {
      if (link[i].first == link[i - 1].first) bad = true;
    }
    std::vector<VertexId> targets;
    targets.reserve(link.size());
    for (const auto& e : link) targets.push_back(e.second);
    std::sort(targets.begin(), targets.end());
    for (std::size_t i = 1; i < targets.size(); ++i) {
      if (targets[i] == targets[i - 1]) bad = true;
    }
    if (!bad) {
      // Walk from a path start (a source that is nobody's target), or from
      // any edge when the link is a cycle; every link edge must be reached.
      auto next_of = [&](VertexId x) -> const std::pair<VertexId, VertexId>* {
        auto it = std::lower_bound(link.begin(), link.end(), std::make_pair(x, VertexId{0}));
        return (it != link.end() && it->first == x) ? &*it : nullptr;
      };
      VertexId start = link.front().first;
      for (const auto& e : link) {
        if (!std::binary_search(targets.begin(), targets.end(), e.first)) {
          start = e.first;
          break;
        }
      }
      std::size_t walked = 0;
      VertexId cur = start;
      while (const auto* e = next_of(cur)) {
        ++walked;
        cur = e->second;
        if (cur == start || walked > link.size()) break;
      }
      bad = walked != link.size();
    }
    if (bad) {
      report.violations.push_back({ViolationKind::NonManifoldVertex, v, kInvalidIndex,
                                   "star of vertex " + std::to_string(v) + " is not a single fan"});
    }
  }
  return report;
}

void require_manifold(const TriMesh& mesh) {
  const auto report = validate_manifold(mesh);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw MeshError(to_string(v.kind) + ": " + v.message);
  }
}

}  // namespace meshpress

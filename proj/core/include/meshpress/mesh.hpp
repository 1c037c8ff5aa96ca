#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace meshpress {

using Vec3 = Eigen::Vector3d;
using VertexId = std::uint32_t;
using FaceId = std::uint32_t;
using Face = std::array<VertexId, 3>;

inline constexpr std::uint32_t kInvalidIndex = 0xffffffffu;

/// Raised for malformed mesh input and for meshes that break the manifold
/// contract the codec relies on.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  double diagonal() const { return extent().norm(); }
};

/// Derived connectivity of a triangle list.
///
/// `face_neighbors[f][k]` is the face across edge k of f, where edge k runs
/// from `faces[f][k]` to `faces[f][(k + 1) % 3]`; kInvalidIndex marks a
/// boundary edge. The vertex star is stored CSR-style, faces ascending.
struct Adjacency {
  std::vector<std::array<FaceId, 3>> face_neighbors;
  std::vector<std::uint32_t> star_offsets;
  std::vector<FaceId> star_faces;

  bool operator==(const Adjacency&) const = default;
};

Adjacency build_adjacency(std::span<const Face> faces, std::size_t vertex_count);

/// Indexed triangle mesh. Immutable once built; geometry edits produce a
/// copy through `with_vertices`.
///
/// Construction checks index range and rejects topologically degenerate
/// faces. Manifoldness is checked separately by `validate_manifold` so that
/// broken inputs can still be inspected.
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }

  std::span<const Vec3> vertices() const { return vertices_; }
  std::span<const Face> faces() const { return faces_; }
  const Vec3& vertex(VertexId v) const { return vertices_[v]; }
  const Face& face(FaceId f) const { return faces_[f]; }

  const Adjacency& adjacency() const { return adjacency_; }

  FaceId neighbor(FaceId f, int edge) const { return adjacency_.face_neighbors[f][edge]; }
  std::span<const FaceId> star(VertexId v) const;
  bool is_boundary_vertex(VertexId v) const;

  TriMesh with_vertices(std::vector<Vec3> vertices) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  Adjacency adjacency_;
};

BBox bounding_box(const TriMesh& mesh);
BBox bounding_box(std::span<const Vec3> points);

enum class ViolationKind {
  NonManifoldEdge,
  InconsistentOrientation,
  NonManifoldVertex,
};

struct Violation {
  ViolationKind kind;
  VertexId a = kInvalidIndex;
  VertexId b = kInvalidIndex;
  std::string message;
};

struct ManifoldReport {
  std::vector<Violation> violations;
  std::size_t boundary_edges = 0;

  bool ok() const { return violations.empty(); }
};

/// An edge may carry at most two faces, with opposite directions; each
/// vertex star must be one fan (interior) or one half-fan (boundary).
/// Boundary edges are counted, not reported.
ManifoldReport validate_manifold(const TriMesh& mesh);

/// Throws MeshError naming the first violation.
void require_manifold(const TriMesh& mesh);

std::string to_string(ViolationKind kind);

}  // namespace meshpress

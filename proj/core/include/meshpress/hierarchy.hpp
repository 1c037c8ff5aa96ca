#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "meshpress/mesh.hpp"

namespace meshpress {

/// How one coarse face was refined. Edge k of a face (v0, v1, v2) joins
/// v_k and v_{k+1}.
enum class Pattern : std::uint8_t {
  Unchanged,   // 1 face
  Bisect,      // 2 faces, `edge` is the split edge
  Trisect,     // 3 faces, `edge` is the one edge left unsplit
  Quadrisect,  // 4 faces
};

struct FacePattern {
  Pattern kind = Pattern::Unchanged;
  std::uint8_t edge = 0;
  /// Trisect only. With (a, b) the unsplit edge and c the opposite corner,
  /// 0 cuts the remaining quad from a to the midpoint of (b, c); 1 cuts it
  /// from b to the midpoint of (c, a).
  std::uint8_t diagonal = 0;

  bool splits(int k) const;
  int child_count() const;
  /// Symbol in [0, 8): Unchanged, Bisect x3, Trisect x3, Quadrisect.
  std::uint8_t symbol() const;
  static FacePattern from_symbol(std::uint8_t symbol, std::uint8_t diagonal = 0);

  bool operator==(const FacePattern&) const = default;
};

inline constexpr int kPatternSymbols = 8;

/// Odd vertex inserted on the coarse edge (a, b). Labels are fine-mesh ids.
struct SplitEdge {
  VertexId odd = kInvalidIndex;
  VertexId a = kInvalidIndex;
  VertexId b = kInvalidIndex;
};

struct FaceGroup {
  FaceId coarse_face = kInvalidIndex;
  FacePattern pattern;
  /// Fine faces, listed in the child order produced by `subdivide`.
  std::vector<FaceId> fine_faces;
  std::vector<Face> fine_triangles;
  std::vector<SplitEdge> split_edges;
};

/// One simplification step M^j -> M^{j-1}.
///
/// Coarse vertex i is fine vertex `even_vertices[i]`; `parents[v]` holds the
/// two even fine vertices of odd vertex v and is {kInvalidIndex, ...} for
/// even vertices. `face_groups[c]` describes coarse face c.
struct LevelRecord {
  int level = 0;
  std::size_t fine_vertex_count = 0;
  std::size_t fine_face_count = 0;
  std::vector<VertexId> even_vertices;
  std::vector<VertexId> odd_vertices;
  std::vector<std::array<VertexId, 2>> parents;
  std::vector<FaceGroup> face_groups;
  TriMesh coarse;

  bool is_odd(VertexId v) const { return parents[v][0] != kInvalidIndex; }
};

/// Wavelet Geometric Criterion: an odd vertex is only admissible when its
/// distance to its parents' midpoint is at most gamma times the parent edge
/// length.
struct WgcConfig {
  bool enabled = true;
  double gamma = 0.25;
};

inline constexpr int kDefaultMaxLevels = 32;

/// One greedy inversion step. Returns nullopt when no vertex can be removed.
/// Throws MeshError for non-manifold input.
std::optional<LevelRecord> simplify_once(const TriMesh& mesh, const WgcConfig& wgc);

/// Repeats simplify_once until it fails or `max_levels` steps were taken.
/// Finest level first; records[i + 1] simplifies records[i].coarse.
std::vector<LevelRecord> build_hierarchy(const TriMesh& mesh, const WgcConfig& wgc,
                                         int max_levels = kDefaultMaxLevels);

/// Connectivity produced by refining a coarse face list. New vertices are
/// numbered from `coarse_vertex_count` upward in the order their edges are
/// first met while scanning faces (and edges 0, 1, 2 within a face).
struct Subdivision {
  std::size_t coarse_vertex_count = 0;
  std::vector<Face> faces;
  std::vector<std::array<VertexId, 2>> parents;  // of vertex coarse_vertex_count + i
  std::vector<std::uint32_t> child_offsets;      // faces of coarse face c: [off[c], off[c+1])

  std::size_t fine_vertex_count() const { return coarse_vertex_count + parents.size(); }
};

/// Throws MeshError if two faces disagree on whether a shared edge is split.
Subdivision subdivide(std::span<const Face> coarse_faces, std::size_t coarse_vertex_count,
                      std::span<const FacePattern> patterns);

struct Resubdivision {
  TriMesh mesh;                  // new odd vertices sit at parent midpoints
  std::vector<VertexId> to_fine;  // label in the record's fine mesh
};

/// Rebuilds M^j from the record's coarse mesh and face groups. Throws
/// MeshError if the record is inconsistent.
Resubdivision resubdivide(const LevelRecord& record);

/// Face lists equal up to the cyclic rotation of each face and face order.
bool same_connectivity(std::span<const Face> a, std::span<const Face> b);

}  // namespace meshpress

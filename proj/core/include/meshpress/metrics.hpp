#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "meshpress/mesh.hpp"
#include "meshpress/stream_format.hpp"

namespace meshpress {

/// Exact distance from p to the closed triangle (a, b, c). Degenerate
/// triangles fall back to their edges.
double point_to_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

enum class Direction { AtoB, BtoA, SymmetricMax };

struct DistortionResult {
  double rms = 0.0;
  double max_dist = 0.0;
  std::size_t sample_count = 0;
  Direction direction = Direction::SymmetricMax;
};

inline constexpr std::size_t kMinSamplesPerFace = 10;
inline constexpr std::size_t kMaxSamples = 1'000'000;

struct SamplingOptions {
  /// Samples per unit area on top of the per-face minimum.
  double samples_per_unit_area = 0.0;
  std::uint64_t seed = 1;
  /// Scan every triangle instead of using the grid. For testing.
  bool brute_force = false;
};

/// Area-stratified points on `mesh`: face f gets
/// max(10, round(area * density)) points, scaled down together if the total
/// would pass 10^6. Each face draws from its own generator seeded from
/// (seed, f), so the set does not depend on evaluation order.
std::vector<Vec3> sample_surface(const TriMesh& mesh, const SamplingOptions& options);

/// Distance from each point to the surface of `mesh`.
std::vector<double> surface_distances(std::span<const Vec3> points, const TriMesh& mesh, bool brute_force = false);

/// Samples `from`, measures against `to`, divides by `diagonal`.
DistortionResult directed_distance(const TriMesh& from, const TriMesh& to, const SamplingOptions& options,
                                   double diagonal);

/// Symmetric distortion of `b` against the reference `a`: the larger of the
/// two directed RMS values and of the two directed maxima, both divided by
/// the diagonal of a's bounding box. Throws MeshError for empty or
/// zero-area input.
DistortionResult sampled_distance(const TriMesh& a, const TriMesh& b, const SamplingOptions& options);

/// Density that puts about `target` samples on `mesh`.
double density_for(const TriMesh& mesh, std::size_t target);

double surface_area(const TriMesh& mesh);

/// Bits per vertex; throws std::invalid_argument for zero vertices.
double bpv(std::uint64_t bits, std::size_t vertices);
double bpv(const RateReport& report);

}  // namespace meshpress

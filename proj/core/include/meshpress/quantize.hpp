#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "meshpress/mesh.hpp"
#include "meshpress/wavelet.hpp"

namespace meshpress {

inline constexpr int kMinPrecision = 4;
inline constexpr int kMaxGridBits = 16;
inline constexpr int kDefaultQMax = 12;
inline constexpr std::uint64_t kDefaultThreshold = 200;

/// Isotropic grid: the longest bounding-box axis spans [0, 2^q_max - 1].
struct QuantGrid {
  Vec3 origin = Vec3::Zero();
  Vec3 scale = Vec3::Ones();  // grid units per model unit, equal on all axes
  int q_max = kDefaultQMax;

  IVec3 quantize(const Vec3& p) const;
  Vec3 dequantize(const IVec3& c) const;
};

/// Throws MeshError for an empty or zero-extent mesh and for q_max outside
/// [kMinPrecision, kMaxGridBits].
QuantGrid make_grid(const TriMesh& mesh, int q_max);

/// Keeps the q most significant of q_max bits (arithmetic shift, so values
/// slightly below zero still floor).
IVec3 scale_to_precision(const IVec3& c, int q_max, int q);

std::int64_t squared_distance(const IVec3& a, const IVec3& b);

/// Smallest q in [kMinPrecision, q_max] at which the two points, both scaled
/// to q bits, are at squared distance >= threshold; q_max if none is.
int required_precision(const IVec3& target, const IVec3& neighbor, int q_max, std::uint64_t threshold);

struct PrecisionAssignment {
  int q = 0;
  IVec3 coords = IVec3::Zero();  // target at q bits
};

/// Brute-force reference: nearest candidate by exact integer distance, ties
/// to the lowest index. Throws std::invalid_argument for no candidates.
PrecisionAssignment assign_precision(const IVec3& target, std::span<const IVec3> candidates, int q_max,
                                     std::uint64_t threshold);

/// Exact nearest-neighbour queries over a fixed point set, bucketed on a
/// uniform grid. Results match a linear scan, ties included.
class NearestNeighborIndex {
 public:
  explicit NearestNeighborIndex(std::span<const IVec3> points);

  /// Index of the nearest point other than `exclude`, or kInvalidIndex
  /// when there is none.
  VertexId nearest(const IVec3& p, VertexId exclude = kInvalidIndex) const;

 private:
  std::uint64_t key(std::int64_t x, std::int64_t y, std::int64_t z) const;
  IVec3 cell_of(const IVec3& p) const;

  std::span<const IVec3> points_;
  std::int64_t cell_ = 1;
  IVec3 origin_shift_ = IVec3::Zero();
  IVec3 lo_ = IVec3::Zero();
  IVec3 hi_ = IVec3::Zero();
  std::unordered_map<std::uint64_t, std::vector<VertexId>> cells_;
};

/// Rounds value / 2^shift to the nearest integer, halves away from zero.
std::int64_t round_shift(std::int64_t value, int shift);
IVec3 round_shift(const IVec3& value, int shift);

struct QuantizedDetail {
  int q = 0;
  IVec3 value = IVec3::Zero();  // in steps of 2^(q_max - q) grid units
};

/// Quantizes one level of integer details. `targets[k]` is the decoder's
/// prediction for odd vertex k and `candidates` the positions it already
/// holds; q comes from `assign_precision` against them.
std::vector<QuantizedDetail> quantize_details(std::span<const IVec3> details, std::span<const IVec3> targets,
                                              std::span<const IVec3> candidates, int q_max,
                                              std::uint64_t threshold);

}  // namespace meshpress

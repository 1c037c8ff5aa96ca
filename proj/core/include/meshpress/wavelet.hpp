#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "meshpress/hierarchy.hpp"

namespace meshpress {

using IVec3 = Eigen::Matrix<std::int64_t, 3, 1>;

/// Coefficients of one analysis step.
///
/// `approx[i]` belongs to coarse vertex i; `details[k]` to fine vertex
/// `odd_vertices[k]` (ascending, as in the record).
struct CoefficientSet {
  int level = 0;
  std::vector<Vec3> approx;
  std::vector<VertexId> odd_vertices;
  std::vector<Vec3> details;
  bool lifted = false;
};

/// Midpoint prediction, then optionally the update
/// approx(e) = pos(e) + sum of the k_e details touching e / (4 k_e).
CoefficientSet analyze(const LevelRecord& record, std::span<const Vec3> fine, bool lifting);

/// Exact inverse of `analyze`. Returns positions indexed like the record's
/// fine mesh.
std::vector<Vec3> synthesize(const LevelRecord& record, const CoefficientSet& coeffs);

/// The same transform on integer grid coordinates, laid out the way the codec
/// numbers vertices: coarse vertices first, then odd vertex i at
/// `coarse_count + i` with parents `parents[i]` (both coarse).
///
/// Prediction uses floor((a + b) / 2) and the update rounds sum / (4 k) to
/// the nearest integer, halves upward, so the pair is exactly invertible.
struct IntegerCoefficients {
  std::vector<IVec3> approx;
  std::vector<IVec3> details;
};

IntegerCoefficients analyze_integer(std::span<const IVec3> fine, std::span<const std::array<VertexId, 2>> parents,
                                    bool lifting);
std::vector<IVec3> synthesize_integer(std::span<const IVec3> approx, std::span<const IVec3> details,
                                      std::span<const std::array<VertexId, 2>> parents, bool lifting);

/// Floor of a / b for b > 0.
std::int64_t floor_div(std::int64_t a, std::int64_t b);

}  // namespace meshpress

#include "meshpress/wavelet.hpp"

#include <string>

namespace meshpress {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw MeshError(message);
}

/// Coarse index of every fine vertex, kInvalidIndex for odd ones.
std::vector<VertexId> coarse_index(const LevelRecord& record) {
  std::vector<VertexId> out(record.fine_vertex_count, kInvalidIndex);
  for (VertexId i = 0; i < record.even_vertices.size(); ++i) out[record.even_vertices[i]] = i;
  return out;
}

/// Lifting update added to each coarse vertex: mean of its details / 4.
std::vector<Vec3> real_update(const LevelRecord& record, std::span<const Vec3> details) {
  const auto to_coarse = coarse_index(record);
  const auto n = record.even_vertices.size();
  std::vector<Vec3> sum(n, Vec3::Zero());
  std::vector<int> count(n, 0);
  for (std::size_t k = 0; k < record.odd_vertices.size(); ++k) {
    for (VertexId p : record.parents[record.odd_vertices[k]]) {
      sum[to_coarse[p]] += details[k];
      ++count[to_coarse[p]];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] > 0) sum[i] /= 4.0 * count[i];
  }
  return sum;
}

std::vector<IVec3> integer_update(std::size_t coarse_count, std::span<const IVec3> details,
                                  std::span<const std::array<VertexId, 2>> parents) {
  std::vector<IVec3> sum(coarse_count, IVec3::Zero());
  std::vector<std::int64_t> count(coarse_count, 0);
  for (std::size_t k = 0; k < parents.size(); ++k) {
    for (VertexId p : parents[k]) {
      sum[p] += details[k];
      ++count[p];
    }
  }
  for (std::size_t i = 0; i < coarse_count; ++i) {
    if (count[i] == 0) continue;
    const std::int64_t den = 4 * count[i];
    for (int c = 0; c < 3; ++c) sum[i][c] = floor_div(sum[i][c] + 2 * count[i], den);
  }
  return sum;
}

IVec3 floor_midpoint(const IVec3& a, const IVec3& b) {
  IVec3 s = a + b;
  for (int c = 0; c < 3; ++c) s[c] = floor_div(s[c], 2);
  return s;
}

}  // namespace

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && a < 0) ? q - 1 : q;
}

CoefficientSet analyze(const LevelRecord& record, std::span<const Vec3> fine, bool lifting) {
  require(fine.size() == record.fine_vertex_count,
          "analyze: " + std::to_string(fine.size()) + " positions for a level with " +
              std::to_string(record.fine_vertex_count) + " vertices");
  CoefficientSet out;
  out.level = record.level;
  out.lifted = lifting;
  out.odd_vertices = record.odd_vertices;
  out.details.reserve(record.odd_vertices.size());
  for (VertexId m : record.odd_vertices) {
    const auto& [a, b] = record.parents[m];
    out.details.push_back(fine[m] - 0.5 * (fine[a] + fine[b]));
  }
  out.approx.reserve(record.even_vertices.size());
  for (VertexId e : record.even_vertices) out.approx.push_back(fine[e]);
  if (lifting) {
    const auto update = real_update(record, out.details);
    for (std::size_t i = 0; i < out.approx.size(); ++i) out.approx[i] += update[i];
  }
  return out;
}

std::vector<Vec3> synthesize(const LevelRecord& record, const CoefficientSet& coeffs) {
  require(coeffs.level == record.level, "synthesize: coefficients of level " + std::to_string(coeffs.level) +
                                            " applied to level " + std::to_string(record.level));
  require(coeffs.approx.size() == record.even_vertices.size() && coeffs.details.size() == record.odd_vertices.size() &&
              coeffs.odd_vertices == record.odd_vertices,
          "synthesize: coefficient set does not match the level record");
  std::vector<Vec3> fine(record.fine_vertex_count, Vec3::Zero());
  for (std::size_t i = 0; i < record.even_vertices.size(); ++i) fine[record.even_vertices[i]] = coeffs.approx[i];
  if (coeffs.lifted) {
    const auto update = real_update(record, coeffs.details);
    for (std::size_t i = 0; i < record.even_vertices.size(); ++i) fine[record.even_vertices[i]] -= update[i];
  }
  for (std::size_t k = 0; k < record.odd_vertices.size(); ++k) {
    const VertexId m = record.odd_vertices[k];
    const auto& [a, b] = record.parents[m];
    fine[m] = 0.5 * (fine[a] + fine[b]) + coeffs.details[k];
  }
  return fine;
}

IntegerCoefficients analyze_integer(std::span<const IVec3> fine, std::span<const std::array<VertexId, 2>> parents,
                                    bool lifting) {
  require(fine.size() >= parents.size(), "analyze_integer: more odd vertices than positions");
  const auto coarse_count = fine.size() - parents.size();
  IntegerCoefficients out;
  out.approx.assign(fine.begin(), fine.begin() + static_cast<std::ptrdiff_t>(coarse_count));
  out.details.reserve(parents.size());
  for (std::size_t k = 0; k < parents.size(); ++k) {
    const auto& [a, b] = parents[k];
    require(a < coarse_count && b < coarse_count, "analyze_integer: parent is not a coarse vertex");
    out.details.push_back(fine[coarse_count + k] - floor_midpoint(fine[a], fine[b]));
  }
  if (lifting) {
    const auto update = integer_update(coarse_count, out.details, parents);
    for (std::size_t i = 0; i < coarse_count; ++i) out.approx[i] += update[i];
  }
  return out;
}

std::vector<IVec3> synthesize_integer(std::span<const IVec3> approx, std::span<const IVec3> details,
                                      std::span<const std::array<VertexId, 2>> parents, bool lifting) {
  require(details.size() == parents.size(), "synthesize_integer: detail and parent counts differ");
  const auto coarse_count = approx.size();
  std::vector<IVec3> fine(approx.begin(), approx.end());
  if (lifting) {
    const auto update = integer_update(coarse_count, details, parents);
    for (std::size_t i = 0; i < coarse_count; ++i) fine[i] -= update[i];
  }
  fine.reserve(coarse_count + details.size());
  for (std::size_t k = 0; k < details.size(); ++k) {
    const auto& [a, b] = parents[k];
    require(a < coarse_count && b < coarse_count, "synthesize_integer: parent is not a coarse vertex");
    fine.push_back(floor_midpoint(fine[a], fine[b]) + details[k]);
  }
  return fine;
}

}  // namespace meshpress

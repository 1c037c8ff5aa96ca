#include "meshpress/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace meshpress {

IVec3 QuantGrid::quantize(const Vec3& p) const {
  const Vec3 g = (p - origin).cwiseProduct(scale);
  return IVec3(std::llround(g.x()), std::llround(g.y()), std::llround(g.z()));
}

Vec3 QuantGrid::dequantize(const IVec3& c) const {
  return origin + c.cast<double>().cwiseQuotient(scale);
}

QuantGrid make_grid(const TriMesh& mesh, int q_max) {
  if (q_max < kMinPrecision || q_max > kMaxGridBits) {
    throw MeshError("q_max must lie in [" + std::to_string(kMinPrecision) + ", " + std::to_string(kMaxGridBits) +
                    "], got " + std::to_string(q_max));
  }
  if (mesh.vertex_count() == 0) throw MeshError("cannot quantize an empty mesh");
  const BBox box = bounding_box(mesh);
  const double longest = box.extent().maxCoeff();
  if (!(longest > 0.0)) throw MeshError("all vertices coincide; the grid has zero extent");
  QuantGrid grid;
  grid.origin = box.min;
  grid.scale = Vec3::Constant(static_cast<double>((std::int64_t{1} << q_max) - 1) / longest);
  grid.q_max = q_max;
  return grid;
}

IVec3 scale_to_precision(const IVec3& c, int q_max, int q) {
  if (q < kMinPrecision || q > q_max) {
    throw std::invalid_argument("precision " + std::to_string(q) + " outside [4, " + std::to_string(q_max) + "]");
  }
  const int shift = q_max - q;
  return IVec3(c.x() >> shift, c.y() >> shift, c.z() >> shift);
}

std::int64_t squared_distance(const IVec3& a, const IVec3& b) {
  return (a - b).squaredNorm();
}

int required_precision(const IVec3& target, const IVec3& neighbor, int q_max, std::uint64_t threshold) {
  for (int q = kMinPrecision; q < q_max; ++q) {
    const auto d = squared_distance(scale_to_precision(target, q_max, q), scale_to_precision(neighbor, q_max, q));
    if (static_cast<std::uint64_t>(d) >= threshold) return q;
  }
  return q_max;
}

PrecisionAssignment assign_precision(const IVec3& target, std::span<const IVec3> candidates, int q_max,
                                     std::uint64_t threshold) {
  if (candidates.empty()) throw std::invalid_argument("assign_precision: no candidates");
  std::size_t best = 0;
  std::int64_t best_d = squared_distance(target, candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto d = squared_distance(target, candidates[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  PrecisionAssignment out;
  out.q = required_precision(target, candidates[best], q_max, threshold);
  out.coords = scale_to_precision(target, q_max, out.q);
  return out;
}

NearestNeighborIndex::NearestNeighborIndex(std::span<const IVec3> points) : points_(points) {
  if (points.empty()) return;
  lo_ = hi_ = points[0];
  for (const auto& p : points) {
    lo_ = lo_.cwiseMin(p);
    hi_ = hi_.cwiseMax(p);
  }
  // About two points per cell on a roughly cubic set.
  const double extent = static_cast<double>((hi_ - lo_).maxCoeff());
  const double per_axis = std::cbrt(std::max(1.0, static_cast<double>(points.size()) / 2.0));
  cell_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(extent / per_axis)));
  // Cells are counted from the lower corner.
  const IVec3 base = lo_;
  lo_ = IVec3::Zero();
  hi_ = IVec3((points[0] - base) / cell_);
  for (const auto& p : points) hi_ = hi_.cwiseMax(IVec3((p - base) / cell_));
  origin_shift_ = base;
  for (VertexId i = 0; i < points.size(); ++i) {
    const IVec3 c = cell_of(points[i]);
    cells_[key(c.x(), c.y(), c.z())].push_back(i);
  }
}

std::uint64_t NearestNeighborIndex::key(std::int64_t x, std::int64_t y, std::int64_t z) const {
  return (static_cast<std::uint64_t>(x) << 42) | (static_cast<std::uint64_t>(y) << 21) | static_cast<std::uint64_t>(z);
}

IVec3 NearestNeighborIndex::cell_of(const IVec3& p) const {
  IVec3 c;
  for (int a = 0; a < 3; ++a) c[a] = floor_div(p[a] - origin_shift_[a], cell_);
  return c;
}

VertexId NearestNeighborIndex::nearest(const IVec3& p, VertexId exclude) const {
  if (points_.empty()) return kInvalidIndex;
  const IVec3 c = cell_of(p);
  VertexId best = kInvalidIndex;
  std::int64_t best_d = std::numeric_limits<std::int64_t>::max();
  const auto visit = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    const auto it = cells_.find(key(x, y, z));
    if (it == cells_.end()) return;
    for (VertexId i : it->second) {
      if (i == exclude) continue;
      const auto d = squared_distance(p, points_[i]);
      if (d < best_d || (d == best_d && i < best)) {
        best_d = d;
        best = i;
      }
    }
  };
  for (std::int64_t r = 0;; ++r) {
    const std::int64_t x0 = std::max(c.x() - r, lo_.x()), x1 = std::min(c.x() + r, hi_.x());
    const std::int64_t y0 = std::max(c.y() - r, lo_.y()), y1 = std::min(c.y() + r, hi_.y());
    const std::int64_t z0 = std::max(c.z() - r, lo_.z()), z1 = std::min(c.z() + r, hi_.z());
    for (std::int64_t x = x0; x <= x1; ++x) {
      for (std::int64_t y = y0; y <= y1; ++y) {
        if (std::abs(x - c.x()) == r || std::abs(y - c.y()) == r) {
          for (std::int64_t z = z0; z <= z1; ++z) visit(x, y, z);
        } else {
          if (c.z() - r >= lo_.z() && c.z() - r <= hi_.z()) visit(x, y, c.z() - r);
          if (r > 0 && c.z() + r >= lo_.z() && c.z() + r <= hi_.z()) visit(x, y, c.z() + r);
        }
      }
    }
    // Anything outside the searched block is at least r cells away.
    const std::int64_t reach = r * cell_;
    if (best != kInvalidIndex && best_d < reach * reach) break;
    const bool covered = c.x() - r <= lo_.x() && c.x() + r >= hi_.x() && c.y() - r <= lo_.y() &&
                         c.y() + r >= hi_.y() && c.z() - r <= lo_.z() && c.z() + r >= hi_.z();
    if (covered) break;
  }
  return best;
}

std::int64_t round_shift(std::int64_t value, int shift) {
  if (shift == 0) return value;
  const std::int64_t half = std::int64_t{1} << (shift - 1);
  const std::int64_t mag = value < 0 ? -value : value;
  const std::int64_t q = (mag + half) >> shift;
  return value < 0 ? -q : q;
}

IVec3 round_shift(const IVec3& value, int shift) {
  return IVec3(round_shift(value.x(), shift), round_shift(value.y(), shift), round_shift(value.z(), shift));
}

std::vector<QuantizedDetail> quantize_details(std::span<const IVec3> details, std::span<const IVec3> targets,
                                              std::span<const IVec3> candidates, int q_max,
                                              std::uint64_t threshold) {
  if (details.size() != targets.size()) throw std::invalid_argument("quantize_details: size mismatch");
  NearestNeighborIndex index(candidates);
  std::vector<QuantizedDetail> out;
  out.reserve(details.size());
  for (std::size_t k = 0; k < details.size(); ++k) {
    const VertexId nn = index.nearest(targets[k]);
    const int q = nn == kInvalidIndex ? q_max : required_precision(targets[k], candidates[nn], q_max, threshold);
    out.push_back({q, round_shift(details[k], q_max - q)});
  }
  return out;
}

}  // namespace meshpress

#include "meshpress/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Geometry>

namespace meshpress {
namespace {

double point_to_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double face_area(const TriMesh& mesh, FaceId f) {
  const auto& t = mesh.face(f);
  return 0.5 * (mesh.vertex(t[1]) - mesh.vertex(t[0])).cross(mesh.vertex(t[2]) - mesh.vertex(t[0])).norm();
}

/// Uniform grid over the target mesh; each face is listed in every cell its
/// bounding box touches.
class FaceGrid {
 public:
  explicit FaceGrid(const TriMesh& mesh) : mesh_(mesh) {
    const BBox box = bounding_box(mesh);
    min_ = box.min;
    double edge_sum = 0.0;
    for (const auto& t : mesh.faces()) {
      for (int k = 0; k < 3; ++k) edge_sum += (mesh.vertex(t[k]) - mesh.vertex(t[(k + 1) % 3])).norm();
    }
    cell_ = edge_sum / (3.0 * static_cast<double>(mesh.face_count()));
    const double longest = box.extent().maxCoeff();
    if (!(cell_ > 0.0)) cell_ = longest > 0.0 ? longest : 1.0;
    // Keep the cell count proportional to the face count.
    const double budget = 8.0 * static_cast<double>(mesh.face_count()) + 64.0;
    while (true) {
      for (int a = 0; a < 3; ++a) dims_[a] = static_cast<std::int64_t>(std::floor(box.extent()[a] / cell_)) + 1;
      if (static_cast<double>(dims_[0]) * static_cast<double>(dims_[1]) * static_cast<double>(dims_[2]) <= budget) break;
      cell_ *= 1.25;
    }
    const auto cells = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
    std::vector<std::uint32_t> counts(cells + 1, 0);
    const auto each_cell = [&](FaceId f, auto&& fn) {
      const auto& t = mesh.face(f);
      Vec3 lo = mesh.vertex(t[0]), hi = lo;
      for (int k = 1; k < 3; ++k) {
        lo = lo.cwiseMin(mesh.vertex(t[k]));
        hi = hi.cwiseMax(mesh.vertex(t[k]));
      }
      const auto c0 = clamp_cell(lo), c1 = clamp_cell(hi);
      for (auto x = c0[0]; x <= c1[0]; ++x) {
        for (auto y = c0[1]; y <= c1[1]; ++y) {
          for (auto z = c0[2]; z <= c1[2]; ++z) fn(index(x, y, z));
        }
      }
    };
    for (FaceId f = 0; f < mesh.face_count(); ++f) each_cell(f, [&](std::size_t c) { ++counts[c + 1]; });
    for (std::size_t c = 0; c < cells; ++c) counts[c + 1] += counts[c];
    offsets_ = counts;
    faces_.resize(offsets_.back());
    for (FaceId f = 0; f < mesh.face_count(); ++f) each_cell(f, [&](std::size_t c) { faces_[counts[c]++] = f; });
    stamp_.assign(mesh.face_count(), 0);
  }

  double distance(const Vec3& p) {
    ++query_;
    std::array<std::int64_t, 3> c{};
    for (int a = 0; a < 3; ++a) c[a] = static_cast<std::int64_t>(std::floor((p[a] - min_[a]) / cell_));
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t r = 0;; ++r) {
      std::array<std::int64_t, 3> lo{}, hi{};
      bool covered = true;
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::max<std::int64_t>(c[a] - r, 0);
        hi[a] = std::min<std::int64_t>(c[a] + r, dims_[a] - 1);
        covered = covered && c[a] - r <= 0 && c[a] + r >= dims_[a] - 1;
      }
      for (auto x = lo[0]; x <= hi[0]; ++x) {
        for (auto y = lo[1]; y <= hi[1]; ++y) {
          const bool shell = std::abs(x - c[0]) == r || std::abs(y - c[1]) == r;
          for (auto z = lo[2]; z <= hi[2]; ++z) {
            if (!shell && std::abs(z - c[2]) != r) continue;
            scan(index(x, y, z), p, best);
          }
        }
      }
      // Faces in cells outside the searched block are at least r cells away.
      if (best <= static_cast<double>(r) * cell_ || covered) return best;
    }
  }

 private:
  std::array<std::int64_t, 3> clamp_cell(const Vec3& p) const {
    std::array<std::int64_t, 3> c{};
    for (int a = 0; a < 3; ++a) {
      c[a] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((p[a] - min_[a]) / cell_)), 0, dims_[a] - 1);
    }
    return c;
  }

  std::size_t index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return static_cast<std::size_t>((x * dims_[1] + y) * dims_[2] + z);
  }

  void scan(std::size_t cell, const Vec3& p, double& best) {
    for (auto i = offsets_[cell]; i < offsets_[cell + 1]; ++i) {
      const FaceId f = faces_[i];
      if (stamp_[f] == query_) continue;
      stamp_[f] = query_;
      const auto& t = mesh_.face(f);
      best = std::min(best, point_to_triangle(p, mesh_.vertex(t[0]), mesh_.vertex(t[1]), mesh_.vertex(t[2])));
    }
  }

  const TriMesh& mesh_;
  Vec3 min_;
  double cell_ = 1.0;
  std::array<std::int64_t, 3> dims_{};
  std::vector<std::uint32_t> offsets_;
  std::vector<FaceId> faces_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t query_ = 0;
};

void require_surface(const TriMesh& mesh, const char* name) {
  if (mesh.vertex_count() == 0 || mesh.face_count() == 0) {
    throw MeshError(std::string("distance: mesh ") + name + " is empty");
  }
  if (!(surface_area(mesh) > 0.0)) throw MeshError(std::string("distance: mesh ") + name + " has zero area");
}

}  // namespace

// Closest point by Voronoi region, after Ericson, Real-Time Collision
// Detection, 5.1.5.
double point_to_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a;
  // Slivers go to the edge distances; the region tests below lose all
  // precision once the normal is tiny relative to the edges.
  if (ab.cross(ac).squaredNorm() <= 1e-20 * ab.squaredNorm() * ac.squaredNorm()) {
    return std::min({point_to_segment(p, a, b), point_to_segment(p, b, c), point_to_segment(p, c, a)});
  }
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return bp.norm();

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + d1 / (d1 - d3) * ab)).norm();

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.norm();

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + d2 / (d2 - d6) * ac)).norm();

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
  }
  const double denom = 1.0 / (va + vb + vc);
  return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

double surface_area(const TriMesh& mesh) {
  double area = 0.0;
  for (FaceId f = 0; f < mesh.face_count(); ++f) area += face_area(mesh, f);
  return area;
}

double density_for(const TriMesh& mesh, std::size_t target) {
  const double area = surface_area(mesh);
  return area > 0.0 ? static_cast<double>(target) / area : 0.0;
}

std::vector<Vec3> sample_surface(const TriMesh& mesh, const SamplingOptions& options) {
  std::vector<std::size_t> counts(mesh.face_count());
  std::size_t total = 0;
  for (FaceId f = 0; f < mesh.face_count(); ++f) {
    const double wanted = std::round(face_area(mesh, f) * options.samples_per_unit_area);
    counts[f] = std::max<std::size_t>(kMinSamplesPerFace, static_cast<std::size_t>(wanted));
    total += counts[f];
  }
  if (total > kMaxSamples) {
    const double factor = static_cast<double>(kMaxSamples) / static_cast<double>(total);
    for (auto& n : counts) n = std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(n) * factor));
  }
  std::vector<Vec3> out;
  for (FaceId f = 0; f < mesh.face_count(); ++f) {
    std::mt19937_64 rng(splitmix(options.seed ^ splitmix(f)));
    const auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
    const auto& t = mesh.face(f);
    const Vec3 &a = mesh.vertex(t[0]), &b = mesh.vertex(t[1]), &c = mesh.vertex(t[2]);
    const auto n = counts[f];
    // Strata are equal-area bands parallel to edge bc.
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::sqrt((static_cast<double>(i) + uniform()) / static_cast<double>(n));
      const double v = uniform();
      out.push_back((1.0 - s) * a + s * (1.0 - v) * b + s * v * c);
    }
  }
  return out;
}

std::vector<double> surface_distances(std::span<const Vec3> points, const TriMesh& mesh, bool brute_force) {
  std::vector<double> out;
  out.reserve(points.size());
  if (brute_force) {
    for (const auto& p : points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& t : mesh.faces()) {
        best = std::min(best, point_to_triangle(p, mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2])));
      }
      out.push_back(best);
    }
    return out;
  }
  FaceGrid grid(mesh);
  for (const auto& p : points) out.push_back(grid.distance(p));
  return out;
}

DistortionResult directed_distance(const TriMesh& from, const TriMesh& to, const SamplingOptions& options,
                                   double diagonal) {
  const auto points = sample_surface(from, options);
  const auto d = surface_distances(points, to, options.brute_force);
  double sum = 0.0, max = 0.0;
  for (double x : d) {
    sum += x * x;
    max = std::max(max, x);
  }
  DistortionResult r;
  r.sample_count = d.size();
  r.rms = d.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(d.size())) / diagonal;
  r.max_dist = max / diagonal;
  r.direction = Direction::AtoB;
  return r;
}

DistortionResult sampled_distance(const TriMesh& a, const TriMesh& b, const SamplingOptions& options) {
  require_surface(a, "a");
  require_surface(b, "b");
  const double diagonal = bounding_box(a).diagonal();
  const auto ab = directed_distance(a, b, options, diagonal);
  auto ba = directed_distance(b, a, options, diagonal);
  DistortionResult r;
  r.rms = std::max(ab.rms, ba.rms);
  r.max_dist = std::max(ab.max_dist, ba.max_dist);
  r.sample_count = ab.sample_count + ba.sample_count;
  r.direction = Direction::SymmetricMax;
  return r;
}

double bpv(std::uint64_t bits, std::size_t vertices) {
  if (vertices == 0) throw std::invalid_argument("bpv: zero vertices");
  return static_cast<double>(bits) / static_cast<double>(vertices);
}

double bpv(const RateReport& report) { return bpv(report.total_bits(), report.original_vertices); }

}  // namespace meshpress

#include "meshpress/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>

#include "meshpress/hierarchy.hpp"

namespace meshpress::shapes {
namespace {

// Distributions in <random> are implementation-defined; the engine is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t edge_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct Refined {
  std::vector<Vec3> positions;
  std::vector<Face> faces;
};

Refined refine(std::span<const Vec3> positions, std::span<const Face> faces,
               std::span<const FacePattern> patterns) {
  const auto sub = subdivide(faces, positions.size(), patterns);
  Refined out{{positions.begin(), positions.end()}, sub.faces};
  for (const auto& [a, b] : sub.parents) out.positions.push_back(0.5 * (positions[a] + positions[b]));
  return out;
}

}  // namespace

TriMesh triangle() {
  return TriMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
}

TriMesh tetrahedron() {
  return TriMesh({Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)},
                 {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
}

TriMesh octahedron() {
  return TriMesh({Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)},
                 {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}});
}

TriMesh icosahedron() {
  const double t = std::numbers::phi;
  std::vector<Vec3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Face> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
                      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
                      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return TriMesh(std::move(v), std::move(f));
}

TriMesh subdivide_regular(const TriMesh& mesh, int times, bool spherical) {
  std::vector<Vec3> positions(mesh.vertices().begin(), mesh.vertices().end());
  std::vector<Face> faces(mesh.faces().begin(), mesh.faces().end());
  for (int i = 0; i < times; ++i) {
    const std::vector<FacePattern> patterns(faces.size(), {Pattern::Quadrisect, 0, 0});
    auto next = refine(positions, faces, patterns);
    if (spherical) {
      for (auto& p : next.positions) p.normalize();
    }
    positions = std::move(next.positions);
    faces = std::move(next.faces);
  }
  return TriMesh(std::move(positions), std::move(faces));
}

TriMesh grid_patch(int nx, int ny, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> v;
  const auto id = [&](int i, int j) { return static_cast<VertexId>(j * (nx + 1) + i); };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = static_cast<double>(i) / nx, y = static_cast<double>(j) / ny;
      const double z = 0.15 * std::sin(3.0 * x) * std::cos(2.0 * y) + 0.002 * (rng.uniform() - 0.5);
      v.emplace_back(x, y, z);
    }
  }
  std::vector<Face> f;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh irregular_refine(const TriMesh& base, std::size_t target_vertices, std::uint64_t seed,
                         const Projection& project, double jitter) {
  Rng rng(seed);
  std::vector<Vec3> positions(base.vertices().begin(), base.vertices().end());
  std::vector<Face> faces(base.faces().begin(), base.faces().end());

  while (positions.size() < target_vertices) {
    std::unordered_map<std::uint64_t, std::uint32_t> edge_index;
    std::vector<std::uint64_t> edges;
    for (const auto& t : faces) {
      for (int k = 0; k < 3; ++k) {
        const auto key = edge_key(t[k], t[(k + 1) % 3]);
        if (edge_index.emplace(key, static_cast<std::uint32_t>(edges.size())).second) edges.push_back(key);
      }
    }
    const std::size_t remaining = target_vertices - positions.size();
    std::vector<bool> split(edges.size(), false);
    if (remaining * 4 <= edges.size() * 3) {
      std::vector<std::uint32_t> order(edges.size());
      for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      for (std::size_t i = 0; i < remaining; ++i) split[order[i]] = true;
    } else {
      for (std::size_t i = 0; i < edges.size(); ++i) split[i] = rng.uniform() < 0.8;
    }

    std::vector<FacePattern> patterns;
    patterns.reserve(faces.size());
    for (const auto& t : faces) {
      std::array<bool, 3> s{};
      int count = 0;
      for (int k = 0; k < 3; ++k) {
        s[k] = split[edge_index[edge_key(t[k], t[(k + 1) % 3])]];
        count += s[k];
      }
      FacePattern p;
      if (count == 1) {
        p = {Pattern::Bisect, static_cast<std::uint8_t>(s[0] ? 0 : (s[1] ? 1 : 2)), 0};
      } else if (count == 2) {
        p = {Pattern::Trisect, static_cast<std::uint8_t>(!s[0] ? 0 : (!s[1] ? 1 : 2)),
             static_cast<std::uint8_t>(rng.coin())};
      } else if (count == 3) {
        p = {Pattern::Quadrisect, 0, 0};
      }
      patterns.push_back(p);
    }

    const auto sub = subdivide(faces, positions.size(), patterns);
    for (const auto& [a, b] : sub.parents) {
      const double t = 0.5 + jitter * (2.0 * rng.uniform() - 1.0);
      positions.push_back(project(positions[a] + t * (positions[b] - positions[a])));
    }
    faces = sub.faces;
  }
  return TriMesh(std::move(positions), std::move(faces));
}

TriMesh torus(std::size_t target_vertices, std::uint64_t seed) {
  constexpr double kMajor = 1.0, kMinor = 0.4;
  constexpr int kU = 9, kV = 6;
  const auto point = [&](double u, double v) {
    return Vec3((kMajor + kMinor * std::cos(v)) * std::cos(u), (kMajor + kMinor * std::cos(v)) * std::sin(u),
                kMinor * std::sin(v));
  };
  std::vector<Vec3> v;
  for (int i = 0; i < kU; ++i) {
    for (int j = 0; j < kV; ++j) {
      v.push_back(point(2 * std::numbers::pi * i / kU, 2 * std::numbers::pi * j / kV));
    }
  }
  const auto id = [&](int i, int j) { return static_cast<VertexId>((i % kU) * kV + (j % kV)); };
  std::vector<Face> f;
  for (int i = 0; i < kU; ++i) {
    for (int j = 0; j < kV; ++j) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  const auto project = [&](const Vec3& p) {
    Vec3 ring(p.x(), p.y(), 0.0);
    ring *= kMajor / ring.norm();
    return Vec3(ring + kMinor * (p - ring).normalized());
  };
  return irregular_refine(TriMesh(std::move(v), std::move(f)), target_vertices, seed, project);
}

TriMesh scanned_blob(std::size_t target_vertices, std::uint64_t seed) {
  const auto sphere = [](const Vec3& p) { return Vec3(p.normalized()); };
  const auto mesh = irregular_refine(icosahedron(), target_vertices, seed, sphere);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<Vec3> v;
  v.reserve(mesh.vertex_count());
  for (const auto& p : mesh.vertices()) {
    const double bump = 1.0 + 0.12 * std::sin(3.0 * p.x() + 1.0) * std::sin(2.0 * p.y()) + 0.08 * std::cos(4.0 * p.z());
    const double noise = 0.004 * (rng.uniform() - 0.5);
    v.push_back(p * (bump + noise));
  }
  return mesh.with_vertices(std::move(v));
}

TriMesh cad_part(std::size_t target_vertices, std::uint64_t seed) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1);
  std::vector<Face> f{{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                      {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  const auto flat = [](const Vec3& p) { return p; };
  const auto mesh = irregular_refine(TriMesh(std::move(v), std::move(f)), target_vertices, seed, flat);
  std::vector<Vec3> out;
  out.reserve(mesh.vertex_count());
  for (const auto& p : mesh.vertices()) {
    Vec3 q(1.6 * p.x(), p.y(), 0.6 * p.z());
    if (p.z() > 1.0 - 1e-12) q.z() += 0.35 * (1.0 - p.x() * p.x()) * (1.0 - p.y() * p.y());
    if (p.y() < -1.0 + 1e-12) q.y() -= 0.12 * std::sin(std::numbers::pi * p.x()) * (1.0 - p.z() * p.z());
    out.push_back(q);
  }
  return mesh.with_vertices(std::move(out));
}

}  // namespace meshpress::shapes

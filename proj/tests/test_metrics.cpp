#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <random>

#include "corpus.hpp"
#include "meshpress/codec.hpp"
#include "meshpress/metrics.hpp"
#include "metric_oracle.hpp"

namespace meshpress {
namespace {

TriMesh square(double z, double size = 1.0) {
  return TriMesh({Vec3(0, 0, z), Vec3(size, 0, z), Vec3(size, size, z), Vec3(0, size, z)}, {{0, 1, 2}, {0, 2, 3}});
}

TriMesh cube(const Vec3& offset) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.push_back(Vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1) + offset);
  const std::vector<Face> f{{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                            {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return TriMesh(std::move(v), f);
}

TEST(PointToTriangle, Basics) {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  EXPECT_EQ(point_to_triangle(a, a, b, c), 0.0);
  EXPECT_DOUBLE_EQ(point_to_triangle(Vec3(1.0 / 3, 1.0 / 3, 1), a, b, c), 1.0);
  EXPECT_DOUBLE_EQ(point_to_triangle(Vec3(2, 0, 0), a, b, c), 1.0);
  EXPECT_DOUBLE_EQ(point_to_triangle(Vec3(1, 1, 0), a, b, c), std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(point_to_triangle(Vec3(-1, -1, 0), a, b, c), std::sqrt(2.0));
}

TEST(PointToTriangle, DegenerateFallsBackToSegments) {
  const Vec3 a(0, 0, 0), b(2, 0, 0), mid(1, 0, 0);
  EXPECT_DOUBLE_EQ(point_to_triangle(Vec3(1, 3, 0), a, b, mid), 3.0);
  EXPECT_DOUBLE_EQ(point_to_triangle(Vec3(0, 0, 4), a, a, a), 4.0);
  EXPECT_DOUBLE_EQ(point_to_triangle(Vec3(3, 0, 0), a, b, b), 1.0);
}

TEST(PointToTriangle, MatchesBarycentricSearch) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20'000; ++i) {
    const Vec3 a(u(rng), u(rng), u(rng)), p(2 * u(rng), 2 * u(rng), 2 * u(rng));
    Vec3 b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
    if (i % 50 == 0) c = a + 0.3 * (b - a);  // collinear
    if (i % 97 == 0) b = a;
    const double d = point_to_triangle(p, a, b, c);
    ASSERT_NEAR(d, testing::barycentric_search_distance(p, a, b, c), 1e-6) << "case " << i;
  }
}

TEST(Sampling, CountsAndPlacement) {
  const TriMesh mesh = shapes::scanned_blob(400);
  SamplingOptions opt;
  const auto pts = sample_surface(mesh, opt);
  EXPECT_EQ(pts.size(), kMinSamplesPerFace * mesh.face_count());
  for (double d : surface_distances(pts, mesh)) EXPECT_LE(d, 1e-12);

  opt.samples_per_unit_area = density_for(mesh, 50'000);
  std::size_t expected = 0;
  for (const auto& t : mesh.faces()) {
    const double area = 0.5 * (mesh.vertex(t[1]) - mesh.vertex(t[0])).cross(mesh.vertex(t[2]) - mesh.vertex(t[0])).norm();
    expected += std::max<std::size_t>(kMinSamplesPerFace, static_cast<std::size_t>(std::round(area * opt.samples_per_unit_area)));
  }
  EXPECT_EQ(sample_surface(mesh, opt).size(), expected);
}

TEST(Sampling, CapAtOneMillion) {
  SamplingOptions opt;
  opt.samples_per_unit_area = 1e9;
  const auto pts = sample_surface(shapes::octahedron(), opt);
  EXPECT_LE(pts.size(), kMaxSamples);
  EXPECT_GT(pts.size(), kMaxSamples * 9 / 10);
}

TEST(Sampling, Deterministic) {
  const TriMesh mesh = shapes::torus(500);
  SamplingOptions opt;
  opt.seed = 42;
  EXPECT_EQ(sample_surface(mesh, opt), sample_surface(mesh, opt));
  opt.seed = 43;
  SamplingOptions other;
  other.seed = 42;
  EXPECT_NE(sample_surface(mesh, opt), sample_surface(mesh, other));
}

TEST(Distance, IdenticalMeshesAreZero) {
  const TriMesh mesh = shapes::scanned_blob(600);
  const auto d = sampled_distance(mesh, mesh, SamplingOptions{});
  // Samples are rebuilt from barycentric weights, so only rounding remains.
  EXPECT_LE(d.rms, 1e-12);
  EXPECT_LE(d.max_dist, 1e-12);
  EXPECT_EQ(d.direction, Direction::SymmetricMax);
}

TEST(Distance, ParallelPlanes) {
  const double h = 0.05;
  const auto d = sampled_distance(square(0), square(h), SamplingOptions{});
  EXPECT_NEAR(d.rms, h / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d.max_dist, h / std::sqrt(2.0), 1e-15);
}

TEST(Distance, OffsetCubeAgainstBruteForce) {
  const TriMesh a = cube(Vec3::Zero()), b = cube(Vec3(0.01, 0, 0));
  SamplingOptions grid, brute;
  brute.brute_force = true;
  const auto g = directed_distance(a, b, grid, std::sqrt(3.0));
  const auto r = directed_distance(a, b, brute, std::sqrt(3.0));
  EXPECT_EQ(g.rms, r.rms);
  EXPECT_EQ(g.max_dist, r.max_dist);
  EXPECT_GE(g.max_dist, 0.01 / std::sqrt(3.0) - 1e-12);
  EXPECT_LE(g.max_dist, 0.01 / std::sqrt(3.0) + 1e-12);
}

// Same kernel, different search: distances are bit-identical.
TEST(Distance, GridEqualsBruteForceOnSmallMeshes) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (const auto& [name, mesh] : testing::small_corpus()) {
    ASSERT_LE(mesh.face_count(), 200u) << name;
    SamplingOptions opt;
    opt.samples_per_unit_area = density_for(mesh, 20'000);
    auto pts = sample_surface(mesh, opt);
    for (auto& p : pts) p += Vec3(noise(rng), noise(rng), noise(rng));
    const auto fast = surface_distances(pts, mesh, false);
    const auto slow = surface_distances(pts, mesh, true);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) ASSERT_EQ(fast[i], slow[i]) << name << " point " << i;
  }
}

TEST(Distance, SymmetricUpToNormalization) {
  const TriMesh a = shapes::torus(600);
  std::vector<Vec3> moved(a.vertices().begin(), a.vertices().end());
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (auto& p : moved) p += Vec3(noise(rng), noise(rng), noise(rng));
  const TriMesh b = a.with_vertices(moved);
  const auto ab = sampled_distance(a, b, SamplingOptions{});
  const auto ba = sampled_distance(b, a, SamplingOptions{});
  const double da = bounding_box(a).diagonal(), db = bounding_box(b).diagonal();
  EXPECT_NEAR(ab.rms * da, ba.rms * db, 1e-15);
  EXPECT_NEAR(ab.max_dist * da, ba.max_dist * db, 1e-15);
  EXPECT_LE(ab.rms, ab.max_dist);
}

TEST(Distance, SamplingIsStable) {
  const TriMesh mesh = shapes::scanned_blob();
  const auto base = decode(encode(mesh).bytes, 0).mesh;
  SamplingOptions one, two;
  one.samples_per_unit_area = density_for(mesh, 100'000);
  two.samples_per_unit_area = 2 * one.samples_per_unit_area;
  const double r1 = sampled_distance(mesh, base, one).rms;
  const double r2 = sampled_distance(mesh, base, two).rms;
  EXPECT_GT(r1, 0.0);
  EXPECT_LT(std::abs(r1 - r2) / r1, 0.02);
}

TEST(Distance, RejectsEmptyAndFlat) {
  EXPECT_THROW(sampled_distance(TriMesh{}, square(0), SamplingOptions{}), MeshError);
  const TriMesh sliver({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {{0, 1, 2}});
  EXPECT_THROW(sampled_distance(sliver, square(0), SamplingOptions{}), MeshError);
}

TEST(Bpv, Arithmetic) {
  EXPECT_DOUBLE_EQ(bpv(12110, 1000), 12.11);
  EXPECT_THROW(bpv(100, 0), std::invalid_argument);
  RateReport r;
  r.original_vertices = 10;
  r.header_bits = 736;
  EXPECT_DOUBLE_EQ(bpv(r), 73.6);
}

}  // namespace
}  // namespace meshpress

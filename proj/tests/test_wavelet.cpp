#include <gtest/gtest.h>

#include <map>
#include <random>

#include "corpus.hpp"
#include "meshpress/wavelet.hpp"

namespace meshpress {
namespace {

double max_error(std::span<const Vec3> a, std::span<const Vec3> b) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, (a[i] - b[i]).norm());
  return e;
}

TEST(FloorDiv, Negatives) {
  EXPECT_EQ(floor_div(7, 2), 3);
  EXPECT_EQ(floor_div(-7, 2), -4);
  EXPECT_EQ(floor_div(-8, 4), -2);
  EXPECT_EQ(floor_div(0, 5), 0);
  EXPECT_EQ(floor_div(-1, 12), -1);
}

// Coefficients rebuilt by hand from the record: midpoint residuals, then
// the update spreads a quarter of the mean neighbouring detail back.
TEST(Wavelet, MatchesHandComputedTransform) {
  const TriMesh mesh = shapes::torus(800);
  const auto records = build_hierarchy(mesh, WgcConfig{});
  ASSERT_FALSE(records.empty());
  const auto& r = records.front();
  for (bool lifting : {false, true}) {
    const auto c = analyze(r, mesh.vertices(), lifting);
    ASSERT_EQ(c.odd_vertices, r.odd_vertices);
    std::map<VertexId, std::pair<Vec3, int>> touching;
    for (std::size_t k = 0; k < r.odd_vertices.size(); ++k) {
      const VertexId v = r.odd_vertices[k];
      const auto [a, b] = r.parents[v];
      const Vec3 d = mesh.vertex(v) - (mesh.vertex(a) + mesh.vertex(b)) / 2;
      EXPECT_LE((c.details[k] - d).norm(), 1e-14);
      for (VertexId e : {a, b}) {
        auto& [sum, count] = touching[e];
        if (count == 0) sum = Vec3::Zero();
        sum += d;
        ++count;
      }
    }
    for (std::size_t i = 0; i < r.even_vertices.size(); ++i) {
      Vec3 expected = mesh.vertex(r.even_vertices[i]);
      if (lifting) {
        if (auto it = touching.find(r.even_vertices[i]); it != touching.end()) {
          expected += it->second.first / (4.0 * it->second.second);
        }
      }
      EXPECT_LE((c.approx[i] - expected).norm(), 1e-14);
    }
  }
}

TEST(Wavelet, PerfectReconstructionOnCorpus) {
  for (const auto& [name, mesh] : testing::corpus()) {
    const double diag = bounding_box(mesh).diagonal();
    const auto records = build_hierarchy(mesh, WgcConfig{});
    std::vector<Vec3> fine(mesh.vertices().begin(), mesh.vertices().end());
    for (const auto& r : records) {
      for (bool lifting : {false, true}) {
        const auto back = synthesize(r, analyze(r, fine, lifting));
        EXPECT_LE(max_error(back, fine) / diag, 1e-12) << name;
      }
      fine.assign(r.coarse.vertices().begin(), r.coarse.vertices().end());
    }
  }
}

// A flat field has zero details and the coarse mesh keeps its positions.
TEST(Wavelet, LinearFieldHasZeroDetail) {
  const TriMesh fine = shapes::subdivide_regular(shapes::octahedron(), 2, false);
  const auto records = build_hierarchy(fine, WgcConfig{});
  ASSERT_FALSE(records.empty());
  const auto c = analyze(records.front(), fine.vertices(), true);
  for (const auto& d : c.details) EXPECT_LE(d.norm(), 1e-15);
}

struct IntegerCase {
  std::vector<IVec3> fine;
  std::vector<std::array<VertexId, 2>> parents;
};

IntegerCase random_case(std::mt19937_64& rng, std::size_t coarse, std::size_t odd) {
  IntegerCase c;
  std::uniform_int_distribution<std::int64_t> coord(-5000, 5000);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(coarse - 1));
  for (std::size_t i = 0; i < coarse + odd; ++i) c.fine.emplace_back(coord(rng), coord(rng), coord(rng));
  for (std::size_t i = 0; i < odd; ++i) {
    VertexId a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    c.parents.push_back({a, b});
  }
  return c;
}

TEST(IntegerWavelet, MatchesFloorFormulas) {
  std::mt19937_64 rng(11);
  const auto c = random_case(rng, 40, 70);
  for (bool lifting : {false, true}) {
    const auto coeffs = analyze_integer(c.fine, c.parents, lifting);
    std::vector<IVec3> sum(40, IVec3::Zero());
    std::vector<std::int64_t> count(40, 0);
    for (std::size_t i = 0; i < c.parents.size(); ++i) {
      const auto [a, b] = c.parents[i];
      IVec3 d;
      for (int k = 0; k < 3; ++k) {
        const std::int64_t s = c.fine[a][k] + c.fine[b][k];
        const std::int64_t mid = s >= 0 ? s / 2 : -((-s + 1) / 2);
        d[k] = c.fine[40 + i][k] - mid;
      }
      EXPECT_EQ(coeffs.details[i], d);
      for (VertexId e : {a, b}) {
        sum[e] += d;
        ++count[e];
      }
    }
    for (std::size_t v = 0; v < 40; ++v) {
      IVec3 expected = c.fine[v];
      if (lifting && count[v] > 0) {
        for (int k = 0; k < 3; ++k) {
          const double q = static_cast<double>(sum[v][k]) / (4.0 * static_cast<double>(count[v]));
          expected[k] += static_cast<std::int64_t>(std::floor(q + 0.5));
        }
      }
      EXPECT_EQ(coeffs.approx[v], expected) << "vertex " << v << " lifting " << lifting;
    }
  }
}

TEST(IntegerWavelet, ExactInverse) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_case(rng, 10 + trial, 3 * trial + 1);
    for (bool lifting : {false, true}) {
      const auto coeffs = analyze_integer(c.fine, c.parents, lifting);
      EXPECT_EQ(synthesize_integer(coeffs.approx, coeffs.details, c.parents, lifting), c.fine);
    }
  }
}

}  // namespace
}  // namespace meshpress

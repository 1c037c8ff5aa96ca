#include <gtest/gtest.h>

#include <sstream>

#include "corpus.hpp"
#include "meshpress/mesh_io.hpp"

namespace meshpress {
namespace {

TriMesh two_triangles(Face second) {
  return TriMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)}, {{0, 1, 2}, second});
}

TEST(TriMesh, RejectsOutOfRangeIndex) {
  EXPECT_THROW(TriMesh({Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()}, {{0, 1, 3}}), MeshError);
}

TEST(TriMesh, RejectsRepeatedCorner) {
  EXPECT_THROW(TriMesh({Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()}, {{0, 1, 1}}), MeshError);
}

TEST(Manifold, ConsistentPairPasses) {
  const auto report = validate_manifold(two_triangles({1, 3, 2}));
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.boundary_edges, 4u);
}

TEST(Manifold, FlippedNeighbourIsInconsistent) {
  const auto report = validate_manifold(two_triangles({2, 3, 1}));
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().kind, ViolationKind::InconsistentOrientation);
}

TEST(Manifold, ThreeFacesOnOneEdge) {
  const TriMesh m({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)},
                  {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}});
  const auto report = validate_manifold(m);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().kind, ViolationKind::NonManifoldEdge);
  EXPECT_THROW(require_manifold(m), MeshError);
}

TEST(Manifold, BowtieVertex) {
  const TriMesh m({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(-1, 0, 0), Vec3(-1, -1, 0)},
                  {{0, 1, 2}, {0, 3, 4}});
  const auto report = validate_manifold(m);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().kind, ViolationKind::NonManifoldVertex);
}

TEST(Manifold, CorpusIsManifold) {
  for (const auto& [name, mesh] : testing::corpus()) EXPECT_TRUE(validate_manifold(mesh).ok()) << name;
}

// Every interior edge is seen from both sides with opposite direction.
TEST(Adjacency, NeighboursPointBack) {
  for (const auto& [name, mesh] : testing::corpus()) {
    for (FaceId f = 0; f < mesh.face_count(); ++f) {
      for (int k = 0; k < 3; ++k) {
        const FaceId g = mesh.neighbor(f, k);
        if (g == kInvalidIndex) continue;
        const VertexId a = mesh.face(f)[k], b = mesh.face(f)[(k + 1) % 3];
        bool found = false;
        for (int m = 0; m < 3; ++m) {
          if (mesh.face(g)[m] == b && mesh.face(g)[(m + 1) % 3] == a) {
            found = true;
            EXPECT_EQ(mesh.neighbor(g, m), f) << name;
          }
        }
        EXPECT_TRUE(found) << name << " face " << f << " edge " << k;
      }
    }
  }
}

TEST(Adjacency, StarHoldsExactlyTheIncidentFaces) {
  const TriMesh mesh = shapes::torus(300);
  std::vector<std::vector<FaceId>> expected(mesh.vertex_count());
  for (FaceId f = 0; f < mesh.face_count(); ++f) {
    for (VertexId v : mesh.face(f)) expected[v].push_back(f);
  }
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    const auto star = mesh.star(v);
    EXPECT_EQ(std::vector<FaceId>(star.begin(), star.end()), expected[v]);
  }
}

TEST(Adjacency, GridPatchBoundary) {
  const TriMesh mesh = shapes::grid_patch(4, 4);
  int boundary = 0;
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) boundary += mesh.is_boundary_vertex(v);
  EXPECT_EQ(boundary, 16);  // perimeter of a 5x5 lattice
}

TEST(BoundingBox, Diagonal) {
  const auto box = bounding_box(shapes::octahedron());
  EXPECT_DOUBLE_EQ(box.diagonal(), std::sqrt(12.0));
}

class MeshIoRoundTrip : public ::testing::TestWithParam<MeshFormat> {};

TEST_P(MeshIoRoundTrip, PreservesFacesAndPositions) {
  const TriMesh mesh = shapes::scanned_blob(500);
  std::stringstream s;
  write_mesh(s, mesh, GetParam());
  const TriMesh back = read_mesh(s, GetParam());
  ASSERT_EQ(back.vertex_count(), mesh.vertex_count());
  ASSERT_EQ(back.face_count(), mesh.face_count());
  for (FaceId f = 0; f < mesh.face_count(); ++f) EXPECT_EQ(back.face(f), mesh.face(f));
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    EXPECT_LE((back.vertex(v) - mesh.vertex(v)).norm(), 1e-8 * (1 + mesh.vertex(v).norm()));
  }
}

INSTANTIATE_TEST_SUITE_P(Formats, MeshIoRoundTrip,
                         ::testing::Values(MeshFormat::Obj, MeshFormat::Off, MeshFormat::PlyAscii));

TEST(MeshIo, RejectsQuads) {
  std::istringstream s("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
  EXPECT_THROW(read_mesh(s, MeshFormat::Off), MeshError);
}

TEST(MeshIo, ObjNegativeIndicesAndSlashes) {
  std::istringstream s("v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf -3//1 -2//1 -1//1\n");
  const TriMesh m = read_mesh(s, MeshFormat::Obj);
  ASSERT_EQ(m.face_count(), 1u);
  EXPECT_EQ(m.face(0), (Face{0, 1, 2}));
}

TEST(MeshIo, Extensions) {
  EXPECT_EQ(format_from_extension("a.OBJ"), MeshFormat::Obj);
  EXPECT_EQ(format_from_extension("b.off"), MeshFormat::Off);
  EXPECT_EQ(format_from_extension("c.ply"), MeshFormat::PlyAscii);
  EXPECT_FALSE(format_from_extension("d.stl").has_value());
}

}  // namespace
}  // namespace meshpress

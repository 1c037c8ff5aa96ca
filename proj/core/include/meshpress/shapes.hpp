#pragma once

#include <cstdint>
#include <functional>

#include "meshpress/mesh.hpp"

/// Procedural test and benchmark meshes. Everything here is deterministic for
/// a given seed so that rate numbers are reproducible across machines.
namespace meshpress::shapes {

TriMesh triangle();
TriMesh tetrahedron();
TriMesh octahedron();
TriMesh icosahedron();

/// Regular 1:4 refinement, `times` rounds. With `spherical` every new vertex
/// is pushed onto the unit sphere.
TriMesh subdivide_regular(const TriMesh& mesh, int times, bool spherical = false);

/// Height-field patch over an nx-by-ny grid of quads, open boundary.
TriMesh grid_patch(int nx, int ny, std::uint64_t seed = 1);

using Projection = std::function<Vec3(const Vec3&)>;

/// Random irregular refinement: each round splits a random subset of edges,
/// so faces end up divided 1:1, 2:1, 3:1 or 4:1. New vertices are jittered
/// along their edge by up to `jitter` times its length, then `project`ed.
/// The last round splits exactly as many edges as needed to land on
/// `target_vertices`.
TriMesh irregular_refine(const TriMesh& base, std::size_t target_vertices, std::uint64_t seed,
                         const Projection& project, double jitter = 0.1);

/// Torus with mixed 1:1..4:1 refinement, about `target_vertices` vertices.
TriMesh torus(std::size_t target_vertices = 2000, std::uint64_t seed = 3);

/// Bumpy closed blob with per-vertex noise, mimicking a range scan.
TriMesh scanned_blob(std::size_t target_vertices = 3000, std::uint64_t seed = 5);

/// Box-like mechanical part: flat sides, sharp creases and one curved cap.
TriMesh cad_part(std::size_t target_vertices = 6475, std::uint64_t seed = 7);

}  // namespace meshpress::shapes

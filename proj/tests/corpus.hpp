#pragma once

#include <string>
#include <vector>

#include "meshpress/shapes.hpp"

namespace meshpress::testing {

struct NamedMesh {
  std::string name;
  TriMesh mesh;
};

/// Closed and open, regular and irregular, 3 to 6475 vertices.
inline std::vector<NamedMesh> corpus() {
  using namespace shapes;
  return {
      {"triangle", triangle()},
      {"tetrahedron", tetrahedron()},
      {"octahedron", octahedron()},
      {"icosahedron", icosahedron()},
      {"ico642", subdivide_regular(icosahedron(), 3, true)},
      {"grid_patch", grid_patch(16, 16)},
      {"torus", torus()},
      {"scanned_blob", scanned_blob()},
      {"cad_part", cad_part()},
  };
}

/// Meshes small enough for exhaustive checks (at most 200 faces).
inline std::vector<NamedMesh> small_corpus() {
  using namespace shapes;
  return {
      {"triangle", triangle()},
      {"tetrahedron", tetrahedron()},
      {"octahedron", octahedron()},
      {"icosahedron", icosahedron()},
      {"ico80", subdivide_regular(icosahedron(), 1, true)},
      {"grid_patch", grid_patch(6, 6)},
      {"torus_small", torus(100)},
  };
}

}  // namespace meshpress::testing

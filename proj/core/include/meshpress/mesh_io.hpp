#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "meshpress/mesh.hpp"

namespace meshpress {

enum class MeshFormat { Obj, Off, PlyAscii };

/// Maps ".obj", ".off" and ".ply" (any case) to a format.
std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path);

/// Parses a triangle mesh and validates it. Polygons with more than three
/// corners are rejected, not triangulated. Throws MeshError.
TriMesh read_mesh(std::istream& in, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);

/// Positions are written with 9 significant digits.
void write_mesh(std::ostream& out, const TriMesh& mesh, MeshFormat format);
void save_mesh(const std::filesystem::path& path, const TriMesh& mesh, MeshFormat format);
void save_mesh(const std::filesystem::path& path, const TriMesh& mesh);

}  // namespace meshpress

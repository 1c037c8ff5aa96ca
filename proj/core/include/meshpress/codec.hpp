#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "meshpress/hierarchy.hpp"
#include "meshpress/metrics.hpp"
#include "meshpress/quantize.hpp"
#include "meshpress/stream_format.hpp"
#include "meshpress/wavelet.hpp"

namespace meshpress {

struct CodecConfig {
  int q_max = kDefaultQMax;
  std::uint64_t threshold = kDefaultThreshold;
  WgcConfig wgc;
  bool lifting = true;
  /// Off pins every precision to q_max.
  bool adaptive = true;
  int max_levels = kDefaultMaxLevels;
};

/// One precision decision: vertex `vertex` (canonical id) is held at `q`
/// bits after the chunk of `level`. A vertex appears once when its detail
/// arrives and again for each later refinement.
struct PrecisionEvent {
  std::uint32_t level = 0;
  VertexId vertex = 0;
  std::uint8_t q = 0;

  bool operator==(const PrecisionEvent&) const = default;
};

struct EncodeResult {
  std::vector<std::uint8_t> bytes;
  RateReport report;
  /// vertex_order[c] is the input index of the decoder's vertex c.
  std::vector<VertexId> vertex_order;
  std::vector<PrecisionEvent> precision_trace;
  /// Input quantized on the stream's grid, in input order.
  std::vector<IVec3> grid_coords;
};

/// Throws MeshError for non-manifold input, unused vertices or a
/// degenerate grid.
EncodeResult encode(const TriMesh& mesh, const CodecConfig& config = {});

inline constexpr int kAllLevels = std::numeric_limits<int>::max();

struct DecodeResult {
  StreamHeader header;
  TriMesh mesh;
  std::vector<IVec3> grid_coords;
  /// Refinement levels applied; 0 is the base mesh.
  int level = 0;
  /// Set when the stream ended inside a chunk; `mesh` then holds the last
  /// complete level and `message` says where the data stopped.
  bool truncated = false;
  std::string message;
  std::vector<PrecisionEvent> precision_trace;
};

/// Throws StreamError for a bad header, a stream cut before the base mesh
/// is complete, or inconsistent chunk contents.
DecodeResult decode(std::span<const std::uint8_t> bytes, int up_to_level = kAllLevels);

struct StreamInfo {
  StreamHeader header;
  std::vector<std::uint32_t> chunk_bytes;  // base first
  std::size_t total_bytes = 0;
};

StreamInfo read_info(std::span<const std::uint8_t> bytes);

struct RdPoint {
  int level = 0;
  std::size_t bytes = 0;  // prefix through this level
  double bpv = 0.0;
  DistortionResult distortion;
};

/// Encodes, then decodes every prefix (base, then each level) and measures
/// it against `mesh`.
std::vector<RdPoint> rd_curve(const TriMesh& mesh, const CodecConfig& config, const SamplingOptions& sampling);

}  // namespace meshpress

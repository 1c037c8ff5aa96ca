#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace meshpress {

enum class StreamErrorKind { BadMagic, Version, Truncated, Corrupt };

class StreamError : public std::runtime_error {
 public:
  StreamError(StreamErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  StreamErrorKind kind() const { return kind_; }

 private:
  StreamErrorKind kind_;
};

inline constexpr std::array<char, 4> kMagic{'P', 'M', 'C', '1'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 92;
inline constexpr std::uint32_t kMaxVertices = 1u << 26;
inline constexpr std::uint32_t kMaxFaces = 1u << 27;

enum HeaderFlags : std::uint8_t {
  kFlagLifting = 1u << 0,
  kFlagWgc = 1u << 1,
  kFlagAdaptive = 1u << 2,
};

/// Fixed-size little-endian header; see docs/format.md.
struct StreamHeader {
  std::uint16_t version = kFormatVersion;
  std::uint8_t q_max = 12;
  std::uint8_t flags = 0;
  std::uint64_t threshold = 200;
  double gamma = 0.25;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d scale = Eigen::Vector3d::Ones();
  std::uint32_t base_vertices = 0;
  std::uint32_t base_faces = 0;
  std::uint32_t level_count = 0;
  std::uint32_t final_vertices = 0;
  std::uint32_t final_faces = 0;

  bool lifting() const { return flags & kFlagLifting; }
  bool wgc() const { return flags & kFlagWgc; }
  bool adaptive() const { return flags & kFlagAdaptive; }

  bool operator==(const StreamHeader&) const = default;
};

/// Little-endian append helpers.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void raw(std::span<const std::uint8_t> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }

  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Throws StreamError(Truncated) when reading past the end.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::span<const std::uint8_t> take(std::size_t n);

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

/// Bits of one chunk by kind. Overhead is the chunk-length table entry and
/// the in-chunk connectivity length.
struct ChunkRate {
  std::uint64_t connectivity_bits = 0;
  std::uint64_t geometry_bits = 0;
  std::uint64_t overhead_bits = 0;
  std::size_t vertices = 0;  // mesh size once this chunk is applied
  std::size_t faces = 0;
  std::size_t prefix_bytes = 0;  // stream bytes needed to decode through here

  std::uint64_t total_bits() const { return connectivity_bits + geometry_bits + overhead_bits; }
};

/// Every bit of a stream, attributed. `chunks[0]` is the base mesh.
struct RateReport {
  std::size_t original_vertices = 0;
  std::uint64_t header_bits = 0;
  std::vector<ChunkRate> chunks;

  std::uint64_t connectivity_bits() const;
  std::uint64_t geometry_bits() const;
  /// Header included.
  std::uint64_t overhead_bits() const;
  std::uint64_t total_bits() const { return connectivity_bits() + geometry_bits() + overhead_bits(); }
};

void write_header(ByteWriter& out, const StreamHeader& header);
/// Checks magic, version and field ranges.
StreamHeader read_header(ByteReader& in);

}  // namespace meshpress

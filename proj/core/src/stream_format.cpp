#include "meshpress/stream_format.hpp"

#include <bit>
#include <cmath>

namespace meshpress {

void ByteWriter::u16(std::uint16_t v) {
  for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) {
    throw StreamError(StreamErrorKind::Truncated, "stream ends at byte " + std::to_string(bytes_.size()) +
                                                      ", needed " + std::to_string(n) + " more from byte " +
                                                      std::to_string(pos_));
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return bytes_[pos_++];
}

std::uint16_t ByteReader::u16() {
  need(2);
  std::uint16_t v = 0;
  for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(bytes_[pos_++] << (8 * i));
  return v;
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
  need(n);
  const auto out = bytes_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint64_t RateReport::connectivity_bits() const {
  std::uint64_t n = 0;
  for (const auto& c : chunks) n += c.connectivity_bits;
  return n;
}

std::uint64_t RateReport::geometry_bits() const {
  std::uint64_t n = 0;
  for (const auto& c : chunks) n += c.geometry_bits;
  return n;
}

std::uint64_t RateReport::overhead_bits() const {
  std::uint64_t n = header_bits;
  for (const auto& c : chunks) n += c.overhead_bits;
  return n;
}

void write_header(ByteWriter& out, const StreamHeader& h) {
  for (char c : kMagic) out.u8(static_cast<std::uint8_t>(c));
  out.u16(h.version);
  out.u8(h.q_max);
  out.u8(h.flags);
  out.u64(h.threshold);
  out.f64(h.gamma);
  for (int a = 0; a < 3; ++a) out.f64(h.origin[a]);
  for (int a = 0; a < 3; ++a) out.f64(h.scale[a]);
  out.u32(h.base_vertices);
  out.u32(h.base_faces);
  out.u32(h.level_count);
  out.u32(h.final_vertices);
  out.u32(h.final_faces);
}

StreamHeader read_header(ByteReader& in) {
  if (in.remaining() < kMagic.size()) {
    throw StreamError(StreamErrorKind::Truncated, "stream shorter than its magic number");
  }
  for (char c : kMagic) {
    if (in.u8() != static_cast<std::uint8_t>(c)) throw StreamError(StreamErrorKind::BadMagic, "not a PMC1 stream");
  }
  StreamHeader h;
  h.version = in.u16();
  if (h.version != kFormatVersion) {
    throw StreamError(StreamErrorKind::Version, "unsupported stream version " + std::to_string(h.version));
  }
  h.q_max = in.u8();
  h.flags = in.u8();
  h.threshold = in.u64();
  h.gamma = in.f64();
  for (int a = 0; a < 3; ++a) h.origin[a] = in.f64();
  for (int a = 0; a < 3; ++a) h.scale[a] = in.f64();
  h.base_vertices = in.u32();
  h.base_faces = in.u32();
  h.level_count = in.u32();
  h.final_vertices = in.u32();
  h.final_faces = in.u32();

  const auto corrupt = [](const std::string& what) { throw StreamError(StreamErrorKind::Corrupt, what); };
  if (h.q_max < 4 || h.q_max > 16) corrupt("q_max " + std::to_string(h.q_max) + " outside [4, 16]");
  if (h.flags & ~(kFlagLifting | kFlagWgc | kFlagAdaptive)) corrupt("unknown header flags");
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(h.origin[a]) || !std::isfinite(h.scale[a]) || !(h.scale[a] > 0.0)) {
      corrupt("invalid grid origin or scale");
    }
  }
  if (h.base_faces == 0 || h.base_vertices < 3) corrupt("base mesh has no faces");
  if (h.final_vertices < h.base_vertices || h.final_faces < h.base_faces) corrupt("final mesh smaller than base");
  if (h.final_vertices > kMaxVertices || h.final_faces > kMaxFaces) corrupt("mesh size beyond format limits");
  if (h.level_count > 64) corrupt("level count " + std::to_string(h.level_count) + " out of range");
  return h;
}

}  // namespace meshpress

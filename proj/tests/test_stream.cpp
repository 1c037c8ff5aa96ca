#include <gtest/gtest.h>

#include <cstring>
#include <limits>

#include "meshpress/stream_format.hpp"

namespace meshpress {
namespace {

StreamHeader sample_header() {
  StreamHeader h;
  h.q_max = 10;
  h.flags = kFlagLifting | kFlagAdaptive;
  h.threshold = 600;
  h.gamma = 0.3;
  h.origin = Eigen::Vector3d(-1.5, 2.25, 1e-3);
  h.scale = Eigen::Vector3d(341.0, 341.0, 341.0);
  h.base_vertices = 12;
  h.base_faces = 20;
  h.level_count = 3;
  h.final_vertices = 642;
  h.final_faces = 1280;
  return h;
}

std::vector<std::uint8_t> header_bytes(const StreamHeader& h) {
  ByteWriter w;
  write_header(w, h);
  return w.bytes();
}

StreamErrorKind read_error(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  try {
    read_header(r);
  } catch (const StreamError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "header accepted";
  return StreamErrorKind::Corrupt;
}

TEST(Header, RoundTrip) {
  const auto h = sample_header();
  const auto bytes = header_bytes(h);
  ASSERT_EQ(bytes.size(), kHeaderBytes);
  ByteReader r(bytes);
  EXPECT_EQ(read_header(r), h);
  EXPECT_EQ(r.remaining(), 0u);
}

TEST(Header, LittleEndianLayout) {
  const auto bytes = header_bytes(sample_header());
  EXPECT_EQ(std::memcmp(bytes.data(), "PMC1", 4), 0);
  EXPECT_EQ(bytes[4], 1);  // version, low byte first
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 10);  // q_max
  EXPECT_EQ(bytes[7], kFlagLifting | kFlagAdaptive);
  EXPECT_EQ(bytes[8], 600 & 0xff);
  EXPECT_EQ(bytes[9], 600 >> 8);
  double gamma = 0;
  std::memcpy(&gamma, bytes.data() + 16, 8);
  EXPECT_EQ(gamma, 0.3);
  EXPECT_EQ(bytes[72], 12);  // base vertex count
  EXPECT_EQ(bytes[88], 1280 & 0xff);
}

TEST(Header, BadMagic) {
  auto bytes = header_bytes(sample_header());
  bytes[0] = 'X';
  EXPECT_EQ(read_error(bytes), StreamErrorKind::BadMagic);
}

TEST(Header, Version) {
  auto bytes = header_bytes(sample_header());
  bytes[4] = 2;
  EXPECT_EQ(read_error(bytes), StreamErrorKind::Version);
}

TEST(Header, EveryShortPrefixIsTruncated) {
  const auto bytes = header_bytes(sample_header());
  for (std::size_t n = 0; n < kHeaderBytes; ++n) {
    EXPECT_EQ(read_error(std::span(bytes).first(n)), StreamErrorKind::Truncated) << n;
  }
}

TEST(Header, FieldChecks) {
  auto corrupt_with = [](auto&& edit) {
    auto h = sample_header();
    edit(h);
    return read_error(header_bytes(h));
  };
  EXPECT_EQ(corrupt_with([](StreamHeader& h) { h.q_max = 3; }), StreamErrorKind::Corrupt);
  EXPECT_EQ(corrupt_with([](StreamHeader& h) { h.q_max = 17; }), StreamErrorKind::Corrupt);
  EXPECT_EQ(corrupt_with([](StreamHeader& h) { h.flags = 0x10; }), StreamErrorKind::Corrupt);
  EXPECT_EQ(corrupt_with([](StreamHeader& h) { h.scale.x() = 0; }), StreamErrorKind::Corrupt);
  EXPECT_EQ(corrupt_with([](StreamHeader& h) { h.origin.y() = std::numeric_limits<double>::quiet_NaN(); }),
            StreamErrorKind::Corrupt);
  EXPECT_EQ(corrupt_with([](StreamHeader& h) { h.base_faces = 0; }), StreamErrorKind::Corrupt);
  EXPECT_EQ(corrupt_with([](StreamHeader& h) { h.final_vertices = 5; }), StreamErrorKind::Corrupt);
  EXPECT_EQ(corrupt_with([](StreamHeader& h) { h.level_count = 65; }), StreamErrorKind::Corrupt);
}

TEST(ByteIo, LittleEndianValues) {
  ByteWriter w;
  w.u16(0x1234);
  w.u32(0xdeadbeef);
  w.u64(0x0102030405060708ull);
  w.f64(-2.5);
  const auto& b = w.bytes();
  EXPECT_EQ(b[0], 0x34);
  EXPECT_EQ(b[2], 0xef);
  EXPECT_EQ(b[6], 0x08);
  ByteReader r(b);
  EXPECT_EQ(r.u16(), 0x1234);
  EXPECT_EQ(r.u32(), 0xdeadbeefu);
  EXPECT_EQ(r.u64(), 0x0102030405060708ull);
  EXPECT_EQ(r.f64(), -2.5);
  EXPECT_THROW(r.u8(), StreamError);
}

TEST(RateReport, PartsSum) {
  RateReport r;
  r.original_vertices = 1000;
  r.header_bits = 736;
  r.chunks = {{100, 200, 64, 10, 16, 0}, {30, 400, 64, 40, 76, 0}};
  EXPECT_EQ(r.connectivity_bits(), 130u);
  EXPECT_EQ(r.geometry_bits(), 600u);
  EXPECT_EQ(r.overhead_bits(), 736u + 128u);
  EXPECT_EQ(r.total_bits(), 130u + 600u + 864u);
}

}  // namespace
}  // namespace meshpress

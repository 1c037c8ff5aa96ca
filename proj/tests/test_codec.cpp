#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "meshpress/codec.hpp"

namespace meshpress {
namespace {

// Decoded vertex c is input vertex vertex_order[c]: compare the grid
// coordinates and the relabelled face list.
void expect_lossless(const TriMesh& mesh, const EncodeResult& enc, const DecodeResult& dec, const std::string& name) {
  ASSERT_FALSE(dec.truncated) << name;
  ASSERT_EQ(dec.grid_coords.size(), mesh.vertex_count()) << name;
  ASSERT_EQ(enc.vertex_order.size(), mesh.vertex_count()) << name;
  std::vector<bool> seen(mesh.vertex_count(), false);
  for (VertexId c = 0; c < dec.grid_coords.size(); ++c) {
    const VertexId v = enc.vertex_order[c];
    ASSERT_LT(v, mesh.vertex_count());
    EXPECT_FALSE(seen[v]);
    seen[v] = true;
    EXPECT_EQ(dec.grid_coords[c], enc.grid_coords[v]) << name << " vertex " << v;
  }
  std::vector<Face> relabelled;
  for (const auto& f : dec.mesh.faces()) {
    relabelled.push_back({enc.vertex_order[f[0]], enc.vertex_order[f[1]], enc.vertex_order[f[2]]});
  }
  EXPECT_TRUE(same_connectivity(relabelled, mesh.faces())) << name;
}

TEST(Codec, LosslessOnCorpus) {
  for (const auto& [name, mesh] : testing::corpus()) {
    const auto enc = encode(mesh);
    const auto dec = decode(enc.bytes);
    expect_lossless(mesh, enc, dec, name);
    EXPECT_EQ(dec.level, static_cast<int>(enc.report.chunks.size()) - 1);
    // The grid is the input's bounding box at q_max bits.
    const auto grid = make_grid(mesh, kDefaultQMax);
    for (VertexId v = 0; v < mesh.vertex_count(); ++v) EXPECT_EQ(enc.grid_coords[v], grid.quantize(mesh.vertex(v)));
  }
}

struct Variant {
  std::string name;
  CodecConfig config;
};

std::vector<Variant> variants() {
  std::vector<Variant> out;
  auto add = [&](std::string name, auto edit) {
    CodecConfig c;
    edit(c);
    out.push_back({std::move(name), c});
  };
  add("default", [](CodecConfig&) {});
  add("no_lifting", [](CodecConfig& c) { c.lifting = false; });
  add("no_wgc", [](CodecConfig& c) { c.wgc.enabled = false; });
  add("no_adaptive", [](CodecConfig& c) { c.adaptive = false; });
  add("q4", [](CodecConfig& c) { c.q_max = 4; });
  add("q10", [](CodecConfig& c) { c.q_max = 10; });
  add("q16", [](CodecConfig& c) { c.q_max = 16; });
  add("threshold0", [](CodecConfig& c) { c.threshold = 0; });
  add("threshold_huge", [](CodecConfig& c) { c.threshold = std::uint64_t{1} << 62; });
  add("one_level", [](CodecConfig& c) { c.max_levels = 1; });
  add("gamma_small", [](CodecConfig& c) { c.wgc.gamma = 0.05; });
  return out;
}

TEST(Codec, LosslessForEveryOption) {
  const std::vector<testing::NamedMesh> meshes{{"ico642", shapes::subdivide_regular(shapes::icosahedron(), 3, true)},
                                               {"grid", shapes::grid_patch(12, 9)},
                                               {"torus", shapes::torus(900)},
                                               {"blob", shapes::scanned_blob(700)}};
  for (const auto& v : variants()) {
    for (const auto& [name, mesh] : meshes) {
      const auto enc = encode(mesh, v.config);
      const auto dec = decode(enc.bytes);
      expect_lossless(mesh, enc, dec, name + "/" + v.name);
      EXPECT_EQ(dec.header.q_max, v.config.q_max);
      EXPECT_EQ(dec.header.threshold, v.config.threshold);
      EXPECT_EQ(dec.header.adaptive(), v.config.adaptive);
      EXPECT_EQ(dec.header.lifting(), v.config.lifting);
      EXPECT_EQ(dec.header.wgc(), v.config.wgc.enabled);
    }
  }
}

TEST(Codec, SingleTriangleHasOnlyTheBase) {
  const auto enc = encode(shapes::triangle());
  EXPECT_EQ(enc.report.chunks.size(), 1u);
  const auto dec = decode(enc.bytes);
  EXPECT_EQ(dec.level, 0);
  EXPECT_EQ(dec.header.level_count, 0u);
  expect_lossless(shapes::triangle(), enc, dec, "triangle");
}

TEST(Codec, RateReportAccountsForEveryBit) {
  for (const auto& [name, mesh] : testing::corpus()) {
    const auto enc = encode(mesh);
    const auto& r = enc.report;
    EXPECT_EQ(r.total_bits(), 8 * enc.bytes.size()) << name;
    EXPECT_EQ(r.original_vertices, mesh.vertex_count());
    EXPECT_EQ(r.chunks.back().prefix_bytes, enc.bytes.size());
    EXPECT_EQ(r.chunks.back().vertices, mesh.vertex_count());
    EXPECT_EQ(r.chunks.back().faces, mesh.face_count());
    const auto info = read_info(enc.bytes);
    EXPECT_EQ(info.total_bytes, enc.bytes.size());
    ASSERT_EQ(info.chunk_bytes.size(), r.chunks.size());
    for (std::size_t i = 0; i < r.chunks.size(); ++i) {
      EXPECT_EQ(8ull * info.chunk_bytes[i] + 32, r.chunks[i].total_bits()) << name << " chunk " << i;
    }
  }
}

TEST(Codec, Deterministic) {
  const TriMesh mesh = shapes::scanned_blob(1200);
  EXPECT_EQ(encode(mesh).bytes, encode(mesh).bytes);
}

TEST(Codec, PrefixesDecodeToEachLevel) {
  const TriMesh mesh = shapes::torus();
  const auto enc = encode(mesh);
  const auto& chunks = enc.report.chunks;
  for (std::size_t level = 0; level < chunks.size(); ++level) {
    const auto dec = decode(std::span(enc.bytes).first(chunks[level].prefix_bytes), static_cast<int>(level));
    EXPECT_FALSE(dec.truncated);
    EXPECT_EQ(dec.level, static_cast<int>(level));
    EXPECT_EQ(dec.mesh.vertex_count(), chunks[level].vertices);
    EXPECT_EQ(dec.mesh.face_count(), chunks[level].faces);
    EXPECT_TRUE(validate_manifold(dec.mesh).ok());
    // Asking for a level on the full stream gives the same mesh.
    const auto again = decode(enc.bytes, static_cast<int>(level));
    EXPECT_EQ(again.grid_coords, dec.grid_coords);
  }
  EXPECT_EQ(decode(enc.bytes, 1000).level, static_cast<int>(chunks.size()) - 1);
}

TEST(Codec, TruncationSweep) {
  const TriMesh mesh = shapes::scanned_blob(1500);
  const auto enc = encode(mesh);
  const auto& chunks = enc.report.chunks;
  ASSERT_GE(chunks.size(), 3u);
  for (std::size_t n = 0; n < enc.bytes.size(); n += 1 + n / 40) {
    const auto prefix = std::span(enc.bytes).first(n);
    if (n < chunks[0].prefix_bytes) {
      try {
        decode(prefix);
        ADD_FAILURE() << "prefix " << n << " decoded";
      } catch (const StreamError& e) {
        EXPECT_EQ(e.kind(), StreamErrorKind::Truncated) << n << ": " << e.what();
      }
      continue;
    }
    const auto dec = decode(prefix);
    int complete = 0;
    while (complete + 1 < static_cast<int>(chunks.size()) && chunks[complete + 1].prefix_bytes <= n) ++complete;
    EXPECT_EQ(dec.level, complete) << n;
    EXPECT_TRUE(dec.truncated) << n;
    EXPECT_NE(dec.message.find("last complete level is " + std::to_string(complete)), std::string::npos)
        << dec.message;
    EXPECT_EQ(dec.mesh.vertex_count(), chunks[complete].vertices);
  }
}

TEST(Codec, TrailingBytesAreCorrupt) {
  auto bytes = encode(shapes::icosahedron()).bytes;
  bytes.push_back(0);
  try {
    decode(bytes);
    FAIL() << "accepted trailing data";
  } catch (const StreamError& e) {
    EXPECT_EQ(e.kind(), StreamErrorKind::Corrupt);
  }
}

// Damaged payloads must fail with StreamError or decode to some mesh;
// anything else (other exceptions, crashes) is a bug.
TEST(Codec, CorruptionIsContained) {
  const auto clean = encode(shapes::torus(900)).bytes;
  std::mt19937_64 rng(99);
  int rejected = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto bytes = clean;
    const int flips = 1 + static_cast<int>(rng() % 4);
    for (int f = 0; f < flips; ++f) {
      const auto pos = kHeaderBytes + rng() % (bytes.size() - kHeaderBytes);
      bytes[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    }
    try {
      const auto dec = decode(bytes);
      EXPECT_LE(dec.mesh.vertex_count(), 900u * 4);
    } catch (const StreamError&) {
      ++rejected;
    } catch (const std::exception& e) {
      ADD_FAILURE() << "trial " << trial << ": " << e.what();
    }
  }
  EXPECT_GT(rejected, 0);
}

TEST(Codec, BadMagicAndVersion) {
  auto bytes = encode(shapes::tetrahedron()).bytes;
  auto bad = bytes;
  bad[1] = 'X';
  EXPECT_THROW(decode(bad), StreamError);
  bad = bytes;
  bad[4] = 9;
  try {
    decode(bad);
    FAIL();
  } catch (const StreamError& e) {
    EXPECT_EQ(e.kind(), StreamErrorKind::Version);
  }
}

TEST(Codec, RejectsInvalidInput) {
  EXPECT_THROW(encode(TriMesh{}), MeshError);
  const TriMesh fin({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)},
                    {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}});
  EXPECT_THROW(encode(fin), MeshError);
  const TriMesh loose({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(5, 5, 5)}, {{0, 1, 2}});
  EXPECT_THROW(encode(loose), MeshError);
}

// The decoder derives every precision from data it already holds; its
// trace must equal the encoder's.
TEST(Codec, PrecisionTraceSymmetry) {
  for (std::uint64_t threshold : {0ull, 200ull, 600ull}) {
    CodecConfig config;
    config.threshold = threshold;
    for (const auto& [name, mesh] : testing::corpus()) {
      const auto enc = encode(mesh, config);
      const auto dec = decode(enc.bytes);
      EXPECT_EQ(dec.precision_trace, enc.precision_trace) << name << " threshold " << threshold;
      for (const auto& e : enc.precision_trace) {
        EXPECT_GE(e.q, kMinPrecision);
        EXPECT_LE(e.q, kDefaultQMax);
      }
    }
  }
}

TEST(Codec, PrecisionBoundaries) {
  const TriMesh mesh = shapes::subdivide_regular(shapes::icosahedron(), 3, true);
  CodecConfig fixed;
  fixed.adaptive = false;
  for (const auto& e : encode(mesh, fixed).precision_trace) EXPECT_EQ(e.q, kDefaultQMax);

  CodecConfig huge;
  huge.threshold = std::uint64_t{1} << 62;
  for (const auto& e : encode(mesh, huge).precision_trace) EXPECT_EQ(e.q, kDefaultQMax);

  // With threshold 0 a vertex starts at the minimum precision.
  CodecConfig zero;
  zero.threshold = 0;
  const auto trace = encode(mesh, zero).precision_trace;
  std::vector<bool> first(mesh.vertex_count(), true);
  for (const auto& e : trace) {
    if (first[e.vertex]) EXPECT_EQ(e.q, kMinPrecision);
    first[e.vertex] = false;
  }
  // The last event of every vertex is full precision: the stream is lossless.
  std::vector<int> last(mesh.vertex_count(), -1);
  for (const auto& e : trace) last[e.vertex] = e.q;
  for (int q : last) {
    if (q >= 0) EXPECT_EQ(q, kDefaultQMax);
  }
}

TEST(Codec, AdaptiveNeverCostsMoreGeometry) {
  for (const auto& [name, mesh] : testing::corpus()) {
    CodecConfig fixed;
    fixed.adaptive = false;
    const auto adaptive_bits = encode(mesh).report.geometry_bits();
    const auto fixed_bits = encode(mesh, fixed).report.geometry_bits();
    EXPECT_LE(adaptive_bits, fixed_bits) << name;
  }
}

TEST(Codec, RdCurveIsMonotone) {
  const TriMesh mesh = shapes::subdivide_regular(shapes::icosahedron(), 3, true);
  const auto curve = rd_curve(mesh, CodecConfig{}, SamplingOptions{});
  ASSERT_EQ(curve.size(), 4u);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LE(curve[i].distortion.rms, curve[i - 1].distortion.rms + 1e-9);
    EXPECT_GT(curve[i].bytes, curve[i - 1].bytes);
  }
  EXPECT_GT(curve.front().distortion.rms, 0.0);
}

}  // namespace
}  // namespace meshpress

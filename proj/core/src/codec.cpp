#include "meshpress/codec.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "meshpress/entropy.hpp"

namespace meshpress {
namespace {

using Parents = std::vector<std::array<VertexId, 2>>;

std::uint64_t edge_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

Face rotate_min_first(const Face& f) {
  int k = 0;
  if (f[1] < f[k]) k = 1;
  if (f[2] < f[k]) k = 2;
  return {f[k], f[(k + 1) % 3], f[(k + 2) % 3]};
}

struct FaceHash {
  std::size_t operator()(const Face& f) const {
    std::uint64_t h = f[0];
    h = h * 0x9e3779b97f4a7c15ull + f[1];
    h = h * 0x9e3779b97f4a7c15ull + f[2];
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

int escape_bits(int q_max) { return q_max; }

int id_bits(std::size_t count) { return count <= 1 ? 1 : static_cast<int>(std::bit_width(count - 1)); }

[[noreturn]] void corrupt(const std::string& what) { throw StreamError(StreamErrorKind::Corrupt, what); }

// ---------------------------------------------------------------------------
// Base mesh connectivity: faces are visited breadth first across edges. Each
// face after a component's first is entered through a gate edge (a, b) of a
// decoded face and only its third vertex is sent, either as "new" or as an
// index into the vertices already adjacent to b and a.

constexpr std::size_t kPickDirect = 32;

struct BaseModels {
  AdaptiveModel component{2};
  AdaptiveModel gate{2};
  AdaptiveModel fresh{2};
  AdaptiveModel pick{kPickDirect + 1};
};

/// How the decoder predicts a base vertex: parallelogram a + b - o when it
/// was introduced through a gate, else the previous vertex.
struct Predictor {
  VertexId a = kInvalidIndex, b = kInvalidIndex, o = kInvalidIndex;
};

/// Decoder-side view of the base mesh under construction; the encoder runs
/// the same object so both see identical candidate lists.
class BaseBuilder {
 public:
  explicit BaseBuilder(std::size_t vertex_count) : adj_(vertex_count) {}

  std::vector<VertexId> candidates(VertexId a, VertexId b) const {
    std::vector<VertexId> out;
    for (VertexId v : {b, a}) {
      for (auto it = adj_[v].rbegin(); it != adj_[v].rend(); ++it) {
        if (*it != a && *it != b && std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
      }
    }
    return out;
  }

  VertexId fresh() { return next_++; }
  std::size_t next() const { return next_; }

  bool add_face(const Face& f) {
    for (int k = 0; k < 3; ++k) {
      const VertexId u = f[k], v = f[(k + 1) % 3];
      if (++edges_[edge_key(u, v)] > 2) return false;
      link(u, v);
      link(v, u);
    }
    faces.push_back(f);
    return true;
  }

  int edge_use(VertexId a, VertexId b) const {
    const auto it = edges_.find(edge_key(a, b));
    return it == edges_.end() ? 0 : it->second;
  }

  std::vector<Face> faces;
  std::vector<Predictor> predictors;

 private:
  void link(VertexId u, VertexId v) {
    auto& list = adj_[u];
    if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
  }

  std::vector<std::vector<VertexId>> adj_;
  std::unordered_map<std::uint64_t, int> edges_;
  VertexId next_ = 0;
};

struct BaseLayout {
  std::vector<Face> faces;  // canonical ids, decoder order
  std::vector<Predictor> predictors;
  std::vector<VertexId> canon_of;  // base label -> canonical id
};

BaseLayout encode_base_connectivity(const TriMesh& base, RangeEncoder& enc) {
  const auto n = base.vertex_count();
  BaseModels m;
  BaseBuilder builder(n);
  BaseLayout out;
  out.canon_of.assign(n, kInvalidIndex);
  builder.predictors.resize(n);
  std::vector<bool> visited(base.face_count(), false);
  std::vector<FaceId> source;  // base face of each decoder face
  std::vector<int> rotation;   // decoder corner k is base corner (k + rotation) % 3

  const auto put_vertex = [&](VertexId label, const std::vector<VertexId>& cands, Predictor pred) {
    if (out.canon_of[label] == kInvalidIndex) {
      enc.encode(m.fresh, 1);
      const VertexId id = builder.fresh();
      out.canon_of[label] = id;
      builder.predictors[id] = pred;
      return id;
    }
    enc.encode(m.fresh, 0);
    const VertexId id = out.canon_of[label];
    const auto idx = static_cast<std::size_t>(std::find(cands.begin(), cands.end(), id) - cands.begin());
    if (idx < kPickDirect && idx < cands.size()) {
      enc.encode(m.pick, idx);
    } else {
      enc.encode(m.pick, kPickDirect);
      enc.encode_bits(id, id_bits(n));
    }
    return id;
  };

  for (FaceId seed = 0; seed < base.face_count(); ++seed) {
    if (visited[seed]) continue;
    enc.encode(m.component, 1);
    visited[seed] = true;
    Face f{};
    for (int k = 0; k < 3; ++k) {
      Predictor pred;
      if (builder.next() > 0) pred.a = static_cast<VertexId>(builder.next() - 1);
      f[k] = put_vertex(base.face(seed)[k], {}, pred);
    }
    builder.add_face(f);
    source.push_back(seed);
    rotation.push_back(0);
    std::vector<std::pair<std::size_t, int>> queue{{builder.faces.size() - 1, 0}, {builder.faces.size() - 1, 1},
                                                   {builder.faces.size() - 1, 2}};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto [fi, k] = queue[head];
      const Face cur = builder.faces[fi];
      const VertexId a = cur[k], b = cur[(k + 1) % 3];
      if (builder.edge_use(a, b) >= 2) continue;
      const FaceId g = base.neighbor(source[fi], (k + rotation[fi]) % 3);
      const bool open = g != kInvalidIndex && !visited[g];
      enc.encode(m.gate, open ? 1 : 0);
      if (!open) continue;
      visited[g] = true;
      const auto& tg = base.face(g);
      // g holds the directed edge (b, a); c is its third corner.
      int rb = 0;
      while (rb < 3 && (out.canon_of[tg[rb]] != b || out.canon_of[tg[(rb + 1) % 3]] != a)) ++rb;
      if (rb == 3) throw std::logic_error("encode: neighbouring base faces disagree on orientation");
      const VertexId c = put_vertex(tg[(rb + 2) % 3], builder.candidates(a, b), {a, b, cur[(k + 2) % 3]});
      builder.add_face({b, a, c});
      source.push_back(g);
      rotation.push_back(rb);
      queue.emplace_back(builder.faces.size() - 1, 1);
      queue.emplace_back(builder.faces.size() - 1, 2);
    }
  }
  enc.encode(m.component, 0);
  out.faces = std::move(builder.faces);
  out.predictors = std::move(builder.predictors);
  return out;
}

BaseLayout decode_base_connectivity(RangeDecoder& dec, std::size_t n, std::size_t face_count) {
  BaseModels m;
  BaseBuilder builder(n);
  builder.predictors.resize(n);

  const auto get_vertex = [&](const std::vector<VertexId>& cands, Predictor pred) {
    if (dec.decode(m.fresh) == 1) {
      if (builder.next() >= n) corrupt("base mesh introduces more vertices than declared");
      const VertexId id = builder.fresh();
      builder.predictors[id] = pred;
      return id;
    }
    const auto idx = dec.decode(m.pick);
    VertexId id = 0;
    if (idx < kPickDirect) {
      if (idx >= cands.size()) corrupt("base vertex reference outside candidate list");
      id = cands[idx];
    } else {
      id = dec.decode_bits(id_bits(n));
      if (id >= builder.next()) corrupt("base vertex reference to an unseen vertex");
    }
    return id;
  };

  while (dec.decode(m.component) == 1) {
    if (builder.faces.size() >= face_count) corrupt("base mesh has more faces than declared");
    Face f{};
    for (int k = 0; k < 3; ++k) {
      Predictor pred;
      if (builder.next() > 0) pred.a = static_cast<VertexId>(builder.next() - 1);
      f[k] = get_vertex({}, pred);
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2] || !builder.add_face(f)) corrupt("invalid base face");
    std::vector<std::pair<std::size_t, int>> queue{{builder.faces.size() - 1, 0}, {builder.faces.size() - 1, 1},
                                                   {builder.faces.size() - 1, 2}};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto [fi, k] = queue[head];
      const Face cur = builder.faces[fi];
      const VertexId a = cur[k], b = cur[(k + 1) % 3];
      if (builder.edge_use(a, b) >= 2) continue;
      if (dec.decode(m.gate) == 0) continue;
      if (builder.faces.size() >= face_count) corrupt("base mesh has more faces than declared");
      const VertexId c = get_vertex(builder.candidates(a, b), {a, b, cur[(k + 2) % 3]});
      if (c == a || c == b || !builder.add_face({b, a, c})) corrupt("invalid base face");
      queue.emplace_back(builder.faces.size() - 1, 1);
      queue.emplace_back(builder.faces.size() - 1, 2);
    }
  }
  if (builder.faces.size() != face_count || builder.next() != n) corrupt("base mesh size differs from the header");
  BaseLayout out;
  out.faces = std::move(builder.faces);
  out.predictors = std::move(builder.predictors);
  return out;
}

IVec3 base_prediction(const std::vector<IVec3>& x, const Predictor& p, int q_max) {
  if (p.o != kInvalidIndex) return x[p.a] + x[p.b] - x[p.o];
  if (p.a != kInvalidIndex) return x[p.a];
  return IVec3::Constant(std::int64_t{1} << (q_max - 1));
}

// ---------------------------------------------------------------------------
// Level connectivity: one pattern symbol per coarse face, in the decoder's
// face order and corner rotation, plus the diagonal bit of trisected faces.

struct PatternModels {
  AdaptiveModel symbol{kPatternSymbols};
  AdaptiveModel diagonal{2};
};

// ---------------------------------------------------------------------------
// Geometry state shared by encoder and decoder. Details are held as integer
// multiples of their current step 2^(q_max - q); positions are always the
// synthesis of the base and every detail received so far.

struct LevelGeometry {
  VertexId offset = 0;  // canonical id of detail 0
  Parents parents;
  std::vector<IVec3> value;
  std::vector<int> q;
};

struct Refinement {
  std::size_t level = 0;
  std::size_t index = 0;
  int q = 0;
};

class Reconstruction {
 public:
  Reconstruction(int q_max, std::uint64_t threshold, bool lifting, bool adaptive)
      : q_max_(q_max), threshold_(threshold), lifting_(lifting), adaptive_(adaptive) {}

  void set_base(std::vector<IVec3> base) {
    base_ = std::move(base);
    positions_ = base_;
  }

  const std::vector<IVec3>& positions() const { return positions_; }
  const std::vector<LevelGeometry>& levels() const { return levels_; }
  const std::vector<PrecisionEvent>& trace() const { return trace_; }

  /// Precision of each new detail, from the current (coarse) positions.
  std::vector<int> initial_precisions(const Parents& parents) const {
    std::vector<int> q(parents.size(), q_max_);
    if (!adaptive_) return q;
    std::vector<IVec3> targets;
    targets.reserve(parents.size());
    for (const auto& [a, b] : parents) {
      IVec3 s = positions_[a] + positions_[b];
      for (int c = 0; c < 3; ++c) s[c] = floor_div(s[c], 2);
      targets.push_back(s);
    }
    const std::vector<IVec3> zero(parents.size(), IVec3::Zero());
    const auto quantized = quantize_details(zero, targets, positions_, q_max_, threshold_);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = quantized[k].q;
    return q;
  }

  void add_level(Parents parents, std::vector<IVec3> value, std::vector<int> q) {
    LevelGeometry level;
    level.offset = static_cast<VertexId>(positions_.size());
    level.parents = std::move(parents);
    level.value = std::move(value);
    level.q = std::move(q);
    const auto number = static_cast<std::uint32_t>(levels_.size() + 1);
    for (std::size_t k = 0; k < level.q.size(); ++k) {
      trace_.push_back({number, level.offset + static_cast<VertexId>(k), static_cast<std::uint8_t>(level.q[k])});
    }
    levels_.push_back(std::move(level));
    synthesize();
  }

  /// Details whose required precision rose once this level's vertices
  /// arrived, in canonical order. The last level lifts everything to q_max.
  std::vector<Refinement> refinement_plan(bool last) const {
    std::vector<Refinement> plan;
    if (!adaptive_) return plan;
    const NearestNeighborIndex index(positions_);
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      const auto& level = levels_[l];
      for (std::size_t k = 0; k < level.q.size(); ++k) {
        int need = q_max_;
        if (!last) {
          const VertexId v = level.offset + static_cast<VertexId>(k);
          const VertexId nn = index.nearest(positions_[v], v);
          if (nn != kInvalidIndex) need = required_precision(positions_[v], positions_[nn], q_max_, threshold_);
        }
        if (need > level.q[k]) plan.push_back({l, k, need});
      }
    }
    return plan;
  }

  int q_of(const Refinement& r) const { return levels_[r.level].q[r.index]; }
  const IVec3& value_of(const Refinement& r) const { return levels_[r.level].value[r.index]; }

  void apply(const std::vector<Refinement>& plan, const std::vector<IVec3>& values) {
    const auto number = static_cast<std::uint32_t>(levels_.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
      auto& level = levels_[plan[i].level];
      level.q[plan[i].index] = plan[i].q;
      level.value[plan[i].index] = values[i];
      trace_.push_back({number, level.offset + static_cast<VertexId>(plan[i].index),
                        static_cast<std::uint8_t>(plan[i].q)});
    }
    if (!plan.empty()) synthesize();
  }

  int q_max() const { return q_max_; }

 private:
  void synthesize() {
    std::vector<IVec3> x = base_;
    for (const auto& level : levels_) {
      std::vector<IVec3> details(level.value.size());
      for (std::size_t k = 0; k < details.size(); ++k) details[k] = level.value[k] * (std::int64_t{1} << (q_max_ - level.q[k]));
      x = synthesize_integer(x, details, level.parents, lifting_);
    }
    positions_ = std::move(x);
  }

  int q_max_;
  std::uint64_t threshold_;
  bool lifting_;
  bool adaptive_;
  std::vector<IVec3> base_;
  std::vector<IVec3> positions_;
  std::vector<LevelGeometry> levels_;
  std::vector<PrecisionEvent> trace_;
};

/// Entropy models for one stream's geometry. Residual models are split by
/// how many bits the refinement adds; a residual stays within about half of
/// 2^gained, so that is also its escape width.
struct GeometryModels {
  explicit GeometryModels(int q_max) {
    for (int a = 0; a < 3; ++a) {
      base.emplace_back(escape_bits(q_max));
      detail.emplace_back(escape_bits(q_max));
    }
    for (int gained = 0; gained <= kMaxGridBits; ++gained) {
      for (int a = 0; a < 3; ++a) residual.emplace_back(std::max(1, gained));
    }
  }
  SignedEscapeCoder& refine(int axis, int gained) { return residual[3 * gained + axis]; }

  std::vector<SignedEscapeCoder> base;
  std::vector<SignedEscapeCoder> detail;
  std::vector<SignedEscapeCoder> residual;
};

struct ChunkBytes {
  std::vector<std::uint8_t> connectivity;
  std::vector<std::uint8_t> geometry;
};

StreamHeader make_header(const CodecConfig& config, const QuantGrid& grid) {
  StreamHeader h;
  h.q_max = static_cast<std::uint8_t>(config.q_max);
  h.flags = static_cast<std::uint8_t>((config.lifting ? kFlagLifting : 0) | (config.wgc.enabled ? kFlagWgc : 0) |
                                      (config.adaptive ? kFlagAdaptive : 0));
  h.threshold = config.threshold;
  h.gamma = config.wgc.gamma;
  h.origin = grid.origin;
  h.scale = grid.scale;
  return h;
}

}  // namespace

EncodeResult encode(const TriMesh& mesh, const CodecConfig& config) {
  if (mesh.face_count() == 0) throw MeshError("encode: mesh has no faces");
  if (mesh.vertex_count() > kMaxVertices || mesh.face_count() > kMaxFaces) {
    throw MeshError("encode: mesh exceeds the format's size limits");
  }
  require_manifold(mesh);
  {
    std::vector<bool> used(mesh.vertex_count(), false);
    for (const auto& t : mesh.faces()) used[t[0]] = used[t[1]] = used[t[2]] = true;
    const auto it = std::find(used.begin(), used.end(), false);
    if (it != used.end()) {
      throw MeshError("encode: vertex " + std::to_string(it - used.begin()) + " is not used by any face");
    }
  }
  const QuantGrid grid = make_grid(mesh, config.q_max);
  const auto records = build_hierarchy(mesh, config.wgc, config.max_levels);
  const auto level_count = records.size();
  const TriMesh& base = records.empty() ? mesh : records.back().coarse;

  std::vector<ChunkBytes> chunks(level_count + 1);

  // Connectivity first: it fixes the canonical numbering the geometry uses.
  RangeEncoder base_conn;
  auto layout = encode_base_connectivity(base, base_conn);
  chunks[0].connectivity = base_conn.finish();

  std::vector<VertexId> canon = layout.canon_of;
  std::vector<Face> faces = layout.faces;
  std::vector<Parents> level_parents;
  PatternModels pattern_models;
  for (std::size_t j = 1; j <= level_count; ++j) {
    const LevelRecord& rec = records[level_count - j];
    const auto n = canon.size();
    std::vector<VertexId> label_of(n);
    for (VertexId i = 0; i < n; ++i) label_of[canon[i]] = i;

    std::unordered_map<Face, std::pair<FaceId, int>, FaceHash> coarse_face;
    for (FaceId c = 0; c < rec.coarse.face_count(); ++c) {
      const auto& t = rec.coarse.face(c);
      coarse_face.emplace(rotate_min_first({canon[t[0]], canon[t[1]], canon[t[2]]}), std::pair{c, 0});
    }
    std::vector<FacePattern> patterns;
    patterns.reserve(faces.size());
    RangeEncoder conn;
    for (const auto& f : faces) {
      const auto it = coarse_face.find(rotate_min_first(f));
      if (it == coarse_face.end()) throw std::logic_error("encode: decoder face missing from the level record");
      const FaceId c = it->second.first;
      const auto& t = rec.coarse.face(c);
      int rho = 0;
      while (canon[t[rho]] != f[0]) ++rho;
      FacePattern p = rec.face_groups[c].pattern;
      if (p.kind == Pattern::Bisect || p.kind == Pattern::Trisect) p.edge = static_cast<std::uint8_t>((p.edge + 3 - rho) % 3);
      conn.encode(pattern_models.symbol, p.symbol());
      if (p.kind == Pattern::Trisect) conn.encode(pattern_models.diagonal, p.diagonal);
      patterns.push_back(p);
    }
    chunks[j].connectivity = conn.finish();

    const auto sub = subdivide(faces, n, patterns);
    std::unordered_map<std::uint64_t, VertexId> odd_on;
    for (const auto& group : rec.face_groups) {
      for (const auto& s : group.split_edges) odd_on.emplace(edge_key(s.a, s.b), s.odd);
    }
    std::vector<VertexId> next(rec.fine_vertex_count, kInvalidIndex);
    for (VertexId i = 0; i < n; ++i) next[rec.even_vertices[i]] = canon[i];
    for (std::size_t k = 0; k < sub.parents.size(); ++k) {
      const auto [pa, pb] = sub.parents[k];
      const auto it = odd_on.find(edge_key(rec.even_vertices[label_of[pa]], rec.even_vertices[label_of[pb]]));
      if (it == odd_on.end()) throw std::logic_error("encode: subdivided edge has no odd vertex in the record");
      next[it->second] = static_cast<VertexId>(n + k);
    }
    if (std::find(next.begin(), next.end(), kInvalidIndex) != next.end()) {
      throw std::logic_error("encode: level record and subdivision disagree on vertex count");
    }
    canon = std::move(next);
    faces = sub.faces;
    level_parents.push_back(sub.parents);
  }

  // Quantize in canonical order, then analyse down to the base.
  EncodeResult result;
  result.grid_coords.reserve(mesh.vertex_count());
  for (const auto& p : mesh.vertices()) result.grid_coords.push_back(grid.quantize(p));
  result.vertex_order.assign(mesh.vertex_count(), 0);
  std::vector<IVec3> x(mesh.vertex_count());
  for (VertexId i = 0; i < mesh.vertex_count(); ++i) {
    result.vertex_order[canon[i]] = i;
    x[canon[i]] = result.grid_coords[i];
  }
  std::vector<std::vector<IVec3>> details(level_count);
  for (std::size_t j = level_count; j >= 1; --j) {
    auto coeffs = analyze_integer(x, level_parents[j - 1], config.lifting);
    details[j - 1] = std::move(coeffs.details);
    x = std::move(coeffs.approx);
  }

  GeometryModels models(config.q_max);
  {
    RangeEncoder geo;
    for (VertexId v = 0; v < x.size(); ++v) {
      const IVec3 r = x[v] - base_prediction(x, layout.predictors[v], config.q_max);
      for (int a = 0; a < 3; ++a) models.base[a].encode(geo, r[a]);
    }
    chunks[0].geometry = geo.finish();
  }

  Reconstruction recon(config.q_max, config.threshold, config.lifting, config.adaptive);
  recon.set_base(x);
  for (std::size_t j = 1; j <= level_count; ++j) {
    const auto& exact = details[j - 1];
    RangeEncoder geo;
    auto q = recon.initial_precisions(level_parents[j - 1]);
    std::vector<IVec3> value(exact.size());
    for (std::size_t k = 0; k < exact.size(); ++k) {
      value[k] = round_shift(exact[k], config.q_max - q[k]);
      for (int a = 0; a < 3; ++a) models.detail[a].encode(geo, value[k][a]);
    }
    recon.add_level(level_parents[j - 1], std::move(value), std::move(q));

    const auto plan = recon.refinement_plan(j == level_count);
    std::vector<IVec3> refined;
    refined.reserve(plan.size());
    for (const auto& r : plan) {
      const int gained = r.q - recon.q_of(r);
      const IVec3 target = round_shift(details[r.level][r.index], config.q_max - r.q);
      const IVec3 residual = target - recon.value_of(r) * (std::int64_t{1} << gained);
      for (int a = 0; a < 3; ++a) models.refine(a, gained).encode(geo, residual[a]);
      refined.push_back(target);
    }
    recon.apply(plan, refined);
    chunks[j].geometry = geo.finish();
  }
  result.precision_trace = recon.trace();

  // Assemble.
  StreamHeader header = make_header(config, grid);
  header.base_vertices = static_cast<std::uint32_t>(base.vertex_count());
  header.base_faces = static_cast<std::uint32_t>(base.face_count());
  header.level_count = static_cast<std::uint32_t>(level_count);
  header.final_vertices = static_cast<std::uint32_t>(mesh.vertex_count());
  header.final_faces = static_cast<std::uint32_t>(mesh.face_count());

  ByteWriter out;
  write_header(out, header);
  for (const auto& c : chunks) out.u32(static_cast<std::uint32_t>(4 + c.connectivity.size() + c.geometry.size()));
  const std::size_t preamble = out.bytes().size();

  RateReport& report = result.report;
  report.original_vertices = mesh.vertex_count();
  report.header_bits = 8 * kHeaderBytes;
  std::size_t prefix = preamble;
  std::size_t vertices = base.vertex_count(), face_total = base.face_count();
  for (std::size_t j = 0; j < chunks.size(); ++j) {
    const auto& c = chunks[j];
    out.u32(static_cast<std::uint32_t>(c.connectivity.size()));
    out.raw(c.connectivity);
    out.raw(c.geometry);
    prefix += 4 + c.connectivity.size() + c.geometry.size();
    if (j > 0) {
      vertices = records[level_count - j].fine_vertex_count;
      face_total = records[level_count - j].fine_face_count;
    }
    ChunkRate rate;
    rate.connectivity_bits = 8 * c.connectivity.size();
    rate.geometry_bits = 8 * c.geometry.size();
    rate.overhead_bits = 8 * (4 + 4);
    rate.vertices = vertices;
    rate.faces = face_total;
    rate.prefix_bytes = prefix;
    report.chunks.push_back(rate);
  }
  result.bytes = std::move(out.bytes());
  return result;
}

StreamInfo read_info(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  StreamInfo info;
  info.header = read_header(in);
  for (std::uint32_t i = 0; i <= info.header.level_count; ++i) info.chunk_bytes.push_back(in.u32());
  info.total_bytes = in.position();
  for (auto n : info.chunk_bytes) info.total_bytes += n;
  return info;
}

namespace {

DecodeResult decode_stream(std::span<const std::uint8_t> bytes, int up_to_level) {
  ByteReader in(bytes);
  DecodeResult result;
  const StreamHeader h = read_header(in);
  result.header = h;
  std::vector<std::uint32_t> lengths;
  for (std::uint32_t i = 0; i <= h.level_count; ++i) lengths.push_back(in.u32());
  for (auto n : lengths) {
    if (n < 4) corrupt("chunk shorter than its connectivity length field");
  }

  QuantGrid grid;
  grid.origin = h.origin;
  grid.scale = h.scale;
  grid.q_max = h.q_max;
  const int q_max = h.q_max;

  struct Chunk {
    std::span<const std::uint8_t> connectivity, geometry;
  };
  const auto split = [&](std::size_t index) {
    auto data = in.take(lengths[index]);
    ByteReader cr(data);
    const auto conn_len = cr.u32();
    if (conn_len > data.size() - 4) corrupt("connectivity length exceeds chunk " + std::to_string(index));
    return Chunk{data.subspan(4, conn_len), data.subspan(4 + conn_len)};
  };
  const auto check_overrun = [](const RangeDecoder& d, std::size_t index) {
    if (d.overrun() > 4) corrupt("chunk " + std::to_string(index) + " ends before its data");
  };

  if (in.remaining() < lengths[0]) {
    throw StreamError(StreamErrorKind::Truncated, "stream ends inside the base mesh; no level is complete");
  }
  const Chunk base_chunk = split(0);
  RangeDecoder base_conn(base_chunk.connectivity);
  const auto layout = decode_base_connectivity(base_conn, h.base_vertices, h.base_faces);
  check_overrun(base_conn, 0);

  GeometryModels models(q_max);
  std::vector<IVec3> x(h.base_vertices);
  try {
    RangeDecoder geo(base_chunk.geometry);
    for (VertexId v = 0; v < x.size(); ++v) {
      const IVec3 p = base_prediction(x, layout.predictors[v], q_max);
      for (int a = 0; a < 3; ++a) x[v][a] = p[a] + models.base[a].decode(geo);
    }
    check_overrun(geo, 0);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const StreamError*>(&e)) throw;
    corrupt(std::string("base geometry: ") + e.what());
  }

  Reconstruction recon(q_max, h.threshold, h.lifting(), h.adaptive());
  recon.set_base(std::move(x));
  std::vector<Face> faces = layout.faces;
  PatternModels pattern_models;
  const auto wanted = static_cast<std::uint32_t>(std::clamp(up_to_level, 0, static_cast<int>(h.level_count)));
  std::uint32_t done = 0;
  for (std::uint32_t j = 1; j <= wanted; ++j) {
    if (in.remaining() < lengths[j]) {
      result.truncated = true;
      result.message = "stream truncated inside level " + std::to_string(j) + " (byte " +
                       std::to_string(bytes.size()) + "); last complete level is " + std::to_string(j - 1);
      break;
    }
    const Chunk chunk = split(j);
    try {
      RangeDecoder conn(chunk.connectivity);
      std::vector<FacePattern> patterns;
      patterns.reserve(faces.size());
      for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto symbol = static_cast<std::uint8_t>(conn.decode(pattern_models.symbol));
        auto p = FacePattern::from_symbol(symbol);
        if (p.kind == Pattern::Trisect) p.diagonal = static_cast<std::uint8_t>(conn.decode(pattern_models.diagonal));
        patterns.push_back(p);
      }
      check_overrun(conn, j);
      const auto sub = subdivide(faces, recon.positions().size(), patterns);

      RangeDecoder geo(chunk.geometry);
      auto q = recon.initial_precisions(sub.parents);
      std::vector<IVec3> value(q.size());
      for (std::size_t k = 0; k < value.size(); ++k) {
        for (int a = 0; a < 3; ++a) value[k][a] = models.detail[a].decode(geo);
      }
      recon.add_level(sub.parents, std::move(value), std::move(q));
      const auto plan = recon.refinement_plan(j == h.level_count);
      std::vector<IVec3> refined;
      refined.reserve(plan.size());
      for (const auto& r : plan) {
        const int gained = r.q - recon.q_of(r);
        IVec3 residual;
        for (int a = 0; a < 3; ++a) residual[a] = models.refine(a, gained).decode(geo);
        refined.push_back(recon.value_of(r) * (std::int64_t{1} << gained) + residual);
      }
      recon.apply(plan, refined);
      check_overrun(geo, j);
      faces = sub.faces;
    } catch (const StreamError&) {
      throw;
    } catch (const std::exception& e) {
      corrupt("level " + std::to_string(j) + ": " + e.what());
    }
    done = j;
  }
  if (done == h.level_count) {
    if (recon.positions().size() != h.final_vertices || faces.size() != h.final_faces) {
      corrupt("decoded mesh size differs from the header");
    }
    if (in.remaining() != 0) corrupt(std::to_string(in.remaining()) + " bytes after the last chunk");
  }

  result.level = static_cast<int>(done);
  result.grid_coords = recon.positions();
  std::vector<Vec3> positions;
  positions.reserve(result.grid_coords.size());
  for (const auto& c : result.grid_coords) positions.push_back(grid.dequantize(c));
  result.mesh = TriMesh(std::move(positions), std::move(faces));
  result.precision_trace = recon.trace();
  return result;
}

}  // namespace

DecodeResult decode(std::span<const std::uint8_t> bytes, int up_to_level) {
  try {
    return decode_stream(bytes, up_to_level);
  } catch (const StreamError&) {
    throw;
  } catch (const std::exception& e) {
    throw StreamError(StreamErrorKind::Corrupt, e.what());
  }
}

std::vector<RdPoint> rd_curve(const TriMesh& mesh, const CodecConfig& config, const SamplingOptions& sampling) {
  const auto encoded = encode(mesh, config);
  std::vector<RdPoint> out;
  for (std::size_t level = 0; level < encoded.report.chunks.size(); ++level) {
    const auto prefix = encoded.report.chunks[level].prefix_bytes;
    const auto decoded = decode(std::span(encoded.bytes).first(prefix), static_cast<int>(level));
    RdPoint point;
    point.level = static_cast<int>(level);
    point.bytes = prefix;
    point.bpv = bpv(8 * prefix, mesh.vertex_count());
    point.distortion = sampled_distance(mesh, decoded.mesh, sampling);
    out.push_back(point);
  }
  return out;
}

}  // namespace meshpress

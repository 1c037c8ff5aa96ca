#include "meshpress/hierarchy.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace meshpress {

bool FacePattern::splits(int k) const {
  switch (kind) {
    case Pattern::Unchanged:
      return false;
    case Pattern::Bisect:
      return k == edge;
    case Pattern::Trisect:
      return k != edge;
    case Pattern::Quadrisect:
      return true;
  }
  return false;
}

int FacePattern::child_count() const { return static_cast<int>(kind) + 1; }

std::uint8_t FacePattern::symbol() const {
  switch (kind) {
    case Pattern::Unchanged:
      return 0;
    case Pattern::Bisect:
      return static_cast<std::uint8_t>(1 + edge);
    case Pattern::Trisect:
      return static_cast<std::uint8_t>(4 + edge);
    case Pattern::Quadrisect:
      return 7;
  }
  return 0;
}

FacePattern FacePattern::from_symbol(std::uint8_t symbol, std::uint8_t diagonal) {
  if (symbol == 0) return {Pattern::Unchanged, 0, 0};
  if (symbol <= 3) return {Pattern::Bisect, static_cast<std::uint8_t>(symbol - 1), 0};
  if (symbol <= 6) return {Pattern::Trisect, static_cast<std::uint8_t>(symbol - 4), diagonal};
  if (symbol == 7) return {Pattern::Quadrisect, 0, 0};
  throw MeshError("invalid subdivision pattern symbol " + std::to_string(symbol));
}

namespace {

std::uint64_t edge_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

bool same_pair(const std::array<VertexId, 2>& p, VertexId a, VertexId b) {
  return (p[0] == a && p[1] == b) || (p[0] == b && p[1] == a);
}

/// Children of one coarse face, in the order shared by the encoder-side
/// grouping and the decoder-side refinement. `mid[k]` is the vertex on edge
/// k, or kInvalidIndex.
void emit_children(const Face& t, const FacePattern& p, const std::array<VertexId, 3>& mid,
                   std::vector<Face>& out) {
  const int k = p.edge;
  const VertexId a = t[k], b = t[(k + 1) % 3], c = t[(k + 2) % 3];
  switch (p.kind) {
    case Pattern::Unchanged:
      out.push_back(t);
      break;
    case Pattern::Bisect: {
      const VertexId m = mid[k];
      out.push_back({a, m, c});
      out.push_back({m, b, c});
      break;
    }
    case Pattern::Trisect: {
      const VertexId m1 = mid[(k + 1) % 3];  // on (b, c)
      const VertexId m2 = mid[(k + 2) % 3];  // on (c, a)
      out.push_back({m1, c, m2});
      if (p.diagonal == 0) {
        out.push_back({a, b, m1});
        out.push_back({a, m1, m2});
      } else {
        out.push_back({a, b, m2});
        out.push_back({b, m1, m2});
      }
      break;
    }
    case Pattern::Quadrisect:
      out.push_back({t[0], mid[0], mid[2]});
      out.push_back({mid[0], t[1], mid[1]});
      out.push_back({mid[2], mid[1], t[2]});
      out.push_back({mid[0], mid[1], mid[2]});
      break;
  }
}

Face rotate_min_first(const Face& f) {
  int k = 0;
  if (f[1] < f[k]) k = 1;
  if (f[2] < f[k]) k = 2;
  return {f[k], f[(k + 1) % 3], f[(k + 2) % 3]};
}

enum class Role : std::uint8_t { Free, Even, Odd };

struct Candidate {
  FacePattern pattern;
  Face corners{};
  std::vector<FaceId> faces;
  std::vector<SplitEdge> splits;
};

class Simplifier {
 public:
  Simplifier(const TriMesh& mesh, const WgcConfig& wgc) : mesh_(mesh), wgc_(wgc) {
    const auto n = mesh.vertex_count();
    boundary_.assign(n, false);
    for (FaceId f = 0; f < mesh.face_count(); ++f) {
      const auto& t = mesh.face(f);
      for (int k = 0; k < 3; ++k) {
        edges_.insert(edge_key(t[k], t[(k + 1) % 3]));
        if (mesh.neighbor(f, k) == kInvalidIndex) {
          boundary_[t[k]] = true;
          boundary_[t[(k + 1) % 3]] = true;
        }
      }
    }
  }

  std::optional<LevelRecord> run() {
    forbidden_.assign(mesh_.vertex_count(), false);
    while (true) {
      reset();
      const auto face_count = mesh_.face_count();
      // Groups grow outward from a seed face, so each new group meets
      // vertices whose roles are already fixed. Every accepted group comes
      // with a closure that leaves no odd vertex half covered.
      std::vector<bool> queued(face_count, false);
      std::deque<FaceId> queue;
      for (FaceId i = 0; i < face_count; ++i) {
        const FaceId seed = i;
        if (queued[seed]) continue;
        queued[seed] = true;
        queue.push_back(seed);
        while (!queue.empty()) {
          const FaceId f = queue.front();
          queue.pop_front();
          if (group_of_[f] != kInvalidIndex) continue;
          const auto mark = groups_.size();
          if (!place(f)) continue;
          // Odd vertices the closure left open are settled first.
          for (VertexId m : open_) {
            if (role_[m] != Role::Odd || cover_[m] >= mesh_.star(m).size()) continue;
            for (FaceId g : mesh_.star(m)) {
              if (group_of_[g] == kInvalidIndex) {
                queued[g] = true;
                queue.push_front(g);
                break;
              }
            }
          }
          for (auto g = mark; g < groups_.size(); ++g) {
            for (FaceId h : groups_[g].faces) {
              for (int k = 0; k < 3; ++k) {
                const FaceId n = across(h, k);
                if (n != kInvalidIndex && !queued[n]) {
                  queued[n] = true;
                  queue.push_back(n);
                }
              }
            }
          }
        }
      }

      std::vector<VertexId> conflicts;
      for (FaceId f = 0; f < face_count; ++f) {
        if (group_of_[f] != kInvalidIndex) continue;
        Candidate keep;
        keep.pattern = {Pattern::Unchanged, 0, 0};
        keep.corners = mesh_.face(f);
        keep.faces = {f};
        bool ok = true;
        for (VertexId v : keep.corners) {
          if (role_[v] == Role::Odd) {
            conflicts.push_back(v);
            ok = false;
          }
        }
        if (ok) commit(keep);
      }
      for (VertexId v = 0; v < mesh_.vertex_count(); ++v) {
        if (role_[v] == Role::Odd && cover_[v] != mesh_.star(v).size()) conflicts.push_back(v);
      }
      if (conflicts.empty()) {
        if (odd_count_ == 0) return std::nullopt;
        auto record = assemble(conflicts);
        if (record) return record;
        if (conflicts.empty()) return std::nullopt;
      }
      for (VertexId v : conflicts) forbidden_[v] = true;
    }
  }

 private:
  /// Backtracking budget for closing one top-level group.
  static constexpr int kClosureBudget = 32;

  void reset() {
    const auto n = mesh_.vertex_count();
    role_.assign(n, Role::Free);
    parent_.assign(n, {kInvalidIndex, kInvalidIndex});
    cover_.assign(n, 0);
    corner_refs_.assign(n, 0);
    group_of_.assign(mesh_.face_count(), kInvalidIndex);
    groups_.clear();
    open_.clear();
    odd_count_ = 0;
  }

  std::vector<Candidate> candidates(FaceId f) const {
    std::vector<Candidate> out;
    std::vector<double> scores;
    enumerate(f, [&](Candidate c) {
      if (!admissible(c)) return;
      const double sc = score(c);
      auto pos = std::upper_bound(scores.begin(), scores.end(), sc, std::greater<>());
      out.insert(out.begin() + (pos - scores.begin()), std::move(c));
      scores.insert(pos, sc);
    });
    return out;
  }

  /// Tries the candidates of f best first; keeps the first whose closure
  /// succeeds.
  bool place(FaceId f) {
    for (const auto& c : candidates(f)) {
      const auto mark = groups_.size();
      commit(c);
      if (close()) return true;
      undo_to(mark);
    }
    return false;
  }

  /// Options for completing the uncovered side of odd vertex m.
  std::vector<Candidate> completions(VertexId m) const {
    for (FaceId h : mesh_.star(m)) {
      if (group_of_[h] == kInvalidIndex) return candidates(h);
    }
    return {};
  }

  /// Picks the half-covered odd vertex with the fewest completions and
  /// returns them; nullopt when every odd vertex is fully covered.
  std::optional<std::vector<Candidate>> most_constrained() {
    std::size_t kept = 0;
    std::optional<std::vector<Candidate>> best;
    for (std::size_t i = 0; i < open_.size(); ++i) {
      const VertexId m = open_[i];
      if (role_[m] != Role::Odd || cover_[m] >= mesh_.star(m).size()) continue;
      if (std::find(open_.begin(), open_.begin() + kept, m) != open_.begin() + kept) continue;
      open_[kept++] = m;
      if (best && best->size() <= 1) continue;
      auto options = completions(m);
      if (!best || options.size() < best->size()) best = std::move(options);
    }
    open_.resize(kept);
    return best;
  }

  /// Depth-first completion of every half-covered odd vertex, most
  /// constrained vertex first.
  bool close() {
    struct Frame {
      std::vector<Candidate> options;
      std::size_t next = 0;
      std::size_t mark = 0;
    };
    std::vector<Frame> frames;
    int budget = kClosureBudget;
    while (true) {
      auto options = most_constrained();
      if (!options) return true;
      frames.push_back({std::move(*options), 0, groups_.size()});
      // Advance to the next untried option, backtracking as needed.
      while (true) {
        if (frames.empty()) return false;
        auto& top = frames.back();
        undo_to(top.mark);
        if (top.next < top.options.size()) {
          commit(top.options[top.next++]);
          break;
        }
        frames.pop_back();
        if (--budget < 0) {
          if (!frames.empty()) undo_to(frames.front().mark);
          return false;
        }
      }
    }
  }

  std::size_t faces_containing(const Candidate& c, VertexId m) const {
    std::size_t n = 0;
    for (FaceId f : c.faces) {
      const auto& t = mesh_.face(f);
      n += t[0] == m || t[1] == m || t[2] == m;
    }
    return n;
  }

  void commit(const Candidate& c) {
    const auto id = static_cast<std::uint32_t>(groups_.size());
    for (FaceId f : c.faces) group_of_[f] = id;
    for (VertexId v : c.corners) {
      ++corner_refs_[v];
      role_[v] = Role::Even;
    }
    for (const auto& s : c.splits) {
      if (cover_[s.odd] == 0) {
        role_[s.odd] = Role::Odd;
        parent_[s.odd] = {s.a, s.b};
        ++odd_count_;
      }
      cover_[s.odd] += faces_containing(c, s.odd);
      if (cover_[s.odd] < mesh_.star(s.odd).size()) open_.push_back(s.odd);
    }
    groups_.push_back(c);
  }

  void undo_to(std::size_t mark) {
    while (groups_.size() > mark) {
      const Candidate& c = groups_.back();
      for (FaceId f : c.faces) group_of_[f] = kInvalidIndex;
      for (VertexId v : c.corners) {
        if (--corner_refs_[v] == 0) role_[v] = Role::Free;
      }
      for (const auto& s : c.splits) {
        cover_[s.odd] -= faces_containing(c, s.odd);
        if (cover_[s.odd] == 0) {
          role_[s.odd] = Role::Free;
          parent_[s.odd] = {kInvalidIndex, kInvalidIndex};
          --odd_count_;
        } else {
          open_.push_back(s.odd);
        }
      }
      groups_.pop_back();
    }
  }

  FaceId across(FaceId f, int k) const { return mesh_.neighbor(f, k); }

  VertexId third(FaceId g, VertexId x, VertexId y) const {
    for (VertexId v : mesh_.face(g)) {
      if (v != x && v != y) return v;
    }
    return kInvalidIndex;
  }

  /// Calls `visit` with every raw candidate group that contains face f.
  template <typename Visit>
  void enumerate(FaceId f, Visit&& visit) const {
    std::vector<FaceId> around{f};
    for (int k = 0; k < 3; ++k) {
      const auto g = across(f, k);
      if (g != kInvalidIndex && group_of_[g] == kInvalidIndex) around.push_back(g);
    }
    std::sort(around.begin() + 1, around.end());
    around.erase(std::unique(around.begin(), around.end()), around.end());

    const auto offer = [&](std::optional<Candidate> c) {
      if (c && contains(*c, f)) visit(std::move(*c));
    };
    for (FaceId center : around) offer(quadrisect(center));
    for (FaceId middle : around) {
      for (int r = 0; r < 3; ++r) {
        for (int diag = 0; diag < 2; ++diag) offer(trisect(middle, r, diag));
      }
    }
    std::vector<std::pair<FaceId, int>> partners;
    for (int k = 0; k < 3; ++k) {
      const auto g = across(f, k);
      if (g != kInvalidIndex && group_of_[g] == kInvalidIndex) partners.emplace_back(g, k);
    }
    std::sort(partners.begin(), partners.end());
    for (const auto& [g, k] : partners) {
      for (int interp = 0; interp < 2; ++interp) offer(bisect(f, k, interp));
    }
  }

  /// Larger is better. Vertices whose role is already settled count most,
  /// then the number of faces merged. Relative midpoint offsets break ties
  /// between parent pairs; a wrong pair flips a coarse edge and usually
  /// blocks the next level.
  double score(const Candidate& c) const {
    int agree = 0;
    double geo = 0.0;
    for (VertexId v : c.corners) agree += role_[v] == Role::Even;
    for (const auto& s : c.splits) {
      agree += role_[s.odd] == Role::Odd;
      const Vec3& pa = mesh_.vertex(s.a);
      const Vec3& pb = mesh_.vertex(s.b);
      geo += (mesh_.vertex(s.odd) - 0.5 * (pa + pb)).norm() / (pa - pb).norm();
    }
    const int merged = static_cast<int>(c.faces.size());
    return agree * 100.0 + merged * 10.0 - 20.0 * geo;
  }

  static bool contains(const Candidate& c, FaceId f) {
    return std::find(c.faces.begin(), c.faces.end(), f) != c.faces.end();
  }

  std::optional<Candidate> quadrisect(FaceId center) const {
    const auto& t = mesh_.face(center);
    const FaceId g0 = across(center, 0), g1 = across(center, 1), g2 = across(center, 2);
    if (g0 == kInvalidIndex || g1 == kInvalidIndex || g2 == kInvalidIndex) return std::nullopt;
    const VertexId m0 = t[0], m1 = t[1], m2 = t[2];
    const VertexId v1 = third(g0, m0, m1), v2 = third(g1, m1, m2), v0 = third(g2, m2, m0);
    Candidate c;
    c.pattern = {Pattern::Quadrisect, 0, 0};
    c.corners = {v0, v1, v2};
    c.faces = {g2, g0, g1, center};
    c.splits = {{m0, v0, v1}, {m1, v1, v2}, {m2, v2, v0}};
    return c;
  }

  std::optional<Candidate> trisect(FaceId middle, int r, int diag) const {
    const auto& t = mesh_.face(middle);
    const VertexId p0 = t[r], p1 = t[(r + 1) % 3], p2 = t[(r + 2) % 3];
    const FaceId corner_face = across(middle, (r + 1) % 3);
    const FaceId end_face = across(middle, diag == 0 ? r : (r + 2) % 3);
    if (corner_face == kInvalidIndex || end_face == kInvalidIndex) return std::nullopt;
    const VertexId c_vertex = third(corner_face, p1, p2);
    Candidate c;
    c.pattern = {Pattern::Trisect, 0, static_cast<std::uint8_t>(diag)};
    if (diag == 0) {
      const VertexId a = p0, b = third(end_face, p0, p1);
      c.corners = {a, b, c_vertex};
    } else {
      const VertexId a = third(end_face, p2, p0), b = p0;
      c.corners = {a, b, c_vertex};
    }
    c.faces = {corner_face, end_face, middle};
    c.splits = {{p1, c.corners[1], c.corners[2]}, {p2, c.corners[2], c.corners[0]}};
    return c;
  }

  std::optional<Candidate> bisect(FaceId f, int k, int interp) const {
    const auto& t = mesh_.face(f);
    const VertexId x = t[k], y = t[(k + 1) % 3], z = t[(k + 2) % 3];
    const FaceId g = across(f, k);
    if (g == kInvalidIndex) return std::nullopt;
    const VertexId w = third(g, x, y);
    Candidate c;
    c.pattern = {Pattern::Bisect, 0, 0};
    if (interp == 0) {
      // f = (a, m, c), g = (m, b, c)
      c.corners = {z, w, y};
      c.faces = {f, g};
      c.splits = {{x, z, w}};
    } else {
      // f = (m, b, c), g = (a, m, c)
      c.corners = {w, z, x};
      c.faces = {g, f};
      c.splits = {{y, w, z}};
    }
    return c;
  }

  /// `pending` is a group treated as already committed.
  bool admissible(const Candidate& c, const Candidate* pending = nullptr) const {
    const auto role_of = [&](VertexId v) {
      if (pending) {
        for (VertexId w : pending->corners) {
          if (w == v) return Role::Even;
        }
        for (const auto& s : pending->splits) {
          if (s.odd == v) return Role::Odd;
        }
      }
      return role_[v];
    };
    const auto pending_split = [&](VertexId m) -> const SplitEdge* {
      if (pending) {
        for (const auto& s : pending->splits) {
          if (s.odd == m) return &s;
        }
      }
      return nullptr;
    };
    const auto faces_with = [&](const Candidate& g, VertexId m) {
      std::size_t n = 0;
      for (FaceId f : g.faces) {
        const auto& t = mesh_.face(f);
        n += t[0] == m || t[1] == m || t[2] == m;
      }
      return n;
    };
    for (FaceId f : c.faces) {
      if (f == kInvalidIndex || group_of_[f] != kInvalidIndex) return false;
    }
    for (std::size_t i = 0; i < c.faces.size(); ++i) {
      for (std::size_t j = i + 1; j < c.faces.size(); ++j) {
        if (c.faces[i] == c.faces[j]) return false;
      }
    }
    std::array<VertexId, 6> all{};
    std::size_t n = 0;
    for (VertexId v : c.corners) all[n++] = v;
    for (const auto& s : c.splits) all[n++] = s.odd;
    for (std::size_t i = 0; i < n; ++i) {
      if (all[i] == kInvalidIndex) return false;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (all[i] == all[j]) return false;
      }
    }
    for (VertexId v : c.corners) {
      if (role_of(v) == Role::Odd) return false;
    }
    for (const auto& s : c.splits) {
      const VertexId m = s.odd;
      const Role role = role_of(m);
      if (role == Role::Even || forbidden_[m]) return false;
      if (const auto* p = pending_split(m)) {
        if (!same_pair({p->a, p->b}, s.a, s.b)) return false;
      } else if (role == Role::Odd && !same_pair(parent_[m], s.a, s.b)) {
        return false;
      }
      // Parents already joined by an edge would duplicate that edge.
      if (edges_.count(edge_key(s.a, s.b))) return false;

      const std::size_t side = faces_with(c, m);
      const std::size_t star = mesh_.star(m).size();
      if (boundary_[m]) {
        if (side != star) return false;
      } else if (role == Role::Odd) {
        const std::size_t covered = cover_[m] + (pending_split(m) ? faces_with(*pending, m) : 0);
        if (covered + side != star) return false;
      } else {
        const std::size_t other = star - side;
        if (other < 2 || other > 3) return false;
      }
      if (wgc_.enabled) {
        const Vec3& pa = mesh_.vertex(s.a);
        const Vec3& pb = mesh_.vertex(s.b);
        const Vec3 detail = mesh_.vertex(m) - 0.5 * (pa + pb);
        if (detail.norm() > wgc_.gamma * (pa - pb).norm()) return false;
      }
    }
    return true;
  }

  /// Builds the record, or returns nullopt and fills `conflicts` with odd
  /// vertices to forbid when the coarse mesh is not manifold.
  std::optional<LevelRecord> assemble(std::vector<VertexId>& conflicts) {
    const auto n = mesh_.vertex_count();
    LevelRecord rec;
    rec.fine_vertex_count = n;
    rec.fine_face_count = mesh_.face_count();
    rec.parents.assign(n, {kInvalidIndex, kInvalidIndex});
    std::vector<VertexId> to_coarse(n, kInvalidIndex);
    std::vector<Vec3> coarse_positions;
    for (VertexId v = 0; v < n; ++v) {
      if (role_[v] == Role::Odd) {
        rec.odd_vertices.push_back(v);
        rec.parents[v] = parent_[v];
      } else {
        to_coarse[v] = static_cast<VertexId>(rec.even_vertices.size());
        rec.even_vertices.push_back(v);
        coarse_positions.push_back(mesh_.vertex(v));
      }
    }
    std::vector<Face> coarse_faces;
    coarse_faces.reserve(groups_.size());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& c = groups_[g];
      coarse_faces.push_back({to_coarse[c.corners[0]], to_coarse[c.corners[1]], to_coarse[c.corners[2]]});
      FaceGroup group;
      group.coarse_face = static_cast<FaceId>(g);
      group.pattern = c.pattern;
      group.fine_faces = c.faces;
      for (FaceId f : c.faces) group.fine_triangles.push_back(mesh_.face(f));
      group.split_edges = c.splits;
      rec.face_groups.push_back(std::move(group));
    }

    TriMesh coarse(std::move(coarse_positions), std::move(coarse_faces));
    const auto report = validate_manifold(coarse);
    if (!report.ok()) {
      for (const auto& violation : report.violations) {
        const VertexId a = violation.a == kInvalidIndex ? kInvalidIndex : rec.even_vertices[violation.a];
        const VertexId b = violation.b == kInvalidIndex ? kInvalidIndex : rec.even_vertices[violation.b];
        bool found = false;
        if (b != kInvalidIndex) {
          for (VertexId m : rec.odd_vertices) {
            if (same_pair(rec.parents[m], a, b)) {
              conflicts.push_back(m);
              found = true;
            }
          }
        }
        if (!found) {
          for (VertexId m : rec.odd_vertices) {
            const auto& p = rec.parents[m];
            if (p[0] == a || p[1] == a || (b != kInvalidIndex && (p[0] == b || p[1] == b))) {
              conflicts.push_back(m);
            }
          }
        }
      }
      return std::nullopt;
    }
    rec.coarse = std::move(coarse);
    return rec;
  }

  const TriMesh& mesh_;
  WgcConfig wgc_;
  std::unordered_set<std::uint64_t> edges_;
  std::vector<bool> boundary_;
  std::vector<bool> forbidden_;

  std::vector<Role> role_;
  std::vector<std::array<VertexId, 2>> parent_;
  std::vector<std::size_t> cover_;
  std::vector<std::uint32_t> corner_refs_;
  std::vector<VertexId> open_;
  std::vector<std::uint32_t> group_of_;
  std::vector<Candidate> groups_;
  std::size_t odd_count_ = 0;
};

}  // namespace

std::optional<LevelRecord> simplify_once(const TriMesh& mesh, const WgcConfig& wgc) {
  if (wgc.enabled && !(wgc.gamma > 0.0)) throw MeshError("WGC gamma must be positive");
  require_manifold(mesh);
  Simplifier simplifier(mesh, wgc);
  return simplifier.run();
}

std::vector<LevelRecord> build_hierarchy(const TriMesh& mesh, const WgcConfig& wgc, int max_levels) {
  std::vector<LevelRecord> records;
  const TriMesh* current = &mesh;
  while (static_cast<int>(records.size()) < max_levels) {
    auto rec = simplify_once(*current, wgc);
    if (!rec) break;
    records.push_back(std::move(*rec));
    current = &records.back().coarse;
  }
  const int count = static_cast<int>(records.size());
  for (int i = 0; i < count; ++i) records[i].level = count - i;
  return records;
}

Subdivision subdivide(std::span<const Face> coarse_faces, std::size_t coarse_vertex_count,
                      std::span<const FacePattern> patterns) {
  if (patterns.size() != coarse_faces.size()) {
    throw MeshError("subdivide: " + std::to_string(patterns.size()) + " patterns for " +
                    std::to_string(coarse_faces.size()) + " faces");
  }
  Subdivision out;
  out.coarse_vertex_count = coarse_vertex_count;
  std::unordered_map<std::uint64_t, VertexId> edge_vertex;
  edge_vertex.reserve(coarse_faces.size() * 2);
  std::vector<std::array<VertexId, 3>> mids(coarse_faces.size());
  for (std::size_t f = 0; f < coarse_faces.size(); ++f) {
    const auto& t = coarse_faces[f];
    for (int k = 0; k < 3; ++k) {
      const bool split = patterns[f].splits(k);
      const VertexId a = t[k], b = t[(k + 1) % 3];
      const VertexId next = static_cast<VertexId>(coarse_vertex_count + out.parents.size());
      auto [it, inserted] = edge_vertex.try_emplace(edge_key(a, b), split ? next : kInvalidIndex);
      if (inserted) {
        if (split) out.parents.push_back({a, b});
      } else if ((it->second != kInvalidIndex) != split) {
        throw MeshError("subdivide: faces disagree on splitting edge (" + std::to_string(a) + ", " +
                        std::to_string(b) + ")");
      }
      mids[f][k] = it->second;
    }
  }
  out.child_offsets.reserve(coarse_faces.size() + 1);
  out.child_offsets.push_back(0);
  for (std::size_t f = 0; f < coarse_faces.size(); ++f) {
    emit_children(coarse_faces[f], patterns[f], mids[f], out.faces);
    out.child_offsets.push_back(static_cast<std::uint32_t>(out.faces.size()));
  }
  return out;
}

Resubdivision resubdivide(const LevelRecord& record) {
  const auto& coarse = record.coarse;
  if (record.face_groups.size() != coarse.face_count()) {
    throw MeshError("resubdivide: face group count does not match the coarse mesh");
  }
  std::vector<FacePattern> patterns;
  patterns.reserve(record.face_groups.size());
  for (const auto& g : record.face_groups) patterns.push_back(g.pattern);
  const auto sub = subdivide(coarse.faces(), coarse.vertex_count(), patterns);

  std::unordered_map<std::uint64_t, VertexId> odd_by_parents;
  for (VertexId v : record.odd_vertices) {
    odd_by_parents.emplace(edge_key(record.parents[v][0], record.parents[v][1]), v);
  }

  Resubdivision out;
  out.to_fine.reserve(sub.fine_vertex_count());
  std::vector<Vec3> positions(coarse.vertices().begin(), coarse.vertices().end());
  for (VertexId i = 0; i < coarse.vertex_count(); ++i) out.to_fine.push_back(record.even_vertices[i]);
  for (const auto& [a, b] : sub.parents) {
    auto it = odd_by_parents.find(edge_key(record.even_vertices[a], record.even_vertices[b]));
    if (it == odd_by_parents.end()) {
      throw MeshError("resubdivide: no odd vertex recorded on coarse edge (" + std::to_string(a) + ", " +
                      std::to_string(b) + ")");
    }
    out.to_fine.push_back(it->second);
    positions.push_back(0.5 * (positions[a] + positions[b]));
  }
  if (out.to_fine.size() != record.fine_vertex_count) {
    throw MeshError("resubdivide: vertex count mismatch");
  }

  for (std::size_t c = 0; c < record.face_groups.size(); ++c) {
    const auto& group = record.face_groups[c];
    const auto begin = sub.child_offsets[c], end = sub.child_offsets[c + 1];
    if (end - begin != group.fine_triangles.size()) {
      throw MeshError("resubdivide: pattern of coarse face " + std::to_string(c) +
                      " does not match its fine faces");
    }
    for (auto i = begin; i < end; ++i) {
      const auto& child = sub.faces[i];
      const Face mapped{out.to_fine[child[0]], out.to_fine[child[1]], out.to_fine[child[2]]};
      if (rotate_min_first(mapped) != rotate_min_first(group.fine_triangles[i - begin])) {
        throw MeshError("resubdivide: child " + std::to_string(i - begin) + " of coarse face " +
                        std::to_string(c) + " does not match the recorded fine face");
      }
    }
  }
  out.mesh = TriMesh(std::move(positions), sub.faces);
  return out;
}

bool same_connectivity(std::span<const Face> a, std::span<const Face> b) {
  if (a.size() != b.size()) return false;
  std::vector<Face> x, y;
  x.reserve(a.size());
  y.reserve(b.size());
  for (const auto& f : a) x.push_back(rotate_min_first(f));
  for (const auto& f : b) y.push_back(rotate_min_first(f));
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

}  // namespace meshpress

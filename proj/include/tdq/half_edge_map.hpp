#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "tdq/error.hpp"

namespace tdq {

// One half-edge of a rotation system: its twin, the counter-clockwise
// successor around its origin vertex, and the origin vertex.
struct HalfEdgeRecord {
  std::int32_t twin = -1;
  std::int32_t next_at_vertex = -1;
  std::int32_t origin = -1;
};

// Rooted planar map encoded as a rotation system. Immutable after build;
// safe to share read-only across threads.
//
// A map with zero half-edges and vertex_count 1 represents the single-vertex
// map (it occurs as a radius-0 ball); its root is -1.
class HalfEdgeMap {
 public:
  HalfEdgeMap() = default;
  HalfEdgeMap(std::vector<std::int32_t> twin, std::vector<std::int32_t> next,
              std::vector<std::int32_t> origin, std::int32_t root, std::int32_t vertex_count)
      : twin_(std::move(twin)),
        next_(std::move(next)),
        origin_(std::move(origin)),
        root_(root),
        vertex_count_(vertex_count) {
    build_vertex_index();
  }

  std::int32_t twin(std::int32_t e) const { return twin_[e]; }
  std::int32_t next_at_vertex(std::int32_t e) const { return next_[e]; }
  std::int32_t origin(std::int32_t e) const { return origin_[e]; }
  std::int32_t target(std::int32_t e) const { return origin_[twin_[e]]; }
  std::int32_t root() const { return root_; }
  std::int32_t root_vertex() const { return root_ < 0 ? 0 : origin_[root_]; }
  std::int32_t vertex_count() const { return vertex_count_; }
  std::int32_t half_edge_count() const { return static_cast<std::int32_t>(twin_.size()); }
  std::int32_t edge_count() const { return half_edge_count() / 2; }

  // Successor convention for face cycles: the half-edge following e in the
  // face to the left of e is next_at_vertex(twin(e)).
  std::int32_t face_next(std::int32_t e) const { return next_[twin_[e]]; }

  // A representative half-edge with origin v, or -1 for isolated vertices.
  std::int32_t some_half_edge(std::int32_t v) const { return vertex_half_edge_[v]; }

  // Degree of v (with multiplicity for loops and multi-edges).
  std::int32_t degree(std::int32_t v) const {
    std::int32_t d = 0;
    std::int32_t e0 = vertex_half_edge_[v];
    if (e0 < 0) return 0;
    std::int32_t e = e0;
    do {
      ++d;
      e = next_[e];
    } while (e != e0);
    return d;
  }

  template <typename Fn>
  void for_half_edges_at(std::int32_t v, Fn&& fn) const {
    std::int32_t e0 = vertex_half_edge_[v];
    if (e0 < 0) return;
    std::int32_t e = e0;
    do {
      fn(e);
      e = next_[e];
    } while (e != e0);
  }

  bool operator==(const HalfEdgeMap& o) const {
    return twin_ == o.twin_ && next_ == o.next_ && origin_ == o.origin_ && root_ == o.root_ &&
           vertex_count_ == o.vertex_count_;
  }

 private:
  void build_vertex_index() {
    vertex_half_edge_.assign(vertex_count_, -1);
    for (std::int32_t e = half_edge_count() - 1; e >= 0; --e) vertex_half_edge_[origin_[e]] = e;
  }

  std::vector<std::int32_t> twin_;
  std::vector<std::int32_t> next_;
  std::vector<std::int32_t> origin_;
  std::int32_t root_ = -1;
  std::int32_t vertex_count_ = 0;
  std::vector<std::int32_t> vertex_half_edge_;
};

struct FaceDecomposition {
  std::vector<std::vector<std::int32_t>> faces;  // half-edge cycles under face_next
  std::vector<std::int32_t> face_of;             // half-edge id -> face index
  std::vector<std::int32_t> degrees;
  std::int32_t root_face = -1;  // face left of the root edge: the cycle through twin(root)
};

inline FaceDecomposition faces(const HalfEdgeMap& m) {
  FaceDecomposition fd;
  const std::int32_t n = m.half_edge_count();
  fd.face_of.assign(n, -1);
  for (std::int32_t e0 = 0; e0 < n; ++e0) {
    if (fd.face_of[e0] >= 0) continue;
    std::vector<std::int32_t> cycle;
    std::int32_t e = e0;
    do {
      fd.face_of[e] = static_cast<std::int32_t>(fd.faces.size());
      cycle.push_back(e);
      e = m.face_next(e);
    } while (e != e0);
    fd.degrees.push_back(static_cast<std::int32_t>(cycle.size()));
    fd.faces.push_back(std::move(cycle));
  }
  if (m.root() >= 0) fd.root_face = fd.face_of[m.twin(m.root())];
  return fd;
}

namespace detail {

inline void validate_rotation_system(const std::vector<std::int32_t>& twin,
                                     const std::vector<std::int32_t>& next,
                                     const std::vector<std::int32_t>& origin, std::int32_t root,
                                     std::int32_t vertex_count) {
  const std::int32_t n = static_cast<std::int32_t>(twin.size());
  if (n == 0 || n % 2 != 0) throw BrokenInvolution("half-edge table must be nonempty and even");
  if (root < 0 || root >= n) throw Error("root half-edge out of range");
  for (std::int32_t e = 0; e < n; ++e) {
    if (twin[e] < 0 || twin[e] >= n || twin[e] == e || twin[twin[e]] != e)
      throw BrokenInvolution("twin is not a fixed-point-free involution at half-edge " +
                             std::to_string(e));
    if (origin[e] < 0 || origin[e] >= vertex_count)
      throw BrokenRotation("origin out of range at half-edge " + std::to_string(e));
    if (next[e] < 0 || next[e] >= n || origin[next[e]] != origin[e])
      throw BrokenRotation("next_at_vertex must stay at the origin vertex, half-edge " +
                           std::to_string(e));
  }
  // next restricted to each vertex must be a single cycle covering its half-edges.
  std::vector<std::int32_t> indegree(n, 0);
  for (std::int32_t e = 0; e < n; ++e) indegree[next[e]]++;
  for (std::int32_t e = 0; e < n; ++e)
    if (indegree[e] != 1) throw BrokenRotation("next_at_vertex is not a permutation");
  std::vector<char> seen(n, 0);
  std::vector<char> vertex_done(vertex_count, 0);
  for (std::int32_t e0 = 0; e0 < n; ++e0) {
    if (seen[e0]) continue;
    if (vertex_done[origin[e0]])
      throw BrokenRotation("multiple rotation cycles at vertex " + std::to_string(origin[e0]));
    vertex_done[origin[e0]] = 1;
    std::int32_t e = e0;
    do {
      seen[e] = 1;
      e = next[e];
    } while (e != e0);
  }
  // Connectivity over twin/next from the root.
  std::vector<char> reach(n, 0);
  std::vector<std::int32_t> stack{root};
  reach[root] = 1;
  while (!stack.empty()) {
    std::int32_t e = stack.back();
    stack.pop_back();
    for (std::int32_t f : {twin[e], next[e]}) {
      if (!reach[f]) {
        reach[f] = 1;
        stack.push_back(f);
      }
    }
  }
  std::vector<char> vertex_reached(vertex_count, 0);
  for (std::int32_t e = 0; e < n; ++e) {
    if (!reach[e]) throw Disconnected("half-edge " + std::to_string(e) + " unreachable from root");
    vertex_reached[origin[e]] = 1;
  }
  for (std::int32_t v = 0; v < vertex_count; ++v)
    if (!vertex_reached[v]) throw Disconnected("isolated vertex " + std::to_string(v));
}

}  // namespace detail

// Canonical relabeling of a validated rotation system: half-edges renumbered
// in discovery order of the traversal (root first, exploring next before
// twin), vertices in first-appearance order. Two rooted maps are isomorphic
// iff their canonical tables coincide. `he_perm`/`vx_perm` map old -> new ids.
struct CanonicalTables {
  std::vector<std::int32_t> twin, next, origin;
  std::vector<std::int32_t> he_perm, vx_perm;
  std::int32_t root = 0;
  std::int32_t vertex_count = 0;
};

inline CanonicalTables canonical_tables(const std::vector<std::int32_t>& twin,
                                        const std::vector<std::int32_t>& next,
                                        const std::vector<std::int32_t>& origin, std::int32_t root,
                                        std::int32_t vertex_count) {
  const std::int32_t n = static_cast<std::int32_t>(twin.size());
  CanonicalTables ct;
  ct.he_perm.assign(n, -1);
  ct.vx_perm.assign(vertex_count, -1);
  std::vector<std::int32_t> order;
  order.reserve(n);
  std::vector<std::int32_t> stack{root};
  ct.he_perm[root] = 0;
  order.push_back(root);
  // Deterministic DFS: from each discovered half-edge, walk the whole
  // rotation cycle, then follow twins.
  std::size_t head = 0;
  while (head < order.size()) {
    std::int32_t e = order[head++];
    for (std::int32_t f : {next[e], twin[e]}) {
      if (ct.he_perm[f] < 0) {
        ct.he_perm[f] = static_cast<std::int32_t>(order.size());
        order.push_back(f);
      }
    }
  }
  std::int32_t next_vx = 0;
  for (std::int32_t e : order) {
    if (ct.vx_perm[origin[e]] < 0) ct.vx_perm[origin[e]] = next_vx++;
  }
  ct.vertex_count = vertex_count;
  ct.twin.resize(n);
  ct.next.resize(n);
  ct.origin.resize(n);
  for (std::int32_t e = 0; e < n; ++e) {
    ct.twin[ct.he_perm[e]] = ct.he_perm[twin[e]];
    ct.next[ct.he_perm[e]] = ct.he_perm[next[e]];
    ct.origin[ct.he_perm[e]] = ct.vx_perm[origin[e]];
  }
  ct.root = 0;
  return ct;
}

struct BuildResult {
  HalfEdgeMap map;
  // Old id -> id in the built (canonically relabeled) map, for callers that
  // track decorations through the build.
  std::vector<std::int32_t> he_perm;
  std::vector<std::int32_t> vx_perm;
};

// Validates the raw table and returns the canonically relabeled map.
// Throws BrokenInvolution, BrokenRotation, Disconnected or NonPlanar.
inline BuildResult build_map(const std::vector<HalfEdgeRecord>& table, std::int32_t root,
                             std::int32_t vertex_count) {
  const std::int32_t n = static_cast<std::int32_t>(table.size());
  std::vector<std::int32_t> twin(n), next(n), origin(n);
  for (std::int32_t e = 0; e < n; ++e) {
    twin[e] = table[e].twin;
    next[e] = table[e].next_at_vertex;
    origin[e] = table[e].origin;
  }
  detail::validate_rotation_system(twin, next, origin, root, vertex_count);
  CanonicalTables ct = canonical_tables(twin, next, origin, root, vertex_count);
  HalfEdgeMap m(std::move(ct.twin), std::move(ct.next), std::move(ct.origin), ct.root,
                ct.vertex_count);
  FaceDecomposition fd = faces(m);
  const std::int32_t euler =
      m.vertex_count() - m.edge_count() + static_cast<std::int32_t>(fd.faces.size());
  if (euler != 2)
    throw NonPlanar("Euler characteristic " + std::to_string(euler) + ", expected 2");
  return BuildResult{std::move(m), std::move(ct.he_perm), std::move(ct.vx_perm)};
}

inline BuildResult build_map(std::vector<std::int32_t> twin, std::vector<std::int32_t> next,
                             std::vector<std::int32_t> origin, std::int32_t root,
                             std::int32_t vertex_count) {
  std::vector<HalfEdgeRecord> table(twin.size());
  for (std::size_t e = 0; e < twin.size(); ++e)
    table[e] = HalfEdgeRecord{twin[e], next[e], origin[e]};
  return build_map(table, root, vertex_count);
}

// Exact hop distances to the nearest source. Throws EmptySourceSet.
inline std::vector<std::int32_t> bfs_distances(const HalfEdgeMap& m,
                                               const std::vector<std::int32_t>& sources) {
  if (sources.empty()) throw EmptySourceSet("bfs_distances needs at least one source");
  std::vector<std::int32_t> dist(m.vertex_count(), -1);
  std::vector<std::int32_t> frontier, next_frontier;
  for (std::int32_t s : sources) {
    if (s < 0 || s >= m.vertex_count()) throw IndexOutOfRange("bfs source out of range");
    if (dist[s] < 0) {
      dist[s] = 0;
      frontier.push_back(s);
    }
  }
  std::int32_t d = 0;
  while (!frontier.empty()) {
    ++d;
    next_frontier.clear();
    for (std::int32_t v : frontier) {
      m.for_half_edges_at(v, [&](std::int32_t e) {
        std::int32_t u = m.target(e);
        if (dist[u] < 0) {
          dist[u] = d;
          next_frontier.push_back(u);
        }
      });
    }
    frontier.swap(next_frontier);
  }
  return dist;
}

// Ball of radius r around the root together with a curve clipped at its
// first exit from the ball.
struct DecoratedBall {
  HalfEdgeMap submap;
  std::int32_t radius = 0;
  std::vector<std::int32_t> truncated_curve;   // parent-map vertex ids
  std::vector<std::int32_t> vertex_to_parent;  // submap vertex -> parent vertex
};

inline DecoratedBall truncated_ball(const HalfEdgeMap& m, const std::vector<std::int32_t>& curve,
                                    std::int32_t r) {
  std::vector<std::int32_t> dist = bfs_distances(m, {m.root_vertex()});
  DecoratedBall ball;
  ball.radius = r;
  // Clip the curve at the first time it reaches distance r from curve(0).
  // Beyond that time it is frozen at the exit value.
  ball.truncated_curve = curve;
  if (!curve.empty()) {
    std::vector<std::int32_t> from_start = bfs_distances(m, {curve[0]});
    std::size_t exit = curve.size();
    for (std::size_t t = 0; t < curve.size(); ++t) {
      if (from_start[curve[t]] >= r) {
        exit = t;
        break;
      }
    }
    for (std::size_t t = exit + 1; t < curve.size(); ++t)
      ball.truncated_curve[t] = curve[exit];
  }
  // Induced submap on vertices at distance <= r.
  std::vector<std::int32_t> new_vx(m.vertex_count(), -1);
  std::int32_t vxn = 0;
  for (std::int32_t v = 0; v < m.vertex_count(); ++v)
    if (dist[v] <= r) new_vx[v] = vxn++;
  std::vector<std::int32_t> new_he(m.half_edge_count(), -1);
  std::int32_t hen = 0;
  for (std::int32_t e = 0; e < m.half_edge_count(); ++e)
    if (new_vx[m.origin(e)] >= 0 && new_vx[m.target(e)] >= 0) new_he[e] = hen++;
  if (hen == 0) {
    ball.submap = HalfEdgeMap({}, {}, {}, -1, 1);
    ball.vertex_to_parent = {m.root_vertex()};
    return ball;
  }
  std::vector<std::int32_t> twin(hen), next(hen), origin(hen);
  for (std::int32_t e = 0; e < m.half_edge_count(); ++e) {
    if (new_he[e] < 0) continue;
    twin[new_he[e]] = new_he[m.twin(e)];
    origin[new_he[e]] = new_vx[m.origin(e)];
    // Rotation restricted to kept half-edges.
    std::int32_t f = m.next_at_vertex(e);
    while (new_he[f] < 0) f = m.next_at_vertex(f);
    next[new_he[e]] = new_he[f];
  }
  std::int32_t root = (m.root() >= 0 && new_he[m.root()] >= 0) ? new_he[m.root()] : 0;
  BuildResult br = build_map(std::move(twin), std::move(next), std::move(origin), root, vxn);
  ball.vertex_to_parent.assign(vxn, -1);
  for (std::int32_t v = 0; v < m.vertex_count(); ++v)
    if (new_vx[v] >= 0) ball.vertex_to_parent[br.vx_perm[new_vx[v]]] = v;
  ball.submap = std::move(br.map);
  return ball;
}

// ---- HEMAP text format v1 ----
//
//   HEMAP 1
//   <id> <twin> <next_at_vertex> <origin>     (one line per half-edge)
//   root <id>
//   marked <id> <id> ...                      (optional decoration line)

inline void write_hemap(std::ostream& os, const HalfEdgeMap& m,
                        const std::vector<std::int32_t>& marked = {},
                        const std::vector<std::int32_t>& boundary = {}) {
  os << "HEMAP 1\n";
  for (std::int32_t e = 0; e < m.half_edge_count(); ++e)
    os << e << ' ' << m.twin(e) << ' ' << m.next_at_vertex(e) << ' ' << m.origin(e) << '\n';
  os << "root " << m.root() << '\n';
  for (auto [name, ids] : {std::pair{"marked", &marked}, {"boundary", &boundary}}) {
    if (ids->empty()) continue;
    os << name;
    for (std::int32_t e : *ids) os << ' ' << e;
    os << '\n';
  }
}

struct HemapFile {
  HalfEdgeMap map;
  std::vector<std::int32_t> marked;
  std::vector<std::int32_t> boundary;  // used by boundary-quad serialization
};

inline HemapFile read_hemap(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "HEMAP 1") throw ParseError("expected 'HEMAP 1' header");
  std::vector<HalfEdgeRecord> table;
  std::int32_t root = -1;
  bool have_root = false;
  HemapFile out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "root") {
      if (!(ls >> root)) throw ParseError("bad root line");
      have_root = true;
    } else if (first == "marked" || first == "boundary") {
      std::vector<std::int32_t>& dst = (first == "marked") ? out.marked : out.boundary;
      std::int32_t id;
      while (ls >> id) dst.push_back(id);
    } else {
      std::int32_t id = std::stoi(first);
      HalfEdgeRecord rec;
      if (!(ls >> rec.twin >> rec.next_at_vertex >> rec.origin))
        throw ParseError("bad half-edge line: " + line);
      if (id != static_cast<std::int32_t>(table.size()))
        throw ParseError("half-edge ids must be consecutive from 0");
      table.push_back(rec);
    }
  }
  if (!have_root) throw ParseError("missing root line");
  std::int32_t vertex_count = 0;
  for (const auto& rec : table) vertex_count = std::max(vertex_count, rec.origin + 1);
  BuildResult br = build_map(table, root, vertex_count);
  for (std::int32_t& e : out.marked) e = br.he_perm[e];
  for (std::int32_t& e : out.boundary) e = br.he_perm[e];
  out.map = std::move(br.map);
  return out;
}

}  // namespace tdq

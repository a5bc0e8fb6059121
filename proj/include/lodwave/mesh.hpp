#pragma once

// Conforming 2D triangulations: construction, longest-edge bisection with
// conforming closure, corner grading, patch queries, and coarse/fine
// hierarchies with barycentric transfer data.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lodwave {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

struct Triangulation {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // vertex indices, counter-clockwise
  std::vector<std::uint8_t> boundary_vertex;  // 1 iff the vertex lies on the domain boundary
  std::vector<int> refinement_edge;           // local index of the edge the next bisection splits

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
};

// Local edge k of a triangle connects vertices (k+1)%3 and (k+2)%3 (opposite vertex k).
inline std::pair<int, int> triangle_edge(const std::array<int, 3>& tri, int k) {
  return {tri[(k + 1) % 3], tri[(k + 2) % 3]};
}

inline double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

inline double triangle_area(const Triangulation& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  return signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
}

inline Vec2 barycenter(const Triangulation& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  return (1.0 / 3.0) * (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]);
}

namespace detail {

inline double edge_sq_length(const Triangulation& mesh, const std::array<int, 3>& tri, int k) {
  auto [i, j] = triangle_edge(tri, k);
  Vec2 d = mesh.vertices[i] - mesh.vertices[j];
  return dot(d, d);
}

// Longest edge, ties broken by the smallest global index of the opposite vertex.
inline int longest_edge_local(const std::vector<Vec2>& verts, const std::array<int, 3>& tri) {
  int best = 0;
  double best_len = -1.0;
  for (int k = 0; k < 3; ++k) {
    int i = tri[(k + 1) % 3], j = tri[(k + 2) % 3];
    Vec2 d = verts[i] - verts[j];
    double len = dot(d, d);
    if (len > best_len || (len == best_len && tri[k] < tri[best])) {
      best = k;
      best_len = len;
    }
  }
  return best;
}

}  // namespace detail

inline double triangle_diameter(const Triangulation& mesh, int t) {
  double h2 = 0.0;
  for (int k = 0; k < 3; ++k) h2 = std::max(h2, detail::edge_sq_length(mesh, mesh.triangles[t], k));
  return std::sqrt(h2);
}

struct MeshStats {
  double h_max = 0.0;
  double h_min = 0.0;
  double min_angle = 0.0;  // radians
  int n_vertices = 0;
  int n_interior_vertices = 0;
  int n_triangles = 0;
};

inline MeshStats mesh_stats(const Triangulation& mesh) {
  MeshStats s;
  s.n_vertices = mesh.n_vertices();
  s.n_triangles = mesh.n_triangles();
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (!mesh.boundary_vertex[v]) ++s.n_interior_vertices;
  s.h_min = std::numeric_limits<double>::infinity();
  s.min_angle = std::numeric_limits<double>::infinity();
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double h = triangle_diameter(mesh, t);
    s.h_max = std::max(s.h_max, h);
    s.h_min = std::min(s.h_min, h);
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      Vec2 a = mesh.vertices[tri[k]];
      Vec2 u = mesh.vertices[tri[(k + 1) % 3]] - a;
      Vec2 v = mesh.vertices[tri[(k + 2) % 3]] - a;
      double ang = std::atan2(std::abs(cross(u, v)), dot(u, v));
      s.min_angle = std::min(s.min_angle, ang);
    }
  }
  return s;
}

// Conformity audit: every edge is shared by exactly one (boundary) or two
// (interior) triangles, all areas positive, boundary flags consistent.
inline bool is_conforming(const Triangulation& mesh, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::unordered_map<std::uint64_t, int> edge_count;
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  };
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (triangle_area(mesh, t) <= 0.0) return fail("non-positive area in triangle " + std::to_string(t));
    for (int k = 0; k < 3; ++k) {
      auto [i, j] = triangle_edge(mesh.triangles[t], k);
      ++edge_count[key(i, j)];
    }
  }
  std::vector<std::uint8_t> on_boundary(mesh.n_vertices(), 0);
  for (const auto& [k, c] : edge_count) {
    if (c != 1 && c != 2) return fail("edge shared by " + std::to_string(c) + " triangles");
    if (c == 1) {
      on_boundary[static_cast<int>(k >> 32)] = 1;
      on_boundary[static_cast<int>(k & 0xffffffffu)] = 1;
    }
  }
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (on_boundary[v] != mesh.boundary_vertex[v])
      return fail("boundary flag mismatch at vertex " + std::to_string(v));
  return true;
}

inline void require_conforming(const Triangulation& mesh) {
  std::string why;
  if (!is_conforming(mesh, &why)) throw std::runtime_error("mesh not conforming: " + why);
}

inline double total_area(const Triangulation& mesh) {
  double a = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) a += triangle_area(mesh, t);
  return a;
}

namespace detail {

// Mesh surgery state for longest-edge bisection with conforming closure.
// Midpoints are keyed by vertex-index pairs, so both triangles sharing an
// edge always see the identical new vertex.
class Refiner {
 public:
  explicit Refiner(const Triangulation& mesh)
      : verts_(mesh.vertices), vbnd_(mesh.boundary_vertex) {
    tris_.reserve(2 * mesh.triangles.size());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      tris_.push_back(mesh.triangles[t]);
      anc_.push_back(t);
      alive_.push_back(1);
    }
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      for (int k = 0; k < 3; ++k) {
        auto [i, j] = triangle_edge(tris_[t], k);
        edge_attach(i, j, t);
      }
  }

  // Bisect triangle t at its longest edge; propagates through neighbors
  // whose longest edge differs (Rivara longest-edge propagation).
  void bisect(int t) {
    if (!alive_[t]) return;
    std::vector<int> stack{t};
    const std::size_t guard = 32 * tris_.size() + 1024;
    while (!stack.empty()) {
      int s = stack.back();
      if (!alive_[s]) {
        stack.pop_back();
        continue;
      }
      int le = longest_edge_local(verts_, tris_[s]);
      auto [a, b] = triangle_edge(tris_[s], le);
      int n = neighbor_across(a, b, s);
      if (n >= 0 && longest_edge_of(n) != canonical(a, b)) {
        stack.push_back(n);
        if (stack.size() > guard)
          throw std::runtime_error("bisection propagation exceeded guard (non-conforming input?)");
        continue;
      }
      split_pair(s, le, n);
      stack.pop_back();
    }
  }

  std::pair<Triangulation, std::vector<int>> finish() {
    Triangulation out;
    out.vertices = std::move(verts_);
    out.boundary_vertex = std::move(vbnd_);
    std::vector<int> ancestry;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      if (alive_[t]) {
        out.triangles.push_back(tris_[t]);
        ancestry.push_back(anc_[t]);
      }
    out.refinement_edge.resize(out.triangles.size());
    for (int t = 0; t < out.n_triangles(); ++t)
      out.refinement_edge[t] = longest_edge_local(out.vertices, out.triangles[t]);
    return {std::move(out), std::move(ancestry)};
  }

 private:
  static std::uint64_t canonical(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }

  std::uint64_t longest_edge_of(int t) const {
    int le = longest_edge_local(verts_, tris_[t]);
    auto [a, b] = triangle_edge(tris_[t], le);
    return canonical(a, b);
  }

  void edge_attach(int a, int b, int t) {
    auto& slot = edge_tris_[canonical(a, b)];
    if (slot[0] == t || slot[1] == t) return;
    if (slot[0] < 0)
      slot[0] = t;
    else if (slot[1] < 0)
      slot[1] = t;
    else
      throw std::runtime_error("edge adjacent to more than two triangles");
  }

  void edge_detach(int a, int b, int t) {
    auto it = edge_tris_.find(canonical(a, b));
    if (it == edge_tris_.end()) return;
    if (it->second[0] == t) it->second[0] = -1;
    if (it->second[1] == t) it->second[1] = -1;
    if (it->second[0] < 0 && it->second[1] < 0) edge_tris_.erase(it);
  }

  int neighbor_across(int a, int b, int t) const {
    auto it = edge_tris_.find(canonical(a, b));
    if (it == edge_tris_.end()) return -1;
    if (it->second[0] != t && it->second[0] >= 0) return it->second[0];
    if (it->second[1] != t && it->second[1] >= 0) return it->second[1];
    return -1;
  }

  int midpoint(int a, int b, bool boundary_edge) {
    auto key = canonical(a, b);
    auto it = edge_mid_.find(key);
    if (it != edge_mid_.end()) return it->second;
    int m = static_cast<int>(verts_.size());
    verts_.push_back(0.5 * (verts_[std::min(a, b)] + verts_[std::max(a, b)]));
    vbnd_.push_back(boundary_edge ? 1 : 0);
    edge_mid_.emplace(key, m);
    return m;
  }

  // Splits triangle t at local edge le and, when present, the neighbor n
  // across that edge (which by construction has it as its longest edge too).
  void split_pair(int t, int le, int n) {
    auto [a, b] = triangle_edge(tris_[t], le);
    int m = midpoint(a, b, n < 0);
    split_one(t, a, b, m);
    if (n >= 0) split_one(n, b, a, m);
  }

  // Triangle t contains directed edge (p,q) in its CCW cycle; r is the
  // remaining vertex. Children (p,m,r) and (m,q,r) keep the orientation.
  void split_one(int t, int p, int q, int m) {
    const auto tri = tris_[t];
    int r = -1;
    for (int k = 0; k < 3; ++k)
      if (tri[k] != p && tri[k] != q) r = tri[k];
    for (int k = 0; k < 3; ++k) {
      auto [i, j] = triangle_edge(tri, k);
      edge_detach(i, j, t);
    }
    alive_[t] = 0;
    add_triangle({p, m, r}, anc_[t]);
    add_triangle({m, q, r}, anc_[t]);
  }

  void add_triangle(std::array<int, 3> tri, int ancestor) {
    int t = static_cast<int>(tris_.size());
    tris_.push_back(tri);
    anc_.push_back(ancestor);
    alive_.push_back(1);
    for (int k = 0; k < 3; ++k) {
      auto [i, j] = triangle_edge(tri, k);
      edge_attach(i, j, t);
    }
  }

  std::vector<Vec2> verts_;
  std::vector<std::uint8_t> vbnd_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<int> anc_;
  std::vector<std::uint8_t> alive_;
  std::unordered_map<std::uint64_t, int> edge_mid_;
  struct Pair2 {
    int v[2] = {-1, -1};
    int& operator[](int i) { return v[i]; }
    int operator[](int i) const { return v[i]; }
  };
  std::unordered_map<std::uint64_t, Pair2> edge_tris_;
};

}  // namespace detail

// Coarse triangulation of the L-shaped domain (-1,1)^2 \ [0,1]x[-1,0]:
// each of the three unit squares is split into four triangles about its
// center, 12 triangles and 11 vertices in total.
inline Triangulation make_lshape_mesh() {
  Triangulation mesh;
  mesh.vertices = {{-1, -1}, {0, -1}, {-1, 0}, {0, 0},      {1, 0},    {-1, 1},
                   {0, 1},   {1, 1},  {-0.5, -0.5}, {-0.5, 0.5}, {0.5, 0.5}};
  mesh.boundary_vertex = {1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0};
  auto add_square = [&](int c0, int c1, int c2, int c3, int center) {
    mesh.triangles.push_back({c0, c1, center});
    mesh.triangles.push_back({c1, c2, center});
    mesh.triangles.push_back({c2, c3, center});
    mesh.triangles.push_back({c3, c0, center});
  };
  add_square(0, 1, 3, 2, 8);   // bottom-left square
  add_square(2, 3, 6, 5, 9);   // top-left square
  add_square(3, 4, 7, 6, 10);  // top-right square
  mesh.refinement_edge.resize(mesh.triangles.size());
  for (int t = 0; t < mesh.n_triangles(); ++t)
    mesh.refinement_edge[t] = detail::longest_edge_local(mesh.vertices, mesh.triangles[t]);
  return mesh;
}

// Bisects the longest edge of every triangle, with conforming closure.
// Returns the refined mesh and, per fine triangle, its input-triangle index.
inline std::pair<Triangulation, std::vector<int>> uniform_refine(const Triangulation& mesh) {
  detail::Refiner refiner(mesh);
  for (int t = 0; t < mesh.n_triangles(); ++t) refiner.bisect(t);
  return refiner.finish();
}

// Repeatedly bisects triangles with h_T > H * max(r_T, h_T)^(1-alpha), where
// r_T is the barycenter distance to the corner, until none qualify.
inline std::pair<Triangulation, std::vector<int>> grade_toward_corner_with_ancestry(
    const Triangulation& mesh, Vec2 corner, double H, double alpha, int max_generations = 60) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("grade_toward_corner: alpha must be in (0,1)");
  bool corner_found = false;
  for (const Vec2& v : mesh.vertices)
    if (norm(v - corner) < 1e-12) corner_found = true;
  if (!corner_found) throw std::invalid_argument("grade_toward_corner: corner is not a mesh vertex");

  Triangulation cur = mesh;
  std::vector<int> ancestry(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) ancestry[t] = t;

  for (int gen = 0; gen < max_generations; ++gen) {
    std::vector<int> marked;
    for (int t = 0; t < cur.n_triangles(); ++t) {
      double h = triangle_diameter(cur, t);
      double r = norm(barycenter(cur, t) - corner);
      if (h > H * std::pow(std::max(r, h), 1.0 - alpha)) marked.push_back(t);
    }
    if (marked.empty()) return {std::move(cur), std::move(ancestry)};
    detail::Refiner refiner(cur);
    for (int t : marked) refiner.bisect(t);
    auto [next, step_anc] = refiner.finish();
    std::vector<int> composed(step_anc.size());
    for (std::size_t t = 0; t < step_anc.size(); ++t) composed[t] = ancestry[step_anc[t]];
    cur = std::move(next);
    ancestry = std::move(composed);
  }
  throw std::runtime_error("grade_toward_corner: bisection-generation cap reached");
}

inline Triangulation grade_toward_corner(const Triangulation& mesh, Vec2 corner, double H,
                                         double alpha, int max_generations = 60) {
  return grade_toward_corner_with_ancestry(mesh, corner, H, alpha, max_generations).first;
}

// Bisects, for the given number of rounds, every triangle matched by the
// predicate (re-evaluated per round on the current mesh).
template <typename Pred>
std::pair<Triangulation, std::vector<int>> refine_where(const Triangulation& mesh, Pred marked,
                                                        int rounds) {
  Triangulation cur = mesh;
  std::vector<int> ancestry(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) ancestry[t] = t;
  for (int round = 0; round < rounds; ++round) {
    detail::Refiner refiner(cur);
    for (int t = 0; t < cur.n_triangles(); ++t)
      if (marked(cur, t)) refiner.bisect(t);
    auto [next, step_anc] = refiner.finish();
    std::vector<int> composed(step_anc.size());
    for (std::size_t t = 0; t < step_anc.size(); ++t) composed[t] = ancestry[step_anc[t]];
    cur = std::move(next);
    ancestry = std::move(composed);
  }
  return {std::move(cur), std::move(ancestry)};
}

// Deep local refinement around one point: every triangle whose closure
// contains the vertex is bisected each round.
inline std::pair<Triangulation, std::vector<int>> refine_at_vertex(const Triangulation& mesh,
                                                                   int vertex, int rounds) {
  Vec2 p = mesh.vertices[vertex];
  return refine_where(
      mesh,
      [p](const Triangulation& m, int t) {
        for (int v : m.triangles[t])
          if (norm(m.vertices[v] - p) < 1e-12) return true;
        return false;
      },
      rounds);
}

// Triangles reachable from t by at most m vertex-touching hops.
inline std::vector<int> element_patch(const Triangulation& mesh, int t, int m) {
  if (t < 0 || t >= mesh.n_triangles()) throw std::invalid_argument("element_patch: bad triangle index");
  std::vector<std::vector<int>> vertex_tris(mesh.n_vertices());
  for (int s = 0; s < mesh.n_triangles(); ++s)
    for (int v : mesh.triangles[s]) vertex_tris[v].push_back(s);
  std::vector<std::uint8_t> in_patch(mesh.n_triangles(), 0);
  std::vector<int> frontier{t};
  in_patch[t] = 1;
  for (int hop = 0; hop < m && !frontier.empty(); ++hop) {
    std::vector<int> next;
    for (int s : frontier)
      for (int v : mesh.triangles[s])
        for (int u : vertex_tris[v])
          if (!in_patch[u]) {
            in_patch[u] = 1;
            next.push_back(u);
          }
    frontier = std::move(next);
  }
  std::vector<int> out;
  for (int s = 0; s < mesh.n_triangles(); ++s)
    if (in_patch[s]) out.push_back(s);
  return out;
}

struct MeshHierarchy {
  Triangulation coarse;
  Triangulation fine;
  std::vector<int> fine_tri_ancestor;  // per fine triangle, containing coarse triangle
  struct BaryRef {
    int coarse_tri = -1;
    std::array<double, 3> bary{};
  };
  std::vector<BaryRef> fine_vertex_in_coarse;  // per fine vertex
  std::vector<int> coarse_vertex_in_fine;      // per coarse vertex, its fine index

  int n_fine_vertices() const { return fine.n_vertices(); }
  int n_coarse_vertices() const { return coarse.n_vertices(); }
};

inline std::array<double, 3> barycentric_coords(const Triangulation& mesh, int t, Vec2 p) {
  const auto& tri = mesh.triangles[t];
  Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
  double area = signed_area(a, b, c);
  return {signed_area(p, b, c) / area, signed_area(a, p, c) / area, signed_area(a, b, p) / area};
}

// Assembles the transfer data for a refinement produced by the functions
// above (vertex indices of the coarse mesh are preserved in the fine mesh).
inline MeshHierarchy make_hierarchy(Triangulation coarse, Triangulation fine,
                                    std::vector<int> fine_tri_ancestor) {
  MeshHierarchy h;
  h.coarse = std::move(coarse);
  h.fine = std::move(fine);
  h.fine_tri_ancestor = std::move(fine_tri_ancestor);

  h.coarse_vertex_in_fine.resize(h.coarse.n_vertices());
  for (int v = 0; v < h.coarse.n_vertices(); ++v) {
    if (norm(h.fine.vertices[v] - h.coarse.vertices[v]) > 1e-12)
      throw std::runtime_error("make_hierarchy: coarse vertex not preserved in fine mesh");
    h.coarse_vertex_in_fine[v] = v;
  }

  h.fine_vertex_in_coarse.assign(h.fine.n_vertices(), {});
  for (int t = 0; t < h.fine.n_triangles(); ++t) {
    int anc = h.fine_tri_ancestor[t];
    for (int v : h.fine.triangles[t]) {
      if (h.fine_vertex_in_coarse[v].coarse_tri >= 0) continue;
      auto bary = barycentric_coords(h.coarse, anc, h.fine.vertices[v]);
      for (double& l : bary) l = std::clamp(l, 0.0, 1.0);
      double sum = bary[0] + bary[1] + bary[2];
      for (double& l : bary) l /= sum;
      h.fine_vertex_in_coarse[v] = {anc, bary};
    }
  }
  return h;
}

inline MeshHierarchy identity_hierarchy(const Triangulation& mesh) {
  std::vector<int> anc(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) anc[t] = t;
  return make_hierarchy(mesh, mesh, std::move(anc));
}

// Text format: "nv nt", nv lines "x y b", nt lines "i j k" (0-based).
inline void write_mesh_text(std::ostream& os, const Triangulation& mesh) {
  os << mesh.n_vertices() << ' ' << mesh.n_triangles() << '\n';
  os.precision(17);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    os << mesh.vertices[v].x << ' ' << mesh.vertices[v].y << ' '
       << int(mesh.boundary_vertex[v]) << '\n';
  for (const auto& tri : mesh.triangles) os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
}

inline Triangulation read_mesh_text(std::istream& is) {
  int nv = 0, nt = 0;
  if (!(is >> nv >> nt)) throw std::runtime_error("mesh text: bad header");
  Triangulation mesh;
  mesh.vertices.resize(nv);
  mesh.boundary_vertex.resize(nv);
  for (int v = 0; v < nv; ++v) {
    int b = 0;
    if (!(is >> mesh.vertices[v].x >> mesh.vertices[v].y >> b))
      throw std::runtime_error("mesh text: bad vertex line");
    mesh.boundary_vertex[v] = static_cast<std::uint8_t>(b);
  }
  mesh.triangles.resize(nt);
  for (int t = 0; t < nt; ++t)
    if (!(is >> mesh.triangles[t][0] >> mesh.triangles[t][1] >> mesh.triangles[t][2]))
      throw std::runtime_error("mesh text: bad triangle line");
  mesh.refinement_edge.resize(nt);
  for (int t = 0; t < nt; ++t)
    mesh.refinement_edge[t] = detail::longest_edge_local(mesh.vertices, mesh.triangles[t]);
  return mesh;
}

}  // namespace lodwave

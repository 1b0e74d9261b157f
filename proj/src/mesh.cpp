#include "armesh/mesh.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace armesh {

Bounds bounds_of(const std::vector<Vec3>& points) {
  require(!points.empty(), ErrorCode::validation, "bounds_of: empty point set");
  Bounds b{points[0], points[0]};
  for (const Vec3& p : points) {
    b.lo = min3(b.lo, p);
    b.hi = max3(b.hi, p);
  }
  return b;
}

double surface_area(const TriangleMesh& mesh) {
  double a = 0.0;
  for (const auto& f : mesh.faces) a += face_area(mesh, f);
  return a;
}

TriangleMesh drop_degenerate_faces(const TriangleMesh& mesh) {
  TriangleMesh out;
  out.vertices = mesh.vertices;
  out.faces.reserve(mesh.faces.size());
  int n = static_cast<int>(mesh.vertices.size());
  for (const auto& f : mesh.faces) {
    require(f[0] >= 0 && f[0] < n && f[1] >= 0 && f[1] < n && f[2] >= 0 && f[2] < n,
            ErrorCode::validation, "face index out of range");
    if (f[0] != f[1] && f[1] != f[2] && f[0] != f[2]) out.faces.push_back(f);
  }
  return out;
}

namespace {

inline uint64_t dir_key(int a, int b) {
  return (uint64_t(uint32_t(a)) << 32) | uint32_t(b);
}
inline uint64_t undir_key(int a, int b) {
  return a < b ? dir_key(a, b) : dir_key(b, a);
}

}  // namespace

HalfEdgeMesh build_half_edge(const TriangleMesh& mesh) {
  HalfEdgeMesh he;
  size_t nf = mesh.faces.size();
  he.half_edges.resize(3 * nf);
  he.vertex_half_edge.assign(mesh.vertices.size(), -1);

  std::unordered_map<uint64_t, int> directed;  // directed edge -> half-edge id
  directed.reserve(3 * nf * 2);
  std::unordered_map<uint64_t, int> undirected_count;
  undirected_count.reserve(3 * nf * 2);

  std::vector<uint64_t> duplicated_directed;
  for (size_t f = 0; f < nf; ++f) {
    const auto& face = mesh.faces[f];
    require(face[0] != face[1] && face[1] != face[2] && face[0] != face[2],
            ErrorCode::validation, "build_half_edge: degenerate face " + std::to_string(f));
    for (int k = 0; k < 3; ++k) {
      int id = static_cast<int>(3 * f) + k;
      int a = face[k], b = face[(k + 1) % 3];
      auto& e = he.half_edges[id];
      e.origin = a;
      e.face = static_cast<int>(f);
      e.next = static_cast<int>(3 * f) + (k + 1) % 3;
      if (he.vertex_half_edge[a] < 0) he.vertex_half_edge[a] = id;
      auto [it, fresh] = directed.emplace(dir_key(a, b), id);
      if (!fresh) duplicated_directed.push_back(dir_key(a, b));
      undirected_count[undir_key(a, b)]++;
    }
  }

  // Twin-link only edges with exactly two opposite-oriented half-edges.
  for (auto& [key, count] : undirected_count) {
    int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    if (count > 2) {
      he.non_manifold_edges.push_back({a, b, count});
      continue;
    }
    auto fwd = directed.find(dir_key(a, b));
    auto rev = directed.find(dir_key(b, a));
    if (fwd != directed.end() && rev != directed.end()) {
      he.half_edges[fwd->second].twin = rev->second;
      he.half_edges[rev->second].twin = fwd->second;
    }
  }
  for (uint64_t key : duplicated_directed) {
    int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    int c = undirected_count[undir_key(a, b)];
    if (c <= 2) he.inconsistent_orientations.push_back({a, b, c});
  }
  std::sort(he.non_manifold_edges.begin(), he.non_manifold_edges.end(),
            [](const auto& l, const auto& r) { return std::tie(l.v0, l.v1) < std::tie(r.v0, r.v1); });
  return he;
}

FaceComponents face_components(const TriangleMesh& mesh, const HalfEdgeMesh& he) {
  size_t nf = mesh.faces.size();
  std::vector<int> parent(nf);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> rank(nf, 0);

  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) rank[a]++;
  };

  std::unordered_map<uint64_t, int> first_face;
  first_face.reserve(3 * nf);
  for (size_t f = 0; f < nf; ++f) {
    const auto& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      uint64_t key = undir_key(face[k], face[(k + 1) % 3]);
      auto [it, fresh] = first_face.emplace(key, static_cast<int>(f));
      if (!fresh) unite(it->second, static_cast<int>(f));
    }
  }

  FaceComponents fc;
  fc.face_component.resize(nf);
  std::unordered_map<int, int> remap;
  for (size_t f = 0; f < nf; ++f) {
    int root = find(static_cast<int>(f));
    auto [it, fresh] = remap.emplace(root, fc.count);
    if (fresh) fc.count++;
    fc.face_component[f] = it->second;
  }
  fc.clean.assign(fc.count, true);

  auto mark_edge = [&](int v0, int v1) {
    auto it = first_face.find(undir_key(v0, v1));
    if (it != first_face.end()) fc.clean[fc.face_component[it->second]] = false;
  };
  for (const auto& issue : he.non_manifold_edges) mark_edge(issue.v0, issue.v1);
  for (const auto& issue : he.inconsistent_orientations) mark_edge(issue.v0, issue.v1);
  return fc;
}

}  // namespace armesh

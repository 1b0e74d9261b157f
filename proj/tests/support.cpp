#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace armesh::test {

namespace {

using Face = std::array<int, 3>;

// Weld exactly-coincident vertices (grid seams are generated bit-identically).
TriangleMesh weld(const TriangleMesh& mesh) {
  std::map<std::array<double, 3>, int> seen;
  TriangleMesh out;
  std::vector<int> remap(mesh.vertices.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    auto [it, fresh] = seen.emplace(std::array<double, 3>{v.x, v.y, v.z},
                                    int(out.vertices.size()));
    if (fresh) out.vertices.push_back(v);
    remap[i] = it->second;
  }
  for (const auto& f : mesh.faces) {
    Face g{remap[f[0]], remap[f[1]], remap[f[2]]};
    if (g[0] != g[1] && g[1] != g[2] && g[0] != g[2]) out.faces.push_back(g);
  }
  return out;
}

}  // namespace

TriangleMesh make_triangle() {
  return {{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}};
}

TriangleMesh make_tetrahedron() {
  TriangleMesh m;
  m.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  m.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

TriangleMesh make_cube_quads() { return make_cube_grid(1); }

TriangleMesh make_cube_grid(int d) {
  TriangleMesh m;
  auto add_side = [&](Vec3 origin, Vec3 du, Vec3 dv) {
    int base = int(m.vertices.size());
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j)
        m.vertices.push_back(origin + du * (double(i) / d) + dv * (double(j) / d));
    auto at = [&](int i, int j) { return base + i * (d + 1) + j; };
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        m.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
        m.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
      }
  };
  // Outward-consistent winding on all six sides of [-1,1]^3.
  add_side({-1, -1, -1}, {2, 0, 0}, {0, 2, 0});   // z = -1
  add_side({-1, -1, 1}, {0, 2, 0}, {2, 0, 0});    // z = +1
  add_side({-1, -1, -1}, {0, 0, 2}, {2, 0, 0});   // y = -1
  add_side({-1, 1, -1}, {2, 0, 0}, {0, 0, 2});    // y = +1
  add_side({-1, -1, -1}, {0, 2, 0}, {0, 0, 2});   // x = -1
  add_side({1, -1, -1}, {0, 0, 2}, {0, 2, 0});    // x = +1
  return weld(m);
}

TriangleMesh make_icosphere(int subdivisions) {
  double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : m.vertices) v = normalized(v);
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto [it, fresh] = midpoint.emplace(key, int(m.vertices.size()));
      if (fresh) m.vertices.push_back(normalized((m.vertices[a] + m.vertices[b]) * 0.5));
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  return m;
}

TriangleMesh make_strip(int quads) {
  TriangleMesh m;
  for (int i = 0; i <= quads; ++i) {
    m.vertices.push_back({double(i), 0, 0});
    m.vertices.push_back({double(i), 1, 0.1 * i});
  }
  for (int i = 0; i < quads; ++i) {
    int a = 2 * i;
    m.faces.push_back({a, a + 2, a + 1});
    m.faces.push_back({a + 1, a + 2, a + 3});
  }
  return m;
}

TriangleMesh make_grid_plane(int nx, int nz) {
  TriangleMesh m;
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= nz; ++j) m.vertices.push_back({double(i), 0, double(j)});
  auto at = [&](int i, int j) { return i * (nz + 1) + j; };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nz; ++j) {
      m.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      m.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  return m;
}

TriangleMesh make_heightfield(int nx, int nz, uint64_t seed) {
  TriangleMesh m = make_grid_plane(nx, nz);
  Rng rng(seed);
  for (Vec3& v : m.vertices) v.y = rng.uniform(-0.3, 0.3) + 0.2 * std::sin(v.x + v.z);
  return m;
}

TriangleMesh make_cylinder(int segments, bool capped) {
  TriangleMesh m;
  for (int i = 0; i < segments; ++i) {
    double a = 2.0 * kPi * i / segments;
    m.vertices.push_back({std::cos(a), 0, std::sin(a)});
    m.vertices.push_back({std::cos(a), 1, std::sin(a)});
  }
  for (int i = 0; i < segments; ++i) {
    int a = 2 * i, b = 2 * ((i + 1) % segments);
    m.faces.push_back({a, b, a + 1});
    m.faces.push_back({a + 1, b, b + 1});
  }
  if (capped) {
    int bottom = int(m.vertices.size());
    m.vertices.push_back({0, 0, 0});
    int top = int(m.vertices.size());
    m.vertices.push_back({0, 1, 0});
    for (int i = 0; i < segments; ++i) {
      int a = 2 * i, b = 2 * ((i + 1) % segments);
      m.faces.push_back({bottom, b, a});
      m.faces.push_back({top, a + 1, b + 1});
    }
  }
  return m;
}

TriangleMesh make_cone(int segments) {
  TriangleMesh m;
  m.vertices.push_back({0, 1, 0});
  m.vertices.push_back({0, 0, 0});
  for (int i = 0; i < segments; ++i) {
    double a = 2.0 * kPi * i / segments;
    m.vertices.push_back({std::cos(a), 0, std::sin(a)});
  }
  for (int i = 0; i < segments; ++i) {
    int a = 2 + i, b = 2 + (i + 1) % segments;
    m.faces.push_back({0, b, a});
    m.faces.push_back({1, a, b});
  }
  return m;
}

TriangleMesh make_torus(int major, int minor) {
  TriangleMesh m;
  for (int i = 0; i < major; ++i) {
    double u = 2.0 * kPi * i / major;
    for (int j = 0; j < minor; ++j) {
      double v = 2.0 * kPi * j / minor;
      double r = 1.0 + 0.35 * std::cos(v);
      m.vertices.push_back({r * std::cos(u), 0.35 * std::sin(v), r * std::sin(u)});
    }
  }
  auto at = [&](int i, int j) { return (i % major) * minor + (j % minor); };
  for (int i = 0; i < major; ++i)
    for (int j = 0; j < minor; ++j) {
      m.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      m.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  return m;
}

TriangleMesh make_octahedron() {
  TriangleMesh m;
  m.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
             {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return m;
}

TriangleMesh make_square_pyramid() {
  TriangleMesh m;
  m.vertices = {{-1, 0, -1}, {1, 0, -1}, {1, 0, 1}, {-1, 0, 1}, {0, 1.2, 0}};
  m.faces = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}, {0, 2, 1}, {0, 3, 2}};
  return m;
}

TriangleMesh make_disk_fan(int segments) {
  TriangleMesh m;
  m.vertices.push_back({0, 0, 0});
  for (int i = 0; i < segments; ++i) {
    double a = 2.0 * kPi * i / segments;
    m.vertices.push_back({std::cos(a), 0.05 * std::sin(3 * a), std::sin(a)});
  }
  for (int i = 0; i < segments; ++i)
    m.faces.push_back({0, 1 + i, 1 + (i + 1) % segments});
  return m;
}

TriangleMesh make_lshape() {
  // L-shaped slab: two boxes sharing a wall, welded.
  TriangleMesh m;
  auto add_box = [&](Vec3 lo, Vec3 hi) {
    TriangleMesh box = make_cube_quads();
    for (Vec3& v : box.vertices)
      v = {lo.x + (v.x + 1) * 0.5 * (hi.x - lo.x), lo.y + (v.y + 1) * 0.5 * (hi.y - lo.y),
           lo.z + (v.z + 1) * 0.5 * (hi.z - lo.z)};
    int base = int(m.vertices.size());
    m.vertices.insert(m.vertices.end(), box.vertices.begin(), box.vertices.end());
    for (auto f : box.faces) m.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  };
  add_box({0, 0, 0}, {2, 1, 1});
  add_box({0, 0, 1}, {1, 1, 2});
  return m;
}

TriangleMesh make_two_components() {
  TriangleMesh m = make_tetrahedron();
  TriangleMesh other = make_tetrahedron();
  int base = int(m.vertices.size());
  for (Vec3 v : other.vertices) m.vertices.push_back(v * 0.5 + Vec3{4, 0, 0});
  for (const auto& f : other.faces) m.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  return m;
}

TriangleMesh make_pinch() {
  // Two triangle fans meeting at a single shared apex: edge-disjoint
  // components that share one vertex.
  TriangleMesh m;
  m.vertices.push_back({0, 0, 0});  // shared apex
  for (int side = 0; side < 2; ++side) {
    double sign = side == 0 ? 1.0 : -1.0;
    int ring0 = int(m.vertices.size());
    for (int i = 0; i < 5; ++i) {
      double a = 2.0 * kPi * i / 5;
      m.vertices.push_back({std::cos(a), sign * (1.0 + 0.1 * i), std::sin(a)});
    }
    for (int i = 0; i < 4; ++i) m.faces.push_back({0, ring0 + i, ring0 + i + 1});
  }
  return m;
}

TriangleMesh make_nonmanifold_fan() {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {0, 0, 1}, {1, 0, 0.5}, {-1, 0.3, 0.5}, {0.2, 1, 0.5}};
  // Three faces share edge (0,1).
  m.faces = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}};
  return m;
}

std::vector<NamedMesh> make_corpus() {
  std::vector<NamedMesh> corpus;
  corpus.push_back({"triangle", make_triangle()});
  corpus.push_back({"tetrahedron", make_tetrahedron()});
  corpus.push_back({"cube_quads", make_cube_quads()});
  corpus.push_back({"cube_grid4", make_cube_grid(4)});
  corpus.push_back({"icosphere0", make_icosphere(0)});
  corpus.push_back({"icosphere1", make_icosphere(1)});
  corpus.push_back({"icosphere2", make_icosphere(2)});
  corpus.push_back({"icosphere3", make_icosphere(3)});
  corpus.push_back({"strip", make_strip(10)});
  corpus.push_back({"grid_plane", make_grid_plane(8, 8)});
  corpus.push_back({"heightfield", make_heightfield(10, 10, 7)});
  corpus.push_back({"cylinder_open", make_cylinder(16, false)});
  corpus.push_back({"cylinder_capped", make_cylinder(12, true)});
  corpus.push_back({"cone", make_cone(14)});
  corpus.push_back({"torus", make_torus(12, 8)});
  corpus.push_back({"octahedron", make_octahedron()});
  corpus.push_back({"pyramid", make_square_pyramid()});
  corpus.push_back({"disk_fan", make_disk_fan(9)});
  corpus.push_back({"lshape", make_lshape()});
  corpus.push_back({"two_components", make_two_components()});
  corpus.push_back({"pinch", make_pinch()});
  corpus.push_back({"nonmanifold_fan", make_nonmanifold_fan()});
  for (auto& nm : corpus) nm.mesh = fit_into_cube(nm.mesh);
  return corpus;
}

TriangleMesh fit_into_cube(const TriangleMesh& mesh, double s) {
  Bounds b = bounds_of(mesh.vertices);
  Vec3 size = b.size();
  double extent = std::max({size.x, size.y, size.z, 1e-12});
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = (v - b.center()) * (2.0 * s / extent);
  return out;
}

TriangleMesh permute_mesh(const TriangleMesh& mesh, uint64_t seed) {
  Rng rng(seed);
  std::vector<int> perm(mesh.vertices.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[rng.next_below(i)]);
  TriangleMesh out;
  out.vertices.resize(mesh.vertices.size());
  for (size_t i = 0; i < perm.size(); ++i) out.vertices[perm[i]] = mesh.vertices[i];
  out.faces.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) out.faces.push_back({perm[f[0]], perm[f[1]], perm[f[2]]});
  for (size_t i = out.faces.size(); i > 1; --i)
    std::swap(out.faces[i - 1], out.faces[rng.next_below(i)]);
  // Random cyclic rotations keep the winding but move the anchor vertex.
  for (auto& f : out.faces) {
    int r = int(rng.next_below(3));
    f = {f[r], f[(r + 1) % 3], f[(r + 2) % 3]};
  }
  return out;
}

TriangleMesh fuzz_mesh(uint64_t seed) {
  Rng rng(seed);
  TriangleMesh m;
  switch (rng.next_below(6)) {
    case 0: m = make_heightfield(2 + int(rng.next_below(6)), 2 + int(rng.next_below(6)), rng.next_u64()); break;
    case 1: m = make_strip(1 + int(rng.next_below(12))); break;
    case 2: m = make_icosphere(int(rng.next_below(3))); break;
    case 3: m = make_cylinder(3 + int(rng.next_below(10)), rng.next_below(2) == 0); break;
    case 4: m = make_torus(3 + int(rng.next_below(6)), 3 + int(rng.next_below(5))); break;
    default: m = make_cone(3 + int(rng.next_below(10))); break;
  }
  double jitter = rng.uniform(0.0, 0.05);
  for (Vec3& v : m.vertices) {
    v.x += rng.uniform(-jitter, jitter);
    v.y += rng.uniform(-jitter, jitter);
    v.z += rng.uniform(-jitter, jitter);
  }
  return permute_mesh(fit_into_cube(m, rng.uniform(0.3, 0.9)), rng.next_u64());
}

GravityBox fuzz_box(Rng& rng) {
  GravityBox box;
  box.center = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
  box.scale = {rng.uniform(0.1, 0.6), rng.uniform(0.1, 0.6), rng.uniform(0.1, 0.6)};
  box.yaw = rng.uniform(-kPi, kPi);
  if (box.yaw <= -kPi) box.yaw = kPi;
  return box;
}

double brute_nn_sq(const Vec3& q, const std::vector<Vec3>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& p : pts) {
    double dx = q.x - p.x, dy = q.y - p.y, dz = q.z - p.z;
    double d = dx * dx + dy * dy + dz * dz;
    if (d < best) best = d;
  }
  return best;
}

}  // namespace armesh::test

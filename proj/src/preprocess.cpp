#include "armesh/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "armesh/kdtree.hpp"

namespace armesh {

// ---------------------------------------------------------------------------
// merge_vertices
// ---------------------------------------------------------------------------

namespace {
TriangleMesh merge_vertices_pass(const TriangleMesh& mesh, int quant_level);
}

// Cell means can land in an occupied cell, so run the pass to a fixed point;
// the vertex count strictly decreases until it stabilizes.
TriangleMesh merge_vertices(const TriangleMesh& mesh, int quant_level) {
  TriangleMesh out = merge_vertices_pass(mesh, quant_level);
  while (true) {
    TriangleMesh next = merge_vertices_pass(out, quant_level);
    if (next.vertex_count() == out.vertex_count()) return out;
    out = std::move(next);
  }
}

namespace {

TriangleMesh merge_vertices_pass(const TriangleMesh& mesh, int quant_level) {
  require(quant_level >= 2, ErrorCode::validation, "merge_vertices: quant level must be >= 2");
  TriangleMesh in = drop_degenerate_faces(mesh);
  double q = double(quant_level);

  auto cell_key = [q](const Vec3& p) {
    auto c = [q](double x) { return int64_t(std::floor(x * q)); };
    uint64_t h = 1469598103934665603ull;
    for (int64_t v : {c(p.x), c(p.y), c(p.z)}) {
      h ^= uint64_t(v);
      h *= 1099511628211ull;
    }
    return h;
  };

  struct Cell {
    Vec3 sum{0, 0, 0};
    size_t count = 0;
    int id = -1;
  };
  std::unordered_map<uint64_t, Cell> cells;
  cells.reserve(in.vertices.size());
  std::vector<uint64_t> vertex_cell(in.vertices.size());
  for (size_t i = 0; i < in.vertices.size(); ++i) {
    require(finite(in.vertices[i]), ErrorCode::validation, "merge_vertices: non-finite vertex");
    uint64_t key = cell_key(in.vertices[i]);
    vertex_cell[i] = key;
    Cell& c = cells[key];
    c.sum += in.vertices[i];
    c.count++;
  }

  TriangleMesh out;
  out.vertices.reserve(cells.size());
  std::vector<int> remap(in.vertices.size());
  for (size_t i = 0; i < in.vertices.size(); ++i) {
    Cell& c = cells[vertex_cell[i]];
    if (c.id < 0) {
      c.id = int(out.vertices.size());
      out.vertices.push_back(c.sum / double(c.count));
    }
    remap[i] = c.id;
  }
  for (const auto& f : in.faces) {
    std::array<int, 3> g = {remap[f[0]], remap[f[1]], remap[f[2]]};
    if (g[0] != g[1] && g[1] != g[2] && g[0] != g[2]) out.faces.push_back(g);
  }
  require(!out.faces.empty(), ErrorCode::validation, "merge_vertices: empty result");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// planar_decimate
// ---------------------------------------------------------------------------

namespace {

TriangleMesh compact_mesh(const TriangleMesh& mesh) {
  std::vector<int> remap(mesh.vertices.size(), -1);
  TriangleMesh out;
  for (const auto& f : mesh.faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
    std::array<int, 3> g;
    for (int k = 0; k < 3; ++k) {
      if (remap[f[k]] < 0) {
        remap[f[k]] = int(out.vertices.size());
        out.vertices.push_back(mesh.vertices[f[k]]);
      }
      g[k] = remap[f[k]];
    }
    out.faces.push_back(g);
  }
  return out;
}

inline uint64_t ukey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (uint64_t(uint32_t(a)) << 32) | uint32_t(b);
}

// One pass of planar vertex removal; returns the number of collapses applied.
size_t planar_pass(TriangleMesh& mesh, double angle_tol) {
  size_t nv = mesh.vertices.size();
  std::vector<std::vector<int>> vfaces(nv);
  std::unordered_map<uint64_t, int> edge_count;
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      vfaces[face[k]].push_back(int(f));
      edge_count[ukey(face[k], face[(k + 1) % 3])]++;
    }
  }
  std::vector<Vec3> normals(mesh.faces.size());
  for (size_t f = 0; f < mesh.faces.size(); ++f) normals[f] = face_normal(mesh, mesh.faces[f]);

  double cos_tol = std::cos(angle_tol) - 1e-12;
  // Post-collapse faces may tilt by up to about twice the cluster tolerance.
  double cos_keep = std::cos(std::min(2.0 * angle_tol + 1e-7, 0.5));

  std::vector<char> touched(nv, 0);
  size_t collapses = 0;

  for (size_t v = 0; v < nv; ++v) {
    if (touched[v] || vfaces[v].empty()) continue;

    // Cluster the incident faces by normal.
    std::vector<int> cluster_of(vfaces[v].size(), -1);
    std::vector<Vec3> seeds;
    for (size_t i = 0; i < vfaces[v].size(); ++i) {
      const Vec3& n = normals[vfaces[v][i]];
      for (size_t cidx = 0; cidx < seeds.size(); ++cidx) {
        if (dot(n, seeds[cidx]) >= cos_tol) {
          cluster_of[i] = int(cidx);
          break;
        }
      }
      if (cluster_of[i] < 0) {
        cluster_of[i] = int(seeds.size());
        seeds.push_back(n);
      }
    }
    if (seeds.size() > 2) continue;

    // Ring vertices, crease edges (cluster changes across the edge) and
    // boundary edges (single incident face) at v.
    std::set<int> ring;
    std::vector<int> crease;
    bool bad = false;
    std::unordered_map<int, int> neighbor_cluster;  // across-edge cluster probe
    for (size_t i = 0; i < vfaces[v].size() && !bad; ++i) {
      const auto& face = mesh.faces[vfaces[v][i]];
      for (int k = 0; k < 3; ++k) {
        int a = face[k], b = face[(k + 1) % 3];
        if (a != int(v) && b != int(v)) continue;
        int other = a == int(v) ? b : a;
        ring.insert(other);
        if (touched[other]) bad = true;
        int cnt = edge_count[ukey(int(v), other)];
        if (cnt == 1) {
          if (std::find(crease.begin(), crease.end(), other) == crease.end())
            crease.push_back(other);
        } else if (cnt == 2) {
          auto [it, fresh] = neighbor_cluster.emplace(other, cluster_of[i]);
          if (!fresh && it->second != cluster_of[i] &&
              std::find(crease.begin(), crease.end(), other) == crease.end())
            crease.push_back(other);
        } else {
          bad = true;  // non-manifold edge: leave this vertex alone
        }
      }
    }
    if (bad) continue;

    std::vector<int> targets;
    if (seeds.size() == 1 && crease.empty()) {
      targets.assign(ring.begin(), ring.end());
    } else if (crease.size() == 2) {
      // Removable only when the crease is straight through v.
      Vec3 e1 = mesh.vertices[crease[0]] - mesh.vertices[v];
      Vec3 e2 = mesh.vertices[crease[1]] - mesh.vertices[v];
      double l1 = norm(e1), l2 = norm(e2);
      if (l1 <= 0 || l2 <= 0) continue;
      if (norm(cross(e1, e2)) > 1e-9 * l1 * l2 || dot(e1, e2) >= 0) continue;
      targets = crease;
    } else {
      continue;
    }

    for (int u : targets) {
      // Manifold guard: ring vertices shared by v and u must be thirds of
      // faces on the (v,u) edge, otherwise the collapse duplicates faces.
      {
        std::set<int> u_ring;
        for (int fid : vfaces[u])
          for (int k = 0; k < 3; ++k)
            if (mesh.faces[fid][k] != u) u_ring.insert(mesh.faces[fid][k]);
        std::set<int> allowed;
        for (int fid : vfaces[v]) {
          const auto& face = mesh.faces[fid];
          if (face[0] != u && face[1] != u && face[2] != u) continue;
          for (int k = 0; k < 3; ++k)
            if (face[k] != u && face[k] != int(v)) allowed.insert(face[k]);
        }
        bool pinched = false;
        for (int r : ring)
          if (r != u && u_ring.count(r) && !allowed.count(r)) pinched = true;
        if (pinched) continue;
      }
      // Simulate v -> u: surviving faces must keep orientation and planarity.
      bool ok = true;
      for (size_t i = 0; i < vfaces[v].size() && ok; ++i) {
        auto face = mesh.faces[vfaces[v][i]];
        bool has_u = face[0] == u || face[1] == u || face[2] == u;
        if (has_u) continue;  // face dies in the collapse
        for (int k = 0; k < 3; ++k)
          if (face[k] == int(v)) face[k] = u;
        Vec3 n = cross(mesh.vertices[face[1]] - mesh.vertices[face[0]],
                       mesh.vertices[face[2]] - mesh.vertices[face[0]]);
        double len = norm(n);
        if (len <= 1e-18) {
          ok = false;
          break;
        }
        if (dot(n / len, seeds[cluster_of[i]]) < cos_keep) ok = false;
      }
      if (!ok) continue;

      for (int fid : vfaces[v]) {
        for (int k = 0; k < 3; ++k)
          if (mesh.faces[fid][k] == int(v)) mesh.faces[fid][k] = u;
      }
      touched[v] = touched[u] = 1;
      for (int r : ring) touched[r] = 1;
      collapses++;
      break;
    }
  }
  if (collapses) mesh = compact_mesh(mesh);
  return collapses;
}

}  // namespace

TriangleMesh planar_decimate(const TriangleMesh& mesh, double angle_tol) {
  require(angle_tol >= 0, ErrorCode::validation, "planar_decimate: negative tolerance");
  TriangleMesh out = drop_degenerate_faces(mesh);
  for (int pass = 0; pass < 64; ++pass) {
    if (planar_pass(out, angle_tol) == 0) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// quadric_decimate
// ---------------------------------------------------------------------------

namespace {

// Symmetric 4x4 quadric, upper triangle.
struct Quadric {
  double m[10] = {0};

  void add_plane(double a, double b, double c, double d, double w) {
    m[0] += w * a * a;
    m[1] += w * a * b;
    m[2] += w * a * c;
    m[3] += w * a * d;
    m[4] += w * b * b;
    m[5] += w * b * c;
    m[6] += w * b * d;
    m[7] += w * c * c;
    m[8] += w * c * d;
    m[9] += w * d * d;
  }
  Quadric& operator+=(const Quadric& o) {
    for (int i = 0; i < 10; ++i) m[i] += o.m[i];
    return *this;
  }
  double error(const Vec3& p) const {
    return p.x * (m[0] * p.x + 2 * m[1] * p.y + 2 * m[2] * p.z + 2 * m[3]) +
           p.y * (m[4] * p.y + 2 * m[5] * p.z + 2 * m[6]) +
           p.z * (m[7] * p.z + 2 * m[8]) + m[9];
  }
  // Minimizer of the quadratic form, when the 3x3 block is well conditioned.
  bool optimal(Vec3& out) const {
    double a00 = m[0], a01 = m[1], a02 = m[2];
    double a11 = m[4], a12 = m[5], a22 = m[7];
    double det = a00 * (a11 * a22 - a12 * a12) - a01 * (a01 * a22 - a12 * a02) +
                 a02 * (a01 * a12 - a11 * a02);
    double scale = std::abs(a00) + std::abs(a11) + std::abs(a22);
    if (std::abs(det) <= 1e-10 * scale * scale * scale + 1e-300) return false;
    double bx = -m[3], by = -m[6], bz = -m[8];
    out.x = (bx * (a11 * a22 - a12 * a12) - a01 * (by * a22 - a12 * bz) +
             a02 * (by * a12 - a11 * bz)) / det;
    out.y = (a00 * (by * a22 - a12 * bz) - bx * (a01 * a22 - a02 * a12) +
             a02 * (a01 * bz - by * a02)) / det;
    out.z = (a00 * (a11 * bz - by * a12) - a01 * (a01 * bz - by * a02) +
             bx * (a01 * a12 - a11 * a02)) / det;
    return finite(out);
  }
};

constexpr double kBoundaryWeight = 100.0;

}  // namespace

TriangleMesh quadric_decimate(const TriangleMesh& mesh, size_t target_faces) {
  require(target_faces >= 4, ErrorCode::validation, "quadric_decimate: target must be >= 4");
  TriangleMesh m = drop_degenerate_faces(mesh);
  if (m.faces.size() <= target_faces) return m;

  size_t nv = m.vertices.size();
  std::vector<Quadric> quadrics(nv);
  std::vector<std::vector<int>> vfaces(nv);
  std::unordered_map<uint64_t, int> edge_faces;
  for (size_t f = 0; f < m.faces.size(); ++f) {
    const auto& face = m.faces[f];
    Vec3 n = cross(m.vertices[face[1]] - m.vertices[face[0]],
                   m.vertices[face[2]] - m.vertices[face[0]]);
    double area2 = norm(n);
    if (area2 <= 0) continue;
    Vec3 un = n / area2;
    double d = -dot(un, m.vertices[face[0]]);
    for (int k = 0; k < 3; ++k) {
      quadrics[face[k]].add_plane(un.x, un.y, un.z, d, area2 * 0.5);
      vfaces[face[k]].push_back(int(f));
      edge_faces[ukey(face[k], face[(k + 1) % 3])]++;
    }
  }
  // Boundary constraint planes: perpendicular to the face through each
  // boundary edge, weighted by squared edge length.
  for (size_t f = 0; f < m.faces.size(); ++f) {
    const auto& face = m.faces[f];
    for (int k = 0; k < 3; ++k) {
      int a = face[k], b = face[(k + 1) % 3];
      if (edge_faces[ukey(a, b)] != 1) continue;
      Vec3 edge = m.vertices[b] - m.vertices[a];
      Vec3 n = cross(edge, face_normal(m, face));
      double len = norm(n);
      if (len <= 0) continue;
      n = n / len;
      double d = -dot(n, m.vertices[a]);
      double w = kBoundaryWeight * norm_sq(edge);
      quadrics[a].add_plane(n.x, n.y, n.z, d, w);
      quadrics[b].add_plane(n.x, n.y, n.z, d, w);
    }
  }

  std::vector<char> face_alive(m.faces.size(), 1);
  std::vector<char> vertex_alive(nv, 1);
  std::vector<uint32_t> version(nv, 0);
  size_t alive = m.faces.size();

  struct Candidate {
    double error;
    int u, v;
    uint32_t version_u, version_v;
    Vec3 pos;
    bool operator<(const Candidate& o) const { return error > o.error; }  // min-heap
  };
  std::priority_queue<Candidate> heap;

  auto make_candidate = [&](int u, int v) {
    Quadric q = quadrics[u];
    q += quadrics[v];
    Vec3 best_pos;
    double best_err;
    if (q.optimal(best_pos)) {
      best_err = q.error(best_pos);
    } else {
      best_pos = m.vertices[u];
      best_err = q.error(best_pos);
      Vec3 alt[2] = {m.vertices[v], (m.vertices[u] + m.vertices[v]) * 0.5};
      for (const Vec3& p : alt) {
        double e = q.error(p);
        if (e < best_err) {
          best_err = e;
          best_pos = p;
        }
      }
    }
    heap.push({best_err, u, v, version[u], version[v], best_pos});
  };

  {
    std::unordered_set<uint64_t> pushed;
    for (const auto& face : m.faces)
      for (int k = 0; k < 3; ++k) {
        int a = face[k], b = face[(k + 1) % 3];
        if (pushed.insert(ukey(a, b)).second) make_candidate(std::min(a, b), std::max(a, b));
      }
  }

  auto neighbors = [&](int u) {
    std::set<int> out;
    for (int f : vfaces[u]) {
      if (!face_alive[f]) continue;
      for (int k = 0; k < 3; ++k)
        if (m.faces[f][k] != u) out.insert(m.faces[f][k]);
    }
    return out;
  };

  while (alive > target_faces && !heap.empty()) {
    Candidate c = heap.top();
    heap.pop();
    if (!vertex_alive[c.u] || !vertex_alive[c.v]) continue;
    if (version[c.u] != c.version_u || version[c.v] != c.version_v) continue;

    // Still an edge? (collapses elsewhere may have separated u and v)
    bool still_edge = false;
    for (int f : vfaces[c.u]) {
      if (!face_alive[f]) continue;
      const auto& face = m.faces[f];
      if ((face[0] == c.v || face[1] == c.v || face[2] == c.v)) {
        still_edge = true;
        break;
      }
    }
    if (!still_edge) continue;

    // Manifold guard: u and v may share at most two ring vertices.
    {
      std::set<int> nu = neighbors(c.u), nv_set = neighbors(c.v);
      int common = 0;
      for (int x : nu) common += nv_set.count(x) != 0;
      if (common > 2) continue;
    }

    // Flip/degeneracy guard on every surviving face of the union star.
    bool ok = true;
    auto check_faces = [&](int vert) {
      for (int f : vfaces[vert]) {
        if (!ok || !face_alive[f]) continue;
        auto face = m.faces[f];
        bool dies = (face[0] == c.u || face[1] == c.u || face[2] == c.u) &&
                    (face[0] == c.v || face[1] == c.v || face[2] == c.v);
        if (dies) continue;
        Vec3 before = cross(m.vertices[face[1]] - m.vertices[face[0]],
                            m.vertices[face[2]] - m.vertices[face[0]]);
        Vec3 p[3];
        for (int k = 0; k < 3; ++k)
          p[k] = (face[k] == c.u || face[k] == c.v) ? c.pos : m.vertices[face[k]];
        Vec3 after = cross(p[1] - p[0], p[2] - p[0]);
        if (norm(after) <= 1e-18 || dot(before, after) <= 0.0) ok = false;
      }
    };
    check_faces(c.u);
    check_faces(c.v);
    if (!ok) continue;

    // Apply: u absorbs v at c.pos.
    m.vertices[c.u] = c.pos;
    quadrics[c.u] += quadrics[c.v];
    vertex_alive[c.v] = 0;
    version[c.u]++;
    version[c.v]++;
    for (int f : vfaces[c.v]) {
      if (!face_alive[f]) continue;
      auto& face = m.faces[f];
      bool dies = face[0] == c.u || face[1] == c.u || face[2] == c.u;
      if (dies) {
        face_alive[f] = 0;
        alive--;
        continue;
      }
      for (int k = 0; k < 3; ++k)
        if (face[k] == c.v) face[k] = c.u;
      vfaces[c.u].push_back(f);
    }
    for (int u2 : neighbors(c.u)) make_candidate(std::min(c.u, u2), std::max(c.u, u2));
  }

  TriangleMesh out;
  out.vertices = m.vertices;
  for (size_t f = 0; f < m.faces.size(); ++f)
    if (face_alive[f]) out.faces.push_back(m.faces[f]);
  return compact_mesh(out);
}

// ---------------------------------------------------------------------------
// hausdorff + selection + pipeline
// ---------------------------------------------------------------------------

namespace {

uint64_t mesh_content_hash(const TriangleMesh& m) {
  uint64_t h = hash_bytes(m.vertices.data(), m.vertices.size() * sizeof(Vec3));
  return hash_bytes(m.faces.data(), m.faces.size() * sizeof(std::array<int, 3>), h);
}

double directed_max_dist(const PointCloud& from, const KdTree& to) {
  double worst = 0.0;
  for (const Vec3& p : from.points) worst = std::max(worst, to.nearest(p).dist_sq);
  return std::sqrt(worst);
}

}  // namespace

double hausdorff(const TriangleMesh& a, const TriangleMesh& b, size_t samples, uint64_t seed) {
  require(!a.faces.empty() && !b.faces.empty(), ErrorCode::validation, "hausdorff: empty mesh");
  PointCloud sa = sample_points(a, samples, mix_seed(seed, mesh_content_hash(a)));
  PointCloud sb = sample_points(b, samples, mix_seed(seed, mesh_content_hash(b)));
  KdTree ta(sa.points), tb(sb.points);
  return std::max(directed_max_dist(sa, tb), directed_max_dist(sb, ta));
}

const CandidateResult& select_best(const std::vector<CandidateResult>& candidates, double tau) {
  require(!candidates.empty(), ErrorCode::validation, "select_best: no candidates");
  const CandidateResult* best = nullptr;
  bool best_qualifies = false;
  for (const CandidateResult& c : candidates) {
    bool qualifies = c.hausdorff < tau;
    if (!best) {
      best = &c;
      best_qualifies = qualifies;
      continue;
    }
    if (qualifies != best_qualifies) {
      if (qualifies) {
        best = &c;
        best_qualifies = true;
      }
      continue;
    }
    if (qualifies) {
      // Below tau: fewest faces, ties toward lower distance.
      if (c.faces < best->faces ||
          (c.faces == best->faces && c.hausdorff < best->hausdorff))
        best = &c;
    } else {
      if (c.hausdorff < best->hausdorff ||
          (c.hausdorff == best->hausdorff && c.faces < best->faces))
        best = &c;
    }
  }
  return *best;
}

CandidateResult preprocess_asset(const TriangleMesh& mesh, const PreprocessConfig& config) {
  config.validate();
  TriangleMesh clean = drop_degenerate_faces(mesh);
  require(!clean.faces.empty(), ErrorCode::validation, "preprocess_asset: no usable faces");

  NormalizationFrame frame = compute_unit_cube_frame(clean.vertices);
  TriangleMesh norm = apply_frame(frame, clean);

  std::vector<CandidateResult> candidates;
  std::string last_error;
  for (int q : config.quant_levels) {
    TriangleMesh merged, planar;
    try {
      merged = merge_vertices(norm, q);
      planar = planar_decimate(merged, config.planar_angle_tol);
    } catch (const Error& e) {
      last_error = e.what();
      continue;
    }
    for (int target : config.face_targets) {
      try {
        TriangleMesh dec = quadric_decimate(planar, size_t(target));
        CandidateResult cand;
        cand.hausdorff = hausdorff(dec, norm, config.hausdorff_samples, config.seed);
        cand.mesh = std::move(dec);
        cand.quant_level = q;
        cand.face_target = target;
        cand.faces = cand.mesh.faces.size();
        candidates.push_back(std::move(cand));
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
  }
  require(!candidates.empty(), ErrorCode::validation,
          "preprocess_asset: every candidate failed (last error: " + last_error + ")");

  CandidateResult selected = select_best(candidates, config.hausdorff_tau);
  selected.mesh = invert_frame(frame, selected.mesh);
  return selected;
}

}  // namespace armesh

#include "armesh/mesh_codec.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "armesh/kernels.hpp"

namespace armesh {

namespace {

inline uint64_t bin_key(const QuantizedVertex& v) {
  return (uint64_t(uint32_t(v.ix)) << 40) | (uint64_t(uint32_t(v.iy)) << 20) | uint32_t(v.iz);
}

inline uint64_t edge_key(int a, int b) {
  return (uint64_t(uint32_t(a)) << 32) | uint32_t(b);
}

inline std::array<int, 3> rotate_lowest_first(const std::array<int, 3>& f) {
  int k = 0;
  if (f[1] < f[k]) k = 1;
  if (f[2] < f[k]) k = 2;
  return {f[k], f[(k + 1) % 3], f[(k + 2) % 3]};
}

inline bool zero_bin_area(const QuantizedVertex& a, const QuantizedVertex& b,
                          const QuantizedVertex& c) {
  int64_t e1x = b.ix - a.ix, e1y = b.iy - a.iy, e1z = b.iz - a.iz;
  int64_t e2x = c.ix - a.ix, e2y = c.iy - a.iy, e2z = c.iz - a.iz;
  return e1y * e2z - e1z * e2y == 0 && e1z * e2x - e1x * e2z == 0 &&
         e1x * e2y - e1y * e2x == 0;
}

// Dedupe bins, drop degenerate/duplicate faces, sort everything into the
// canonical order. Shared by canonical_bins and every decoder.
CanonicalMesh assemble_canonical(const std::vector<QuantizedVertex>& raw_verts,
                                 const std::vector<std::array<int, 3>>& raw_faces) {
  std::unordered_map<uint64_t, int> bin_to_id;
  bin_to_id.reserve(raw_verts.size() * 2);
  std::vector<int> remap(raw_verts.size());
  std::vector<QuantizedVertex> uniq;
  uniq.reserve(raw_verts.size());
  for (size_t i = 0; i < raw_verts.size(); ++i) {
    auto [it, fresh] = bin_to_id.emplace(bin_key(raw_verts[i]), int(uniq.size()));
    if (fresh) uniq.push_back(raw_verts[i]);
    remap[i] = it->second;
  }

  std::vector<std::array<int, 3>> faces;
  faces.reserve(raw_faces.size());
  for (const auto& f : raw_faces) {
    std::array<int, 3> g = {remap[f[0]], remap[f[1]], remap[f[2]]};
    if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;
    if (zero_bin_area(uniq[g[0]], uniq[g[1]], uniq[g[2]])) continue;
    faces.push_back(g);
  }

  // Sort vertices by (z,y,x) bin and remap.
  std::vector<int> order(uniq.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return uniq[a] < uniq[b]; });
  std::vector<int> pos(uniq.size());
  for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = int(i);
  for (auto& f : faces)
    f = rotate_lowest_first({pos[f[0]], pos[f[1]], pos[f[2]]});
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());

  // Drop unreferenced vertices, keeping the sorted order.
  std::vector<char> used(uniq.size(), 0);
  for (const auto& f : faces) used[f[0]] = used[f[1]] = used[f[2]] = 1;
  std::vector<int> final_id(uniq.size(), -1);
  CanonicalMesh out;
  out.vertices.reserve(uniq.size());
  for (size_t i = 0; i < order.size(); ++i) {
    if (!used[i]) continue;
    final_id[i] = int(out.vertices.size());
    out.vertices.push_back(uniq[order[i]]);
  }
  out.faces.reserve(faces.size());
  for (const auto& f : faces)
    out.faces.push_back({final_id[f[0]], final_id[f[1]], final_id[f[2]]});
  return out;
}

// Directed-edge structure of the already-decoded (or already-emitted) region.
// Encoder and decoder advance it identically, which is what makes the compact
// stream decodable in one pass.
struct EmittedComplex {
  std::unordered_map<uint64_t, int> third;  // directed (u,v) -> w of face (u,v,w)

  bool has(int u, int v) const { return third.count(edge_key(u, v)) != 0; }
  int third_of(int u, int v) const {
    auto it = third.find(edge_key(u, v));
    return it == third.end() ? -1 : it->second;
  }
  bool add_face(int a, int b, int c) {
    if (has(a, b) || has(b, c) || has(c, a)) return false;
    third.emplace(edge_key(a, b), c);
    third.emplace(edge_key(b, c), a);
    third.emplace(edge_key(c, a), b);
    return true;
  }

  // Walk the emitted fan around y away from gate (x,y); the stop vertex is the
  // R candidate for the pending face (x,y,w). Returns -1 on closed fans.
  int rotate_head(int y, int x, int limit) const {
    int c = third_of(y, x);
    if (c < 0) return -1;
    for (int step = 0; step < limit; ++step) {
      int d = third_of(y, c);
      if (d < 0) return c;
      c = d;
    }
    return -1;
  }
  // Same walk around x; stop vertex is the L candidate.
  int rotate_origin(int x, int y, int limit) const {
    int c = third_of(y, x);
    if (c < 0) return -1;
    for (int step = 0; step < limit; ++step) {
      int e = third_of(c, x);
      if (e < 0) return c;
      c = e;
    }
    return -1;
  }
};

}  // namespace

CanonicalMesh canonical_bins(const TriangleMesh& mesh, const QuantizationGrid& grid) {
  size_t nv = mesh.vertices.size();
  std::vector<double> axis(nv);
  std::vector<int32_t> bx(nv), by(nv), bz(nv);
  for (size_t i = 0; i < nv; ++i) {
    require(finite(mesh.vertices[i]), ErrorCode::validation, "canonicalize: non-finite vertex");
    axis[i] = mesh.vertices[i].x;
  }
  kernels::quantize_batch(axis.data(), nv, grid.resolution, bx.data());
  for (size_t i = 0; i < nv; ++i) axis[i] = mesh.vertices[i].y;
  kernels::quantize_batch(axis.data(), nv, grid.resolution, by.data());
  for (size_t i = 0; i < nv; ++i) axis[i] = mesh.vertices[i].z;
  kernels::quantize_batch(axis.data(), nv, grid.resolution, bz.data());
  std::vector<QuantizedVertex> bins(nv);
  for (size_t i = 0; i < nv; ++i) bins[i] = {bx[i], by[i], bz[i]};
  int n = int(mesh.vertices.size());
  for (const auto& f : mesh.faces)
    require(f[0] >= 0 && f[0] < n && f[1] >= 0 && f[1] < n && f[2] >= 0 && f[2] < n,
            ErrorCode::validation, "canonicalize: face index out of range");
  return assemble_canonical(bins, mesh.faces);
}

TriangleMesh mesh_from_bins(const CanonicalMesh& canon, const QuantizationGrid& grid) {
  TriangleMesh out;
  out.vertices.reserve(canon.vertices.size());
  for (const auto& v : canon.vertices) out.vertices.push_back(dequantize(grid, v));
  out.faces = canon.faces;
  return out;
}

TriangleMesh canonicalize(const TriangleMesh& mesh, const QuantizationGrid& grid) {
  CanonicalMesh canon = canonical_bins(mesh, grid);
  require(!canon.faces.empty(), ErrorCode::validation,
          "canonicalize: mesh is empty after canonicalization");
  return mesh_from_bins(canon, grid);
}

TokenSequence encode_coordinate(const TriangleMesh& mesh, const QuantizationGrid& grid) {
  CanonicalMesh canon = canonical_bins(mesh, grid);
  TokenSequence seq{Scheme::coordinate, grid.resolution, {}};
  seq.tokens.reserve(canon.faces.size() * 9);
  for (const auto& f : canon.faces) {
    for (int k = 0; k < 3; ++k) {
      const QuantizedVertex& v = canon.vertices[f[k]];
      seq.tokens.push_back(uint32_t(v.ix));
      seq.tokens.push_back(uint32_t(v.iy));
      seq.tokens.push_back(uint32_t(v.iz));
    }
  }
  return seq;
}

TokenSequence encode_compact(const TriangleMesh& mesh, const QuantizationGrid& grid) {
  CanonicalMesh canon = canonical_bins(mesh, grid);
  MeshVocabulary vocab = MeshVocabulary::make(Scheme::compact, grid.resolution);
  TokenSequence seq{Scheme::compact, grid.resolution, {}};
  if (canon.faces.empty()) return seq;

  TriangleMesh shell = mesh_from_bins(canon, grid);
  HalfEdgeMesh he = build_half_edge(shell);
  FaceComponents fc = face_components(shell, he);

  // Directed edge -> (face, third vertex); unique within clean components.
  std::unordered_map<uint64_t, std::pair<int, int>> mesh_edge;
  mesh_edge.reserve(canon.faces.size() * 3 * 2);
  for (size_t f = 0; f < canon.faces.size(); ++f) {
    const auto& face = canon.faces[f];
    for (int k = 0; k < 3; ++k)
      mesh_edge.try_emplace(edge_key(face[k], face[(k + 1) % 3]),
                            std::make_pair(int(f), face[(k + 2) % 3]));
  }

  std::vector<char> visited(canon.faces.size(), 0);
  std::vector<char> registered(canon.vertices.size(), 0);
  EmittedComplex emitted;
  size_t emitted_faces = 0;
  std::vector<std::pair<int, int>> gates;

  auto emit_coords = [&](int vid) {
    const QuantizedVertex& v = canon.vertices[vid];
    seq.tokens.push_back(uint32_t(v.ix));
    seq.tokens.push_back(uint32_t(v.iy));
    seq.tokens.push_back(uint32_t(v.iz));
  };
  auto ctrl = [&](Control c) { seq.tokens.push_back(vocab.control_token(c)); };

  const size_t max_chunk = size_t(grid.resolution) * size_t(grid.resolution) - 1;

  for (size_t f0 = 0; f0 < canon.faces.size(); ++f0) {
    if (visited[f0]) continue;
    int comp = fc.face_component[f0];

    if (!fc.clean[comp]) {
      // Coordinate fallback for the whole component, flagged by B at
      // component-start position, followed by the face count in base N.
      std::vector<int> comp_faces;
      for (size_t f = f0; f < canon.faces.size(); ++f)
        if (!visited[f] && fc.face_component[f] == comp) comp_faces.push_back(int(f));
      size_t done = 0;
      while (done < comp_faces.size()) {
        size_t chunk = std::min(max_chunk, comp_faces.size() - done);
        ctrl(Control::B);
        seq.tokens.push_back(uint32_t(chunk / grid.resolution));
        seq.tokens.push_back(uint32_t(chunk % grid.resolution));
        for (size_t i = 0; i < chunk; ++i) {
          const auto& face = canon.faces[comp_faces[done + i]];
          for (int k = 0; k < 3; ++k) {
            emit_coords(face[k]);
            registered[face[k]] = 1;
          }
          visited[comp_faces[done + i]] = 1;
        }
        done += chunk;
      }
      continue;
    }

    // Traversal component: 9-coordinate header face, then gate-driven spiral.
    const auto& start = canon.faces[f0];
    int a = start[0], b = start[1], c = start[2];
    emit_coords(a);
    emit_coords(b);
    emit_coords(c);
    registered[a] = registered[b] = registered[c] = 1;
    visited[f0] = 1;
    bool ok = emitted.add_face(a, b, c);
    require(ok, ErrorCode::internal, "encode_compact: header face conflicts");
    emitted_faces++;
    gates.push_back({b, a});
    gates.push_back({c, b});
    gates.push_back({a, c});

    while (!gates.empty()) {
      auto [x, y] = gates.back();
      gates.pop_back();
      if (emitted.has(x, y)) continue;
      auto it = mesh_edge.find(edge_key(x, y));
      if (it == mesh_edge.end()) {
        ctrl(Control::B);
        continue;
      }
      auto [face_id, w] = it->second;
      require(!visited[face_id], ErrorCode::internal, "encode_compact: revisited face");

      if (!registered[w]) {
        ctrl(Control::C);
        emit_coords(w);
        registered[w] = 1;
      } else {
        int limit = int(emitted_faces) + 2;
        int wr = emitted.rotate_head(y, x, limit);
        int wl = emitted.rotate_origin(x, y, limit);
        if (wr == w && wl == w) {
          ctrl(Control::E);
        } else if (wr == w) {
          ctrl(Control::R);
        } else if (wl == w) {
          ctrl(Control::L);
        } else {
          ctrl(Control::S);
          emit_coords(w);
        }
      }
      visited[face_id] = 1;
      ok = emitted.add_face(x, y, w);
      require(ok, ErrorCode::internal, "encode_compact: face conflicts in clean component");
      emitted_faces++;
      gates.push_back({x, w});
      gates.push_back({w, y});
    }
  }
  return seq;
}

TokenSequence encode_block_patch(const TriangleMesh& mesh, const QuantizationGrid& grid) {
  CanonicalMesh canon = canonical_bins(mesh, grid);
  MeshVocabulary vocab = MeshVocabulary::make(Scheme::block_patch, grid.resolution);
  TokenSequence seq{Scheme::block_patch, grid.resolution, {}};
  if (canon.faces.empty()) return seq;

  std::unordered_map<uint64_t, std::pair<int, int>> mesh_edge;
  mesh_edge.reserve(canon.faces.size() * 3 * 2);
  std::vector<std::vector<int>> vertex_faces(canon.vertices.size());
  for (size_t f = 0; f < canon.faces.size(); ++f) {
    const auto& face = canon.faces[f];
    for (int k = 0; k < 3; ++k) {
      mesh_edge.try_emplace(edge_key(face[k], face[(k + 1) % 3]),
                            std::make_pair(int(f), face[(k + 2) % 3]));
      vertex_faces[face[k]].push_back(int(f));
    }
  }

  std::vector<char> used(canon.faces.size(), 0);
  int64_t prev_block = -1;

  auto emit_vertex = [&](int vid, bool fuse_arity, uint32_t arity) {
    const QuantizedVertex& v = canon.vertices[vid];
    uint32_t block = vocab.block_token(v) - vocab.blocks.begin;
    if (int64_t(block) != prev_block) {
      seq.tokens.push_back(vocab.blocks.begin + block);
      prev_block = int64_t(block);
    }
    if (fuse_arity)
      seq.tokens.push_back(vocab.patch_token(arity, vocab.offset_value(v)));
    else
      seq.tokens.push_back(vocab.offset_token(v));
  };

  for (size_t f0 = 0; f0 < canon.faces.size(); ++f0) {
    if (used[f0]) continue;
    const auto& face = canon.faces[f0];

    // Center: the face vertex with the most unused incident faces.
    int center = face[0];
    int best = -1;
    for (int k = 0; k < 3; ++k) {
      int count = 0;
      for (int g : vertex_faces[face[k]]) count += !used[g];
      if (count > best || (count == best && face[k] < center)) {
        best = count;
        center = face[k];
      }
    }
    int pos = face[0] == center ? 0 : (face[1] == center ? 1 : 2);
    std::deque<int> ring = {face[(pos + 1) % 3], face[(pos + 2) % 3]};
    used[f0] = 1;
    uint32_t arity = 1;

    // Grow the fan right (across (center, ring.back())) then left.
    while (arity < kPatchMaxArity) {
      auto it = mesh_edge.find(edge_key(center, ring.back()));
      if (it == mesh_edge.end() || used[it->second.first]) break;
      used[it->second.first] = 1;
      ring.push_back(it->second.second);
      arity++;
    }
    while (arity < kPatchMaxArity) {
      auto it = mesh_edge.find(edge_key(ring.front(), center));
      if (it == mesh_edge.end() || used[it->second.first]) break;
      used[it->second.first] = 1;
      ring.push_front(it->second.second);
      arity++;
    }

    emit_vertex(center, true, arity);
    for (int r : ring) emit_vertex(r, false, 0);
  }
  return seq;
}

TokenSequence encode_mesh(const TriangleMesh& mesh, const QuantizationGrid& grid, Scheme scheme) {
  switch (scheme) {
    case Scheme::coordinate: return encode_coordinate(mesh, grid);
    case Scheme::compact: return encode_compact(mesh, grid);
    case Scheme::block_patch: return encode_block_patch(mesh, grid);
    default: fail(ErrorCode::validation, "encode_mesh: not a mesh scheme");
  }
}

// ---------------------------------------------------------------------------
// Streaming parser
// ---------------------------------------------------------------------------

struct MeshStreamParser::Impl {
  Scheme scheme;
  QuantizationGrid grid;
  MeshVocabulary vocab;
  size_t consumed = 0;

  std::unordered_map<uint64_t, int> bin_to_id;
  std::vector<QuantizedVertex> verts;
  std::vector<std::array<int, 3>> faces;

  // coordinate
  int32_t coord_buf[9];
  int coord_pos = 0;

  // compact
  enum class CState { component_start, header, control, payload, fallback_count, fallback_faces };
  CState cstate = CState::component_start;
  int32_t header_buf[9];
  int header_pos = 0;
  Control payload_kind = Control::C;
  int32_t payload_buf[3];
  int payload_pos = 0;
  std::vector<std::pair<int, int>> gates;
  std::pair<int, int> gate{-1, -1};
  EmittedComplex emitted;
  size_t emitted_faces = 0;
  uint32_t fb_digit = 0;
  int fb_digit_pos = 0;
  size_t fb_remaining = 0;
  int32_t fb_buf[9];
  int fb_pos = 0;

  // block_patch
  enum class BState { patch_start, want_patch, ring_any, ring_offset };
  BState bstate = BState::patch_start;
  int64_t prev_block = -1;
  int64_t pending_block = -1;
  int center_id = -1;
  uint32_t ring_needed = 0;
  std::vector<int> ring;

  Impl(Scheme s, int resolution)
      : scheme(s), grid(resolution), vocab(MeshVocabulary::make(s, resolution)) {
    require(s != Scheme::unified, ErrorCode::validation,
            "mesh parser: unified streams are parsed by the sequence module");
  }

  [[noreturn]] void err(const std::string& expected, const std::string& msg) const {
    throw TokenError(consumed, expected, msg);
  }

  int register_or_lookup(const QuantizedVertex& v) {
    auto [it, fresh] = bin_to_id.emplace(bin_key(v), int(verts.size()));
    if (fresh) verts.push_back(v);
    return it->second;
  }

  int32_t coord_bin(uint32_t tok, const char* what) {
    if (!vocab.coordinates.contains(tok))
      err("coordinate", std::string(what) + ": id " + std::to_string(tok) +
                            " is not a coordinate token");
    return int32_t(tok - vocab.coordinates.begin);
  }

  // --- compact helpers ---

  void advance() {
    while (!gates.empty()) {
      auto g = gates.back();
      if (emitted.has(g.first, g.second)) {
        gates.pop_back();
        continue;
      }
      gate = g;
      gates.pop_back();
      cstate = CState::control;
      return;
    }
    cstate = CState::component_start;
  }

  void complete_face(int x, int y, int w) {
    if (w < 0 || w == x || w == y) err("control", "face resolves to a degenerate triangle");
    if (!emitted.add_face(x, y, w))
      err("control", "face conflicts with an already decoded edge");
    faces.push_back({x, y, w});
    emitted_faces++;
    gates.push_back({x, w});
    gates.push_back({w, y});
    advance();
  }

  void feed_compact(uint32_t tok) {
    switch (cstate) {
      case CState::component_start: {
        if (vocab.coordinates.contains(tok)) {
          header_buf[0] = coord_bin(tok, "header");
          header_pos = 1;
          cstate = CState::header;
        } else if (vocab.controls.contains(tok) &&
                   Control(tok - vocab.controls.begin) == Control::B) {
          fb_digit_pos = 0;
          fb_digit = 0;
          cstate = CState::fallback_count;
        } else {
          err("coordinate or B", "component must start with a 9-coordinate header face "
                                 "or a B fallback marker");
        }
        break;
      }
      case CState::header: {
        header_buf[header_pos++] = coord_bin(tok, "header");
        if (header_pos < 9) break;
        int ids[3];
        for (int k = 0; k < 3; ++k)
          ids[k] = register_or_lookup(
              {header_buf[k * 3 + 0], header_buf[k * 3 + 1], header_buf[k * 3 + 2]});
        if (ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2])
          err("coordinate", "degenerate component header face");
        if (!emitted.add_face(ids[0], ids[1], ids[2]))
          err("coordinate", "header face conflicts with an already decoded edge");
        faces.push_back({ids[0], ids[1], ids[2]});
        emitted_faces++;
        gates.push_back({ids[1], ids[0]});
        gates.push_back({ids[2], ids[1]});
        gates.push_back({ids[0], ids[2]});
        advance();
        break;
      }
      case CState::control: {
        if (!vocab.controls.contains(tok))
          err("control", "id " + std::to_string(tok) + " is not a control token");
        Control c = Control(tok - vocab.controls.begin);
        auto [x, y] = gate;
        int limit = int(emitted_faces) + 2;
        switch (c) {
          case Control::B:
            advance();
            break;
          case Control::C:
          case Control::S:
            payload_kind = c;
            payload_pos = 0;
            cstate = CState::payload;
            break;
          case Control::R: {
            int w = emitted.rotate_head(y, x, limit);
            if (w < 0) err("control", "R has no fan-adjacent boundary vertex here");
            complete_face(x, y, w);
            break;
          }
          case Control::L: {
            int w = emitted.rotate_origin(x, y, limit);
            if (w < 0) err("control", "L has no fan-adjacent boundary vertex here");
            complete_face(x, y, w);
            break;
          }
          case Control::E: {
            int wr = emitted.rotate_head(y, x, limit);
            int wl = emitted.rotate_origin(x, y, limit);
            if (wr < 0 || wr != wl)
              err("control", "E requires both fan walks to agree on the closing vertex");
            complete_face(x, y, wr);
            break;
          }
        }
        break;
      }
      case CState::payload: {
        payload_buf[payload_pos++] = coord_bin(tok, "vertex payload");
        if (payload_pos < 3) break;
        QuantizedVertex v{payload_buf[0], payload_buf[1], payload_buf[2]};
        auto it = bin_to_id.find(bin_key(v));
        int w;
        if (payload_kind == Control::C) {
          if (it != bin_to_id.end())
            err("coordinate", "C names a vertex that was already visited");
          w = register_or_lookup(v);
        } else {
          if (it == bin_to_id.end())
            err("coordinate", "S names a vertex that was never visited");
          w = it->second;
        }
        complete_face(gate.first, gate.second, w);
        break;
      }
      case CState::fallback_count: {
        fb_digit = fb_digit * uint32_t(grid.resolution) + uint32_t(coord_bin(tok, "fallback count"));
        if (++fb_digit_pos < 2) break;
        if (fb_digit == 0) err("coordinate", "fallback block with zero faces");
        fb_remaining = fb_digit;
        fb_pos = 0;
        cstate = CState::fallback_faces;
        break;
      }
      case CState::fallback_faces: {
        fb_buf[fb_pos++] = coord_bin(tok, "fallback face");
        if (fb_pos < 9) break;
        fb_pos = 0;
        int ids[3];
        for (int k = 0; k < 3; ++k)
          ids[k] = register_or_lookup({fb_buf[k * 3 + 0], fb_buf[k * 3 + 1], fb_buf[k * 3 + 2]});
        if (ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2])
          err("coordinate", "degenerate fallback face");
        faces.push_back({ids[0], ids[1], ids[2]});
        if (--fb_remaining == 0) cstate = CState::component_start;
        break;
      }
    }
  }

  // --- block_patch helpers ---

  void begin_patch(int64_t block, uint32_t patch_tok) {
    uint32_t rel = patch_tok - vocab.patches.begin;
    uint32_t arity = rel / kOffsetsPerBlock + 1;
    uint32_t off = rel % kOffsetsPerBlock;
    QuantizedVertex v = vocab.vertex_from_block_offset(uint32_t(block), off);
    center_id = register_or_lookup(v);
    prev_block = block;
    ring.clear();
    ring_needed = arity + 1;
    bstate = BState::ring_any;
  }

  void ring_vertex(int64_t block, uint32_t offset_rel) {
    QuantizedVertex v = vocab.vertex_from_block_offset(uint32_t(block), offset_rel);
    int id = register_or_lookup(v);
    prev_block = block;
    ring.push_back(id);
    if (ring.size() < ring_needed) {
      bstate = BState::ring_any;
      return;
    }
    for (size_t i = 0; i + 1 < ring.size(); ++i) {
      if (center_id == ring[i] || center_id == ring[i + 1] || ring[i] == ring[i + 1])
        err("offset", "patch fan contains a degenerate face");
      faces.push_back({center_id, ring[i], ring[i + 1]});
    }
    bstate = BState::patch_start;
  }

  void feed_block(uint32_t tok) {
    switch (bstate) {
      case BState::patch_start: {
        if (vocab.blocks.contains(tok)) {
          pending_block = int64_t(tok - vocab.blocks.begin);
          bstate = BState::want_patch;
        } else if (vocab.patches.contains(tok)) {
          if (prev_block < 0)
            err("block", "the first vertex of the stream needs an explicit block id");
          begin_patch(prev_block, tok);
        } else {
          err("block or patch", "id " + std::to_string(tok) + " cannot start a patch");
        }
        break;
      }
      case BState::want_patch: {
        if (!vocab.patches.contains(tok))
          err("patch", "id " + std::to_string(tok) + " is not a patch token");
        begin_patch(pending_block, tok);
        break;
      }
      case BState::ring_any: {
        if (vocab.blocks.contains(tok)) {
          pending_block = int64_t(tok - vocab.blocks.begin);
          bstate = BState::ring_offset;
        } else if (vocab.offsets.contains(tok)) {
          ring_vertex(prev_block, tok - vocab.offsets.begin);
        } else {
          err("block or offset", "id " + std::to_string(tok) + " is not a ring vertex token");
        }
        break;
      }
      case BState::ring_offset: {
        if (!vocab.offsets.contains(tok))
          err("offset", "id " + std::to_string(tok) + " is not an offset token");
        ring_vertex(pending_block, tok - vocab.offsets.begin);
        break;
      }
    }
  }

  void feed(uint32_t tok) {
    if (tok >= vocab.size)
      err("in-vocabulary id", "id " + std::to_string(tok) + " is outside the vocabulary (size " +
                                  std::to_string(vocab.size) + ")");
    switch (scheme) {
      case Scheme::coordinate: {
        coord_buf[coord_pos++] = coord_bin(tok, "face coordinate");
        if (coord_pos == 9) {
          coord_pos = 0;
          int ids[3];
          for (int k = 0; k < 3; ++k)
            ids[k] = register_or_lookup(
                {coord_buf[k * 3 + 0], coord_buf[k * 3 + 1], coord_buf[k * 3 + 2]});
          faces.push_back({ids[0], ids[1], ids[2]});
        }
        break;
      }
      case Scheme::compact:
        feed_compact(tok);
        break;
      case Scheme::block_patch:
        feed_block(tok);
        break;
      default:
        err("mesh token", "unsupported scheme");
    }
    consumed++;
  }

  bool at_boundary() const {
    switch (scheme) {
      case Scheme::coordinate: return coord_pos == 0;
      case Scheme::compact: return cstate == CState::component_start;
      case Scheme::block_patch: return bstate == BState::patch_start;
      default: return false;
    }
  }

  TriangleMesh finish() {
    if (!at_boundary()) {
      std::string what = scheme == Scheme::coordinate ? "a complete 9-token face"
                         : scheme == Scheme::compact  ? "a complete component"
                                                      : "a complete patch";
      throw TokenError(consumed, what, "stream ends mid-structure");
    }
    CanonicalMesh canon = assemble_canonical(verts, faces);
    return mesh_from_bins(canon, grid);
  }
};

MeshStreamParser::MeshStreamParser(Scheme scheme, int resolution)
    : impl_(std::make_unique<Impl>(scheme, resolution)) {}
MeshStreamParser::MeshStreamParser(MeshStreamParser&&) noexcept = default;
MeshStreamParser& MeshStreamParser::operator=(MeshStreamParser&&) noexcept = default;
MeshStreamParser::~MeshStreamParser() = default;

void MeshStreamParser::feed(uint32_t token) { impl_->feed(token); }
bool MeshStreamParser::at_boundary() const { return impl_->at_boundary(); }
size_t MeshStreamParser::consumed() const { return impl_->consumed; }
TriangleMesh MeshStreamParser::finish() { return impl_->finish(); }

TriangleMesh decode(const TokenSequence& tokens) {
  MeshStreamParser parser(tokens.scheme, tokens.resolution);
  for (uint32_t t : tokens.tokens) parser.feed(t);
  return parser.finish();
}

CompressionReport compression_report(const std::vector<TriangleMesh>& corpus,
                                     const QuantizationGrid& grid) {
  require(!corpus.empty(), ErrorCode::validation, "compression_report: empty corpus");
  CompressionReport report;
  report.per_mesh.reserve(corpus.size());
  uint64_t totals[3] = {0, 0, 0};
  for (const TriangleMesh& mesh : corpus) {
    CompressionReport::MeshRow row;
    row.faces = canonical_bins(mesh, grid).faces.size();
    row.tokens[0] = encode_coordinate(mesh, grid).size();
    row.tokens[1] = encode_compact(mesh, grid).size();
    row.tokens[2] = encode_block_patch(mesh, grid).size();
    for (int s = 0; s < 3; ++s) totals[s] += row.tokens[s];
    report.total_faces += row.faces;
    report.per_mesh.push_back(row);
  }
  for (int s = 0; s < 3; ++s) {
    CompressionReport::SchemeRow row;
    row.scheme = Scheme(s);
    row.total_tokens = totals[s];
    row.mean_tokens_per_face =
        report.total_faces ? double(totals[s]) / double(report.total_faces) : 0.0;
    row.ratio_vs_coordinate = totals[0] ? double(totals[s]) / double(totals[0]) : 0.0;
    report.schemes.push_back(row);
  }
  return report;
}

}  // namespace armesh

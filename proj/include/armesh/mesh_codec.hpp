// Three lossless-to-quantization mesh tokenizers and their decoders.
//
//   coordinate:  9 tokens per face (3 vertices x 3 axis bins).
//   compact:     half-edge traversal with {C,L,R,S,E,B} control tokens;
//                coordinates appear once per first-visited vertex. A gate
//                stack is maintained identically by encoder and decoder, so
//                streams decode strictly left to right. Components whose
//                half-edge build reports non-manifold or inconsistently
//                oriented edges fall back to coordinate encoding, flagged by
//                B in component-start position followed by a 2-digit face
//                count in base N.
//   block_patch: vertices as (block, offset) over the (N/8)^3 x 8^3 grid
//                decomposition, faces fanned into patches around a shared
//                center vertex; patch token fuses arity with the center
//                offset; block ids repeat-elided.
//
// All decoders re-canonicalize, so decode(encode_s(m)) == canonicalize(m)
// exactly (integer bins, face sets) for every scheme s.

#pragma once

#include <memory>
#include <optional>

#include "armesh/mesh.hpp"
#include "armesh/quantize.hpp"
#include "armesh/vocab.hpp"

namespace armesh {

// Quantized canonical form: vertices sorted by (z,y,x) bin, faces rotated to
// lowest index first, sorted, exact duplicates removed, unreferenced vertices
// dropped. A deterministic function of the quantized geometry.
struct CanonicalMesh {
  std::vector<QuantizedVertex> vertices;
  std::vector<std::array<int, 3>> faces;

  bool operator==(const CanonicalMesh& o) const {
    return vertices == o.vertices && faces == o.faces;
  }
};

CanonicalMesh canonical_bins(const TriangleMesh& mesh, const QuantizationGrid& grid);
TriangleMesh mesh_from_bins(const CanonicalMesh& canon, const QuantizationGrid& grid);

// Errors with "empty after canonicalization" when nothing survives.
TriangleMesh canonicalize(const TriangleMesh& mesh, const QuantizationGrid& grid);

TokenSequence encode_coordinate(const TriangleMesh& mesh, const QuantizationGrid& grid);
TokenSequence encode_compact(const TriangleMesh& mesh, const QuantizationGrid& grid);
TokenSequence encode_block_patch(const TriangleMesh& mesh, const QuantizationGrid& grid);
TokenSequence encode_mesh(const TriangleMesh& mesh, const QuantizationGrid& grid, Scheme scheme);

// Strict one-pass decoder; empty streams decode to the empty mesh.
TriangleMesh decode(const TokenSequence& tokens);

// Incremental decoder usable as a prefix validator for generated streams.
class MeshStreamParser {
 public:
  MeshStreamParser(Scheme scheme, int resolution);
  MeshStreamParser(const MeshStreamParser&) = delete;
  MeshStreamParser& operator=(const MeshStreamParser&) = delete;
  MeshStreamParser(MeshStreamParser&&) noexcept;
  MeshStreamParser& operator=(MeshStreamParser&&) noexcept;
  ~MeshStreamParser();

  // Consumes one token; throws TokenError on any grammar violation.
  void feed(uint32_t token);
  // True when stopping here is grammatical (component/patch boundary).
  bool at_boundary() const;
  size_t consumed() const;
  // Finalizes into the canonical mesh; throws TokenError if !at_boundary().
  TriangleMesh finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct CompressionReport {
  struct SchemeRow {
    Scheme scheme;
    uint64_t total_tokens = 0;
    double mean_tokens_per_face = 0.0;
    double ratio_vs_coordinate = 0.0;  // pooled: total tokens / total coordinate tokens
  };
  struct MeshRow {
    uint64_t faces = 0;
    uint64_t tokens[3] = {0, 0, 0};  // indexed by Scheme
  };
  uint64_t total_faces = 0;
  std::vector<SchemeRow> schemes;
  std::vector<MeshRow> per_mesh;
};

CompressionReport compression_report(const std::vector<TriangleMesh>& corpus,
                                     const QuantizationGrid& grid);

}  // namespace armesh

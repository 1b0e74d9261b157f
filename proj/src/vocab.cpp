#include "armesh/vocab.hpp"

namespace armesh {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::coordinate: return "coordinate";
    case Scheme::compact: return "compact";
    case Scheme::block_patch: return "block_patch";
    case Scheme::unified: return "unified";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "coordinate" || name == "coord") return Scheme::coordinate;
  if (name == "compact") return Scheme::compact;
  if (name == "block_patch" || name == "block") return Scheme::block_patch;
  if (name == "unified") return Scheme::unified;
  fail(ErrorCode::validation, "unknown scheme: " + name);
}

MeshVocabulary MeshVocabulary::make(Scheme scheme, int resolution) {
  QuantizationGrid grid(resolution);  // validates resolution
  MeshVocabulary v;
  v.scheme = scheme;
  v.resolution = resolution;
  uint32_t n = uint32_t(resolution);
  switch (scheme) {
    case Scheme::coordinate:
      v.coordinates = {0, n};
      v.size = n;
      break;
    case Scheme::compact:
      v.coordinates = {0, n};
      v.controls = {n, n + kNumControls};
      v.size = n + kNumControls;  // 518 at N=512
      break;
    case Scheme::block_patch: {
      require(resolution % kBlockEdge == 0, ErrorCode::validation,
              "block_patch requires resolution divisible by 8");
      uint32_t nb = uint32_t(resolution / kBlockEdge);
      uint32_t nblocks = nb * nb * nb;
      v.blocks = {0, nblocks};
      v.offsets = {nblocks, nblocks + kOffsetsPerBlock};
      v.patches = {v.offsets.end, v.offsets.end + kPatchMaxArity * kOffsetsPerBlock};
      v.size = v.patches.end;  // 4096 + 512 + 71*512 = 40,960 at N=128
      break;
    }
    case Scheme::unified:
      fail(ErrorCode::validation, "unified is a container id, not a mesh vocabulary");
  }
  return v;
}

QuantizedVertex MeshVocabulary::vertex_from_block_offset(uint32_t block_id, uint32_t offset) const {
  uint32_t nb = uint32_t(blocks_per_axis());
  uint32_t bz = block_id % nb, by = (block_id / nb) % nb, bx = block_id / (nb * nb);
  uint32_t oz = offset % kBlockEdge, oy = (offset / kBlockEdge) % kBlockEdge,
           ox = offset / (kBlockEdge * kBlockEdge);
  return {int32_t(bx * kBlockEdge + ox), int32_t(by * kBlockEdge + oy),
          int32_t(bz * kBlockEdge + oz)};
}

std::string MeshVocabulary::describe(uint32_t id) const {
  if (coordinates.size() && coordinates.contains(id))
    return "coord:" + std::to_string(id - coordinates.begin);
  if (controls.size() && controls.contains(id)) {
    static const char* names[kNumControls] = {"C", "L", "R", "S", "E", "B"};
    return std::string("ctrl:") + names[id - controls.begin];
  }
  if (blocks.size() && blocks.contains(id)) return "block:" + std::to_string(id - blocks.begin);
  if (offsets.size() && offsets.contains(id)) return "offset:" + std::to_string(id - offsets.begin);
  if (patches.size() && patches.contains(id)) {
    uint32_t rel = id - patches.begin;
    return "patch:arity=" + std::to_string(rel / kOffsetsPerBlock + 1) +
           ",offset=" + std::to_string(rel % kOffsetsPerBlock);
  }
  return "out-of-vocab:" + std::to_string(id);
}

}  // namespace armesh

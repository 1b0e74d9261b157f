// Token vocabulary layouts shared by the pose and mesh codecs.
//
//   coordinate: N coordinate tokens, 9 per face.
//   compact:    N coordinate tokens + 6 control tokens {C,L,R,S,E,B}
//               (518 ids at N=512).
//   block_patch: vertex = (block, offset) over an (N/8)^3 x 8^3 decomposition,
//               faces fanned into patches; fused (arity x center-offset) tokens
//               fill the id space to 40,960 at N=128.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "armesh/common.hpp"
#include "armesh/quantize.hpp"

namespace armesh {

enum class Scheme : uint8_t {
  coordinate = 0,
  compact = 1,
  block_patch = 2,
  unified = 3,  // container id for <bos> pose <sep> mesh <eos> streams
};

// Grammar failure at a specific token offset.
class TokenError : public Error {
 public:
  TokenError(size_t offset, std::string expected, std::string message)
      : Error(ErrorCode::parse, "token " + std::to_string(offset) + ": " + message +
                                    " [expected: " + expected + "]"),
        offset_(offset),
        expected_(std::move(expected)),
        message_(std::move(message)) {}

  size_t offset() const { return offset_; }
  const std::string& expected_class() const { return expected_; }
  const std::string& message() const { return message_; }

 private:
  size_t offset_;
  std::string expected_;
  std::string message_;
};

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

// Control tokens of the compact scheme, in id order after the coordinates.
enum class Control : uint32_t {
  C = 0,  // face with a first-visit vertex; 3 coordinate tokens follow
  L = 1,  // third vertex = boundary neighbor found by rotating at the gate origin
  R = 2,  // third vertex = boundary neighbor found by rotating at the gate head
  S = 3,  // revisited vertex elsewhere; 3 coordinate tokens name it
  E = 4,  // both edges already adjacent; closes a hole
  B = 5,  // gate answered: mesh boundary. At component-start: fallback marker
};
constexpr uint32_t kNumControls = 6;

constexpr int kBlockEdge = 8;                         // offsets per axis inside a block
constexpr uint32_t kOffsetsPerBlock = 8 * 8 * 8;      // 512
constexpr uint32_t kPatchMaxArity = 71;               // fused arity range [1, 71]

struct TokenRange {
  uint32_t begin = 0, end = 0;  // [begin, end)
  bool contains(uint32_t id) const { return id >= begin && id < end; }
  uint32_t size() const { return end - begin; }
};

struct MeshVocabulary {
  Scheme scheme = Scheme::coordinate;
  int resolution = 512;

  TokenRange coordinates;  // coordinate/compact
  TokenRange controls;     // compact
  TokenRange blocks;       // block_patch
  TokenRange offsets;      // block_patch
  TokenRange patches;      // block_patch fused (arity, center offset)
  uint32_t size = 0;

  static MeshVocabulary make(Scheme scheme, int resolution);

  int blocks_per_axis() const { return resolution / kBlockEdge; }

  uint32_t coordinate_token(int32_t bin) const { return coordinates.begin + uint32_t(bin); }
  uint32_t control_token(Control c) const { return controls.begin + uint32_t(c); }

  uint32_t block_token(const QuantizedVertex& v) const {
    int nb = blocks_per_axis();
    uint32_t bx = uint32_t(v.ix / kBlockEdge), by = uint32_t(v.iy / kBlockEdge),
             bz = uint32_t(v.iz / kBlockEdge);
    return blocks.begin + (bx * uint32_t(nb) + by) * uint32_t(nb) + bz;
  }
  uint32_t offset_value(const QuantizedVertex& v) const {
    uint32_t ox = uint32_t(v.ix % kBlockEdge), oy = uint32_t(v.iy % kBlockEdge),
             oz = uint32_t(v.iz % kBlockEdge);
    return (ox * kBlockEdge + oy) * kBlockEdge + oz;
  }
  uint32_t offset_token(const QuantizedVertex& v) const { return offsets.begin + offset_value(v); }
  uint32_t patch_token(uint32_t arity, uint32_t center_offset) const {
    return patches.begin + (arity - 1) * kOffsetsPerBlock + center_offset;
  }

  QuantizedVertex vertex_from_block_offset(uint32_t block_id, uint32_t offset) const;

  // Token class name for debug dumps and parse diagnostics.
  std::string describe(uint32_t id) const;
};

struct TokenSequence {
  Scheme scheme = Scheme::coordinate;
  int resolution = 512;
  std::vector<uint32_t> tokens;

  size_t size() const { return tokens.size(); }
};

}  // namespace armesh

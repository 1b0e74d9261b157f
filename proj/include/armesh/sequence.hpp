// The unified per-object autoregressive stream:
//   <bos> [pose_seq] <sep> [mesh_seq] <eos>
// Pose arity is tied to the mesh scheme (block_patch -> 16 block/offset
// tokens, coordinate/compact -> 24 coordinate tokens).

#pragma once

#include "armesh/mesh_codec.hpp"
#include "armesh/pose.hpp"
#include "armesh/vocab.hpp"

namespace armesh {

struct UnifiedVocabulary {
  MeshVocabulary base;
  uint32_t bos = 0, sep = 0, eos = 0;  // appended after the base id space
  uint32_t size = 0;

  static UnifiedVocabulary make(Scheme mesh_scheme, int resolution);

  PoseStyle pose_style() const {
    return base.scheme == Scheme::block_patch ? PoseStyle::block_offset : PoseStyle::per_axis;
  }
  int pose_arity() const { return pose_token_count(pose_style()); }
};

struct ObjectRecord {
  TokenSequence pose_tokens;
  TokenSequence mesh_tokens;

  bool operator==(const ObjectRecord& o) const {
    return pose_tokens.tokens == o.pose_tokens.tokens &&
           mesh_tokens.tokens == o.mesh_tokens.tokens;
  }
};

// Total length = |pose| + |mesh| + 3. Pose arity and token classes are
// validated here; the mesh stream must decode cleanly.
TokenSequence assemble(const ObjectRecord& record, const UnifiedVocabulary& vocab);

// Strict grammar check; every failure carries the offending token offset.
ObjectRecord parse(const TokenSequence& tokens, const UnifiedVocabulary& vocab);

struct PrefixStatus {
  enum class Kind { valid_prefix, complete, invalid };
  Kind kind = Kind::valid_prefix;
  size_t offset = 0;    // first offending token when invalid
  std::string reason;   // empty unless invalid

  bool ok() const { return kind != Kind::invalid; }
};

// Classifies any prefix of the grammar; every prefix of an assemble() output
// is valid_prefix or complete. Usable as a logit-masking oracle.
PrefixStatus validate_prefix(const TokenSequence& tokens, const UnifiedVocabulary& vocab);

// The ARMT container stores only "unified", not the base scheme; recover it by
// checking the sequence against each mesh scheme. Errors when no scheme (or
// more than one) accepts the stream.
Scheme infer_unified_base(const TokenSequence& tokens);

}  // namespace armesh

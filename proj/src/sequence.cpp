#include "armesh/sequence.hpp"

namespace armesh {

UnifiedVocabulary UnifiedVocabulary::make(Scheme mesh_scheme, int resolution) {
  UnifiedVocabulary v;
  v.base = MeshVocabulary::make(mesh_scheme, resolution);
  v.bos = v.base.size;
  v.sep = v.base.size + 1;
  v.eos = v.base.size + 2;
  v.size = v.base.size + 3;
  return v;
}

namespace {

// Returns a diagnostic when the token cannot sit at pose position `i`.
const char* pose_token_issue(const UnifiedVocabulary& vocab, int i, uint32_t tok) {
  if (vocab.pose_style() == PoseStyle::per_axis) {
    if (!vocab.base.coordinates.contains(tok)) return "pose token must be a coordinate id";
    return nullptr;
  }
  if (i % 2 == 0) {
    if (!vocab.base.blocks.contains(tok)) return "pose token must be a block id";
  } else {
    if (!vocab.base.offsets.contains(tok)) return "pose token must be an offset id";
  }
  return nullptr;
}

}  // namespace

TokenSequence assemble(const ObjectRecord& record, const UnifiedVocabulary& vocab) {
  int arity = vocab.pose_arity();
  require(int(record.pose_tokens.size()) == arity, ErrorCode::validation,
          "assemble: pose sequence must be " + std::to_string(arity) + " tokens, got " +
              std::to_string(record.pose_tokens.size()));
  require(record.mesh_tokens.resolution == vocab.base.resolution &&
              record.pose_tokens.resolution == vocab.base.resolution,
          ErrorCode::validation, "assemble: resolution mismatch");
  for (int i = 0; i < arity; ++i) {
    if (const char* issue = pose_token_issue(vocab, i, record.pose_tokens.tokens[i]))
      fail(ErrorCode::validation, std::string("assemble: ") + issue);
  }
  {
    MeshStreamParser parser(vocab.base.scheme, vocab.base.resolution);
    for (uint32_t t : record.mesh_tokens.tokens) parser.feed(t);
    require(parser.at_boundary(), ErrorCode::validation,
            "assemble: mesh sequence ends mid-structure");
  }

  TokenSequence out{Scheme::unified, vocab.base.resolution, {}};
  out.tokens.reserve(record.pose_tokens.size() + record.mesh_tokens.size() + 3);
  out.tokens.push_back(vocab.bos);
  out.tokens.insert(out.tokens.end(), record.pose_tokens.tokens.begin(),
                    record.pose_tokens.tokens.end());
  out.tokens.push_back(vocab.sep);
  out.tokens.insert(out.tokens.end(), record.mesh_tokens.tokens.begin(),
                    record.mesh_tokens.tokens.end());
  out.tokens.push_back(vocab.eos);
  return out;
}

ObjectRecord parse(const TokenSequence& tokens, const UnifiedVocabulary& vocab) {
  PrefixStatus status = validate_prefix(tokens, vocab);
  if (status.kind == PrefixStatus::Kind::invalid)
    throw TokenError(status.offset, "unified grammar", status.reason);
  if (status.kind == PrefixStatus::Kind::valid_prefix)
    throw TokenError(tokens.size(), "more tokens",
                     "sequence is an incomplete prefix (missing structure through <eos>)");

  int arity = vocab.pose_arity();
  ObjectRecord record;
  record.pose_tokens.scheme =
      vocab.pose_style() == PoseStyle::per_axis ? Scheme::coordinate : Scheme::block_patch;
  record.pose_tokens.resolution = vocab.base.resolution;
  record.pose_tokens.tokens.assign(tokens.tokens.begin() + 1,
                                   tokens.tokens.begin() + 1 + arity);
  record.mesh_tokens.scheme = vocab.base.scheme;
  record.mesh_tokens.resolution = vocab.base.resolution;
  record.mesh_tokens.tokens.assign(tokens.tokens.begin() + arity + 2, tokens.tokens.end() - 1);
  return record;
}

PrefixStatus validate_prefix(const TokenSequence& tokens, const UnifiedVocabulary& vocab) {
  int arity = vocab.pose_arity();
  enum class State { bos, pose, sep, mesh, done };
  State state = State::bos;
  int pose_seen = 0;
  MeshStreamParser parser(vocab.base.scheme, vocab.base.resolution);

  auto invalid = [&](size_t offset, std::string reason) {
    return PrefixStatus{PrefixStatus::Kind::invalid, offset, std::move(reason)};
  };

  for (size_t i = 0; i < tokens.size(); ++i) {
    uint32_t tok = tokens.tokens[i];
    switch (state) {
      case State::bos:
        if (tok != vocab.bos) return invalid(i, "sequence must start with <bos>");
        state = arity > 0 ? State::pose : State::sep;
        break;
      case State::pose: {
        if (const char* issue = pose_token_issue(vocab, pose_seen, tok))
          return invalid(i, issue);
        if (++pose_seen == arity) state = State::sep;
        break;
      }
      case State::sep:
        if (tok != vocab.sep) return invalid(i, "expected <sep> after the pose sequence");
        state = State::mesh;
        break;
      case State::mesh:
        if (tok == vocab.eos) {
          if (!parser.at_boundary())
            return invalid(i, "<eos> inside an incomplete mesh structure");
          state = State::done;
          break;
        }
        try {
          parser.feed(tok);
        } catch (const TokenError& e) {
          return invalid(i, e.what());
        }
        break;
      case State::done:
        return invalid(i, "trailing token after <eos>");
    }
  }
  if (state == State::done) return {PrefixStatus::Kind::complete, 0, {}};
  return {PrefixStatus::Kind::valid_prefix, 0, {}};
}

Scheme infer_unified_base(const TokenSequence& tokens) {
  std::vector<Scheme> hits;
  for (Scheme s : {Scheme::coordinate, Scheme::compact, Scheme::block_patch}) {
    UnifiedVocabulary vocab = UnifiedVocabulary::make(s, tokens.resolution);
    if (validate_prefix(tokens, vocab).kind == PrefixStatus::Kind::complete) hits.push_back(s);
  }
  require(!hits.empty(), ErrorCode::parse,
          "unified stream does not parse under any mesh scheme");
  require(hits.size() == 1, ErrorCode::parse,
          "unified stream is ambiguous between mesh schemes; pass the scheme explicitly");
  return hits[0];
}

}  // namespace armesh

#include <cstring>
#include <fstream>

#include "armesh/io.hpp"
#include "armesh/sequence.hpp"

namespace armesh::io {

TokenSequence read_tokens(const path& file) {
  std::ifstream in(file, std::ios::in | std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open for reading: " + file.string());
  char magic[4];
  uint8_t scheme;
  uint16_t resolution;
  uint32_t count;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&scheme), 1);
  in.read(reinterpret_cast<char*>(&resolution), 2);
  in.read(reinterpret_cast<char*>(&count), 4);
  require(in.good() && std::memcmp(magic, "ARMT", 4) == 0, ErrorCode::io,
          "not an ARMT token file: " + file.string());
  require(scheme <= uint8_t(Scheme::unified), ErrorCode::parse,
          "unknown scheme id " + std::to_string(scheme) + " in " + file.string());
  TokenSequence seq;
  seq.scheme = Scheme(scheme);
  seq.resolution = resolution;
  seq.tokens.resize(count);
  in.read(reinterpret_cast<char*>(seq.tokens.data()), std::streamsize(count) * 4);
  require(in.good(), ErrorCode::io, "truncated token data: " + file.string());
  QuantizationGrid grid(seq.resolution);  // validates the stored resolution
  return seq;
}

void write_tokens(const path& file, const TokenSequence& seq) {
  std::ofstream out(file, std::ios::out | std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot open for writing: " + file.string());
  uint8_t scheme = uint8_t(seq.scheme);
  uint16_t resolution = uint16_t(seq.resolution);
  uint32_t count = uint32_t(seq.tokens.size());
  out.write("ARMT", 4);
  out.write(reinterpret_cast<const char*>(&scheme), 1);
  out.write(reinterpret_cast<const char*>(&resolution), 2);
  out.write(reinterpret_cast<const char*>(&count), 4);
  out.write(reinterpret_cast<const char*>(seq.tokens.data()), std::streamsize(count) * 4);
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

void write_tokens_jsonl(const path& file, const TokenSequence& seq) {
  std::ofstream out(file);
  require(out.good(), ErrorCode::io, "cannot open for writing: " + file.string());
  if (seq.scheme == Scheme::unified) {
    // Annotate through the base vocabulary plus the three specials.
    UnifiedVocabulary uv = UnifiedVocabulary::make(infer_unified_base(seq), seq.resolution);
    for (size_t i = 0; i < seq.tokens.size(); ++i) {
      uint32_t id = seq.tokens[i];
      std::string cls = id == uv.bos   ? "bos"
                        : id == uv.sep ? "sep"
                        : id == uv.eos ? "eos"
                                       : uv.base.describe(id);
      out << "{\"i\": " << i << ", \"id\": " << id << ", \"class\": \"" << cls << "\"}\n";
    }
  } else {
    MeshVocabulary vocab = MeshVocabulary::make(seq.scheme, seq.resolution);
    for (size_t i = 0; i < seq.tokens.size(); ++i)
      out << "{\"i\": " << i << ", \"id\": " << seq.tokens[i] << ", \"class\": \""
          << vocab.describe(seq.tokens[i]) << "\"}\n";
  }
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

}  // namespace armesh::io

#include <doctest.h>

#include "armesh/mesh_codec.hpp"
#include "armesh/sequence.hpp"
#include "support.hpp"

using namespace armesh;

namespace {

const QuantizationGrid kGrid512{512};
const QuantizationGrid kGrid128{128};

bool roundtrips(const TriangleMesh& mesh, const QuantizationGrid& grid, Scheme scheme) {
  TokenSequence seq = encode_mesh(mesh, grid, scheme);
  return canonical_bins(decode(seq), grid) == canonical_bins(mesh, grid);
}

}  // namespace

TEST_CASE("canonicalize is idempotent and permutation-invariant") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    TriangleMesh mesh = test::fuzz_mesh(seed);
    CanonicalMesh canon = canonical_bins(mesh, kGrid512);
    TriangleMesh once = mesh_from_bins(canon, kGrid512);
    CHECK(canonical_bins(once, kGrid512) == canon);
    TriangleMesh shuffled = test::permute_mesh(mesh, seed * 31 + 7);
    CHECK(canonical_bins(shuffled, kGrid512) == canon);
  }
}

TEST_CASE("canonicalize merges bins and drops degenerates") {
  TriangleMesh m;
  double eps = 1e-6;  // far below one bin at N=128
  m.vertices = {{0, 0, 0}, {eps, 0, 0}, {0.5, 0, 0}, {0.5, 0.5, 0}, {0, 0.5, 0}};
  m.faces = {{0, 2, 3}, {1, 3, 4}, {0, 1, 2}};  // last face collapses after merge
  CanonicalMesh canon = canonical_bins(m, kGrid128);
  CHECK(canon.vertices.size() == 4);
  CHECK(canon.faces.size() == 2);

  TriangleMesh flat;
  flat.vertices = {{0, 0, 0}, {eps, 0, 0}, {2 * eps, 0, 0}};
  flat.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(canonicalize(flat, kGrid128), Error);
}

TEST_CASE("coordinate token counts") {
  CHECK(encode_coordinate(test::make_triangle(), kGrid512).size() == 9);
  CHECK(encode_coordinate(test::make_tetrahedron(), kGrid512).size() == 36);
  TriangleMesh cube = test::make_cube_quads();
  CHECK(encode_coordinate(cube, kGrid512).size() == 9 * 12);
}

TEST_CASE("coordinate roundtrip on a cube") {
  TriangleMesh cube = test::fit_into_cube(test::make_cube_quads());
  TokenSequence seq = encode_coordinate(cube, kGrid512);
  TriangleMesh back = decode(seq);
  CHECK(back.vertex_count() == 8);
  CHECK(back.face_count() == 12);
  CHECK(canonical_bins(back, kGrid512) == canonical_bins(cube, kGrid512));
}

TEST_CASE("compact vocabulary and stream shape") {
  MeshVocabulary v = MeshVocabulary::make(Scheme::compact, 512);
  CHECK(v.size == 518);

  // Single triangle: 9-coordinate header + 3 boundary answers.
  TokenSequence seq = encode_compact(test::fit_into_cube(test::make_triangle()), kGrid512);
  CHECK(seq.size() == 12);
  uint32_t b = v.control_token(Control::B);
  CHECK(seq.tokens[9] == b);
  CHECK(seq.tokens[10] == b);
  CHECK(seq.tokens[11] == b);
}

TEST_CASE("all schemes round-trip the corpus losslessly") {
  auto corpus = test::make_corpus();
  REQUIRE(corpus.size() >= 20);
  for (const auto& [name, mesh] : corpus) {
    INFO("mesh ", name);
    for (Scheme s : {Scheme::coordinate, Scheme::compact, Scheme::block_patch}) {
      INFO("scheme ", scheme_name(s));
      CHECK(roundtrips(mesh, kGrid512, s));
      CHECK(roundtrips(mesh, kGrid128, s));
    }
  }
}

TEST_CASE("all schemes round-trip fuzzed meshes") {
  for (uint64_t seed = 100; seed < 200; ++seed) {
    TriangleMesh mesh = test::fuzz_mesh(seed);
    INFO("seed ", seed);
    for (Scheme s : {Scheme::coordinate, Scheme::compact, Scheme::block_patch})
      CHECK(roundtrips(mesh, kGrid512, s));
  }
}

TEST_CASE("non-manifold components take the flagged fallback and round-trip") {
  TriangleMesh nm = test::fit_into_cube(test::make_nonmanifold_fan());
  TokenSequence seq = encode_compact(nm, kGrid512);
  MeshVocabulary v = MeshVocabulary::make(Scheme::compact, 512);
  CHECK(seq.tokens[0] == v.control_token(Control::B));  // fallback marker up front
  CHECK(roundtrips(nm, kGrid512, Scheme::compact));
}

TEST_CASE("every emitted token is in its vocabulary") {
  for (uint64_t seed = 300; seed < 330; ++seed) {
    TriangleMesh mesh = test::fuzz_mesh(seed);
    for (Scheme s : {Scheme::coordinate, Scheme::compact, Scheme::block_patch}) {
      MeshVocabulary v = MeshVocabulary::make(s, 128);
      TokenSequence seq = encode_mesh(mesh, kGrid128, s);
      for (uint32_t t : seq.tokens) CHECK(t < v.size);
    }
  }
}

TEST_CASE("compact stays within the structural length bound") {
  // Control overhead <= 2 per face + 2 per component over the coordinate cost.
  for (const auto& [name, mesh] : test::make_corpus()) {
    CanonicalMesh canon = canonical_bins(mesh, kGrid512);
    TriangleMesh shell = mesh_from_bins(canon, kGrid512);
    FaceComponents fc = face_components(shell, build_half_edge(shell));
    size_t coordinate = encode_coordinate(mesh, kGrid512).size();
    size_t compact = encode_compact(mesh, kGrid512).size();
    size_t block = encode_block_patch(mesh, kGrid512).size();
    size_t bound = coordinate + 2 * canon.faces.size() + 2 * size_t(fc.count);
    INFO("mesh ", name);
    CHECK(compact <= bound);
    CHECK(block <= bound);
  }
}

TEST_CASE("decoder rejects malformed streams with offsets") {
  TriangleMesh mesh = test::fit_into_cube(test::make_tetrahedron());
  TokenSequence seq = encode_compact(mesh, kGrid512);

  // Truncation fails exactly at the cut (unless the cut lands on a component
  // boundary, where the shorter stream is simply a smaller valid mesh).
  for (size_t cut = 1; cut < seq.size(); ++cut) {
    TokenSequence trunc{seq.scheme, seq.resolution,
                        {seq.tokens.begin(), seq.tokens.begin() + cut}};
    MeshStreamParser probe(seq.scheme, seq.resolution);
    for (uint32_t t : trunc.tokens) probe.feed(t);
    if (probe.at_boundary()) {
      CHECK_NOTHROW(decode(trunc));
    } else {
      try {
        decode(trunc);
        FAIL("expected truncation error at ", cut);
      } catch (const TokenError& e) {
        CHECK(e.offset() == cut);
      }
    }
  }

  // Out-of-vocabulary id.
  TokenSequence bad = seq;
  bad.tokens[3] = 9999;
  try {
    decode(bad);
    FAIL("expected parse error");
  } catch (const TokenError& e) {
    CHECK(e.offset() == 3);
  }

  // Empty stream decodes to the empty mesh.
  TokenSequence empty{Scheme::compact, 512, {}};
  CHECK(decode(empty).face_count() == 0);
}

TEST_CASE("block_patch first vertex requires an explicit block") {
  MeshVocabulary v = MeshVocabulary::make(Scheme::block_patch, 128);
  TokenSequence seq{Scheme::block_patch, 128, {v.patch_token(1, 0)}};
  CHECK_THROWS_AS(decode(seq), TokenError);
}

TEST_CASE("hole-punched meshes with complex boundaries still round-trip") {
  // Deleting random face subsets creates multi-loop boundaries and fragments,
  // the situations that force S/E handling in the traversal.
  Rng rng(400);
  auto corpus = test::make_corpus();
  for (int trial = 0; trial < 60; ++trial) {
    const TriangleMesh& base = corpus[rng.next_below(corpus.size())].mesh;
    if (base.face_count() < 8) continue;
    TriangleMesh holed;
    holed.vertices = base.vertices;
    for (const auto& f : base.faces)
      if (rng.next_below(5) != 0) holed.faces.push_back(f);
    if (holed.faces.empty()) continue;
    for (Scheme s : {Scheme::compact, Scheme::block_patch})
      CHECK(roundtrips(holed, kGrid512, s));
  }
}

TEST_CASE("every compact control token is exercised by the corpus") {
  MeshVocabulary v = MeshVocabulary::make(Scheme::compact, 512);
  size_t counts[kNumControls] = {0};
  auto census = [&](const TriangleMesh& m) {
    TokenSequence seq = encode_compact(m, kGrid512);
    for (uint32_t t : seq.tokens)
      if (v.controls.contains(t)) counts[t - v.controls.begin]++;
  };
  for (const auto& [name, mesh] : test::make_corpus()) census(mesh);
  for (uint64_t seed = 0; seed < 150; ++seed) census(test::fuzz_mesh(seed));
  for (size_t i = 0; i < kNumControls; ++i) {
    INFO("control index ", i);
    CHECK(counts[i] > 0);
  }
}

TEST_CASE("decoders survive adversarial token streams") {
  // Random streams must parse or raise TokenError; nothing else.
  Rng rng(500);
  for (int trial = 0; trial < 3000; ++trial) {
    Scheme scheme = Scheme(rng.next_below(3));
    int res = rng.next_below(2) ? 512 : 128;
    MeshVocabulary v = MeshVocabulary::make(scheme, res);
    TokenSequence seq{scheme, res, {}};
    size_t len = rng.next_below(120);
    for (size_t i = 0; i < len; ++i) {
      // Mostly in-vocabulary ids with occasional garbage.
      uint32_t id = rng.next_below(8) ? uint32_t(rng.next_below(v.size))
                                      : uint32_t(rng.next_below(v.size + 64));
      seq.tokens.push_back(id);
    }
    try {
      TriangleMesh mesh = decode(seq);
      CHECK(mesh.vertices.size() <= 3 * seq.size());
    } catch (const TokenError& e) {
      CHECK(e.offset() <= seq.size());
    }
  }
}

TEST_CASE("compression report on a single triangle") {
  std::vector<TriangleMesh> corpus{test::fit_into_cube(test::make_triangle())};
  CompressionReport report = compression_report(corpus, kGrid512);
  CHECK(report.schemes[0].ratio_vs_coordinate == doctest::Approx(1.0));
  CHECK(report.total_faces == 1);
  // Deterministic: a second run produces the same table.
  CompressionReport again = compression_report(corpus, kGrid512);
  CHECK(report.schemes[1].total_tokens == again.schemes[1].total_tokens);
  CHECK(report.schemes[2].total_tokens == again.schemes[2].total_tokens);
}

TEST_CASE("compression beats the coordinate baseline on manifold meshes") {
  std::vector<TriangleMesh> corpus;
  for (const auto& [name, mesh] : test::make_corpus())
    if (canonical_bins(mesh, kGrid512).faces.size() >= 20) corpus.push_back(mesh);
  CompressionReport report = compression_report(corpus, kGrid512);
  CHECK(report.schemes[1].ratio_vs_coordinate < 1.0);
  CHECK(report.schemes[2].ratio_vs_coordinate < 1.0);
}

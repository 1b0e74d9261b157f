// Acceptance suite: every release gate runs here, one pass/fail line each,
// with its runtime budget enforced. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "armesh/assembly.hpp"
#include "armesh/geometry.hpp"
#include "armesh/mesh_codec.hpp"
#include "armesh/metrics.hpp"
#include "armesh/preprocess.hpp"
#include "armesh/sequence.hpp"
#include "support.hpp"

using namespace armesh;

namespace {

struct Suite {
  int failed = 0;

  void run(const char* name, double budget_seconds, const std::function<void()>& body) {
    using clock = std::chrono::steady_clock;
    auto start = clock::now();
    std::string error;
    try {
      body();
    } catch (const std::exception& e) {
      error = e.what();
    }
    double elapsed = std::chrono::duration<double>(clock::now() - start).count();
    if (error.empty() && elapsed > budget_seconds) {
      std::ostringstream os;
      os << "runtime " << elapsed << "s exceeds budget " << budget_seconds << "s";
      error = os.str();
    }
    if (error.empty()) {
      std::printf("[PASS] %-60s (%6.2fs)\n", name, elapsed);
    } else {
      failed++;
      std::printf("[FAIL] %-60s (%6.2fs): %s\n", name, elapsed, error.c_str());
    }
    std::fflush(stdout);
  }
};

void expect(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// --- criterion bodies -------------------------------------------------------

void c1_pose_token_counts() {
  Rng rng(101);
  QuantizationGrid g512(512), g128(128);
  for (int i = 0; i < 1000; ++i) {
    GravityBox box = test::fuzz_box(rng);
    expect(encode_pose(box, g512, PoseStyle::per_axis).size() == 24,
           "per-axis pose must emit 24 tokens");
    expect(encode_pose(box, g128, PoseStyle::block_offset).size() == 16,
           "block-offset pose must emit 16 tokens");
  }
}

void c2_fit_exactness() {
  Rng rng(102);
  CornerSet local = canonical_corners();
  for (int i = 0; i < 10000; ++i) {
    GravityBox box;
    box.center = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    box.scale = {rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)};
    box.yaw = rng.uniform(-kPi, kPi);
    AffineTransform truth = affine_from_box(box);
    CornerSet global;
    for (int k = 0; k < 8; ++k) global.corners[k] = truth.apply(local.corners[k]);

    AffineFit fit = fit_affine(local, global);
    expect(fit.residual < 1e-12, "fit residual " + fmt(fit.residual) + " >= 1e-12");
    for (int r = 0; r < 3; ++r) {
      expect(std::abs(fit.transform.translation[r] - truth.translation[r]) < 1e-9,
             "translation entry error >= 1e-9");
      for (int c = 0; c < 3; ++c)
        expect(std::abs(fit.transform.linear.at(r, c) - truth.linear.at(r, c)) < 1e-9,
               "linear entry error >= 1e-9");
    }
  }
}

void c3_pose_roundtrip_bound() {
  Rng rng(103);
  CornerSet local = canonical_corners();
  for (int res : {128, 512}) {
    QuantizationGrid grid(res);
    double bound = 1.0 / res + 1e-12;
    for (int i = 0; i < 10000; ++i) {
      GravityBox box = test::fuzz_box(rng);
      PoseStyle style = i % 2 == 0 ? PoseStyle::per_axis : PoseStyle::block_offset;
      TokenSequence seq = encode_pose(box, grid, style);
      CornerSet decoded = decode_corners(seq, grid, style);
      AffineFit fit = fit_affine(local, decoded);
      for (int k = 0; k < 8; ++k) {
        Vec3 applied = fit.transform.apply(local.corners[k]);
        for (int a = 0; a < 3; ++a)
          expect(std::abs(applied[a] - decoded.corners[k][a]) <= bound,
                 "reconstructed corner drifts more than 1/N from the decoded corner");
      }
    }
  }
}

void c4_tokenizer_losslessness() {
  auto check = [](const TriangleMesh& mesh, const QuantizationGrid& grid,
                  const std::string& what) {
    CanonicalMesh want = canonical_bins(mesh, grid);
    for (Scheme s : {Scheme::coordinate, Scheme::compact, Scheme::block_patch}) {
      TokenSequence seq = encode_mesh(mesh, grid, s);
      CanonicalMesh got = canonical_bins(decode(seq), grid);
      expect(got == want,
             what + " fails lossless round-trip under " + scheme_name(s));
    }
  };

  QuantizationGrid g512(512), g128(128);
  auto corpus = test::make_corpus();
  expect(corpus.size() >= 20, "bundled corpus must hold at least 20 meshes");
  for (const auto& [name, mesh] : corpus) {
    check(mesh, g512, "corpus mesh " + name);
    check(mesh, g128, "corpus mesh " + name);
  }
  for (uint64_t seed = 0; seed < 1000; ++seed)
    check(test::fuzz_mesh(seed), g512, "fuzz mesh seed " + std::to_string(seed));
}

void c5_vocabulary_sizes() {
  expect(MeshVocabulary::make(Scheme::compact, 512).size == 518,
         "compact vocabulary at N=512 must total 518 ids");
  expect(MeshVocabulary::make(Scheme::block_patch, 128).size == 40960,
         "block-patch vocabulary at N=128 must total 40,960 ids");
}

void c6_compression_ratios() {
  PreprocessConfig config;
  config.hausdorff_samples = 20000;
  config.seed = 11;

  std::vector<TriangleMesh> processed;
  size_t total_faces = 0;
  for (const auto& [name, mesh] : test::make_corpus()) {
    CandidateResult selected = preprocess_asset(mesh, config);
    expect(selected.faces <= 4000, "preprocess left more than 4000 faces on " + name);
    total_faces += selected.faces;
    processed.push_back(test::fit_into_cube(selected.mesh));
  }
  CompressionReport report = compression_report(processed, QuantizationGrid(512));
  double compact_ratio = report.schemes[1].ratio_vs_coordinate;
  double block_ratio = report.schemes[2].ratio_vs_coordinate;
  std::printf("       compression: compact %.3f (<= 0.60), block-patch %.3f (<= 0.40); "
              "mean faces/asset %.0f\n",
              compact_ratio, block_ratio, double(total_faces) / double(processed.size()));
  expect(compact_ratio <= 0.60, "compact ratio " + fmt(compact_ratio) + " above 0.60");
  expect(block_ratio <= 0.40, "block-patch ratio " + fmt(block_ratio) + " above 0.40");
}

void c7_metric_oracle_equivalence() {
  Rng rng(107);
  for (int pair = 0; pair < 500; ++pair) {
    size_t na = 50 + rng.next_below(1951);
    size_t nb = 50 + rng.next_below(1951);
    PointCloud a, b;
    for (size_t i = 0; i < na; ++i)
      a.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    for (size_t i = 0; i < nb; ++i)
      b.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});

    std::vector<double> fast = nearest_sq_dists(a, b);
    double sum_fast = 0.0, sum_brute = 0.0;
    for (size_t i = 0; i < na; ++i) {
      double brute = test::brute_nn_sq(a.points[i], b.points);
      expect(std::abs(fast[i] - brute) <= 1e-12, "accelerated NN deviates from brute force");
      sum_fast += fast[i];
      sum_brute += brute;
    }
    expect(std::abs(sum_fast / na - sum_brute / na) <= 1e-12, "mean NN distance deviates");
  }
}

void c8_box_iou_against_monte_carlo() {
  // Exact special cases first.
  GravityBox unit;
  unit.scale = {1, 1, 1};
  expect(box_iou(unit, unit) == 1.0, "identical boxes must give IoU exactly 1");
  GravityBox apart = unit;
  apart.center = {4, 0, 0};
  expect(box_iou(unit, apart) == 0.0, "disjoint boxes must give IoU exactly 0");

  Rng rng(108);
  for (int pair = 0; pair < 100; ++pair) {
    GravityBox a;
    a.center = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
    a.scale = {rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2)};
    a.yaw = rng.uniform(-kPi, kPi);
    GravityBox b = a;
    b.center += Vec3{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
    b.scale = {rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2)};
    b.yaw = rng.uniform(-kPi, kPi);

    double exact = box_iou(a, b);

    // Monte Carlo volume oracle over the union bounding box.
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const GravityBox* box : {&a, &b}) {
      CornerSet c = corners_from_box(*box);
      for (const Vec3& p : c.corners) {
        lo = min3(lo, p);
        hi = max3(hi, p);
      }
    }
    auto inside = [](const GravityBox& box, double px, double py, double pz) {
      double dx = px - box.center.x, dy = py - box.center.y, dz = pz - box.center.z;
      double c = std::cos(box.yaw), s = std::sin(box.yaw);
      double lx = c * dx - s * dz;
      double lz = s * dx + c * dz;
      return std::abs(lx) <= box.scale.x * 0.5 && std::abs(dy) <= box.scale.y * 0.5 &&
             std::abs(lz) <= box.scale.z * 0.5;
    };
    Rng mc(mix_seed(9090, uint64_t(pair)));
    size_t inter = 0, uni = 0;
    constexpr size_t kSamples = 10000000;
    for (size_t i = 0; i < kSamples; ++i) {
      double px = mc.uniform(lo.x, hi.x);
      double py = mc.uniform(lo.y, hi.y);
      double pz = mc.uniform(lo.z, hi.z);
      bool ina = inside(a, px, py, pz);
      bool inb = inside(b, px, py, pz);
      inter += ina && inb;
      uni += ina || inb;
    }
    double estimate = uni == 0 ? 0.0 : double(inter) / double(uni);
    expect(std::abs(exact - estimate) <= 0.003,
           "IoU " + fmt(exact) + " vs Monte Carlo " + fmt(estimate) + " differ by more than 0.003");
  }
}

void c9_alignment_invariance() {
  std::vector<SceneObject> gt;
  auto corpus = test::make_corpus();
  const char* picks[5] = {"icosphere2", "cube_quads", "torus", "pyramid", "cylinder_capped"};
  double offset = 0.0;
  for (const char* pick : picks) {
    for (const auto& [name, mesh] : corpus) {
      if (name != pick) continue;
      SceneObject obj{name, mesh};
      for (Vec3& v : obj.mesh.vertices) v += Vec3{offset, 0.1 * offset, -0.3 * offset};
      offset += 1.7;
      gt.push_back(std::move(obj));
    }
  }
  // Imperfect prediction: drop one object, perturb another.
  std::vector<SceneObject> pred(gt.begin(), gt.end() - 1);
  for (Vec3& v : pred[0].mesh.vertices) v += Vec3{0.07, -0.02, 0.01};

  MetricConfig config;
  config.samples_per_mesh = 10000;
  config.seed = 40;
  std::string baseline = evaluate_scene(pred, gt, config).to_json();

  Rng rng(109);
  for (int trial = 0; trial < 20; ++trial) {
    double s = rng.uniform(0.1, 10.0);
    Vec3 t{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    std::vector<SceneObject> moved = pred;
    for (auto& o : moved)
      for (Vec3& v : o.mesh.vertices) v = v * s + t;
    std::string report = evaluate_scene(moved, gt, config).to_json();
    expect(report == baseline, "report changed under global similarity (trial " +
                                   std::to_string(trial) + ")");
  }
}

void c10_preprocess_contract() {
  TriangleMesh sphere = test::make_icosphere(3);
  expect(sphere.face_count() == 1280, "icosphere subdivision count drifted");
  TriangleMesh dec = quadric_decimate(sphere, 800);
  expect(dec.face_count() <= 800, "quadric decimation missed the face target");

  auto candidate = [](double h, size_t faces) {
    CandidateResult c;
    c.hausdorff = h;
    c.faces = faces;
    return c;
  };
  // Both under tau: fewer faces wins.
  expect(select_best({candidate(0.005, 800), candidate(0.003, 2000)}, 0.01).faces == 800,
         "below-tau branch must pick the fewest faces");
  // None under tau: lowest distance wins.
  expect(select_best({candidate(0.02, 800), candidate(0.05, 2000)}, 0.01).hausdorff == 0.02,
         "above-tau branch must pick the lowest distance");
  // Single candidate: itself.
  expect(select_best({candidate(0.9, 7)}, 0.01).faces == 7,
         "single candidate must select itself");
}

void c11_backprojection_roundtrip() {
  CameraIntrinsics k{525.0, 525.0, 319.5, 239.5, 640, 480};
  for (int pattern = 0; pattern < 3; ++pattern) {
    DepthMap depth{640, 480, std::vector<float>(640 * 480)};
    for (int v = 0; v < 480; ++v)
      for (int u = 0; u < 640; ++u) {
        double d = pattern == 0   ? 2.0
                   : pattern == 1 ? 0.5 + 0.01 * u + 0.003 * v
                                  : 1.0 + std::sin(u * 0.1) * std::cos(v * 0.07) * 0.4 + 0.6;
        depth.values[size_t(v) * 640 + u] = float(d);
      }
    PointCloud cloud = back_project(depth, k);
    expect(cloud.size() == 640u * 480u, "full frame must back-project every pixel");
    for (size_t i = 0; i < cloud.size(); ++i) {
      Vec2 uv = project(k, cloud.points[i]);
      expect(std::abs(uv.x - cloud.pixels[i].x) <= 1e-9 &&
                 std::abs(uv.y - cloud.pixels[i].y) <= 1e-9,
             "project(back_project) deviates past 1e-9");
    }
  }
}

void c12_grammar() {
  Rng rng(112);
  size_t mutation_sequences = 0;
  for (int i = 0; i < 1000; ++i) {
    Scheme scheme = i % 3 == 0   ? Scheme::coordinate
                    : i % 3 == 1 ? Scheme::compact
                                 : Scheme::block_patch;
    int res = scheme == Scheme::block_patch ? 128 : 512;
    QuantizationGrid grid(res);
    UnifiedVocabulary vocab = UnifiedVocabulary::make(scheme, res);

    TriangleMesh mesh;
    for (uint64_t seed = uint64_t(i) * 7 + 1;; ++seed) {
      mesh = test::fuzz_mesh(seed);
      if (canonical_bins(mesh, grid).faces.size() <= 30) break;
    }
    ObjectRecord record;
    record.pose_tokens = encode_pose(test::fuzz_box(rng), grid, vocab.pose_style());
    record.mesh_tokens = encode_mesh(mesh, grid, scheme);
    TokenSequence seq = assemble(record, vocab);

    // parse(assemble(r)) == r
    ObjectRecord back = parse(seq, vocab);
    expect(back == record, "parse does not invert assemble");

    // One full scan proves every prefix is reachable without failure; spot
    // checks exercise the per-prefix API directly.
    expect(validate_prefix(seq, vocab).kind == PrefixStatus::Kind::complete,
           "assembled sequence must validate as complete");
    if (i % 10 == 0) {
      for (size_t len = 0; len <= seq.size(); ++len) {
        TokenSequence prefix{Scheme::unified, res,
                             {seq.tokens.begin(), seq.tokens.begin() + len}};
        PrefixStatus st = validate_prefix(prefix, vocab);
        expect(st.kind != PrefixStatus::Kind::invalid,
               "prefix of a valid sequence flagged invalid at " + std::to_string(len));
        expect((len == seq.size()) == (st.kind == PrefixStatus::Kind::complete),
               "completion status wrong at prefix " + std::to_string(len));
      }
    }

    // Mutation rejection with consistent offsets on a subset (runtime-bound).
    if (i % 5 != 0) continue;
    mutation_sequences++;
    auto check_mutation = [&](const TokenSequence& mutated) {
      PrefixStatus st = validate_prefix(mutated, vocab);
      if (st.kind == PrefixStatus::Kind::complete) {
        parse(mutated, vocab);  // benign (same token class): must parse
        return;
      }
      size_t want_offset =
          st.kind == PrefixStatus::Kind::invalid ? st.offset : mutated.size();
      try {
        parse(mutated, vocab);
        throw std::runtime_error("malformed mutation accepted by parse");
      } catch (const TokenError& e) {
        expect(e.offset() == want_offset,
               "parse offset " + std::to_string(e.offset()) + " != first-invalid offset " +
                   std::to_string(want_offset));
      }
    };

    for (size_t pos = 0; pos < seq.size(); ++pos) {
      TokenSequence del = seq;
      del.tokens.erase(del.tokens.begin() + pos);
      check_mutation(del);
    }
    uint32_t candidates[5] = {vocab.bos, vocab.sep, vocab.eos, 0, vocab.size + 17};
    for (size_t pos = 0; pos < seq.size(); ++pos) {
      for (uint32_t cand : candidates) {
        if (seq.tokens[pos] == cand) continue;
        TokenSequence sub = seq;
        sub.tokens[pos] = cand;
        check_mutation(sub);
      }
    }
  }
  expect(mutation_sequences >= 150, "mutation coverage too small");
}

}  // namespace

int main() {
  Suite suite;
  std::printf("armesh acceptance suite\n");
  suite.run("1. pose sequence lengths 24 (per-axis) / 16 (block-offset)", 1.0,
            c1_pose_token_counts);
  suite.run("2. least-squares fit exact on 10k gravity-aligned transforms", 10.0,
            c2_fit_exactness);
  suite.run("3. pose roundtrip within 1/N per axis at N=128/512", 30.0,
            c3_pose_roundtrip_bound);
  suite.run("4. tokenizer losslessness on corpus + 1000 fuzzed meshes", 120.0,
            c4_tokenizer_losslessness);
  suite.run("5. vocabulary sizes 518 (compact) / 40,960 (block-patch)", 1.0,
            c5_vocabulary_sizes);
  suite.run("6. compression ratios <= 0.60 compact / <= 0.40 block-patch", 120.0,
            c6_compression_ratios);
  suite.run("7. accelerated metrics equal O(n^2) brute force to 1e-12", 60.0,
            c7_metric_oracle_equivalence);
  suite.run("8. box IoU matches 1e7-sample Monte Carlo within 0.003", 120.0,
            c8_box_iou_against_monte_carlo);
  suite.run("9. scene report bit-identical under global similarity", 60.0,
            c9_alignment_invariance);
  suite.run("10. preprocess face targets and tau selection rule", 30.0,
            c10_preprocess_contract);
  suite.run("11. project(back_project) identity on 640x480 frames", 5.0,
            c11_backprojection_roundtrip);
  suite.run("12. grammar roundtrip, prefix monotonicity, mutation rejection", 30.0,
            c12_grammar);

  if (suite.failed) {
    std::printf("%d criteria FAILED\n", suite.failed);
    return 1;
  }
  std::printf("all 12 criteria passed\n");
  return 0;
}

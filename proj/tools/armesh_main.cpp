// armesh CLI: batch front end over the library. Exit codes: 0 ok,
// 2 validation, 3 parse, 4 io, 5 internal. Results go to stdout, diagnostics
// to stderr as one JSON object.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "armesh/assembly.hpp"
#include "armesh/io.hpp"
#include "armesh/mesh_codec.hpp"
#include "armesh/metrics.hpp"
#include "armesh/preprocess.hpp"
#include "armesh/sequence.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace armesh;

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

std::vector<fs::path> collect_meshes(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorCode::io, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".obj" || ext == ".ply") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  require(!files.empty(), ErrorCode::io, "no .obj/.ply files under " + dir.string());
  return files;
}

// Runs fn(i) over [0, n) with a bounded worker count; exceptions are
// collected and the first one rethrown after the pool drains.
void parallel_for(size_t n, unsigned jobs, const std::function<void(size_t)>& fn) {
  jobs = std::max(1u, std::min(jobs, unsigned(n == 0 ? 1 : n)));
  if (jobs == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct RunConfig {
  int resolution = 512;
  std::string scheme = "compact";
  uint64_t seed = 0;
  MetricConfig metric;
  PreprocessConfig preprocess;
};

RunConfig load_run_config(const std::string& file) {
  RunConfig cfg;
  if (file.empty()) return cfg;
  std::ifstream in(file);
  require(in.good(), ErrorCode::io, "cannot open config: " + file);
  json j;
  try {
    in >> j;
    if (j.contains("resolution")) cfg.resolution = j["resolution"].get<int>();
    if (j.contains("scheme")) cfg.scheme = j["scheme"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("metric")) {
      const json& m = j["metric"];
      if (m.contains("fscore_threshold"))
        cfg.metric.fscore_threshold = m["fscore_threshold"].get<double>();
      if (m.contains("samples_per_mesh"))
        cfg.metric.samples_per_mesh = m["samples_per_mesh"].get<int>();
    }
    if (j.contains("preprocess")) {
      const json& p = j["preprocess"];
      if (p.contains("quant_levels"))
        cfg.preprocess.quant_levels = p["quant_levels"].get<std::vector<int>>();
      if (p.contains("face_targets"))
        cfg.preprocess.face_targets = p["face_targets"].get<std::vector<int>>();
      if (p.contains("hausdorff_tau"))
        cfg.preprocess.hausdorff_tau = p["hausdorff_tau"].get<double>();
      if (p.contains("hausdorff_samples"))
        cfg.preprocess.hausdorff_samples = p["hausdorff_samples"].get<size_t>();
      if (p.contains("planar_angle_tol"))
        cfg.preprocess.planar_angle_tol = p["planar_angle_tol"].get<double>();
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("config: ") + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_tokenize(const std::string& mesh_path, const std::string& scheme_name, int res,
                 bool normalize, const std::string& out, const std::string& jsonl) {
  TriangleMesh mesh = io::read_mesh(mesh_path);
  QuantizationGrid grid(res);
  if (normalize) {
    // Raw assets live in metric units; tokenization expects the canonical
    // [-1,1] frame. The frame is printed so the placement isn't lost.
    NormalizationFrame frame = compute_unit_cube_frame(mesh.vertices);
    mesh = apply_frame(frame, mesh);
    std::printf("normalized: center (%.9g %.9g %.9g), half_extent %.9g\n", frame.center.x,
                frame.center.y, frame.center.z, frame.half_extent);
  }
  Scheme scheme = scheme_from_name(scheme_name);
  TokenSequence seq = encode_mesh(mesh, grid, scheme);
  TokenSequence baseline =
      scheme == Scheme::coordinate ? seq : encode_coordinate(mesh, grid);
  io::write_tokens(out, seq);
  if (!jsonl.empty()) io::write_tokens_jsonl(jsonl, seq);
  size_t faces = canonical_bins(mesh, grid).faces.size();
  std::printf("%zu tokens (%zu faces, ratio %.3f vs coordinate)\n", seq.size(), faces,
              baseline.size() ? double(seq.size()) / double(baseline.size()) : 0.0);
  return 0;
}

int cmd_detokenize(const std::string& tok_path, const std::string& out) {
  TokenSequence seq = io::read_tokens(tok_path);
  TriangleMesh mesh;
  if (seq.scheme == Scheme::unified) {
    UnifiedVocabulary vocab = UnifiedVocabulary::make(infer_unified_base(seq), seq.resolution);
    DecodedObject decoded = decode_object(seq, vocab, QuantizationGrid(seq.resolution));
    mesh = std::move(decoded.mesh);
  } else {
    mesh = decode(seq);
  }
  io::write_mesh(out, mesh);
  std::printf("%zu vertices, %zu faces -> %s\n", mesh.vertex_count(), mesh.face_count(),
              out.c_str());
  return 0;
}

int cmd_encode_pose(const std::string& box_path, const std::string& style_name, int res,
                    const std::string& out) {
  GravityBox box = io::read_box_json(box_path);
  QuantizationGrid grid(res);
  TokenSequence seq = encode_pose(box, grid, pose_style_from_name(style_name));
  io::write_tokens(out, seq);
  std::printf("%zu pose tokens -> %s\n", seq.size(), out.c_str());
  return 0;
}

int cmd_decode_pose(const std::string& tok_path) {
  TokenSequence seq = io::read_tokens(tok_path);
  PoseStyle style =
      seq.scheme == Scheme::block_patch ? PoseStyle::block_offset : PoseStyle::per_axis;
  QuantizationGrid grid(seq.resolution);
  CornerSet corners = decode_corners(seq, grid, style);
  AffineFit fit = fit_affine(canonical_corners(), corners);
  AffineTransform transform = inflate_degenerate_columns(fit.transform, grid.bin_width());
  GravityBox box = box_from_affine(transform);

  json j;
  j["corners"] = json::parse(io::corners_to_json(corners));
  json linear = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) linear.push_back(transform.linear.at(r, c));
  j["transform"] = {{"linear", linear},
                    {"translation", {transform.translation.x, transform.translation.y,
                                     transform.translation.z}}};
  j["residual"] = fit.residual;
  j["box"] = {{"center", {box.center.x, box.center.y, box.center.z}},
              {"scale", {box.scale.x, box.scale.y, box.scale.z}},
              {"yaw", box.yaw}};
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_backproject(const std::string& depth_path, const std::string& intrinsics_path,
                    const std::string& mask_path, const std::string& rle_path,
                    const std::string& instance, const std::string& fmap_path,
                    double pgm_scale, int points, uint64_t seed, const std::string& out) {
  DepthMap depth = io::read_depth(depth_path, pgm_scale);
  CameraIntrinsics k = io::read_intrinsics_json(intrinsics_path);
  require(mask_path.empty() || rle_path.empty(), ErrorCode::validation,
          "--mask and --rle are mutually exclusive");
  InstanceMask mask;
  PointCloud cloud;
  if (!mask_path.empty()) {
    mask = io::read_mask_pgm(mask_path);
    cloud = back_project(depth, k, &mask);
  } else if (!rle_path.empty()) {
    require(!instance.empty(), ErrorCode::validation, "--rle requires --instance <id>");
    auto records = io::read_rle_masks(rle_path);
    bool found = false;
    for (auto& [id, m] : records) {
      if (id != instance) continue;
      mask = std::move(m);
      found = true;
      break;
    }
    require(found, ErrorCode::validation, "instance '" + instance + "' not in " + rle_path);
    cloud = back_project(depth, k, &mask);
  } else {
    cloud = back_project(depth, k, nullptr);
  }
  // Typical working densities: 4,096 or 8,192 per object, 16,384 per scene.
  if (points > 0) cloud = sample_points(cloud, size_t(points), seed);
  if (!fmap_path.empty()) {
    FeatureMap fm = io::read_fmap(fmap_path);
    cloud.features = gather_features(fm, cloud.pixels, k.width, k.height);
    cloud.feature_dim = fm.channels;
    FeatureMap flat{int(cloud.size()), 1, fm.channels, cloud.features};
    io::write_fmap(out + ".feat", flat);
  }
  io::write_cloud_ply(out, cloud);
  std::printf("%zu points -> %s\n", cloud.size(), out.c_str());
  return 0;
}

int cmd_preprocess(const std::string& in_dir, const std::string& out_dir,
                   const std::string& config_path, uint64_t seed, unsigned jobs) {
  RunConfig cfg = load_run_config(config_path);
  cfg.preprocess.seed = seed;
  std::vector<fs::path> files = collect_meshes(in_dir);
  std::vector<std::string> lines(files.size());

  parallel_for(files.size(), jobs, [&](size_t i) {
    fs::path rel = fs::relative(files[i], in_dir);
    fs::path out_path = fs::path(out_dir) / rel;
    fs::create_directories(out_path.parent_path());
    TriangleMesh mesh = io::read_mesh(files[i]);
    CandidateResult selected = preprocess_asset(mesh, cfg.preprocess);
    io::write_mesh(out_path, selected.mesh);
    json sidecar{{"quant_level", selected.quant_level},
                 {"face_target", selected.face_target},
                 {"hausdorff", selected.hausdorff},
                 {"faces", selected.faces}};
    std::ofstream sc(out_path.string() + ".json");
    require(sc.good(), ErrorCode::io, "cannot write sidecar for " + out_path.string());
    sc << sidecar.dump(2) << "\n";
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%-40s q=%-5d target=%-5d faces=%-6zu hausdorff=%.6f",
                  rel.string().c_str(), selected.quant_level, selected.face_target,
                  selected.faces, selected.hausdorff);
    lines[i] = buf;
  });
  for (const std::string& l : lines) std::printf("%s\n", l.c_str());
  return 0;
}

std::vector<SceneObject> load_scene(const fs::path& manifest_path) {
  SceneManifest manifest = io::read_manifest(manifest_path);
  ComposedScene scene = compose_scene(manifest, manifest_path.parent_path());
  // Split the composed scene back into per-object meshes for the metric suite.
  std::vector<SceneObject> objects(scene.ids.size());
  for (size_t i = 0; i < scene.ids.size(); ++i) objects[i].id = scene.ids[i];
  std::vector<std::unordered_map<int, int>> vmap(scene.ids.size());
  for (size_t f = 0; f < scene.mesh.faces.size(); ++f) {
    uint32_t oid = scene.face_object[f];
    auto& obj = objects[oid];
    std::array<int, 3> g;
    for (int k = 0; k < 3; ++k) {
      int v = scene.mesh.faces[f][k];
      auto [it, fresh] = vmap[oid].emplace(v, int(obj.mesh.vertices.size()));
      if (fresh) obj.mesh.vertices.push_back(scene.mesh.vertices[v]);
      g[k] = it->second;
    }
    obj.mesh.faces.push_back(g);
  }
  return objects;
}

int cmd_eval(const std::string& pred_path, const std::string& gt_path,
             const std::string& config_path, const std::string& out_json, uint64_t seed,
             int samples, double threshold) {
  RunConfig cfg = load_run_config(config_path);
  if (seed) cfg.metric.seed = seed;
  if (samples > 0) cfg.metric.samples_per_mesh = samples;
  if (threshold > 0) cfg.metric.fscore_threshold = threshold;

  std::vector<SceneObject> pred = load_scene(pred_path);
  std::vector<SceneObject> gt = load_scene(gt_path);
  ScoreReport report = evaluate_scene(pred, gt, cfg.metric);
  if (!out_json.empty()) {
    std::ofstream out(out_json);
    require(out.good(), ErrorCode::io, "cannot write report: " + out_json);
    out << report.to_json() << "\n";
  }
  std::printf("%s\n%s", report.to_json().c_str(), report.to_table().c_str());
  return 0;
}

int cmd_roundtrip(const std::string& dir, const std::string& scheme_arg, int res,
                  bool normalize, unsigned jobs) {
  QuantizationGrid grid(res);
  std::vector<fs::path> files = collect_meshes(dir);
  std::vector<Scheme> schemes;
  if (scheme_arg == "all") {
    schemes = {Scheme::coordinate, Scheme::compact, Scheme::block_patch};
  } else {
    schemes = {scheme_from_name(scheme_arg)};
  }

  std::vector<std::string> failures(files.size());
  parallel_for(files.size(), jobs, [&](size_t i) {
    TriangleMesh mesh = io::read_mesh(files[i]);
    if (normalize) mesh = apply_frame(compute_unit_cube_frame(mesh.vertices), mesh);
    CanonicalMesh want = canonical_bins(mesh, grid);
    for (Scheme s : schemes) {
      TokenSequence seq = encode_mesh(mesh, grid, s);
      CanonicalMesh got = canonical_bins(decode(seq), grid);
      if (!(got == want)) {
        failures[i] += std::string(failures[i].empty() ? "" : ", ") + scheme_name(s);
      }
    }
  });

  size_t failed = 0;
  for (size_t i = 0; i < files.size(); ++i) {
    if (failures[i].empty()) continue;
    failed++;
    std::printf("FAIL %s [%s]\n", files[i].string().c_str(), failures[i].c_str());
  }
  std::printf("%zu/%zu assets round-trip losslessly\n", files.size() - failed, files.size());
  require(failed == 0, ErrorCode::internal,
          std::to_string(failed) + " assets failed the lossless round-trip");
  return 0;
}

int cmd_stats(const std::string& dir) {
  std::vector<fs::path> files = collect_meshes(dir);
  std::vector<TriangleMesh> meshes;
  meshes.reserve(files.size());
  for (const auto& f : files) meshes.push_back(io::read_mesh(f));
  MeshStats stats = mesh_stats(meshes);
  std::printf("%-48s %10s %10s\n", "asset", "|F|", "|V|");
  for (size_t i = 0; i < files.size(); ++i)
    std::printf("%-48s %10llu %10llu\n", files[i].filename().string().c_str(),
                (unsigned long long)stats.per_mesh[i].faces,
                (unsigned long long)stats.per_mesh[i].vertices);
  std::printf("%-48s %10llu %10llu\n", "total", (unsigned long long)stats.total_faces,
              (unsigned long long)stats.total_vertices);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"armesh: tokenization codecs, pose recovery, metrics, and mesh preprocessing"};
  app.require_subcommand(1);

  std::string mesh_path, tok_path, out, jsonl, scheme = "compact", style = "axis";
  std::string box_path, depth_path, intrinsics_path, mask_path, rle_path, instance, fmap_path;
  std::string in_dir, out_dir, config_path, pred_path, gt_path, out_json;
  int res = 512, samples = 0;
  double pgm_scale = 1.0, threshold = 0.0;
  uint64_t seed = 0;
  unsigned jobs = 1;
  bool normalize = false;

  auto* tokenize = app.add_subcommand("tokenize", "encode a mesh into a token stream");
  tokenize->add_option("mesh", mesh_path)->required();
  tokenize->add_option("--scheme", scheme, "coord|compact|block");
  tokenize->add_option("--res", res, "quantization resolution");
  tokenize->add_flag("--normalize", normalize,
                     "map the mesh into the canonical unit cube first");
  tokenize->add_option("-o,--out", out)->required();
  tokenize->add_option("--jsonl", jsonl, "annotated debug dump");

  auto* detokenize = app.add_subcommand("detokenize", "decode a token stream into a mesh");
  detokenize->add_option("tokens", tok_path)->required();
  detokenize->add_option("-o,--out", out)->required();

  auto* encode_pose_cmd = app.add_subcommand("encode-pose", "tokenize a gravity-aligned box");
  encode_pose_cmd->add_option("box", box_path)->required();
  encode_pose_cmd->add_option("--style", style, "axis|block");
  encode_pose_cmd->add_option("--res", res);
  encode_pose_cmd->add_option("-o,--out", out)->required();

  auto* decode_pose_cmd = app.add_subcommand("decode-pose", "decode pose tokens and fit the transform");
  decode_pose_cmd->add_option("tokens", tok_path)->required();

  auto* backproject_cmd = app.add_subcommand("backproject", "depth map to point cloud");
  backproject_cmd->add_option("depth", depth_path)->required();
  backproject_cmd->add_option("intrinsics", intrinsics_path)->required();
  backproject_cmd->add_option("--mask", mask_path, "8-bit PGM instance mask");
  backproject_cmd->add_option("--rle", rle_path, "RLE mask sidecar (use with --instance)");
  backproject_cmd->add_option("--instance", instance, "instance id inside the RLE sidecar");
  backproject_cmd->add_option("--features", fmap_path, "FMAP feature grid");
  backproject_cmd->add_option("--pgm-scale", pgm_scale, "millimeter scale for 16-bit PGM depth");
  backproject_cmd->add_option("--points", samples,
                              "subsample to this many points (0 = keep all valid pixels)");
  backproject_cmd->add_option("--seed", seed, "subsampling seed");
  backproject_cmd->add_option("-o,--out", out)->required();

  auto* preprocess_cmd = app.add_subcommand("preprocess", "asset decimation pipeline");
  preprocess_cmd->add_option("in_dir", in_dir)->required();
  preprocess_cmd->add_option("out_dir", out_dir)->required();
  preprocess_cmd->add_option("--config", config_path, "RunConfig JSON");
  preprocess_cmd->add_option("--seed", seed);
  preprocess_cmd->add_option("--jobs", jobs);

  auto* eval_cmd = app.add_subcommand("eval", "score predicted scene against ground truth");
  eval_cmd->add_option("--pred", pred_path)->required();
  eval_cmd->add_option("--gt", gt_path)->required();
  eval_cmd->add_option("--config", config_path, "RunConfig JSON");
  eval_cmd->add_option("-o,--out", out_json, "write the JSON report here too");
  eval_cmd->add_option("--seed", seed);
  eval_cmd->add_option("--samples", samples, "points sampled per mesh");
  eval_cmd->add_option("--threshold", threshold, "f-score distance threshold");

  auto* roundtrip_cmd = app.add_subcommand("roundtrip", "assert lossless encode/decode over a directory");
  roundtrip_cmd->add_option("mesh_dir", in_dir)->required();
  roundtrip_cmd->add_option("--scheme", scheme, "coord|compact|block|all");
  roundtrip_cmd->add_option("--res", res);
  roundtrip_cmd->add_flag("--normalize", normalize,
                          "map each mesh into the canonical unit cube first");
  roundtrip_cmd->add_option("--jobs", jobs);

  auto* stats_cmd = app.add_subcommand("stats", "face/vertex count table");
  stats_cmd->add_option("mesh_dir", in_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (tokenize->parsed()) return cmd_tokenize(mesh_path, scheme, res, normalize, out, jsonl);
    if (detokenize->parsed()) return cmd_detokenize(tok_path, out);
    if (encode_pose_cmd->parsed()) return cmd_encode_pose(box_path, style, res, out);
    if (decode_pose_cmd->parsed()) return cmd_decode_pose(tok_path);
    if (backproject_cmd->parsed())
      return cmd_backproject(depth_path, intrinsics_path, mask_path, rle_path, instance,
                             fmap_path, pgm_scale, samples, seed, out);
    if (preprocess_cmd->parsed())
      return cmd_preprocess(in_dir, out_dir, config_path, seed, jobs);
    if (eval_cmd->parsed())
      return cmd_eval(pred_path, gt_path, config_path, out_json, seed, samples, threshold);
    if (roundtrip_cmd->parsed()) return cmd_roundtrip(in_dir, scheme, res, normalize, jobs);
    if (stats_cmd->parsed()) return cmd_stats(in_dir);
  } catch (const Error& e) {
    nlohmann::json err{{"error",
                        {{"code", int(e.code())}, {"kind", e.kind()}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return int(e.code());
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", {{"code", 5}, {"kind", "internal"}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 5;
  }
  return 0;
}

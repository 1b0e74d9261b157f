// Evaluation suite: Chamfer distance, single-direction Chamfer, F-score,
// gravity-aligned 3D box IoU, scene alignment, mesh statistics, and the
// scene-level evaluation driver.
//
// Conventions (stated here because the literature varies):
//  - chamfer(a,b) = 0.5 * (mean_a d^2(a->b) + mean_b d^2(b->a)), squared
//    distances, symmetric mean;
//  - chamfer_single(gt, pred) = mean over gt of d^2(gt->pred), i.e. coverage
//    of the ground truth;
//  - F-score thresholds unsquared distances; percentages in [0,100].

#pragma once

#include <string>
#include <vector>

#include "armesh/geometry.hpp"
#include "armesh/kdtree.hpp"
#include "armesh/mesh.hpp"
#include "armesh/pose.hpp"

namespace armesh {

struct MetricConfig {
  double fscore_threshold = 0.002;
  int samples_per_mesh = 10000;
  uint64_t seed = 0;

  void validate() const {
    require(fscore_threshold > 0, ErrorCode::validation, "metric config: threshold must be > 0");
    require(samples_per_mesh >= 1, ErrorCode::validation, "metric config: samples must be >= 1");
  }
};

// Squared distance from every point of `a` to its nearest neighbor in `b`.
// Spatial-index accelerated; equals the O(n^2) scan exactly.
std::vector<double> nearest_sq_dists(const PointCloud& a, const PointCloud& b);

double chamfer(const PointCloud& a, const PointCloud& b);
double chamfer_single(const PointCloud& gt, const PointCloud& pred);

struct FScoreResult {
  double fscore = 0.0;     // percent
  double precision = 0.0;  // fraction of pred within threshold of gt, percent
  double recall = 0.0;     // fraction of gt within threshold of pred, percent
};

FScoreResult fscore(const PointCloud& pred, const PointCloud& gt, double threshold);

// Exact IoU for gravity-aligned boxes: convex polygon clipping of the yawed
// horizontal rectangles times the vertical interval overlap.
double box_iou(const GravityBox& a, const GravityBox& b);

struct SceneAlignment {
  double scale = 1.0;
  Vec3 translation{0, 0, 0};

  Vec3 apply(const Vec3& p) const { return p * scale + translation; }
};

// Global scale from the bbox diagonal ratio, translation from bbox centers;
// never rotates.
SceneAlignment align_scene(const PointCloud& pred, const PointCloud& gt);

struct MeshStats {
  uint64_t total_faces = 0;
  uint64_t total_vertices = 0;
  struct Row {
    uint64_t faces = 0, vertices = 0;
  };
  std::vector<Row> per_mesh;
};

MeshStats mesh_stats(const std::vector<TriangleMesh>& meshes);

// A posed instance, already in the scene frame.
struct SceneObject {
  std::string id;
  TriangleMesh mesh;
};

struct ObjectScore {
  std::string id;
  double cd = 0.0;
  double fscore = 0.0, precision = 0.0, recall = 0.0;
};

struct ScoreReport {
  double cd = 0.0, cd_s = 0.0;                       // scene level, raw (not x1e3)
  double fscore = 0.0, precision = 0.0, recall = 0.0;  // percent
  std::vector<ObjectScore> objects;                  // matched ids, sorted
  MetricConfig config;

  // Serializations round every metric to 9 significant digits so reports are
  // reproducible byte-for-byte across exactly-invariant transformations.
  std::string to_json() const;
  std::string to_table() const;  // CD columns displayed x1e3
};

// Samples config.samples_per_mesh points per mesh, aligns the predicted scene
// onto the ground truth (scale + translation only), and scores scene-level
// CD/CD-S/F-score plus per-object metrics for ids present on both sides
// (each object pair normalized to its own unit cube first).
ScoreReport evaluate_scene(const std::vector<SceneObject>& pred,
                           const std::vector<SceneObject>& gt, const MetricConfig& config);

// Helper shared with reports: shortest-round-trip formatting at 9 significant
// digits, used everywhere metric values are serialized.
std::string format_metric(double value);

}  // namespace armesh

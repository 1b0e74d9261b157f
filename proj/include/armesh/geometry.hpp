// Camera model, depth back-projection, instance masking, unit-cube
// normalization, augmentation, and surface/cloud sampling.
//
// Conventions (used consistently by back_project/project):
//   - pixel centers sit at integer coordinates: pixel (u,v) rays through (u,v);
//   - the vertical (gravity) axis is +y in the camera-aligned scene frame;
//   - depth is metric along +z, zero encodes "no reading".

#pragma once

#include <optional>
#include <vector>

#include "armesh/common.hpp"
#include "armesh/mesh.hpp"

namespace armesh {

struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const {
    require(fx > 0 && fy > 0, ErrorCode::validation, "intrinsics: fx/fy must be positive");
    require(cx >= 0 && cx < width && cy >= 0 && cy < height, ErrorCode::validation,
            "intrinsics: principal point outside image");
  }
};

struct DepthMap {
  int width = 0, height = 0;
  std::vector<float> values;  // meters; >= 0; 0 = invalid

  float at(int u, int v) const { return values[size_t(v) * width + u]; }
};

struct InstanceMask {
  int width = 0, height = 0;
  std::vector<uint8_t> values;  // nonzero = member

  bool at(int u, int v) const { return values[size_t(v) * width + u] != 0; }
};

struct FeatureMap {
  int width = 0, height = 0, channels = 0;
  std::vector<float> values;  // (y*width + x)*channels + c, row-major

  const float* at(int x, int y) const { return &values[(size_t(y) * width + x) * channels]; }
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec2> pixels;     // optional, parallel to points
  std::vector<float> features;  // optional, flattened [n x feature_dim]
  int feature_dim = 0;

  size_t size() const { return points.size(); }
  bool has_pixels() const { return !pixels.empty(); }

  void validate() const {
    require(pixels.empty() || pixels.size() == points.size(), ErrorCode::validation,
            "point cloud: pixels/points length mismatch");
    require(features.empty() || (feature_dim > 0 &&
            features.size() == points.size() * size_t(feature_dim)),
            ErrorCode::validation, "point cloud: features/points length mismatch");
    for (const Vec3& p : points)
      require(finite(p), ErrorCode::validation, "point cloud: non-finite coordinate");
  }
};

// p' = (p - center) / half_extent maps the source bounds into [-1,1]^3.
struct NormalizationFrame {
  Vec3 center{0, 0, 0};
  double half_extent = 1.0;

  Vec3 apply(const Vec3& p) const { return (p - center) / half_extent; }
  Vec3 invert(const Vec3& p) const { return p * half_extent + center; }
};

struct AugmentationParams {
  double yaw = 0.0;              // radians, in [-pi/4, pi/4]
  double scale = 1.0;            // in [0.75, 1]
  Vec3 shift{0, 0, 0};           // components in [0, 0.2]
  double depth_jitter_max = 0.02;
  uint64_t seed = 0;

  void validate() const;
};

// Working point densities: per-object clouds for the block-patch and compact
// token stacks, and the global scene cloud.
constexpr int kObjectPointsBlockPatch = 4096;
constexpr int kObjectPointsCompact = 8192;
constexpr int kScenePoints = 16384;

// One point per pixel with depth > 0 (and mask set, if given), via
// x = (u-cx)*d/fx, y = (v-cy)*d/fy, z = d. Source (u,v) kept in `pixels`.
PointCloud back_project(const DepthMap& depth, const CameraIntrinsics& k,
                        const InstanceMask* mask = nullptr);

// u = fx*x/z + cx, v = fy*y/z + cy. Errors when z <= 0.
Vec2 project(const CameraIntrinsics& k, const Vec3& p);

// Bilinear sampling with edge clamp; (u,v) are image-resolution pixel
// coordinates, rescaled to the feature grid by aligning pixel centers.
std::vector<float> gather_features(const FeatureMap& fm, const std::vector<Vec2>& pixels,
                                   int image_width, int image_height);

NormalizationFrame compute_unit_cube_frame(const PointCloud& points);
NormalizationFrame compute_unit_cube_frame(const std::vector<Vec3>& points);

PointCloud apply_frame(const NormalizationFrame& frame, const PointCloud& cloud);
PointCloud invert_frame(const NormalizationFrame& frame, const PointCloud& cloud);
TriangleMesh apply_frame(const NormalizationFrame& frame, const TriangleMesh& mesh);
TriangleMesh invert_frame(const NormalizationFrame& frame, const TriangleMesh& mesh);

struct GravityBox;  // pose.hpp

// Yaw about +y, then isotropic scale, then shift, applied consistently to
// points and boxes. With depth_like, each point is first perturbed along its
// viewing ray by a uniform jitter in [-depth_jitter_max, +depth_jitter_max]
// derived from (seed, point bits), so the map is pointwise and deterministic.
std::pair<PointCloud, std::vector<GravityBox>> augment(const PointCloud& points,
                                                       const std::vector<GravityBox>& boxes,
                                                       bool depth_like,
                                                       const AugmentationParams& params);

// Area-weighted uniform surface samples; deterministic per seed.
PointCloud sample_points(const TriangleMesh& mesh, size_t n, uint64_t seed);
// Subsample without replacement when n <= size (n == size yields a
// permutation), with replacement otherwise.
PointCloud sample_points(const PointCloud& cloud, size_t n, uint64_t seed);

}  // namespace armesh

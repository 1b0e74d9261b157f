#include "armesh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "armesh/kernels.hpp"
#include "armesh/pose.hpp"

namespace armesh {

void AugmentationParams::validate() const {
  require(yaw >= -kPi / 4 - 1e-12 && yaw <= kPi / 4 + 1e-12, ErrorCode::validation,
          "augment: yaw outside [-pi/4, pi/4]");
  require(scale >= 0.75 && scale <= 1.0, ErrorCode::validation,
          "augment: scale outside [0.75, 1]");
  for (int a = 0; a < 3; ++a)
    require(shift[a] >= 0.0 && shift[a] <= 0.2, ErrorCode::validation,
            "augment: shift component outside [0, 0.2]");
  require(depth_jitter_max >= 0.0, ErrorCode::validation, "augment: negative depth jitter");
}

PointCloud back_project(const DepthMap& depth, const CameraIntrinsics& k,
                        const InstanceMask* mask) {
  k.validate();
  require(depth.width == k.width && depth.height == k.height, ErrorCode::validation,
          "back_project: depth " + std::to_string(depth.width) + "x" +
              std::to_string(depth.height) + " vs intrinsics " + std::to_string(k.width) + "x" +
              std::to_string(k.height));
  require(int(depth.values.size()) == depth.width * depth.height, ErrorCode::validation,
          "back_project: depth buffer size mismatch");
  if (mask) {
    require(mask->width == depth.width && mask->height == depth.height, ErrorCode::validation,
            "back_project: mask " + std::to_string(mask->width) + "x" +
                std::to_string(mask->height) + " vs depth " + std::to_string(depth.width) + "x" +
                std::to_string(depth.height));
  }

  PointCloud cloud;
  size_t w = size_t(depth.width);
  std::vector<double> xs(w), ys(w), zs(w);
  for (int v = 0; v < depth.height; ++v) {
    const float* row = &depth.values[size_t(v) * w];
    kernels::backproject_row(row, w, 0.0, double(v), k.fx, k.fy, k.cx, k.cy,
                             xs.data(), ys.data(), zs.data());
    for (int u = 0; u < depth.width; ++u) {
      float d = row[u];
      require(std::isfinite(d) && d >= 0.0f, ErrorCode::validation,
              "back_project: invalid depth value at (" + std::to_string(u) + "," +
                  std::to_string(v) + ")");
      if (d <= 0.0f) continue;
      if (mask && !mask->at(u, v)) continue;
      cloud.points.push_back({xs[u], ys[u], zs[u]});
      cloud.pixels.push_back({double(u), double(v)});
    }
  }
  return cloud;
}

Vec2 project(const CameraIntrinsics& k, const Vec3& p) {
  require(p.z > 0.0, ErrorCode::validation, "project: point behind camera (z <= 0)");
  return {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy};
}

std::vector<float> gather_features(const FeatureMap& fm, const std::vector<Vec2>& pixels,
                                   int image_width, int image_height) {
  require(fm.channels >= 1 && fm.width >= 1 && fm.height >= 1, ErrorCode::validation,
          "gather_features: empty feature map");
  require(image_width >= 1 && image_height >= 1, ErrorCode::validation,
          "gather_features: bad image size");

  std::vector<float> out(pixels.size() * size_t(fm.channels));
  double sx = double(fm.width) / image_width;
  double sy = double(fm.height) / image_height;
  for (size_t i = 0; i < pixels.size(); ++i) {
    require(std::isfinite(pixels[i].x) && std::isfinite(pixels[i].y), ErrorCode::validation,
            "gather_features: non-finite pixel");
    // Align pixel centers of the two grids, then clamp to the border.
    double u = (pixels[i].x + 0.5) * sx - 0.5;
    double v = (pixels[i].y + 0.5) * sy - 0.5;
    u = std::clamp(u, 0.0, double(fm.width - 1));
    v = std::clamp(v, 0.0, double(fm.height - 1));
    int x0 = int(u), y0 = int(v);
    int x1 = std::min(x0 + 1, fm.width - 1);
    int y1 = std::min(y0 + 1, fm.height - 1);
    double fu = u - x0, fv = v - y0;
    const float* p00 = fm.at(x0, y0);
    const float* p10 = fm.at(x1, y0);
    const float* p01 = fm.at(x0, y1);
    const float* p11 = fm.at(x1, y1);
    float* dst = &out[i * size_t(fm.channels)];
    for (int c = 0; c < fm.channels; ++c) {
      double top = p00[c] + (p10[c] - p00[c]) * fu;
      double bot = p01[c] + (p11[c] - p01[c]) * fu;
      dst[c] = float(top + (bot - top) * fv);
    }
  }
  return out;
}

NormalizationFrame compute_unit_cube_frame(const std::vector<Vec3>& points) {
  require(!points.empty(), ErrorCode::validation, "compute_unit_cube_frame: empty input");
  Bounds b = bounds_of(points);
  Vec3 size = b.size();
  double extent = std::max({size.x, size.y, size.z});
  require(extent > 0.0, ErrorCode::validation,
          "compute_unit_cube_frame: zero extent (all points identical)");
  return {b.center(), extent * 0.5};
}

NormalizationFrame compute_unit_cube_frame(const PointCloud& points) {
  return compute_unit_cube_frame(points.points);
}

PointCloud apply_frame(const NormalizationFrame& frame, const PointCloud& cloud) {
  PointCloud out = cloud;
  for (Vec3& p : out.points) p = frame.apply(p);
  return out;
}

PointCloud invert_frame(const NormalizationFrame& frame, const PointCloud& cloud) {
  PointCloud out = cloud;
  for (Vec3& p : out.points) p = frame.invert(p);
  return out;
}

TriangleMesh apply_frame(const NormalizationFrame& frame, const TriangleMesh& mesh) {
  TriangleMesh out = mesh;
  for (Vec3& p : out.vertices) p = frame.apply(p);
  return out;
}

TriangleMesh invert_frame(const NormalizationFrame& frame, const TriangleMesh& mesh) {
  TriangleMesh out = mesh;
  for (Vec3& p : out.vertices) p = frame.invert(p);
  return out;
}

namespace {

// Per-point jitter from (seed, coordinate bits): a pointwise map, so augment
// commutes with any permutation of the input order.
double ray_jitter(uint64_t seed, const Vec3& p, double jmax) {
  uint64_t h = hash_bytes(&p, sizeof(p), seed);
  double u = double(h >> 11) * 0x1.0p-53;
  return (2.0 * u - 1.0) * jmax;
}

}  // namespace

std::pair<PointCloud, std::vector<GravityBox>> augment(const PointCloud& points,
                                                       const std::vector<GravityBox>& boxes,
                                                       bool depth_like,
                                                       const AugmentationParams& params) {
  params.validate();
  Mat3 rot = Mat3::yaw(params.yaw);

  PointCloud out = points;
  for (Vec3& p : out.points) {
    if (depth_like && params.depth_jitter_max > 0.0) {
      // Additive depth noise: scales the whole pinhole ray through the point.
      double z = p.z;
      if (z != 0.0) {
        double eta = ray_jitter(params.seed, p, params.depth_jitter_max);
        p = p * ((z + eta) / z);
      }
    }
    p = rot * p * params.scale + params.shift;
  }

  std::vector<GravityBox> out_boxes = boxes;
  for (GravityBox& b : out_boxes) {
    b.center = rot * b.center * params.scale + params.shift;
    b.scale *= params.scale;
    b.yaw += params.yaw;
    if (b.yaw > kPi) b.yaw -= 2 * kPi;
    if (b.yaw <= -kPi) b.yaw += 2 * kPi;
  }
  return {std::move(out), std::move(out_boxes)};
}

PointCloud sample_points(const TriangleMesh& mesh, size_t n, uint64_t seed) {
  require(n >= 1, ErrorCode::validation, "sample_points: n must be >= 1");
  require(!mesh.faces.empty(), ErrorCode::validation, "sample_points: mesh has no faces");

  std::vector<double> cum(mesh.faces.size());
  double total = 0.0;
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    total += face_area(mesh, mesh.faces[f]);
    cum[f] = total;
  }
  require(total > 0.0, ErrorCode::validation, "sample_points: zero-total-area mesh");

  Rng rng(seed);
  PointCloud out;
  out.points.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    double target = rng.next_double() * total;
    size_t f = size_t(std::lower_bound(cum.begin(), cum.end(), target) - cum.begin());
    if (f >= cum.size()) f = cum.size() - 1;
    const auto& face = mesh.faces[f];
    // sqrt trick for uniform barycentric coordinates
    double r1 = std::sqrt(rng.next_double());
    double r2 = rng.next_double();
    const Vec3& a = mesh.vertices[face[0]];
    const Vec3& b = mesh.vertices[face[1]];
    const Vec3& c = mesh.vertices[face[2]];
    out.points.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
  }
  return out;
}

PointCloud sample_points(const PointCloud& cloud, size_t n, uint64_t seed) {
  require(n >= 1, ErrorCode::validation, "sample_points: n must be >= 1");
  require(!cloud.points.empty(), ErrorCode::validation, "sample_points: empty cloud");

  Rng rng(seed);
  PointCloud out;
  out.points.reserve(n);
  out.feature_dim = cloud.feature_dim;
  bool carry_pixels = cloud.has_pixels();
  auto take = [&](size_t j) {
    out.points.push_back(cloud.points[j]);
    if (carry_pixels) out.pixels.push_back(cloud.pixels[j]);
    if (cloud.feature_dim > 0) {
      const float* f = &cloud.features[j * size_t(cloud.feature_dim)];
      out.features.insert(out.features.end(), f, f + cloud.feature_dim);
    }
  };
  if (n <= cloud.size()) {
    // Partial Fisher-Yates: first n entries of a seeded permutation.
    std::vector<size_t> idx(cloud.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    for (size_t i = 0; i < n; ++i) {
      size_t j = i + size_t(rng.next_below(idx.size() - i));
      std::swap(idx[i], idx[j]);
      take(idx[i]);
    }
  } else {
    for (size_t i = 0; i < n; ++i) take(size_t(rng.next_below(cloud.size())));
  }
  return out;
}

}  // namespace armesh

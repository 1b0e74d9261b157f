#include "armesh/pose.hpp"

#include <cmath>

#include "armesh/linalg.hpp"

namespace armesh {

CornerSet canonical_corners() {
  CornerSet c;
  for (int k = 0; k < 8; ++k) c.corners[k] = corner_sign(k);
  return c;
}

PoseStyle pose_style_from_name(const std::string& name) {
  if (name == "axis" || name == "per_axis" || name == "per-axis") return PoseStyle::per_axis;
  if (name == "block" || name == "block_offset" || name == "block-offset")
    return PoseStyle::block_offset;
  fail(ErrorCode::validation, "unknown pose style: " + name);
}

CornerSet corners_from_box(const GravityBox& box) {
  box.validate();
  Mat3 r = Mat3::yaw(box.yaw);
  Vec3 half = box.scale * 0.5;
  CornerSet out;
  for (int k = 0; k < 8; ++k) {
    Vec3 s = corner_sign(k);
    out.corners[k] = box.center + r * Vec3{half.x * s.x, half.y * s.y, half.z * s.z};
  }
  return out;
}

AffineTransform affine_from_box(const GravityBox& box) {
  box.validate();
  AffineTransform t;
  t.linear = Mat3::yaw(box.yaw) * Mat3::diag(box.scale * 0.5);
  t.translation = box.center;
  return t;
}

TokenSequence encode_pose(const GravityBox& box, const QuantizationGrid& grid, PoseStyle style) {
  CornerSet corners = corners_from_box(box);
  TokenSequence seq;
  seq.resolution = grid.resolution;
  if (style == PoseStyle::per_axis) {
    seq.scheme = Scheme::coordinate;
    seq.tokens.reserve(24);
    for (const Vec3& c : corners.corners) {
      seq.tokens.push_back(uint32_t(quantize(grid, c.x)));
      seq.tokens.push_back(uint32_t(quantize(grid, c.y)));
      seq.tokens.push_back(uint32_t(quantize(grid, c.z)));
    }
  } else {
    seq.scheme = Scheme::block_patch;
    MeshVocabulary vocab = MeshVocabulary::make(Scheme::block_patch, grid.resolution);
    seq.tokens.reserve(16);
    for (const Vec3& c : corners.corners) {
      QuantizedVertex q = quantize(grid, c);
      seq.tokens.push_back(vocab.block_token(q));
      seq.tokens.push_back(vocab.offset_token(q));
    }
  }
  return seq;
}

CornerSet decode_corners(const TokenSequence& tokens, const QuantizationGrid& grid,
                         PoseStyle style) {
  require(tokens.resolution == grid.resolution, ErrorCode::validation,
          "decode_corners: token resolution mismatch");
  CornerSet out;
  if (style == PoseStyle::per_axis) {
    if (tokens.size() != 24)
      throw TokenError(tokens.size(), "24 coordinate tokens",
                       "pose sequence has " + std::to_string(tokens.size()) + " tokens");
    for (int k = 0; k < 8; ++k) {
      Vec3 c;
      for (int a = 0; a < 3; ++a) {
        size_t pos = size_t(k) * 3 + a;
        uint32_t id = tokens.tokens[pos];
        if (id >= uint32_t(grid.resolution))
          throw TokenError(pos, "coordinate",
                           "pose token " + std::to_string(id) + " outside coordinate range");
        c[a] = dequantize(grid, int32_t(id));
      }
      out.corners[k] = c;
    }
  } else {
    if (tokens.size() != 16)
      throw TokenError(tokens.size(), "16 block/offset tokens",
                       "pose sequence has " + std::to_string(tokens.size()) + " tokens");
    MeshVocabulary vocab = MeshVocabulary::make(Scheme::block_patch, grid.resolution);
    for (int k = 0; k < 8; ++k) {
      uint32_t bid = tokens.tokens[size_t(k) * 2];
      uint32_t oid = tokens.tokens[size_t(k) * 2 + 1];
      if (!vocab.blocks.contains(bid))
        throw TokenError(size_t(k) * 2, "block id",
                         "pose token " + std::to_string(bid) + " is not a block id");
      if (!vocab.offsets.contains(oid))
        throw TokenError(size_t(k) * 2 + 1, "offset id",
                         "pose token " + std::to_string(oid) + " is not an offset id");
      QuantizedVertex q =
          vocab.vertex_from_block_offset(bid - vocab.blocks.begin, oid - vocab.offsets.begin);
      out.corners[k] = dequantize(grid, q);
    }
  }
  return out;
}

AffineFit fit_affine(const CornerSet& local, const CornerSet& global) {
  // [X_local 1] is 8x4; one least-squares solve per output coordinate,
  // batched as 3 right-hand sides.
  std::vector<double> a(8 * 4);
  std::vector<double> b(8 * 3);
  for (int i = 0; i < 8; ++i) {
    a[i * 4 + 0] = local.corners[i].x;
    a[i * 4 + 1] = local.corners[i].y;
    a[i * 4 + 2] = local.corners[i].z;
    a[i * 4 + 3] = 1.0;
    b[i * 3 + 0] = global.corners[i].x;
    b[i * 3 + 1] = global.corners[i].y;
    b[i * 3 + 2] = global.corners[i].z;
  }
  std::vector<double> x;
  try {
    x = least_squares_qr(a, 8, 4, b, 3);
  } catch (const Error&) {
    fail(ErrorCode::validation, "fit_affine: degenerate (coplanar) local corners");
  }

  AffineFit fit;
  for (int out = 0; out < 3; ++out) {
    fit.transform.linear.at(out, 0) = x[0 * 3 + out];
    fit.transform.linear.at(out, 1) = x[1 * 3 + out];
    fit.transform.linear.at(out, 2) = x[2 * 3 + out];
    fit.transform.translation[out] = x[3 * 3 + out];
  }
  double r2 = 0.0;
  for (int i = 0; i < 8; ++i) {
    Vec3 d = fit.transform.apply(local.corners[i]) - global.corners[i];
    r2 += norm_sq(d);
  }
  fit.residual = std::sqrt(r2);
  return fit;
}

GravityBox box_from_affine(const AffineTransform& t) {
  for (double v : t.linear.m)
    require(std::isfinite(v), ErrorCode::validation, "box_from_affine: non-finite transform");
  require(finite(t.translation), ErrorCode::validation, "box_from_affine: non-finite transform");

  GravityBox box;
  box.center = t.translation;
  Vec3 cx = t.linear.col(0), cy = t.linear.col(1), cz = t.linear.col(2);
  double nx = norm(cx), ny = norm(cy), nz = norm(cz);
  require(nx > 1e-300 && ny > 1e-300 && nz > 1e-300, ErrorCode::validation,
          "box_from_affine: degenerate scale (zero column)");
  box.scale = {2.0 * nx, 2.0 * ny, 2.0 * nz};
  // Local +x maps to (cos yaw, *, -sin yaw) scaled; read yaw off that column.
  box.yaw = std::atan2(-cx.z, cx.x);
  return box;
}

AffineTransform inflate_degenerate_columns(const AffineTransform& t, double min_col_norm) {
  AffineTransform out = t;
  for (int c = 0; c < 3; ++c) {
    Vec3 col = t.linear.col(c);
    double n = norm(col);
    if (n >= min_col_norm) continue;
    Vec3 dir = n > 0.0 ? col / n : Vec3{c == 0 ? 1.0 : 0.0, c == 1 ? 1.0 : 0.0, c == 2 ? 1.0 : 0.0};
    for (int r = 0; r < 3; ++r) out.linear.at(r, c) = dir[r] * min_col_norm;
  }
  return out;
}

TriangleMesh transform_mesh(const AffineTransform& t, const TriangleMesh& mesh) {
  TriangleMesh out;
  out.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) out.vertices.push_back(t.apply(v));
  out.faces = mesh.faces;
  return out;
}

}  // namespace armesh

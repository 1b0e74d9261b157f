// Gravity-aligned 7-DoF boxes encoded as quantized corner tokens, and the
// least-squares recovery of the local-to-global transform from decoded corners.

#pragma once

#include <array>

#include "armesh/common.hpp"
#include "armesh/mesh.hpp"
#include "armesh/quantize.hpp"
#include "armesh/vocab.hpp"

namespace armesh {

struct GravityBox {
  Vec3 center{0, 0, 0};
  Vec3 scale{1, 1, 1};  // full side lengths, > 0
  double yaw = 0.0;     // radians about +y, in (-pi, pi]

  void validate() const {
    require(finite(center) && finite(scale) && std::isfinite(yaw), ErrorCode::validation,
            "gravity box: non-finite field");
    require(scale.x > 0 && scale.y > 0 && scale.z > 0, ErrorCode::validation,
            "gravity box: scale components must be positive");
  }
};

// Canonical corner order: sign vectors over (x,y,z) enumerated as a binary
// count, z fastest: (-,-,-), (-,-,+), (-,+,-), ..., (+,+,+).
struct CornerSet {
  std::array<Vec3, 8> corners;
};

inline Vec3 corner_sign(int k) {
  return {(k & 4) ? 1.0 : -1.0, (k & 2) ? 1.0 : -1.0, (k & 1) ? 1.0 : -1.0};
}

// Canonical local corners (+-1)^3 used as the fit source.
CornerSet canonical_corners();

struct AffineTransform {
  Mat3 linear;              // for decoded poses ~ yaw rotation x diag(scale/2)
  Vec3 translation{0, 0, 0};

  Vec3 apply(const Vec3& p) const { return linear * p + translation; }
};

enum class PoseStyle { per_axis, block_offset };

PoseStyle pose_style_from_name(const std::string& name);

// corner_k = center + R_yaw * diag(scale/2) * sign_k.
CornerSet corners_from_box(const GravityBox& box);

// The transform mapping canonical corners onto the box corners.
AffineTransform affine_from_box(const GravityBox& box);

// per_axis: 3 coordinate tokens per corner (24 total); block_offset: a
// (block, offset) pair per corner (16 total). Ids live in the shared mesh
// vocabulary; out-of-cube corners clamp into the boundary bins.
TokenSequence encode_pose(const GravityBox& box, const QuantizationGrid& grid, PoseStyle style);

CornerSet decode_corners(const TokenSequence& tokens, const QuantizationGrid& grid,
                         PoseStyle style);

struct AffineFit {
  AffineTransform transform;
  double residual = 0.0;  // Frobenius norm of the misfit over the 8 corners
};

// argmin_T |X_global - [X_local 1] T^t|^2, solved per output coordinate by
// column-pivoted QR. Coplanar local corners raise a degenerate-fit error.
AffineFit fit_affine(const CornerSet& local, const CornerSet& global);

// center = translation; yaw from the first horizontal-axis column projected to
// the xz-plane; scale = 2 x column norms. Near-zero columns are degenerate.
GravityBox box_from_affine(const AffineTransform& t);

// Columns shorter than min_col_norm are stretched to it (degenerate direction
// falls back to the corresponding canonical axis). Used by decode paths with
// min_col_norm = one quantization bin, so thin boxes stay invertible.
AffineTransform inflate_degenerate_columns(const AffineTransform& t, double min_col_norm);

TriangleMesh transform_mesh(const AffineTransform& t, const TriangleMesh& mesh);

inline int pose_token_count(PoseStyle style) {
  return style == PoseStyle::per_axis ? 24 : 16;
}

}  // namespace armesh

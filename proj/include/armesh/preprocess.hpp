// Asset pipeline: vertex merging at quantization resolution, planar + quadric
// decimation to target face counts, and sampled-Hausdorff quality selection.

#pragma once

#include <vector>

#include "armesh/geometry.hpp"
#include "armesh/mesh.hpp"

namespace armesh {

struct PreprocessConfig {
  std::vector<int> quant_levels{128, 256, 512, 1024};
  std::vector<int> face_targets{800, 2000, 4000};
  double hausdorff_tau = 0.01;       // on unit-cube-normalized meshes
  size_t hausdorff_samples = 50000;  // per mesh side
  double planar_angle_tol = 0.017453292519943295;  // 1 degree
  uint64_t seed = 0;

  void validate() const {
    require(!quant_levels.empty() && !face_targets.empty(), ErrorCode::validation,
            "preprocess config: empty sweep");
    require(hausdorff_tau > 0, ErrorCode::validation, "preprocess config: tau must be > 0");
    require(hausdorff_samples >= 1, ErrorCode::validation, "preprocess config: samples >= 1");
    for (size_t i = 1; i < face_targets.size(); ++i)
      require(face_targets[i] > face_targets[i - 1], ErrorCode::validation,
              "preprocess config: face targets must ascend");
    for (int t : face_targets)
      require(t >= 4, ErrorCode::validation, "preprocess config: face target must be >= 4");
  }
};

struct CandidateResult {
  TriangleMesh mesh;
  int quant_level = 0;
  int face_target = 0;
  double hausdorff = 0.0;
  size_t faces = 0;
};

// Vertices in the same 1/q cell merge to the cell mean; degenerate faces drop.
TriangleMesh merge_vertices(const TriangleMesh& mesh, int quant_level);

// Removes vertices whose star is coplanar within angle_tol (and crease
// vertices whose two crease edges are collinear) by local edge collapses.
// Geometry-preserving up to the tolerance; runs to a fixed point.
TriangleMesh planar_decimate(const TriangleMesh& mesh, double angle_tol);

// Garland-Heckbert edge collapse with plane quadrics, optimal-position solve
// with midpoint/endpoint fallback, boundary constraint planes, and normal-flip
// rejection. Stops at <= target_faces or when no valid collapse remains.
TriangleMesh quadric_decimate(const TriangleMesh& mesh, size_t target_faces);

// Symmetric sampled Hausdorff distance: each mesh is surface-sampled with a
// seed derived from (seed, content hash), so the operation is exactly
// symmetric and deterministic.
double hausdorff(const TriangleMesh& a, const TriangleMesh& b, size_t samples, uint64_t seed);

// Below tau: fewest faces (ties: lower hausdorff). Otherwise: lowest
// hausdorff (ties: fewer faces).
const CandidateResult& select_best(const std::vector<CandidateResult>& candidates, double tau);

// Full sweep over quant_levels x face_targets on the unit-cube-normalized
// asset; the selected mesh is returned in the input coordinate frame, the
// hausdorff field stays in normalized units.
CandidateResult preprocess_asset(const TriangleMesh& mesh, const PreprocessConfig& config);

}  // namespace armesh

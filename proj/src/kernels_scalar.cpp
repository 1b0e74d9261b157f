// Scalar reference kernels. The AVX2 lane mirrors these operation-for-operation;
// any change here must keep the evaluation order or the bit-equivalence tests
// will catch the drift.

#include "armesh/kernels.hpp"

#include <cmath>

namespace armesh::kernels::detail {

void dist_sq_batch_scalar(const Vec3& q, const double* xs, const double* ys, const double* zs,
                          size_t n, double* out) {
  for (size_t i = 0; i < n; ++i) {
    double dx = q.x - xs[i];
    double dy = q.y - ys[i];
    double dz = q.z - zs[i];
    out[i] = (dx * dx + dy * dy) + dz * dz;
  }
}

NnHit nn_brute_scalar(const Vec3& q, const double* xs, const double* ys, const double* zs,
                      size_t n) {
  NnHit best{0, std::numeric_limits<double>::infinity()};
  for (size_t i = 0; i < n; ++i) {
    double dx = q.x - xs[i];
    double dy = q.y - ys[i];
    double dz = q.z - zs[i];
    double d = (dx * dx + dy * dy) + dz * dz;
    if (d < best.dist_sq) {
      best.dist_sq = d;
      best.index = i;
    }
  }
  return best;
}

void backproject_row_scalar(const float* depth, size_t n, double u0, double v,
                            double fx, double fy, double cx, double cy,
                            double* xs, double* ys, double* zs) {
  double ky = (v - cy) / fy;
  for (size_t i = 0; i < n; ++i) {
    double d = depth[i];
    double u = u0 + double(i);
    xs[i] = (u - cx) * d / fx;
    ys[i] = ky * d;
    zs[i] = d;
  }
}

void quantize_batch_scalar(const double* v, size_t n, int resolution, int32_t* out) {
  double nmax = double(resolution - 1);
  for (size_t i = 0; i < n; ++i) {
    double t = std::floor((v[i] + 1.0) * 0.5 * resolution);
    if (!(t >= 0.0)) t = 0.0;  // also routes NaN to bin 0, matching the AVX2 max/min chain
    if (t > nmax) t = nmax;
    out[i] = static_cast<int32_t>(t);
  }
}

}  // namespace armesh::kernels::detail

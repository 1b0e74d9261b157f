// AVX2 lane. Four doubles per step, same operation order as the scalar
// reference (mul/add, no FMA) so every lane result is bit-identical to the
// scalar kernel. Tails run the scalar loop.

#include "armesh/kernels.hpp"

#if ARMESH_HAVE_AVX2_LANE

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace armesh::kernels::detail {

namespace {

inline __m256d dist_sq_lanes(__m256d qx, __m256d qy, __m256d qz,
                             const double* xs, const double* ys, const double* zs, size_t i) {
  __m256d dx = _mm256_sub_pd(qx, _mm256_loadu_pd(xs + i));
  __m256d dy = _mm256_sub_pd(qy, _mm256_loadu_pd(ys + i));
  __m256d dz = _mm256_sub_pd(qz, _mm256_loadu_pd(zs + i));
  __m256d s = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
  return _mm256_add_pd(s, _mm256_mul_pd(dz, dz));
}

}  // namespace

void dist_sq_batch_avx2(const Vec3& q, const double* xs, const double* ys, const double* zs,
                        size_t n, double* out) {
  __m256d qx = _mm256_set1_pd(q.x);
  __m256d qy = _mm256_set1_pd(q.y);
  __m256d qz = _mm256_set1_pd(q.z);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, dist_sq_lanes(qx, qy, qz, xs, ys, zs, i));
  }
  if (i < n) dist_sq_batch_scalar(q, xs + i, ys + i, zs + i, n - i, out + i);
}

NnHit nn_brute_avx2(const Vec3& q, const double* xs, const double* ys, const double* zs,
                    size_t n) {
  NnHit best{0, std::numeric_limits<double>::infinity()};
  size_t i = 0;
  if (n >= 8) {
    __m256d qx = _mm256_set1_pd(q.x);
    __m256d qy = _mm256_set1_pd(q.y);
    __m256d qz = _mm256_set1_pd(q.z);
    __m256d best_d = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d lane_idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    __m256d best_i = _mm256_setzero_pd();
    const __m256d four = _mm256_set1_pd(4.0);
    for (; i + 4 <= n; i += 4) {
      __m256d d = dist_sq_lanes(qx, qy, qz, xs, ys, zs, i);
      // Strict less-than keeps the earliest index within each lane stream.
      __m256d m = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);
      best_d = _mm256_blendv_pd(best_d, d, m);
      best_i = _mm256_blendv_pd(best_i, lane_idx, m);
      lane_idx = _mm256_add_pd(lane_idx, four);
    }
    alignas(32) double dists[4], idxs[4];
    _mm256_store_pd(dists, best_d);
    _mm256_store_pd(idxs, best_i);
    for (int k = 0; k < 4; ++k) {
      // Ties between lanes resolve to the smallest global index, matching scalar.
      if (dists[k] < best.dist_sq ||
          (dists[k] == best.dist_sq && size_t(idxs[k]) < best.index)) {
        best.dist_sq = dists[k];
        best.index = size_t(idxs[k]);
      }
    }
  }
  for (; i < n; ++i) {
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

void backproject_row_avx2(const float* depth, size_t n, double u0, double v,
                          double fx, double fy, double cx, double cy,
                          double* xs, double* ys, double* zs) {
  double ky = (v - cy) / fy;
  __m256d vky = _mm256_set1_pd(ky);
  __m256d vcx = _mm256_set1_pd(cx);
  __m256d vfx = _mm256_set1_pd(fx);
  __m256d u = _mm256_add_pd(_mm256_set1_pd(u0), _mm256_set_pd(3.0, 2.0, 1.0, 0.0));
  const __m256d four = _mm256_set1_pd(4.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_cvtps_pd(_mm_loadu_ps(depth + i));
    __m256d x = _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(u, vcx), d), vfx);
    _mm256_storeu_pd(xs + i, x);
    _mm256_storeu_pd(ys + i, _mm256_mul_pd(vky, d));
    _mm256_storeu_pd(zs + i, d);
    u = _mm256_add_pd(u, four);
  }
  if (i < n) {
    backproject_row_scalar(depth + i, n - i, u0 + double(i), v, fx, fy, cx, cy,
                           xs + i, ys + i, zs + i);
  }
}

void quantize_batch_avx2(const double* v, size_t n, int resolution, int32_t* out) {
  __m256d vres = _mm256_set1_pd(double(resolution));
  __m256d vmax = _mm256_set1_pd(double(resolution - 1));
  __m256d one = _mm256_set1_pd(1.0);
  __m256d half = _mm256_set1_pd(0.5);
  __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(_mm256_mul_pd(_mm256_add_pd(_mm256_loadu_pd(v + i), one), half), vres);
    t = _mm256_floor_pd(t);
    t = _mm256_max_pd(t, zero);  // max(NaN, 0) -> 0 with this operand order
    t = _mm256_min_pd(t, vmax);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i), _mm256_cvttpd_epi32(t));
  }
  if (i < n) quantize_batch_scalar(v + i, n - i, resolution, out + i);
}

}  // namespace armesh::kernels::detail

#endif  // ARMESH_HAVE_AVX2_LANE

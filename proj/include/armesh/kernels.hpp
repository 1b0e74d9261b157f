// Data-parallel inner loops (nearest-neighbor distances, depth back-projection,
// bulk quantization) with scalar reference kernels and AVX2 variants selected
// at runtime. Both lanes are compiled with FP contraction off and use the same
// operation order, so results are bit-identical; the equivalence tests assert
// exactly that.

#pragma once

#include <cstddef>
#include <cstdint>

#include "armesh/common.hpp"

namespace armesh::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);
// Resolved once from CPU detection, overridable via ARMESH_KERNEL_BACKEND.
Backend active_backend();
// Test hook; throws validation error if the backend is not supported here.
void set_backend(Backend b);

struct NnHit {
  size_t index = 0;
  double dist_sq = 0.0;
};

// out[i] = |q - p_i|^2 over SoA points.
void dist_sq_batch(const Vec3& q, const double* xs, const double* ys, const double* zs,
                   size_t n, double* out);

// Nearest point to q by squared distance; ties resolve to the smallest index.
NnHit nn_brute(const Vec3& q, const double* xs, const double* ys, const double* zs, size_t n);

// Pinhole transform of one depth row: for pixel (u0+i, v) with depth d[i],
//   xs[i] = (u0+i - cx) * d[i] / fx,  ys[i] = (v - cy) * d[i] / fy,  zs[i] = d[i].
// Zero/invalid depths are transformed like any other value; the caller filters.
void backproject_row(const float* depth, size_t n, double u0, double v,
                     double fx, double fy, double cx, double cy,
                     double* xs, double* ys, double* zs);

// out[i] = clamp(floor((v[i]+1)/2 * resolution), 0, resolution-1).
// Non-finite inputs land in bin 0 (callers validate finiteness upstream).
void quantize_batch(const double* v, size_t n, int resolution, int32_t* out);

namespace detail {
// Per-backend entry points (scalar is the reference implementation).
void dist_sq_batch_scalar(const Vec3&, const double*, const double*, const double*, size_t, double*);
NnHit nn_brute_scalar(const Vec3&, const double*, const double*, const double*, size_t);
void backproject_row_scalar(const float*, size_t, double, double, double, double, double, double,
                            double*, double*, double*);
void quantize_batch_scalar(const double*, size_t, int, int32_t*);

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
#define ARMESH_HAVE_AVX2_LANE 1
void dist_sq_batch_avx2(const Vec3&, const double*, const double*, const double*, size_t, double*);
NnHit nn_brute_avx2(const Vec3&, const double*, const double*, const double*, size_t);
void backproject_row_avx2(const float*, size_t, double, double, double, double, double, double,
                          double*, double*, double*);
void quantize_batch_avx2(const double*, size_t, int, int32_t*);
#else
#define ARMESH_HAVE_AVX2_LANE 0
#endif
}  // namespace detail

}  // namespace armesh::kernels

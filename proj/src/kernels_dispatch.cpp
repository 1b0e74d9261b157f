#include "armesh/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace armesh::kernels {

namespace {

bool cpu_has_avx2() {
#if ARMESH_HAVE_AVX2_LANE && defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend resolve_initial() {
  if (const char* env = std::getenv("ARMESH_KERNEL_BACKEND")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{resolve_initial()};
  return b;
}

}  // namespace

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool backend_supported(Backend b) { return b == Backend::scalar || cpu_has_avx2(); }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  require(backend_supported(b), ErrorCode::validation,
          std::string("kernel backend not supported on this CPU: ") + backend_name(b));
  current().store(b, std::memory_order_relaxed);
}

void dist_sq_batch(const Vec3& q, const double* xs, const double* ys, const double* zs,
                   size_t n, double* out) {
#if ARMESH_HAVE_AVX2_LANE
  if (active_backend() == Backend::avx2) {
    detail::dist_sq_batch_avx2(q, xs, ys, zs, n, out);
    return;
  }
#endif
  detail::dist_sq_batch_scalar(q, xs, ys, zs, n, out);
}

NnHit nn_brute(const Vec3& q, const double* xs, const double* ys, const double* zs, size_t n) {
#if ARMESH_HAVE_AVX2_LANE
  if (active_backend() == Backend::avx2) return detail::nn_brute_avx2(q, xs, ys, zs, n);
#endif
  return detail::nn_brute_scalar(q, xs, ys, zs, n);
}

void backproject_row(const float* depth, size_t n, double u0, double v,
                     double fx, double fy, double cx, double cy,
                     double* xs, double* ys, double* zs) {
#if ARMESH_HAVE_AVX2_LANE
  if (active_backend() == Backend::avx2) {
    detail::backproject_row_avx2(depth, n, u0, v, fx, fy, cx, cy, xs, ys, zs);
    return;
  }
#endif
  detail::backproject_row_scalar(depth, n, u0, v, fx, fy, cx, cy, xs, ys, zs);
}

void quantize_batch(const double* v, size_t n, int resolution, int32_t* out) {
#if ARMESH_HAVE_AVX2_LANE
  if (active_backend() == Backend::avx2) {
    detail::quantize_batch_avx2(v, n, resolution, out);
    return;
  }
#endif
  detail::quantize_batch_scalar(v, n, resolution, out);
}

}  // namespace armesh::kernels

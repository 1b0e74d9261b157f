// Uniform scalar quantization of [-1,1] coordinates. The pose and mesh codecs
// share this grid so corner tokens and vertex tokens live in one vocabulary.

#pragma once

#include <cmath>
#include <cstdint>

#include "armesh/common.hpp"

namespace armesh {

struct QuantizationGrid {
  int resolution = 512;  // bins per axis, one of {128, 256, 512, 1024}

  static constexpr int kAllowed[4] = {128, 256, 512, 1024};

  explicit QuantizationGrid(int n = 512) : resolution(n) {
    bool ok = false;
    for (int a : kAllowed) ok = ok || a == n;
    require(ok, ErrorCode::validation,
            "quantization resolution must be one of 128/256/512/1024, got " + std::to_string(n));
  }

  double bin_width() const { return 2.0 / resolution; }
};

struct QuantizedVertex {
  int32_t ix = 0, iy = 0, iz = 0;
  bool operator==(const QuantizedVertex& o) const {
    return ix == o.ix && iy == o.iy && iz == o.iz;
  }
  // Canonical order: lexicographic by (z, y, x).
  bool operator<(const QuantizedVertex& o) const {
    if (iz != o.iz) return iz < o.iz;
    if (iy != o.iy) return iy < o.iy;
    return ix < o.ix;
  }
};

// index = clamp(floor((x+1)/2 * N), 0, N-1); out-of-range values clamp to the
// boundary bins (augmentation shift can push normalized points slightly out).
inline int32_t quantize(const QuantizationGrid& grid, double x) {
  require(std::isfinite(x), ErrorCode::validation, "quantize: non-finite input");
  double t = std::floor((x + 1.0) * 0.5 * grid.resolution);
  if (t < 0.0) return 0;
  if (t > grid.resolution - 1) return grid.resolution - 1;
  return static_cast<int32_t>(t);
}

// Bin center: -1 + (i + 0.5) * 2/N. Exact in doubles for power-of-two N.
inline double dequantize(const QuantizationGrid& grid, int32_t index) {
  require(index >= 0 && index < grid.resolution, ErrorCode::validation,
          "dequantize: index " + std::to_string(index) + " out of [0," +
              std::to_string(grid.resolution) + ")");
  return -1.0 + (index + 0.5) * grid.bin_width();
}

inline QuantizedVertex quantize(const QuantizationGrid& grid, const Vec3& p) {
  return {quantize(grid, p.x), quantize(grid, p.y), quantize(grid, p.z)};
}

inline Vec3 dequantize(const QuantizationGrid& grid, const QuantizedVertex& v) {
  return {dequantize(grid, v.ix), dequantize(grid, v.iy), dequantize(grid, v.iz)};
}

}  // namespace armesh

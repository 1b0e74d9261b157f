#include <doctest.h>

#include "armesh/quantize.hpp"

using namespace armesh;

TEST_CASE("quantize boundary and interior bins") {
  QuantizationGrid g(128);
  // The examples below use a virtual N=4 grid; emulate with the formula the
  // contract states, then check the production resolutions.
  auto quantize_n = [](int n, double x) {
    double t = std::floor((x + 1.0) * 0.5 * n);
    return int(std::clamp(t, 0.0, double(n - 1)));
  };
  CHECK(quantize_n(4, -1.0) == 0);
  CHECK(quantize_n(4, 1.0) == 3);
  CHECK(quantize_n(4, 0.3) == 2);

  CHECK(quantize(g, -1.0) == 0);
  CHECK(quantize(g, 1.0) == 127);
  CHECK(quantize(g, -2.0) == 0);    // clamps
  CHECK(quantize(g, 2.0) == 127);   // clamps

  // Hand-computed interior bins: floor((x+1)/2 * N).
  CHECK(quantize(g, 0.3) == 83);                        // floor(1.3 * 64)  = 83
  CHECK(quantize(QuantizationGrid(512), 0.3) == 332);   // floor(1.3 * 256) = 332
  CHECK(quantize(QuantizationGrid(512), -0.25) == 192); // floor(0.75 * 256)
}

TEST_CASE("dequantize returns bin centers") {
  // -1 + (i + 0.5) * 2/N: bin-center arithmetic checked at small N by hand.
  auto dequantize_n = [](int n, int i) { return -1.0 + (i + 0.5) * (2.0 / n); };
  CHECK(dequantize_n(4, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(dequantize_n(2, 0) == doctest::Approx(-0.5).epsilon(1e-15));

  QuantizationGrid g(512);
  CHECK(dequantize(g, 0) == doctest::Approx(-1.0 + 1.0 / 512).epsilon(1e-15));
}

TEST_CASE("quantize/dequantize fixed point is exact for every resolution") {
  for (int n : {128, 256, 512, 1024}) {
    QuantizationGrid g(n);
    for (int i = 0; i < n; ++i) CHECK(quantize(g, dequantize(g, i)) == i);
  }
}

TEST_CASE("roundtrip error is bounded by half a bin") {
  for (int n : {128, 512}) {
    QuantizationGrid g(n);
    double bound = 1.0 / n + 1e-15;
    for (int k = 0; k <= 20000; ++k) {
      double x = -1.0 + 2.0 * k / 20000.0;
      double back = dequantize(g, quantize(g, x));
      CHECK(std::abs(back - x) <= bound);
    }
  }
}

TEST_CASE("quantize is monotone nondecreasing") {
  QuantizationGrid g(256);
  int prev = 0;
  for (int k = 0; k <= 50000; ++k) {
    double x = -1.2 + 2.4 * k / 50000.0;
    int b = quantize(g, x);
    CHECK(b >= prev);
    prev = b;
  }
}

TEST_CASE("quantize validation errors") {
  QuantizationGrid g(128);
  CHECK_THROWS_AS(quantize(g, std::nan("")), Error);
  CHECK_THROWS_AS(dequantize(g, -1), Error);
  CHECK_THROWS_AS(dequantize(g, 128), Error);
  CHECK_THROWS_AS(QuantizationGrid(100), Error);
}

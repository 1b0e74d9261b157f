#include "armesh/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace armesh {

std::vector<double> least_squares_qr(std::vector<double> a, int m, int n,
                                     std::vector<double> b, int k, double rank_tol) {
  require(m >= n && n >= 1 && k >= 1, ErrorCode::validation, "least_squares_qr: bad shape");
  require(int(a.size()) == m * n && int(b.size()) == m * k, ErrorCode::validation,
          "least_squares_qr: size mismatch");

  auto A = [&](int r, int c) -> double& { return a[size_t(r) * n + c]; };
  auto B = [&](int r, int c) -> double& { return b[size_t(r) * k + c]; };

  std::vector<int> perm(n);
  for (int j = 0; j < n; ++j) perm[j] = j;
  std::vector<double> col_norm(n, 0.0);

  double max_pivot = 0.0;
  for (int j = 0; j < n; ++j) {
    // Column pivot: bring the column with the largest remaining norm forward.
    for (int c = j; c < n; ++c) {
      double s = 0.0;
      for (int r = j; r < m; ++r) s += A(r, c) * A(r, c);
      col_norm[c] = s;
    }
    int piv = j;
    for (int c = j + 1; c < n; ++c)
      if (col_norm[c] > col_norm[piv]) piv = c;
    if (piv != j) {
      for (int r = 0; r < m; ++r) std::swap(A(r, j), A(r, piv));
      std::swap(perm[j], perm[piv]);
    }

    // Householder reflector for column j.
    double s = 0.0;
    for (int r = j; r < m; ++r) s += A(r, j) * A(r, j);
    double sigma = std::sqrt(s);
    if (j == 0) max_pivot = sigma;
    require(sigma > rank_tol * std::max(max_pivot, 1e-300), ErrorCode::validation,
            "least_squares_qr: rank-deficient system");

    double alpha = A(j, j) >= 0 ? -sigma : sigma;
    std::vector<double> v(m - j);
    v[0] = A(j, j) - alpha;
    for (int r = j + 1; r < m; ++r) v[r - j] = A(r, j);
    double vnorm_sq = 0.0;
    for (double t : v) vnorm_sq += t * t;
    A(j, j) = alpha;
    for (int r = j + 1; r < m; ++r) A(r, j) = 0.0;
    if (vnorm_sq > 0.0) {
      for (int c = j + 1; c < n; ++c) {
        double d = 0.0;
        for (int r = j; r < m; ++r) d += v[r - j] * A(r, c);
        d = 2.0 * d / vnorm_sq;
        for (int r = j; r < m; ++r) A(r, c) -= d * v[r - j];
      }
      for (int c = 0; c < k; ++c) {
        double d = 0.0;
        for (int r = j; r < m; ++r) d += v[r - j] * B(r, c);
        d = 2.0 * d / vnorm_sq;
        for (int r = j; r < m; ++r) B(r, c) -= d * v[r - j];
      }
    }
  }

  // Back-substitution on the n x n upper triangle, then undo the pivoting.
  std::vector<double> x(size_t(n) * k, 0.0);
  for (int c = 0; c < k; ++c) {
    for (int r = n - 1; r >= 0; --r) {
      double s = B(r, c);
      for (int j = r + 1; j < n; ++j) s -= A(r, j) * x[size_t(perm[j]) * k + c];
      x[size_t(perm[r]) * k + c] = s / A(r, r);
    }
  }
  return x;
}

}  // namespace armesh

// Small dense least-squares via Householder QR with column pivoting.
// Sized for the pose fit (8x4 systems); no dependency on a matrix library.

#pragma once

#include <vector>

#include "armesh/common.hpp"

namespace armesh {

// Minimizes |A x - b|_2 for each of the k right-hand sides. A is m x n,
// row-major; B is m x k, row-major. Returns X (n x k, row-major).
// Rank deficiency (pivot below tol * largest pivot) raises a validation error.
std::vector<double> least_squares_qr(std::vector<double> a, int m, int n,
                                     std::vector<double> b, int k,
                                     double rank_tol = 1e-12);

}  // namespace armesh

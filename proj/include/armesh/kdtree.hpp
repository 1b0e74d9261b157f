// Exact nearest-neighbor search over 3D points. Median-split kd-tree with
// SoA leaves scanned by the kernels component, so distances are bit-identical
// to the brute-force path.

#pragma once

#include <vector>

#include "armesh/common.hpp"
#include "armesh/kernels.hpp"

namespace armesh {

class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& points);

  // Index refers to the original point order.
  kernels::NnHit nearest(const Vec3& q) const;
  size_t size() const { return perm_.size(); }

 private:
  struct Node {
    double split = 0.0;
    int axis = -1;          // -1 marks a leaf
    int left = -1, right = -1;
    uint32_t begin = 0, end = 0;
  };

  int build(uint32_t begin, uint32_t end, std::vector<Vec3>& pts);
  void search(int node, const Vec3& q, kernels::NnHit& best) const;

  std::vector<Node> nodes_;
  std::vector<double> xs_, ys_, zs_;  // permuted SoA
  std::vector<uint32_t> perm_;
};

}  // namespace armesh

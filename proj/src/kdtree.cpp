#include "armesh/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace armesh {

namespace {
constexpr uint32_t kLeafSize = 16;
}

KdTree::KdTree(const std::vector<Vec3>& points) {
  require(!points.empty(), ErrorCode::validation, "KdTree: empty point set");
  perm_.resize(points.size());
  std::iota(perm_.begin(), perm_.end(), 0u);
  std::vector<Vec3> pts = points;
  nodes_.reserve(2 * points.size() / kLeafSize + 2);
  build(0, uint32_t(points.size()), pts);
  xs_.resize(pts.size());
  ys_.resize(pts.size());
  zs_.resize(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    xs_[i] = pts[i].x;
    ys_[i] = pts[i].y;
    zs_[i] = pts[i].z;
  }
}

int KdTree::build(uint32_t begin, uint32_t end, std::vector<Vec3>& pts) {
  int id = int(nodes_.size());
  nodes_.push_back({});
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = pts[begin], hi = pts[begin];
  for (uint32_t i = begin; i < end; ++i) {
    lo = min3(lo, pts[i]);
    hi = max3(hi, pts[i]);
  }
  Vec3 ext = hi - lo;
  int axis = 0;
  if (ext.y > ext[axis]) axis = 1;
  if (ext.z > ext[axis]) axis = 2;
  if (ext[axis] <= 0.0) return id;  // all points coincide: keep as leaf

  uint32_t mid = (begin + end) / 2;
  // Sort perm_ and pts together through an index indirection.
  std::vector<uint32_t> idx(end - begin);
  std::iota(idx.begin(), idx.end(), 0u);
  std::nth_element(idx.begin(), idx.begin() + (mid - begin), idx.end(),
                   [&](uint32_t a, uint32_t b) {
                     return pts[begin + a][axis] < pts[begin + b][axis];
                   });
  std::vector<Vec3> tmp_pts(idx.size());
  std::vector<uint32_t> tmp_perm(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    tmp_pts[i] = pts[begin + idx[i]];
    tmp_perm[i] = perm_[begin + idx[i]];
  }
  std::copy(tmp_pts.begin(), tmp_pts.end(), pts.begin() + begin);
  std::copy(tmp_perm.begin(), tmp_perm.end(), perm_.begin() + begin);

  nodes_[id].axis = axis;
  nodes_[id].split = pts[mid][axis];
  int left = build(begin, mid, pts);
  int right = build(mid, end, pts);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(int node, const Vec3& q, kernels::NnHit& best) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    kernels::NnHit hit = kernels::nn_brute(q, xs_.data() + n.begin, ys_.data() + n.begin,
                                           zs_.data() + n.begin, n.end - n.begin);
    if (hit.dist_sq < best.dist_sq) {
      best.dist_sq = hit.dist_sq;
      best.index = perm_[n.begin + hit.index];
    }
    return;
  }
  double delta = q[n.axis] - n.split;
  int near = delta < 0.0 ? n.left : n.right;
  int far = delta < 0.0 ? n.right : n.left;
  search(near, q, best);
  if (delta * delta < best.dist_sq) search(far, q, best);
}

kernels::NnHit KdTree::nearest(const Vec3& q) const {
  kernels::NnHit best{0, std::numeric_limits<double>::infinity()};
  search(0, q, best);
  return best;
}

}  // namespace armesh

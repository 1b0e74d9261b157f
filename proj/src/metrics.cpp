#include "armesh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace armesh {

namespace {

constexpr size_t kBruteCutoff = 64;  // below this, skip building a tree

struct Soa {
  std::vector<double> xs, ys, zs;
  explicit Soa(const std::vector<Vec3>& pts) {
    xs.resize(pts.size());
    ys.resize(pts.size());
    zs.resize(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
      xs[i] = pts[i].x;
      ys[i] = pts[i].y;
      zs[i] = pts[i].z;
    }
  }
};

std::vector<double> nn_sq_dists(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  require(!a.empty() && !b.empty(), ErrorCode::validation, "nearest_sq_dists: empty cloud");
  std::vector<double> out(a.size());
  if (b.size() <= kBruteCutoff) {
    Soa soa(b);
    for (size_t i = 0; i < a.size(); ++i)
      out[i] = kernels::nn_brute(a[i], soa.xs.data(), soa.ys.data(), soa.zs.data(), b.size())
                   .dist_sq;
  } else {
    KdTree tree(b);
    for (size_t i = 0; i < a.size(); ++i) out[i] = tree.nearest(a[i]).dist_sq;
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

}  // namespace

std::vector<double> nearest_sq_dists(const PointCloud& a, const PointCloud& b) {
  return nn_sq_dists(a.points, b.points);
}

double chamfer(const PointCloud& a, const PointCloud& b) {
  return 0.5 * (mean(nn_sq_dists(a.points, b.points)) + mean(nn_sq_dists(b.points, a.points)));
}

double chamfer_single(const PointCloud& gt, const PointCloud& pred) {
  return mean(nn_sq_dists(gt.points, pred.points));
}

FScoreResult fscore(const PointCloud& pred, const PointCloud& gt, double threshold) {
  require(threshold > 0, ErrorCode::validation, "fscore: threshold must be > 0");
  double t2 = threshold * threshold;
  auto within = [t2](const std::vector<double>& d2) {
    size_t hits = 0;
    for (double d : d2) hits += d <= t2;
    return 100.0 * double(hits) / double(d2.size());
  };
  FScoreResult r;
  r.precision = within(nn_sq_dists(pred.points, gt.points));
  r.recall = within(nn_sq_dists(gt.points, pred.points));
  r.fscore = (r.precision + r.recall) > 0.0
                 ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                 : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Box IoU
// ---------------------------------------------------------------------------

namespace {

struct P2 {
  double x, z;
};

inline double cross2(const P2& o, const P2& a, const P2& b) {
  return (a.x - o.x) * (b.z - o.z) - (a.z - o.z) * (b.x - o.x);
}

// CCW corners of the yawed horizontal rectangle in the xz-plane.
std::vector<P2> horizontal_rect(const GravityBox& b) {
  double c = std::cos(b.yaw), s = std::sin(b.yaw);
  double hx = b.scale.x * 0.5, hz = b.scale.z * 0.5;
  auto rot = [&](double lx, double lz) -> P2 {
    // Matches Mat3::yaw restricted to (x,z).
    return {b.center.x + c * lx + s * lz, b.center.z - s * lx + c * lz};
  };
  std::vector<P2> corners = {rot(hx, hz), rot(-hx, hz), rot(-hx, -hz), rot(hx, -hz)};
  double area2 = 0.0;
  for (size_t i = 0; i < 4; ++i)
    area2 += corners[i].x * corners[(i + 1) % 4].z - corners[(i + 1) % 4].x * corners[i].z;
  if (area2 < 0.0) std::reverse(corners.begin(), corners.end());
  return corners;
}

double polygon_area(const std::vector<P2>& poly) {
  double a2 = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const P2& p = poly[i];
    const P2& q = poly[(i + 1) % poly.size()];
    a2 += p.x * q.z - q.x * p.z;
  }
  return std::abs(a2) * 0.5;
}

// Sutherland-Hodgman clip of `poly` against the CCW half-plane left of (a,b).
std::vector<P2> clip_half_plane(const std::vector<P2>& poly, const P2& a, const P2& b) {
  std::vector<P2> out;
  out.reserve(poly.size() + 2);
  for (size_t i = 0; i < poly.size(); ++i) {
    const P2& cur = poly[i];
    const P2& nxt = poly[(i + 1) % poly.size()];
    double dc = cross2(a, b, cur);
    double dn = cross2(a, b, nxt);
    if (dc >= 0.0) out.push_back(cur);
    if ((dc > 0.0 && dn < 0.0) || (dc < 0.0 && dn > 0.0)) {
      double t = dc / (dc - dn);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.z + t * (nxt.z - cur.z)});
    }
  }
  return out;
}

}  // namespace

double box_iou(const GravityBox& a, const GravityBox& b) {
  a.validate();
  b.validate();
  double vol_a = a.scale.x * a.scale.y * a.scale.z;
  double vol_b = b.scale.x * b.scale.y * b.scale.z;
  require(vol_a > 0 && vol_b > 0, ErrorCode::validation, "box_iou: degenerate box");

  double y_lo = std::max(a.center.y - a.scale.y * 0.5, b.center.y - b.scale.y * 0.5);
  double y_hi = std::min(a.center.y + a.scale.y * 0.5, b.center.y + b.scale.y * 0.5);
  double dy = y_hi - y_lo;
  if (dy <= 0.0) return 0.0;

  std::vector<P2> poly = horizontal_rect(a);
  std::vector<P2> clip = horizontal_rect(b);
  for (size_t i = 0; i < clip.size() && !poly.empty(); ++i)
    poly = clip_half_plane(poly, clip[i], clip[(i + 1) % clip.size()]);
  if (poly.size() < 3) return 0.0;

  double inter = polygon_area(poly) * dy;
  return inter / (vol_a + vol_b - inter);
}

// ---------------------------------------------------------------------------
// Scene alignment and evaluation
// ---------------------------------------------------------------------------

SceneAlignment align_scene(const PointCloud& pred, const PointCloud& gt) {
  require(!pred.points.empty() && !gt.points.empty(), ErrorCode::validation,
          "align_scene: empty cloud");
  Bounds bp = bounds_of(pred.points);
  Bounds bg = bounds_of(gt.points);
  double dp = bp.diagonal(), dg = bg.diagonal();
  require(dp > 0.0 && dg > 0.0, ErrorCode::validation, "align_scene: degenerate bounding box");
  SceneAlignment al;
  al.scale = dg / dp;
  al.translation = bg.center() - bp.center() * al.scale;
  return al;
}

MeshStats mesh_stats(const std::vector<TriangleMesh>& meshes) {
  MeshStats stats;
  stats.per_mesh.reserve(meshes.size());
  for (const TriangleMesh& m : meshes) {
    MeshStats::Row row{m.face_count(), m.vertex_count()};
    stats.total_faces += row.faces;
    stats.total_vertices += row.vertices;
    stats.per_mesh.push_back(row);
  }
  return stats;
}

std::string format_metric(double value) {
  // Magnitudes below the report granularity are numerical dust on unit-scale
  // scenes; snapping them keeps reports stable under exactly-invariant
  // transformations of the inputs.
  if (std::abs(value) < 1e-12) value = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

namespace {

std::vector<Vec3> normalize_into_unit_cube(const std::vector<Vec3>& pts, const Bounds& box) {
  // (p - center) / diagonal then x2: exact-arithmetic invariant under any
  // positive similarity of the inputs; applied to per-object metric clouds.
  Vec3 c = box.center();
  double d = box.diagonal();
  require(d > 0.0, ErrorCode::validation, "evaluate_scene: degenerate object bounds");
  std::vector<Vec3> out(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) out[i] = (pts[i] - c) / d * 2.0;
  return out;
}

}  // namespace

ScoreReport evaluate_scene(const std::vector<SceneObject>& pred,
                           const std::vector<SceneObject>& gt, const MetricConfig& config) {
  config.validate();
  require(!gt.empty(), ErrorCode::validation, "evaluate_scene: no ground-truth objects");

  auto check_unique = [](const std::vector<SceneObject>& objs, const char* side) {
    std::set<std::string> seen;
    for (const auto& o : objs)
      require(seen.insert(o.id).second, ErrorCode::validation,
              std::string("evaluate_scene: duplicate ") + side + " id '" + o.id + "'");
  };
  check_unique(pred, "pred");
  check_unique(gt, "gt");

  struct Sampled {
    const SceneObject* obj;
    PointCloud cloud;
  };
  auto sample_side = [&](const std::vector<SceneObject>& objs) {
    std::map<std::string, Sampled> out;  // ordered: report order is id-sorted
    for (const auto& o : objs) {
      require(!o.mesh.faces.empty(), ErrorCode::validation,
              "evaluate_scene: object '" + o.id + "' has no faces");
      uint64_t seed = mix_seed(config.seed, hash_bytes(o.id.data(), o.id.size()));
      out.emplace(o.id, Sampled{&o, sample_points(o.mesh, size_t(config.samples_per_mesh), seed)});
    }
    return out;
  };
  auto pred_samples = sample_side(pred);
  auto gt_samples = sample_side(gt);

  PointCloud pred_scene, gt_scene;
  for (auto& [id, s] : pred_samples)
    pred_scene.points.insert(pred_scene.points.end(), s.cloud.points.begin(),
                             s.cloud.points.end());
  for (auto& [id, s] : gt_samples)
    gt_scene.points.insert(gt_scene.points.end(), s.cloud.points.begin(), s.cloud.points.end());
  require(!pred_scene.points.empty(), ErrorCode::validation, "evaluate_scene: empty prediction");

  // Canonicalize pred coordinates before mapping into the gt frame; the
  // canonical form quotients out any global similarity of the prediction.
  Bounds bp = bounds_of(pred_scene.points);
  Bounds bg = bounds_of(gt_scene.points);
  require(bp.diagonal() > 0 && bg.diagonal() > 0, ErrorCode::validation,
          "evaluate_scene: degenerate scene bounds");
  Vec3 cp = bp.center(), cg = bg.center();
  double dp = bp.diagonal(), dg = bg.diagonal();
  auto align_point = [&](const Vec3& p) { return (p - cp) / dp * dg + cg; };
  PointCloud pred_aligned;
  pred_aligned.points.reserve(pred_scene.points.size());
  for (const Vec3& p : pred_scene.points) pred_aligned.points.push_back(align_point(p));

  ScoreReport report;
  report.config = config;
  report.cd = chamfer(pred_aligned, gt_scene);
  report.cd_s = chamfer_single(gt_scene, pred_aligned);
  FScoreResult f = fscore(pred_aligned, gt_scene, config.fscore_threshold);
  report.fscore = f.fscore;
  report.precision = f.precision;
  report.recall = f.recall;

  for (auto& [id, gs] : gt_samples) {
    auto it = pred_samples.find(id);
    if (it == pred_samples.end()) continue;
    PointCloud pn, gn;
    pn.points = normalize_into_unit_cube(it->second.cloud.points,
                                         bounds_of(it->second.obj->mesh.vertices));
    gn.points = normalize_into_unit_cube(gs.cloud.points, bounds_of(gs.obj->mesh.vertices));
    ObjectScore score;
    score.id = id;
    score.cd = chamfer(pn, gn);
    FScoreResult of = fscore(pn, gn, config.fscore_threshold);
    score.fscore = of.fscore;
    score.precision = of.precision;
    score.recall = of.recall;
    report.objects.push_back(std::move(score));
  }
  return report;
}

std::string ScoreReport::to_json() const {
  std::ostringstream os;
  os << "{\n  \"convention\": \"cd = 0.5*(mean sq nn dist both ways); cd_s = gt->pred; "
        "fscore at unsquared threshold\",\n";
  os << "  \"threshold\": " << format_metric(config.fscore_threshold)
     << ",\n  \"samples_per_mesh\": " << config.samples_per_mesh
     << ",\n  \"seed\": " << config.seed << ",\n";
  os << "  \"scene\": {\"cd\": " << format_metric(cd) << ", \"cd_s\": " << format_metric(cd_s)
     << ", \"fscore\": " << format_metric(fscore) << ", \"precision\": "
     << format_metric(precision) << ", \"recall\": " << format_metric(recall) << "},\n";
  os << "  \"objects\": [";
  for (size_t i = 0; i < objects.size(); ++i) {
    const ObjectScore& o = objects[i];
    os << (i ? ",\n    " : "\n    ");
    os << "{\"id\": \"" << o.id << "\", \"cd\": " << format_metric(o.cd)
       << ", \"fscore\": " << format_metric(o.fscore)
       << ", \"precision\": " << format_metric(o.precision)
       << ", \"recall\": " << format_metric(o.recall) << "}";
  }
  os << (objects.empty() ? "]\n}" : "\n  ]\n}");
  return os.str();
}

std::string ScoreReport::to_table() const {
  std::ostringstream os;
  char line[160];
  os << "level    id                     CD(x1e-3)   CD-S(x1e-3)   F(%)      P(%)      R(%)\n";
  std::snprintf(line, sizeof(line), "scene    %-20s %11s %13s %9s %9s %9s\n", "-",
                format_metric(cd * 1e3).c_str(), format_metric(cd_s * 1e3).c_str(),
                format_metric(fscore).c_str(), format_metric(precision).c_str(),
                format_metric(recall).c_str());
  os << line;
  for (const ObjectScore& o : objects) {
    std::snprintf(line, sizeof(line), "object   %-20s %11s %13s %9s %9s %9s\n", o.id.c_str(),
                  format_metric(o.cd * 1e3).c_str(), "-", format_metric(o.fscore).c_str(),
                  format_metric(o.precision).c_str(), format_metric(o.recall).c_str());
    os << line;
  }
  return os.str();
}

}  // namespace armesh

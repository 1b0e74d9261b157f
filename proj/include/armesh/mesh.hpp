// Indexed triangle mesh plus the half-edge connectivity used by the compact
// tokenizer and the decimators.

#pragma once

#include <array>
#include <vector>

#include "armesh/common.hpp"

namespace armesh {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  bool empty() const { return faces.empty(); }
  size_t vertex_count() const { return vertices.size(); }
  size_t face_count() const { return faces.size(); }
};

struct Bounds {
  Vec3 lo{0, 0, 0}, hi{0, 0, 0};
  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 size() const { return hi - lo; }
  double diagonal() const { return norm(hi - lo); }
};

Bounds bounds_of(const std::vector<Vec3>& points);
inline Bounds bounds_of(const TriangleMesh& mesh) { return bounds_of(mesh.vertices); }

inline double face_area(const TriangleMesh& m, const std::array<int, 3>& f) {
  return 0.5 * norm(cross(m.vertices[f[1]] - m.vertices[f[0]],
                          m.vertices[f[2]] - m.vertices[f[0]]));
}

inline Vec3 face_normal(const TriangleMesh& m, const std::array<int, 3>& f) {
  return normalized(cross(m.vertices[f[1]] - m.vertices[f[0]],
                          m.vertices[f[2]] - m.vertices[f[0]]));
}

double surface_area(const TriangleMesh& mesh);

// Drops faces with a repeated vertex index and validates index ranges.
TriangleMesh drop_degenerate_faces(const TriangleMesh& mesh);

// Half-edge connectivity. Half-edge 3f+k originates at faces[f][k] and points
// to faces[f][(k+1)%3]; next chains within the face (next^3 = id); twin pairs
// opposite-oriented edges where exactly two faces meet.
struct HalfEdgeMesh {
  struct HalfEdge {
    int origin = -1;
    int face = -1;
    int next = -1;
    int twin = -1;  // -1: boundary or unresolved (non-manifold) edge
  };

  struct EdgeIssue {
    int v0 = 0, v1 = 0;       // undirected edge
    int faces_on_edge = 0;    // number of incident half-edges
  };

  std::vector<HalfEdge> half_edges;     // 3 per face
  std::vector<int> vertex_half_edge;    // one outgoing half-edge per vertex, -1 if isolated
  std::vector<EdgeIssue> non_manifold_edges;          // >2 half-edges on an undirected edge
  std::vector<EdgeIssue> inconsistent_orientations;   // same directed edge used twice

  bool clean() const { return non_manifold_edges.empty() && inconsistent_orientations.empty(); }
  int head(int he) const { return half_edges[half_edges[he].next].origin; }
};

HalfEdgeMesh build_half_edge(const TriangleMesh& mesh);

// Faces grouped by shared undirected edges; `clean[c]` is false when the
// component contains a non-manifold or orientation-inconsistent edge.
struct FaceComponents {
  std::vector<int> face_component;
  std::vector<bool> clean;
  int count = 0;
};

FaceComponents face_components(const TriangleMesh& mesh, const HalfEdgeMesh& he);

}  // namespace armesh

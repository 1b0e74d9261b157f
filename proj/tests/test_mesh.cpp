#include <doctest.h>

#include "armesh/mesh.hpp"
#include "support.hpp"

using namespace armesh;

TEST_CASE("half-edge structure on a closed tetrahedron") {
  TriangleMesh tet = test::make_tetrahedron();
  HalfEdgeMesh he = build_half_edge(tet);
  REQUIRE(he.half_edges.size() == 12);
  CHECK(he.clean());
  for (size_t i = 0; i < he.half_edges.size(); ++i) {
    const auto& e = he.half_edges[i];
    // next^3 = id within the face
    int n3 = he.half_edges[he.half_edges[e.next].next].next;
    CHECK(n3 == int(i));
    // twin is an involution and reverses direction
    REQUIRE(e.twin >= 0);
    CHECK(he.half_edges[e.twin].twin == int(i));
    CHECK(he.half_edges[e.twin].origin == he.head(int(i)));
  }
}

TEST_CASE("half-edge boundary on a single triangle") {
  HalfEdgeMesh he = build_half_edge(test::make_triangle());
  REQUIRE(he.half_edges.size() == 3);
  for (const auto& e : he.half_edges) CHECK(e.twin == -1);
  CHECK(he.clean());
}

TEST_CASE("orientation rules") {
  // Two faces sharing an edge with opposite directions: twinned.
  TriangleMesh good;
  good.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  good.faces = {{0, 1, 2}, {1, 3, 2}};  // edge (1,2) vs (2,1)
  HalfEdgeMesh ghe = build_half_edge(good);
  CHECK(ghe.clean());
  int twinned = 0;
  for (const auto& e : ghe.half_edges) twinned += e.twin >= 0;
  CHECK(twinned == 2);

  // Same direction on both faces: inconsistent orientation, reported.
  TriangleMesh bad = good;
  bad.faces = {{0, 1, 2}, {1, 2, 3}};  // edge (1,2) twice
  HalfEdgeMesh bhe = build_half_edge(bad);
  CHECK(!bhe.clean());
  CHECK(bhe.inconsistent_orientations.size() == 1);
}

TEST_CASE("non-manifold edge report") {
  HalfEdgeMesh he = build_half_edge(test::make_nonmanifold_fan());
  REQUIRE(he.non_manifold_edges.size() == 1);
  CHECK(he.non_manifold_edges[0].v0 == 0);
  CHECK(he.non_manifold_edges[0].v1 == 1);
  CHECK(he.non_manifold_edges[0].faces_on_edge == 3);
}

TEST_CASE("face components split by edge connectivity") {
  TriangleMesh two = test::make_two_components();
  FaceComponents fc = face_components(two, build_half_edge(two));
  CHECK(fc.count == 2);
  CHECK(fc.clean[0]);
  CHECK(fc.clean[1]);

  // A shared vertex without a shared edge still separates components.
  TriangleMesh pinch = test::make_pinch();
  FaceComponents pfc = face_components(pinch, build_half_edge(pinch));
  CHECK(pfc.count == 2);

  TriangleMesh nm = test::make_nonmanifold_fan();
  FaceComponents nfc = face_components(nm, build_half_edge(nm));
  CHECK(nfc.count == 1);
  CHECK(!nfc.clean[0]);
}

TEST_CASE("degenerate faces are rejected or dropped") {
  TriangleMesh m = test::make_triangle();
  m.faces.push_back({0, 0, 1});
  CHECK_THROWS_AS(build_half_edge(m), Error);
  TriangleMesh cleaned = drop_degenerate_faces(m);
  CHECK(cleaned.faces.size() == 1);
}

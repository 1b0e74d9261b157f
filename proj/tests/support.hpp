// Shared test fixtures: the hand-built mesh corpus, mesh/box fuzzers, and a
// couple of independent oracles.

#pragma once

#include <string>
#include <vector>

#include "armesh/common.hpp"
#include "armesh/mesh.hpp"
#include "armesh/pose.hpp"

namespace armesh::test {

struct NamedMesh {
  std::string name;
  TriangleMesh mesh;
};

TriangleMesh make_triangle();
TriangleMesh make_tetrahedron();
TriangleMesh make_cube_quads();                    // 12 faces
TriangleMesh make_cube_grid(int divisions);        // 2*d*d*6 faces, welded
TriangleMesh make_icosphere(int subdivisions);     // 20 * 4^n faces
TriangleMesh make_strip(int quads);                // open triangle strip
TriangleMesh make_grid_plane(int nx, int nz);
TriangleMesh make_heightfield(int nx, int nz, uint64_t seed);
TriangleMesh make_cylinder(int segments, bool capped);
TriangleMesh make_cone(int segments);
TriangleMesh make_torus(int major, int minor);
TriangleMesh make_octahedron();
TriangleMesh make_square_pyramid();
TriangleMesh make_disk_fan(int segments);          // closed fan around a center
TriangleMesh make_lshape();
TriangleMesh make_two_components();                // two separated tetrahedra
TriangleMesh make_pinch();                         // two fans sharing one vertex
TriangleMesh make_nonmanifold_fan();               // 3 faces on a shared edge

// >= 20 hand-built meshes covering the tokenizer edge cases.
std::vector<NamedMesh> make_corpus();

// Small manifold-ish mesh driven entirely by the seed, scaled into the unit
// cube interior, with vertex and face order shuffled.
TriangleMesh fuzz_mesh(uint64_t seed);

// Random gravity-aligned box whose corners stay inside [-1,1]^3.
GravityBox fuzz_box(Rng& rng);

// Shuffles vertex ids and face order without changing the geometry.
TriangleMesh permute_mesh(const TriangleMesh& mesh, uint64_t seed);

// Uniformly scales + recenters into [-s, s]^3 (aspect preserved).
TriangleMesh fit_into_cube(const TriangleMesh& mesh, double s = 0.9);

// O(n^2) nearest-neighbor oracle, independent of the library kernels.
double brute_nn_sq(const Vec3& q, const std::vector<Vec3>& pts);

}  // namespace armesh::test

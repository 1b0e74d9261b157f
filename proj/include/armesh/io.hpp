// File formats: OBJ and binary little-endian PLY meshes, PFM/PGM rasters,
// RLE mask sidecars, FMAP feature maps, ARMT token containers, and the JSON
// documents (intrinsics, boxes, manifests).

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "armesh/assembly.hpp"
#include "armesh/geometry.hpp"
#include "armesh/mesh.hpp"
#include "armesh/pose.hpp"
#include "armesh/vocab.hpp"

namespace armesh::io {

using std::filesystem::path;

// --- meshes ---------------------------------------------------------------

TriangleMesh read_mesh(const path& file);              // dispatches on extension
void write_mesh(const path& file, const TriangleMesh& mesh);

TriangleMesh read_obj(const path& file);
void write_obj(const path& file, const TriangleMesh& mesh);
TriangleMesh read_ply(const path& file);
void write_ply(const path& file, const TriangleMesh& mesh);

// Scene variants with per-face provenance: OBJ groups `g object_<id>`, PLY
// face property `uint object_id` (index into the id order written).
void write_scene(const path& file, const ComposedScene& scene);

// Point clouds as PLY vertices; pixels ride along as (u,v) properties.
void write_cloud_ply(const path& file, const PointCloud& cloud);
PointCloud read_cloud_ply(const path& file);

// --- rasters ----------------------------------------------------------------

// PFM (little-endian float, bottom-up rows) or 16-bit PGM; for PGM the raw
// values are millimeters scaled by pgm_scale.
DepthMap read_depth(const path& file, double pgm_scale = 1.0);
DepthMap read_pfm(const path& file);
void write_pfm(const path& file, const DepthMap& depth);
DepthMap read_depth_pgm(const path& file, double scale);
void write_depth_pgm(const path& file, const DepthMap& depth, double scale);

InstanceMask read_mask_pgm(const path& file);  // 8-bit, nonzero = member
void write_mask_pgm(const path& file, const InstanceMask& mask);

// RLE text sidecar: one record per line,
//   <id> <width> <height> <run...>   (runs alternate outside/inside, row-major)
std::vector<std::pair<std::string, InstanceMask>> read_rle_masks(const path& file);
void write_rle_masks(const path& file,
                     const std::vector<std::pair<std::string, InstanceMask>>& masks);

// Flat f32 grid: magic "FMAP", u32 width/height/channels, then
// width*height*channels little-endian floats, channel-interleaved.
FeatureMap read_fmap(const path& file);
void write_fmap(const path& file, const FeatureMap& fm);

// --- tokens -----------------------------------------------------------------

// Binary container: magic "ARMT", u8 scheme, u16 resolution, u32 count, then
// u32 token ids (all little-endian).
TokenSequence read_tokens(const path& file);
void write_tokens(const path& file, const TokenSequence& seq);

// One JSON object per line with the token's class annotation.
void write_tokens_jsonl(const path& file, const TokenSequence& seq);

// --- JSON documents ---------------------------------------------------------

CameraIntrinsics read_intrinsics_json(const path& file);
void write_intrinsics_json(const path& file, const CameraIntrinsics& k);

GravityBox read_box_json(const path& file);
void write_box_json(const path& file, const GravityBox& box);
std::string corners_to_json(const CornerSet& corners);

// Accepts either a bare JSON array of objects or {"frame": ..., "objects": [...]}.
SceneManifest read_manifest(const path& file);
void write_manifest(const path& file, const SceneManifest& manifest);

}  // namespace armesh::io

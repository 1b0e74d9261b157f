// Scene composition: decode unified token streams into posed meshes and merge
// per-object geometry into one scene mesh with face-level provenance.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "armesh/geometry.hpp"
#include "armesh/pose.hpp"
#include "armesh/sequence.hpp"

namespace armesh {

struct SceneObjectSpec {
  std::string id;
  std::string mesh_path;   // exactly one of mesh_path / token_path
  std::string token_path;
  std::optional<AffineTransform> transform;
};

struct SceneManifest {
  std::vector<SceneObjectSpec> objects;
  std::optional<NormalizationFrame> frame;  // scene normalization, if recorded
};

struct DecodedObject {
  AffineTransform transform;  // fitted, thin columns inflated to one bin
  GravityBox box;             // (center, scale, yaw) reading of the transform
  double fit_residual = 0.0;
  TriangleMesh mesh;          // posed into the scene frame
};

// parse -> decode corners -> fit against canonical corners -> decode mesh in
// canonical space -> apply the transform.
DecodedObject decode_object(const TokenSequence& tokens, const UnifiedVocabulary& vocab,
                            const QuantizationGrid& grid);

struct ComposedScene {
  TriangleMesh mesh;
  std::vector<std::string> ids;         // stable id-sorted object order
  std::vector<uint32_t> face_object;    // per face: index into ids
};

// Loads every object (mesh file or unified token file), applies transforms,
// and concatenates in id order. Paths resolve relative to base_dir.
ComposedScene compose_scene(const SceneManifest& manifest,
                            const std::filesystem::path& base_dir);

}  // namespace armesh

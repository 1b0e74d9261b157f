#include "armesh/assembly.hpp"

#include <algorithm>
#include <set>

#include "armesh/io.hpp"
#include "armesh/mesh_codec.hpp"

namespace armesh {

DecodedObject decode_object(const TokenSequence& tokens, const UnifiedVocabulary& vocab,
                            const QuantizationGrid& grid) {
  require(vocab.base.resolution == grid.resolution, ErrorCode::validation,
          "decode_object: vocabulary/grid resolution mismatch");
  ObjectRecord record = parse(tokens, vocab);

  CornerSet global = decode_corners(record.pose_tokens, grid, vocab.pose_style());
  AffineFit fit = fit_affine(canonical_corners(), global);

  DecodedObject out;
  // One quantization bin is the smallest credible extent; thinner columns are
  // quantization collapse and would make the transform singular.
  out.transform = inflate_degenerate_columns(fit.transform, grid.bin_width());
  out.fit_residual = fit.residual;
  out.box = box_from_affine(out.transform);

  TriangleMesh canonical = decode(record.mesh_tokens);
  out.mesh = transform_mesh(out.transform, canonical);
  return out;
}

ComposedScene compose_scene(const SceneManifest& manifest,
                            const std::filesystem::path& base_dir) {
  require(!manifest.objects.empty(), ErrorCode::validation, "compose_scene: no objects");
  {
    std::set<std::string> ids;
    for (const auto& o : manifest.objects)
      require(ids.insert(o.id).second, ErrorCode::validation,
              "compose_scene: duplicate object id '" + o.id + "'");
  }

  std::vector<const SceneObjectSpec*> order;
  order.reserve(manifest.objects.size());
  for (const auto& o : manifest.objects) order.push_back(&o);
  std::sort(order.begin(), order.end(),
            [](const SceneObjectSpec* a, const SceneObjectSpec* b) { return a->id < b->id; });

  ComposedScene scene;
  for (const SceneObjectSpec* spec : order) {
    TriangleMesh mesh;
    if (!spec->mesh_path.empty()) {
      mesh = io::read_mesh(base_dir / spec->mesh_path);
      if (spec->transform) mesh = transform_mesh(*spec->transform, mesh);
    } else {
      TokenSequence tokens = io::read_tokens(base_dir / spec->token_path);
      require(tokens.scheme == Scheme::unified, ErrorCode::validation,
              "compose_scene: '" + spec->token_path + "' is not a unified token stream");
      UnifiedVocabulary vocab =
          UnifiedVocabulary::make(infer_unified_base(tokens), tokens.resolution);
      DecodedObject decoded = decode_object(tokens, vocab, QuantizationGrid(tokens.resolution));
      mesh = std::move(decoded.mesh);
      // A manifest transform composes on top of the decoded pose.
      if (spec->transform) mesh = transform_mesh(*spec->transform, mesh);
    }

    uint32_t object_index = uint32_t(scene.ids.size());
    scene.ids.push_back(spec->id);
    int base = int(scene.mesh.vertices.size());
    scene.mesh.vertices.insert(scene.mesh.vertices.end(), mesh.vertices.begin(),
                               mesh.vertices.end());
    for (const auto& f : mesh.faces) {
      scene.mesh.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
      scene.face_object.push_back(object_index);
    }
  }
  return scene;
}

}  // namespace armesh

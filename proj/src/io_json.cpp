#include <fstream>

#include <json.hpp>

#include "armesh/io.hpp"
#include "armesh/metrics.hpp"

namespace armesh::io {

using nlohmann::json;

namespace {

json load_json(const path& file) {
  std::ifstream in(file);
  require(in.good(), ErrorCode::io, "cannot open for reading: " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, file.string() + ": " + e.what());
  }
  return j;
}

void save_json(const path& file, const json& j) {
  std::ofstream out(file);
  require(out.good(), ErrorCode::io, "cannot open for writing: " + file.string());
  out << j.dump(2) << "\n";
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

Vec3 vec3_from(const json& j, const std::string& what) {
  require(j.is_array() && j.size() == 3, ErrorCode::parse, what + " must be a 3-array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

CameraIntrinsics read_intrinsics_json(const path& file) {
  json j = load_json(file);
  CameraIntrinsics k;
  try {
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, file.string() + ": " + e.what());
  }
  k.validate();
  return k;
}

void write_intrinsics_json(const path& file, const CameraIntrinsics& k) {
  save_json(file, json{{"fx", k.fx},
                       {"fy", k.fy},
                       {"cx", k.cx},
                       {"cy", k.cy},
                       {"width", k.width},
                       {"height", k.height}});
}

GravityBox read_box_json(const path& file) {
  json j = load_json(file);
  GravityBox box;
  try {
    box.center = vec3_from(j.at("center"), "center");
    box.scale = vec3_from(j.at("scale"), "scale");
    box.yaw = j.at("yaw").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, file.string() + ": " + e.what());
  }
  box.validate();
  return box;
}

void write_box_json(const path& file, const GravityBox& box) {
  save_json(file, json{{"center", {box.center.x, box.center.y, box.center.z}},
                       {"scale", {box.scale.x, box.scale.y, box.scale.z}},
                       {"yaw", box.yaw}});
}

std::string corners_to_json(const CornerSet& corners) {
  json arr = json::array();
  for (const Vec3& c : corners.corners) arr.push_back({c.x, c.y, c.z});
  return arr.dump();
}

namespace {

SceneObjectSpec object_from_json(const json& j, const path& file) {
  SceneObjectSpec spec;
  try {
    spec.id = j.at("id").get<std::string>();
    if (j.contains("mesh_path")) spec.mesh_path = j["mesh_path"].get<std::string>();
    if (j.contains("token_path")) spec.token_path = j["token_path"].get<std::string>();
    if (j.contains("transform")) {
      const json& t = j["transform"];
      require(t.is_array() && (t.size() == 12 || (t.size() == 3 && t[0].is_array())),
              ErrorCode::parse, file.string() + ": transform must be 3x4 row-major");
      AffineTransform at;
      auto entry = [&](int r, int c) {
        return t.size() == 12 ? t[r * 4 + c].get<double>() : t[r][c].get<double>();
      };
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) at.linear.at(r, c) = entry(r, c);
        at.translation[r] = entry(r, 3);
      }
      spec.transform = at;
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, file.string() + ": " + e.what());
  }
  require(spec.mesh_path.empty() != spec.token_path.empty(), ErrorCode::validation,
          file.string() + ": object '" + spec.id +
              "' needs exactly one of mesh_path/token_path");
  return spec;
}

}  // namespace

SceneManifest read_manifest(const path& file) {
  json j = load_json(file);
  SceneManifest manifest;
  const json* objects = nullptr;
  if (j.is_array()) {
    objects = &j;
  } else {
    require(j.is_object() && j.contains("objects"), ErrorCode::parse,
            file.string() + ": manifest must be an array or contain 'objects'");
    objects = &j["objects"];
    if (j.contains("frame")) {
      try {
        manifest.frame = NormalizationFrame{vec3_from(j["frame"].at("center"), "frame.center"),
                                            j["frame"].at("half_extent").get<double>()};
      } catch (const json::exception& e) {
        fail(ErrorCode::parse, file.string() + ": " + e.what());
      }
      require(manifest.frame->half_extent > 0, ErrorCode::validation,
              file.string() + ": frame.half_extent must be positive");
    }
  }
  require(objects->is_array(), ErrorCode::parse, file.string() + ": 'objects' must be an array");
  for (const json& o : *objects) manifest.objects.push_back(object_from_json(o, file));
  return manifest;
}

void write_manifest(const path& file, const SceneManifest& manifest) {
  json objects = json::array();
  for (const SceneObjectSpec& o : manifest.objects) {
    json jo{{"id", o.id}};
    if (!o.mesh_path.empty()) jo["mesh_path"] = o.mesh_path;
    if (!o.token_path.empty()) jo["token_path"] = o.token_path;
    if (o.transform) {
      json t = json::array();
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) t.push_back(o.transform->linear.at(r, c));
        t.push_back(o.transform->translation[r]);
      }
      jo["transform"] = t;
    }
    objects.push_back(jo);
  }
  if (manifest.frame) {
    save_json(file, json{{"frame",
                          {{"center",
                            {manifest.frame->center.x, manifest.frame->center.y,
                             manifest.frame->center.z}},
                           {"half_extent", manifest.frame->half_extent}}},
                         {"objects", objects}});
  } else {
    save_json(file, objects);
  }
}

}  // namespace armesh::io

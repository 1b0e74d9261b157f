#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "armesh/io.hpp"

namespace armesh::io {

namespace {

std::ifstream open_in(const path& file, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(file, mode);
  require(in.good(), ErrorCode::io, "cannot open for reading: " + file.string());
  return in;
}

std::ofstream open_out(const path& file, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(file, mode);
  require(out.good(), ErrorCode::io, "cannot open for writing: " + file.string());
  return out;
}

std::string lower_ext(const path& file) {
  std::string e = file.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

void fan_triangulate(std::vector<std::array<int, 3>>& faces, const std::vector<int>& poly) {
  for (size_t i = 1; i + 1 < poly.size(); ++i)
    faces.push_back({poly[0], poly[int(i)], poly[i + 1]});
}

}  // namespace

TriangleMesh read_mesh(const path& file) {
  std::string ext = lower_ext(file);
  if (ext == ".obj") return read_obj(file);
  if (ext == ".ply") return read_ply(file);
  fail(ErrorCode::io, "unsupported mesh extension '" + ext + "': " + file.string());
}

void write_mesh(const path& file, const TriangleMesh& mesh) {
  std::string ext = lower_ext(file);
  if (ext == ".obj") return write_obj(file, mesh);
  if (ext == ".ply") return write_ply(file, mesh);
  fail(ErrorCode::io, "unsupported mesh extension '" + ext + "': " + file.string());
}

// --- OBJ --------------------------------------------------------------------

TriangleMesh read_obj(const path& file) {
  std::ifstream in = open_in(file);
  TriangleMesh mesh;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      ls >> p.x >> p.y >> p.z;
      require(!ls.fail(), ErrorCode::io,
              file.string() + ":" + std::to_string(lineno) + ": malformed vertex");
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string item;
      while (ls >> item) {
        // "i", "i/t", "i/t/n", "i//n" -- only the leading index matters here.
        int idx = 0;
        try {
          idx = std::stoi(item.substr(0, item.find('/')));
        } catch (const std::exception&) {
          fail(ErrorCode::io, file.string() + ":" + std::to_string(lineno) + ": bad face index");
        }
        if (idx < 0) idx = int(mesh.vertices.size()) + idx + 1;
        require(idx >= 1 && idx <= int(mesh.vertices.size()), ErrorCode::io,
                file.string() + ":" + std::to_string(lineno) + ": face index out of range");
        poly.push_back(idx - 1);
      }
      require(poly.size() >= 3, ErrorCode::io,
              file.string() + ":" + std::to_string(lineno) + ": face with < 3 vertices");
      fan_triangulate(mesh.faces, poly);
    }
    // everything else (vn, vt, g, o, usemtl, ...) is ignored
  }
  return mesh;
}

namespace {

void write_obj_body(std::ofstream& out, const TriangleMesh& mesh) {
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    out << buf;
  }
}

}  // namespace

void write_obj(const path& file, const TriangleMesh& mesh) {
  std::ofstream out = open_out(file);
  write_obj_body(out, mesh);
  for (const auto& f : mesh.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

// --- PLY --------------------------------------------------------------------

namespace {

struct PlyProperty {
  std::string name;
  int size = 0;       // bytes for scalar properties
  bool is_list = false;
  int count_size = 0;  // list count bytes
  int item_size = 0;   // list item bytes
  bool item_float = false;
  bool is_float = false;
};

int ply_type_size(const std::string& t, bool& is_float) {
  is_float = false;
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32") return 4;
  if (t == "float" || t == "float32") {
    is_float = true;
    return 4;
  }
  if (t == "double" || t == "float64") {
    is_float = true;
    return 8;
  }
  fail(ErrorCode::io, "unsupported PLY property type: " + t);
}

double read_scalar(const char* p, int size, bool is_float) {
  if (is_float && size == 4) {
    float f;
    std::memcpy(&f, p, 4);
    return f;
  }
  if (is_float && size == 8) {
    double d;
    std::memcpy(&d, p, 8);
    return d;
  }
  int64_t v = 0;
  std::memcpy(&v, p, size);  // little-endian, zero-extended; fine for indices
  return double(v);
}

struct PlyElement {
  std::string name;
  size_t count = 0;
  std::vector<PlyProperty> props;
};

}  // namespace

TriangleMesh read_ply(const path& file) {
  std::ifstream in = open_in(file, std::ios::in | std::ios::binary);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "ply", ErrorCode::io, "not a PLY file: " + file.string());

  std::vector<PlyElement> elements;
  bool binary_le = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "comment" || tag == "obj_info") continue;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = fmt == "binary_little_endian";
      require(binary_le, ErrorCode::io, "only binary_little_endian PLY is supported: " + fmt);
    } else if (tag == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      require(!elements.empty(), ErrorCode::io, "PLY property before element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_t, item_t;
        ls >> count_t >> item_t >> p.name;
        bool dummy;
        p.is_list = true;
        p.count_size = ply_type_size(count_t, dummy);
        p.item_size = ply_type_size(item_t, p.item_float);
      } else {
        ls >> p.name;
        p.size = ply_type_size(type, p.is_float);
      }
      elements.back().props.push_back(p);
    } else if (tag == "end_header") {
      break;
    } else {
      fail(ErrorCode::io, "unexpected PLY header line: " + line);
    }
  }

  TriangleMesh mesh;
  std::vector<char> buf;
  for (const PlyElement& e : elements) {
    if (e.name == "vertex") {
      int stride = 0, off_x = -1, off_y = -1, off_z = -1;
      PlyProperty px, py, pz;
      for (const PlyProperty& p : e.props) {
        require(!p.is_list, ErrorCode::io, "list property on PLY vertex element");
        if (p.name == "x") { off_x = stride; px = p; }
        if (p.name == "y") { off_y = stride; py = p; }
        if (p.name == "z") { off_z = stride; pz = p; }
        stride += p.size;
      }
      require(off_x >= 0 && off_y >= 0 && off_z >= 0, ErrorCode::io,
              "PLY vertex element lacks x/y/z");
      buf.resize(stride);
      mesh.vertices.reserve(e.count);
      for (size_t i = 0; i < e.count; ++i) {
        in.read(buf.data(), stride);
        require(in.good(), ErrorCode::io, "truncated PLY vertex data");
        mesh.vertices.push_back({read_scalar(buf.data() + off_x, px.size, px.is_float),
                                 read_scalar(buf.data() + off_y, py.size, py.is_float),
                                 read_scalar(buf.data() + off_z, pz.size, pz.is_float)});
      }
    } else if (e.name == "face") {
      for (size_t i = 0; i < e.count; ++i) {
        std::vector<int> poly;
        for (const PlyProperty& p : e.props) {
          if (p.is_list) {
            buf.resize(std::max(p.count_size, p.item_size));
            in.read(buf.data(), p.count_size);
            int n = int(read_scalar(buf.data(), p.count_size, false));
            require(in.good() && n >= 3 && n <= 255, ErrorCode::io, "bad PLY face arity");
            poly.resize(n);
            for (int k = 0; k < n; ++k) {
              in.read(buf.data(), p.item_size);
              poly[k] = int(read_scalar(buf.data(), p.item_size, p.item_float));
            }
          } else {
            buf.resize(p.size);
            in.read(buf.data(), p.size);  // e.g. object_id; skipped on plain reads
          }
        }
        require(in.good(), ErrorCode::io, "truncated PLY face data");
        for (int idx : poly)
          require(idx >= 0 && idx < int(mesh.vertices.size()), ErrorCode::io,
                  "PLY face index out of range");
        fan_triangulate(mesh.faces, poly);
      }
    } else {
      // Unknown element: only skippable when fixed-stride.
      int stride = 0;
      for (const PlyProperty& p : e.props) {
        require(!p.is_list, ErrorCode::io, "cannot skip PLY list element: " + e.name);
        stride += p.size;
      }
      in.seekg(std::streamoff(e.count) * stride, std::ios::cur);
    }
  }
  return mesh;
}

namespace {

void write_ply_impl(const path& file, const TriangleMesh& mesh,
                    const std::vector<uint32_t>* face_object,
                    const std::vector<std::string>* ids) {
  std::ofstream out = open_out(file, std::ios::out | std::ios::binary);
  out << "ply\nformat binary_little_endian 1.0\n";
  if (ids) {
    out << "comment object_id indexes the following id list\n";
    for (size_t i = 0; i < ids->size(); ++i)
      out << "comment object " << i << " " << (*ids)[i] << "\n";
  }
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "element face " << mesh.faces.size() << "\n";
  out << "property list uchar int vertex_indices\n";
  if (face_object) out << "property uint object_id\n";
  out << "end_header\n";
  for (const Vec3& v : mesh.vertices) out.write(reinterpret_cast<const char*>(&v), 24);
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    unsigned char n = 3;
    out.write(reinterpret_cast<const char*>(&n), 1);
    int idx[3] = {mesh.faces[f][0], mesh.faces[f][1], mesh.faces[f][2]};
    out.write(reinterpret_cast<const char*>(idx), 12);
    if (face_object) {
      uint32_t oid = (*face_object)[f];
      out.write(reinterpret_cast<const char*>(&oid), 4);
    }
  }
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

}  // namespace

void write_ply(const path& file, const TriangleMesh& mesh) {
  write_ply_impl(file, mesh, nullptr, nullptr);
}

void write_scene(const path& file, const ComposedScene& scene) {
  require(scene.face_object.size() == scene.mesh.faces.size(), ErrorCode::validation,
          "write_scene: provenance length mismatch");
  std::string ext = lower_ext(file);
  if (ext == ".ply") {
    write_ply_impl(file, scene.mesh, &scene.face_object, &scene.ids);
    return;
  }
  require(ext == ".obj", ErrorCode::io, "scene output must be .obj or .ply");
  std::ofstream out = open_out(file);
  write_obj_body(out, scene.mesh);
  uint32_t current = uint32_t(-1);
  for (size_t f = 0; f < scene.mesh.faces.size(); ++f) {
    if (scene.face_object[f] != current) {
      current = scene.face_object[f];
      out << "g object_" << scene.ids[current] << "\n";
    }
    const auto& face = scene.mesh.faces[f];
    out << "f " << face[0] + 1 << ' ' << face[1] + 1 << ' ' << face[2] + 1 << '\n';
  }
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

void write_cloud_ply(const path& file, const PointCloud& cloud) {
  cloud.validate();
  std::ofstream out = open_out(file, std::ios::out | std::ios::binary);
  bool pixels = cloud.has_pixels();
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << cloud.points.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (pixels) out << "property double u\nproperty double v\n";
  out << "end_header\n";
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    out.write(reinterpret_cast<const char*>(&cloud.points[i]), 24);
    if (pixels) out.write(reinterpret_cast<const char*>(&cloud.pixels[i]), 16);
  }
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

PointCloud read_cloud_ply(const path& file) {
  TriangleMesh as_mesh = read_ply(file);
  PointCloud cloud;
  cloud.points = std::move(as_mesh.vertices);
  return cloud;
}

}  // namespace armesh::io

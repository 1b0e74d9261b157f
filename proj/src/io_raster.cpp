#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "armesh/io.hpp"

namespace armesh::io {

namespace {

std::ifstream open_in(const path& file) {
  std::ifstream in(file, std::ios::in | std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open for reading: " + file.string());
  return in;
}

std::ofstream open_out(const path& file) {
  std::ofstream out(file, std::ios::out | std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot open for writing: " + file.string());
  return out;
}

// Netpbm-style token: skips whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(char(c));
      break;
    }
  }
  while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(char(c));
  require(!tok.empty(), ErrorCode::io, "truncated PNM header");
  return tok;
}

}  // namespace

DepthMap read_depth(const path& file, double pgm_scale) {
  std::string ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".pfm") return read_pfm(file);
  if (ext == ".pgm") return read_depth_pgm(file, pgm_scale);
  fail(ErrorCode::io, "unsupported depth extension '" + ext + "': " + file.string());
}

DepthMap read_pfm(const path& file) {
  std::ifstream in = open_in(file);
  std::string magic = pnm_token(in);
  require(magic == "Pf", ErrorCode::io, "expected grayscale PFM ('Pf'): " + file.string());
  int w = std::stoi(pnm_token(in));
  int h = std::stoi(pnm_token(in));
  double scale = std::stod(pnm_token(in));
  require(w > 0 && h > 0, ErrorCode::io, "bad PFM dimensions");
  require(scale < 0, ErrorCode::io, "big-endian PFM not supported");

  DepthMap depth{w, h, std::vector<float>(size_t(w) * h)};
  // PFM rows run bottom-to-top.
  for (int row = h - 1; row >= 0; --row) {
    in.read(reinterpret_cast<char*>(&depth.values[size_t(row) * w]), std::streamsize(w) * 4);
    require(in.good(), ErrorCode::io, "truncated PFM data");
  }
  for (float v : depth.values)
    require(std::isfinite(v) && v >= 0.0f, ErrorCode::io, "PFM depth contains invalid values");
  return depth;
}

void write_pfm(const path& file, const DepthMap& depth) {
  std::ofstream out = open_out(file);
  out << "Pf\n" << depth.width << " " << depth.height << "\n-1.0\n";
  for (int row = depth.height - 1; row >= 0; --row)
    out.write(reinterpret_cast<const char*>(&depth.values[size_t(row) * depth.width]),
              std::streamsize(depth.width) * 4);
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

DepthMap read_depth_pgm(const path& file, double scale) {
  require(scale > 0, ErrorCode::validation, "PGM depth scale must be positive");
  std::ifstream in = open_in(file);
  std::string magic = pnm_token(in);
  require(magic == "P5", ErrorCode::io, "expected binary PGM ('P5'): " + file.string());
  int w = std::stoi(pnm_token(in));
  int h = std::stoi(pnm_token(in));
  int maxval = std::stoi(pnm_token(in));
  require(w > 0 && h > 0, ErrorCode::io, "bad PGM dimensions");
  require(maxval == 65535, ErrorCode::io, "depth PGM must be 16-bit (maxval 65535)");

  std::vector<unsigned char> raw(size_t(w) * h * 2);
  in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  require(in.good(), ErrorCode::io, "truncated PGM data");
  DepthMap depth{w, h, std::vector<float>(size_t(w) * h)};
  for (size_t i = 0; i < depth.values.size(); ++i) {
    // Netpbm stores 16-bit samples most-significant byte first.
    uint16_t mm = uint16_t(raw[2 * i] << 8 | raw[2 * i + 1]);
    depth.values[i] = float(double(mm) * scale / 1000.0);
  }
  return depth;
}

void write_depth_pgm(const path& file, const DepthMap& depth, double scale) {
  require(scale > 0, ErrorCode::validation, "PGM depth scale must be positive");
  std::ofstream out = open_out(file);
  out << "P5\n" << depth.width << " " << depth.height << "\n65535\n";
  for (float v : depth.values) {
    double mm = double(v) * 1000.0 / scale;
    uint16_t q = uint16_t(std::clamp(mm + 0.5, 0.0, 65535.0));
    unsigned char bytes[2] = {(unsigned char)(q >> 8), (unsigned char)(q & 0xff)};
    out.write(reinterpret_cast<const char*>(bytes), 2);
  }
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

InstanceMask read_mask_pgm(const path& file) {
  std::ifstream in = open_in(file);
  std::string magic = pnm_token(in);
  require(magic == "P5", ErrorCode::io, "expected binary PGM ('P5'): " + file.string());
  int w = std::stoi(pnm_token(in));
  int h = std::stoi(pnm_token(in));
  int maxval = std::stoi(pnm_token(in));
  require(w > 0 && h > 0 && maxval > 0 && maxval < 256, ErrorCode::io,
          "mask PGM must be 8-bit");
  InstanceMask mask{w, h, std::vector<uint8_t>(size_t(w) * h)};
  in.read(reinterpret_cast<char*>(mask.values.data()), std::streamsize(mask.values.size()));
  require(in.good(), ErrorCode::io, "truncated PGM data");
  return mask;
}

void write_mask_pgm(const path& file, const InstanceMask& mask) {
  std::ofstream out = open_out(file);
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  for (uint8_t v : mask.values) {
    unsigned char b = v ? 255 : 0;
    out.write(reinterpret_cast<const char*>(&b), 1);
  }
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

std::vector<std::pair<std::string, InstanceMask>> read_rle_masks(const path& file) {
  std::ifstream in(file);
  require(in.good(), ErrorCode::io, "cannot open for reading: " + file.string());
  std::vector<std::pair<std::string, InstanceMask>> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string id;
    int w = 0, h = 0;
    ls >> id >> w >> h;
    require(!ls.fail() && w > 0 && h > 0, ErrorCode::io,
            file.string() + ":" + std::to_string(lineno) + ": malformed RLE record");
    InstanceMask mask{w, h, std::vector<uint8_t>(size_t(w) * h, 0)};
    size_t pos = 0;
    uint8_t value = 0;  // runs alternate outside/inside, starting outside
    long long run;
    while (ls >> run) {
      require(run >= 0 && pos + size_t(run) <= mask.values.size(), ErrorCode::io,
              file.string() + ":" + std::to_string(lineno) + ": RLE runs exceed raster");
      std::fill_n(mask.values.begin() + pos, size_t(run), value);
      pos += size_t(run);
      value = value ? 0 : 1;
    }
    require(pos == mask.values.size(), ErrorCode::io,
            file.string() + ":" + std::to_string(lineno) + ": RLE runs do not cover raster");
    out.emplace_back(std::move(id), std::move(mask));
  }
  return out;
}

void write_rle_masks(const path& file,
                     const std::vector<std::pair<std::string, InstanceMask>>& masks) {
  std::ofstream out(file);
  require(out.good(), ErrorCode::io, "cannot open for writing: " + file.string());
  for (const auto& [id, mask] : masks) {
    out << id << ' ' << mask.width << ' ' << mask.height;
    size_t i = 0, n = mask.values.size();
    uint8_t value = 0;
    while (i < n) {
      size_t run = 0;
      while (i + run < n && (mask.values[i + run] != 0) == (value != 0)) run++;
      out << ' ' << run;
      i += run;
      value = value ? 0 : 1;
    }
    out << '\n';
  }
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

FeatureMap read_fmap(const path& file) {
  std::ifstream in = open_in(file);
  char magic[4];
  uint32_t dims[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(dims), 12);
  require(in.good() && std::memcmp(magic, "FMAP", 4) == 0, ErrorCode::io,
          "not an FMAP file: " + file.string());
  require(dims[0] > 0 && dims[1] > 0 && dims[2] > 0, ErrorCode::io, "bad FMAP dimensions");
  FeatureMap fm{int(dims[0]), int(dims[1]), int(dims[2]), {}};
  fm.values.resize(size_t(dims[0]) * dims[1] * dims[2]);
  in.read(reinterpret_cast<char*>(fm.values.data()), std::streamsize(fm.values.size()) * 4);
  require(in.good(), ErrorCode::io, "truncated FMAP data");
  return fm;
}

void write_fmap(const path& file, const FeatureMap& fm) {
  std::ofstream out = open_out(file);
  uint32_t dims[3] = {uint32_t(fm.width), uint32_t(fm.height), uint32_t(fm.channels)};
  out.write("FMAP", 4);
  out.write(reinterpret_cast<const char*>(dims), 12);
  out.write(reinterpret_cast<const char*>(fm.values.data()),
            std::streamsize(fm.values.size()) * 4);
  require(out.good(), ErrorCode::io, "write failed: " + file.string());
}

}  // namespace armesh::io

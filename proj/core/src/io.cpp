#include "depthkit/io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace depthkit {

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

std::string lower_ext(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

// ---------------------------------------------------------------- raster
// Raw raster shared by the PGM/PPM and PNG paths: 1 or 3 channels,
// 8 or 16 bits, 16-bit samples in host order.

struct Raster {
  int height = 0, width = 0;
  int channels = 1;   // 1 = gray, 3 = rgb
  int bit_depth = 8;  // 8 or 16
  std::vector<std::uint16_t> samples;  // one entry per sample
};

// ------------------------------------------------------------------ pnm

Raster read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6") {
    throw std::runtime_error(path + ": unsupported PNM magic '" + magic + "'");
  }
  auto next_token = [&]() -> long {
    // Skips whitespace and '#' comments.
    while (true) {
      int c = in.peek();
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v = 0;
    if (!(in >> v)) throw std::runtime_error(path + ": malformed PNM header");
    return v;
  };
  Raster r;
  r.channels = magic == "P6" ? 3 : 1;
  r.width = static_cast<int>(next_token());
  r.height = static_cast<int>(next_token());
  const long maxval = next_token();
  if (r.width <= 0 || r.height <= 0 || (maxval != 255 && maxval != 65535)) {
    throw std::runtime_error(path + ": unsupported PNM header");
  }
  r.bit_depth = maxval == 255 ? 8 : 16;
  in.get();  // single whitespace byte after maxval

  const std::size_t n = static_cast<std::size_t>(r.height) * r.width * r.channels;
  r.samples.resize(n);
  if (r.bit_depth == 8) {
    std::vector<std::uint8_t> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error(path + ": truncated PNM data");
    for (std::size_t i = 0; i < n; ++i) r.samples[i] = buf[i];
  } else {
    std::vector<std::uint8_t> buf(n * 2);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 2));
    if (!in) throw std::runtime_error(path + ": truncated PNM data");
    for (std::size_t i = 0; i < n; ++i) {
      r.samples[i] = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    }
  }
  return r;
}

void write_pnm(const std::string& path, const Raster& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << (r.channels == 3 ? "P6" : "P5") << "\n"
      << r.width << " " << r.height << "\n"
      << (r.bit_depth == 8 ? 255 : 65535) << "\n";
  const std::size_t n = r.samples.size();
  if (r.bit_depth == 8) {
    std::vector<std::uint8_t> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = static_cast<std::uint8_t>(r.samples[i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n));
  } else {
    std::vector<std::uint8_t> buf(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
      buf[2 * i] = static_cast<std::uint8_t>(r.samples[i] >> 8);
      buf[2 * i + 1] = static_cast<std::uint8_t>(r.samples[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n * 2));
  }
  if (!out) throw std::runtime_error("cannot write image: " + path);
}

// ------------------------------------------------------------------ png

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

Raster read_png(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open image: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("png init failed");
  }
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": png read error");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  Raster r;
  r.width = static_cast<int>(png_get_image_width(png, info));
  r.height = static_cast<int>(png_get_image_height(png, info));
  bit_depth = png_get_bit_depth(png, info);
  r.bit_depth = bit_depth;
  r.channels = png_get_channels(png, info);
  if ((r.channels != 1 && r.channels != 3) || (bit_depth != 8 && bit_depth != 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": unsupported png layout");
  }

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(r.height) * row_bytes);
  rows.resize(static_cast<std::size_t>(r.height));
  for (int y = 0; y < r.height; ++y) rows[static_cast<std::size_t>(y)] = raw.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n = static_cast<std::size_t>(r.height) * r.width * r.channels;
  r.samples.resize(n);
  if (bit_depth == 8) {
    for (std::size_t i = 0; i < n; ++i) r.samples[i] = raw[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      r.samples[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
  }
  return r;
}

void write_png(const std::string& path, const Raster& r) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write image: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error(path + ": png write error");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(r.width),
               static_cast<png_uint_32>(r.height), r.bit_depth,
               r.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const std::size_t n = r.samples.size();
  std::vector<std::uint8_t> raw;
  if (r.bit_depth == 8) {
    raw.resize(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = static_cast<std::uint8_t>(r.samples[i]);
  } else {
    raw.resize(n * 2);  // PNG stores 16-bit samples big-endian
    for (std::size_t i = 0; i < n; ++i) {
      raw[2 * i] = static_cast<std::uint8_t>(r.samples[i] >> 8);
      raw[2 * i + 1] = static_cast<std::uint8_t>(r.samples[i] & 0xff);
    }
  }
  const std::size_t row_bytes = raw.size() / static_cast<std::size_t>(r.height);
  for (int y = 0; y < r.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(raw.data() + y * row_bytes));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// ------------------------------------------------------------- dispatch

bool is_png_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path);
  unsigned char sig[2] = {0, 0};
  in.read(reinterpret_cast<char*>(sig), 2);
  return sig[0] == 0x89 && sig[1] == 'P';
}

Raster read_raster(const std::string& path) {
  return is_png_file(path) ? read_png(path) : read_pnm(path);
}

void write_raster(const std::string& path, const Raster& r) {
  const std::string ext = lower_ext(path);
  if (ext == "png") {
    write_png(path, r);
  } else if (ext == "pgm" || ext == "ppm") {
    write_pnm(path, r);
  } else {
    throw std::runtime_error(path + ": unsupported image extension ." + ext);
  }
}

}  // namespace

// --------------------------------------------------------------- clouds

std::vector<Point3> load_point_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open point cloud: " + path);
  std::vector<Point3> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x)) continue;  // blank line
    if (!(ls >> y >> z)) fail(path, line_no, "expected 'x y z'");
    std::string extra;
    if (ls >> extra) fail(path, line_no, "trailing tokens after 'x y z'");
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      fail(path, line_no, "non-finite coordinate");
    }
    points.emplace_back(x, y, z);
  }
  return points;
}

void write_point_cloud(const std::string& path, const std::vector<Point3>& pts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write point cloud: " + path);
  out.precision(17);
  for (const Point3& p : pts) out << p.x() << " " << p.y() << " " << p.z() << "\n";
}

// ---------------------------------------------------------------- poses

PoseRecord load_pose(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pose file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string id;
    if (!(ls >> id)) continue;
    double tx, ty, tz, qw, qx, qy, qz;
    if (!(ls >> tx >> ty >> tz >> qw >> qx >> qy >> qz)) {
      fail(path, line_no, "expected 'id tx ty tz qw qx qy qz'");
    }
    std::string extra;
    if (ls >> extra) fail(path, line_no, "trailing tokens in pose record");
    const double norm = std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz);
    if (std::abs(norm - 1.0) > 1e-6) {
      std::cerr << path << ":" << line_no
                << ": warning: non-unit quaternion (norm " << norm
                << "), normalizing\n";
    }
    PoseRecord rec;
    rec.frame_id = id;
    rec.translation = Point3(tx, ty, tz);
    rec.quaternion = Quaternion(qw, qx, qy, qz);  // constructor normalizes
    return rec;
  }
  throw std::runtime_error(path + ": no pose record found");
}

void write_pose(const std::string& path, const PoseRecord& rec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pose file: " + path);
  out.precision(17);
  out << rec.frame_id << " " << rec.translation.x() << " " << rec.translation.y()
      << " " << rec.translation.z() << " " << rec.quaternion.w << " "
      << rec.quaternion.x << " " << rec.quaternion.y << " " << rec.quaternion.z
      << "\n";
}

// ----------------------------------------------------------- intrinsics

CameraIntrinsics load_intrinsics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open intrinsics: " + path);
  CameraIntrinsics intr;
  bool have_cx = false, have_cy = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    double value;
    if (!(ls >> value)) fail(path, line_no, "expected 'key value'");
    std::string extra;
    if (ls >> extra) fail(path, line_no, "trailing tokens");
    if (key == "focal") {
      intr.focal = value;
    } else if (key == "cx") {
      intr.cx = value;
      have_cx = true;
    } else if (key == "cy") {
      intr.cy = value;
      have_cy = true;
    } else if (key == "height") {
      intr.height = static_cast<int>(value);
    } else if (key == "width") {
      intr.width = static_cast<int>(value);
    } else if (key == "baseline") {
      intr.baseline = value;
    } else {
      fail(path, line_no, "unknown key '" + key + "'");
    }
  }
  if (!have_cx) intr.cx = (intr.width - 1) / 2.0;
  if (!have_cy) intr.cy = (intr.height - 1) / 2.0;
  intr.validate();
  return intr;
}

void write_intrinsics(const std::string& path, const CameraIntrinsics& intr) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write intrinsics: " + path);
  out.precision(17);
  out << "focal " << intr.focal << "\n"
      << "cx " << intr.cx << "\n"
      << "cy " << intr.cy << "\n"
      << "height " << intr.height << "\n"
      << "width " << intr.width << "\n"
      << "baseline " << intr.baseline << "\n";
}

// --------------------------------------------------------------- images

GrayImage read_gray(const std::string& path) {
  const Raster r = read_raster(path);
  if (r.channels != 1 || r.bit_depth != 8) {
    throw std::runtime_error(path + ": expected an 8-bit grayscale image");
  }
  GrayImage img(r.height, r.width);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    img.data[i] = static_cast<float>(r.samples[i]) / 255.f;
  }
  return img;
}

void write_gray(const std::string& path, const GrayImage& img) {
  Raster r;
  r.height = img.height;
  r.width = img.width;
  r.channels = 1;
  r.bit_depth = 8;
  r.samples.resize(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const long v = std::lround(std::clamp(img.data[i], 0.f, 1.f) * 255.f);
    r.samples[i] = static_cast<std::uint16_t>(v);
  }
  write_raster(path, r);
}

RgbImage read_rgb(const std::string& path) {
  const Raster r = read_raster(path);
  if (r.channels != 3 || r.bit_depth != 8) {
    throw std::runtime_error(path + ": expected an 8-bit RGB image");
  }
  RgbImage img(r.height, r.width);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    img.data[i] = static_cast<std::uint8_t>(r.samples[i]);
  }
  return img;
}

void write_rgb(const std::string& path, const RgbImage& img) {
  Raster r;
  r.height = img.height;
  r.width = img.width;
  r.channels = 3;
  r.bit_depth = 8;
  r.samples.assign(img.data.begin(), img.data.end());
  write_raster(path, r);
}

// ---------------------------------------------------------------- depth

std::uint16_t encode_depth(double meters) {
  if (std::isnan(meters)) return 0;
  long v = std::lround(meters * kDepthFileScale);
  v = std::clamp<long>(v, 1, 65535);  // 0 is reserved for invalid
  return static_cast<std::uint16_t>(v);
}

double decode_depth(std::uint16_t value) {
  if (value == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(value) / kDepthFileScale;
}

DepthMap read_depth(const std::string& path) {
  const Raster r = read_raster(path);
  if (r.channels != 1 || r.bit_depth != 16) {
    throw std::runtime_error(path + ": expected a 16-bit depth image");
  }
  DepthMap map(r.height, r.width);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    map.data[i] = decode_depth(r.samples[i]);
  }
  return map;
}

void write_depth(const std::string& path, const DepthMap& map) {
  Raster r;
  r.height = map.height;
  r.width = map.width;
  r.channels = 1;
  r.bit_depth = 16;
  r.samples.resize(map.data.size());
  for (std::size_t i = 0; i < map.data.size(); ++i) {
    r.samples[i] = encode_depth(map.data[i]);
  }
  write_raster(path, r);
}

}  // namespace depthkit

#include "depthkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace depthkit {

void SceneSpec::validate(int height, int width) const {
  if (!(background_depth > 0)) {
    throw std::invalid_argument("scene: background depth must be positive");
  }
  if (noise_sigma < 0) throw std::invalid_argument("scene: noise_sigma must be >= 0");
  if (lidar_count < 0) throw std::invalid_argument("scene: lidar_count must be >= 0");
  for (const SceneRect& r : rects) {
    if (!(r.depth > 0)) throw std::invalid_argument("scene: rect depth must be positive");
    if (r.x0 < 0 || r.y0 < 0 || r.x1 > width || r.y1 > height || r.x0 >= r.x1 ||
        r.y0 >= r.y1) {
      throw std::invalid_argument("scene: rect region outside image bounds");
    }
  }
}

namespace {

constexpr int kTextureCell = 4;  // coarse noise grid pitch, pixels

// Band-limited noise texture: white noise on a coarse grid, bilinearly
// interpolated. Defined on x in [0, width + x_pad) so the right view can
// sample past the left image border.
struct Texture {
  int gh = 0, gw = 0;
  std::vector<float> grid;

  Texture(int height, int width, int x_pad, std::uint64_t seed) {
    gh = height / kTextureCell + 2;
    gw = (width + x_pad) / kTextureCell + 2;
    grid.resize(static_cast<std::size_t>(gh) * gw);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.1f, 0.9f);
    for (float& v : grid) v = dist(rng);
  }

  float sample(double y, double x) const {
    const double gy = std::clamp(y / kTextureCell, 0.0, gh - 1.001);
    const double gx = std::clamp(x / kTextureCell, 0.0, gw - 1.001);
    const int iy = static_cast<int>(gy), ix = static_cast<int>(gx);
    const double fy = gy - iy, fx = gx - ix;
    const std::size_t i = static_cast<std::size_t>(iy) * gw + ix;
    const double v00 = grid[i], v01 = grid[i + 1];
    const double v10 = grid[i + gw], v11 = grid[i + gw + 1];
    return static_cast<float>((1 - fy) * ((1 - fx) * v00 + fx * v01) +
                              fy * ((1 - fx) * v10 + fx * v11));
  }
};

struct Surface {
  bool background = false;
  SceneRect rect;  // unused for the background
  double depth = 0.0;
  double disparity = 0.0;
  const Texture* tex = nullptr;

  // Coverage in left-image coordinates; the background extends past the
  // right image border so disoccluded right pixels stay textured.
  bool covers(int y, double x) const {
    if (background) return x >= 0.0;
    return y >= rect.y0 && y < rect.y1 && x >= rect.x0 && x < rect.x1;
  }
};

}  // namespace

double scene_depth(const SceneSpec& spec, int y, int x) {
  double depth = spec.background_depth;
  for (const SceneRect& r : spec.rects) {
    if (y >= r.y0 && y < r.y1 && x >= r.x0 && x < r.x1 && r.depth < depth) {
      depth = r.depth;
    }
  }
  return depth;
}

RenderedScene render_scene(const SceneSpec& spec, const CameraIntrinsics& intr) {
  intr.validate();
  spec.validate(intr.height, intr.width);
  const int h = intr.height, w = intr.width;
  const double fb = intr.focal * intr.baseline;

  double min_depth = spec.background_depth;
  for (const SceneRect& r : spec.rects) min_depth = std::min(min_depth, r.depth);
  const int x_pad = static_cast<int>(std::ceil(fb / min_depth)) + 2;

  std::vector<Texture> textures;
  textures.reserve(spec.rects.size() + 1);
  textures.emplace_back(h, w, x_pad, spec.seed * 0x9e3779b97f4a7c15ULL + 1);
  for (const SceneRect& r : spec.rects) {
    textures.emplace_back(h, w, x_pad,
                          spec.seed * 0x9e3779b97f4a7c15ULL + 2 + r.texture_seed);
  }

  std::vector<Surface> surfaces(spec.rects.size() + 1);
  surfaces[0].background = true;
  surfaces[0].depth = spec.background_depth;
  surfaces[0].disparity = fb / spec.background_depth;
  surfaces[0].tex = &textures[0];
  for (std::size_t i = 0; i < spec.rects.size(); ++i) {
    surfaces[i + 1].rect = spec.rects[i];
    surfaces[i + 1].depth = spec.rects[i].depth;
    surfaces[i + 1].disparity = fb / spec.rects[i].depth;
    surfaces[i + 1].tex = &textures[i + 1];
  }

  RenderedScene out;
  out.left = GrayImage(h, w);
  out.right = GrayImage(h, w);
  out.gt_depth = DenseDepthMap(h, w);
  out.occlusion.assign(static_cast<std::size_t>(h) * w, 0);

  // Left view: nearest covering surface per pixel.
  std::vector<const Surface*> left_visible(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Surface* vis = &surfaces[0];
      for (const Surface& s : surfaces) {
        if (s.covers(y, x) && s.depth < vis->depth) vis = &s;
      }
      left_visible[static_cast<std::size_t>(y) * w + x] = vis;
      out.left.at(y, x) = vis->tex->sample(y, x);
      out.gt_depth.set(y, x, vis->depth);
    }
  }

  // Right view: for right pixel x, surface s is a candidate when it
  // covers x + d_s in left coordinates; nearest candidate wins.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Surface* vis = nullptr;
      double sample_x = 0.0;
      for (const Surface& s : surfaces) {
        const double xl = x + s.disparity;
        if (!s.covers(y, xl)) continue;
        if (vis == nullptr || s.depth < vis->depth) {
          vis = &s;
          sample_x = xl;
        }
      }
      if (vis != nullptr) out.right.at(y, x) = vis->tex->sample(y, sample_x);
    }
  }

  // Left-view occlusion: a pixel is unmatchable when its right-view
  // location is outside the image or covered by a nearer surface.
  std::vector<double> zright(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    std::fill(zright.begin(), zright.end(), std::numeric_limits<double>::infinity());
    for (int x = 0; x < w; ++x) {
      const Surface* s = left_visible[static_cast<std::size_t>(y) * w + x];
      const long xr = std::lround(x - s->disparity);
      if (xr >= 0 && xr < w) {
        zright[static_cast<std::size_t>(xr)] =
            std::min(zright[static_cast<std::size_t>(xr)], s->depth);
      }
    }
    for (int x = 0; x < w; ++x) {
      const Surface* s = left_visible[static_cast<std::size_t>(y) * w + x];
      const long xr = std::lround(x - s->disparity);
      const bool occluded =
          xr < 0 || xr >= w || zright[static_cast<std::size_t>(xr)] < s->depth - 1e-9;
      out.occlusion[static_cast<std::size_t>(y) * w + x] = occluded ? 1 : 0;
    }
  }

  if (spec.noise_sigma > 0) {
    std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + 1000);
    std::normal_distribution<float> noise(0.f, static_cast<float>(spec.noise_sigma));
    for (float& v : out.left.data) v = std::clamp(v + noise(rng), 0.f, 1.f);
    for (float& v : out.right.data) v = std::clamp(v + noise(rng), 0.f, 1.f);
  }
  return out;
}

std::vector<Point3> sample_lidar(const SceneSpec& spec,
                                 const CameraIntrinsics& intr,
                                 const Pose& body_pose, const Pose& camera_pose,
                                 int count, std::uint64_t seed) {
  intr.validate();
  spec.validate(intr.height, intr.width);
  if (count < 0) throw std::invalid_argument("sample_lidar: count must be >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ux(0, intr.width - 1);
  std::uniform_int_distribution<int> uy(0, intr.height - 1);

  std::vector<Point3> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int x = ux(rng), y = uy(rng);
    const double z = scene_depth(spec, y, x);
    const Point3 p_cam((x - intr.cx) * z / intr.focal,
                       (y - intr.cy) * z / intr.focal, z);
    const Point3 p_body = child_to_parent(camera_pose, p_cam);
    points.push_back(child_to_parent(body_pose, p_body));
  }
  return points;
}

SceneFile load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);

  SceneFile out;
  CameraIntrinsics& intr = out.intrinsics;
  SceneSpec& spec = out.spec;
  bool have_cx = false, have_cy = false;
  bool have_focal = false, have_size_w = false, have_size_h = false,
       have_baseline = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;

    auto fail = [&](const std::string& what) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": " << what;
      throw std::runtime_error(msg.str());
    };
    auto read_rest = [&](auto&... vals) {
      if (!((ls >> vals) && ...)) fail("malformed value for key '" + key + "'");
      std::string extra;
      if (ls >> extra) fail("trailing tokens after key '" + key + "'");
    };

    if (key == "seed") {
      read_rest(spec.seed);
    } else if (key == "width") {
      read_rest(intr.width);
      have_size_w = true;
    } else if (key == "height") {
      read_rest(intr.height);
      have_size_h = true;
    } else if (key == "focal") {
      read_rest(intr.focal);
      have_focal = true;
    } else if (key == "baseline") {
      read_rest(intr.baseline);
      have_baseline = true;
    } else if (key == "cx") {
      read_rest(intr.cx);
      have_cx = true;
    } else if (key == "cy") {
      read_rest(intr.cy);
      have_cy = true;
    } else if (key == "background") {
      read_rest(spec.background_depth);
    } else if (key == "noise_sigma") {
      read_rest(spec.noise_sigma);
    } else if (key == "lidar_count") {
      read_rest(spec.lidar_count);
    } else if (key == "rect") {
      SceneRect r;
      read_rest(r.x0, r.y0, r.x1, r.y1, r.depth, r.texture_seed);
      spec.rects.push_back(r);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!have_focal || !have_size_w || !have_size_h || !have_baseline) {
    throw std::runtime_error(path + ": scene file needs focal, width, height, baseline");
  }
  if (!have_cx) intr.cx = (intr.width - 1) / 2.0;
  if (!have_cy) intr.cy = (intr.height - 1) / 2.0;
  intr.validate();
  spec.validate(intr.height, intr.width);
  return out;
}

}  // namespace depthkit

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <vector>
#include <fstream>
#include <sstream>
#include <string>

#include "depthkit/io.hpp"
#include "depthkit/lidar_depth.hpp"

using namespace depthkit;
namespace fs = std::filesystem;

namespace {

const std::string kCli = DEPTHKIT_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("depthkit_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const char* name) const { return (path / name).string(); }
  static inline int counter = 0;
};

void write_scene(const std::string& path) {
  std::ofstream f(path);
  f << "seed 17\n"
       "width 128\n"
       "height 96\n"
       "focal 160\n"
       "baseline 0.4\n"
       "background 16\n"          // disparity 4
       "rect 40 24 88 72 8 3\n"   // disparity 8
       "lidar_count 4000\n";
}

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string s = ss.str();
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("end-to-end: synth, lidar-depth, stereo-depth, compare") {
  TempDir dir;
  const std::string scene = dir / "scene.txt";
  const std::string out = dir / "scene_out";
  write_scene(scene);

  REQUIRE(run("synth --scene " + scene + " --out-dir " + out) == 0);
  for (const char* name : {"left.png", "right.png", "gt_depth.png",
                           "occlusion.png", "body_pose.txt", "cam_pose.txt",
                           "intrinsics.txt", "cloud.txt"}) {
    CAPTURE(name);
    CHECK(fs::exists(fs::path(out) / name));
  }

  const std::string lidar_out = dir / "lidar_depth.png";
  REQUIRE(run("lidar-depth --cloud " + out + "/cloud.txt --body-pose " + out +
              "/body_pose.txt --cam-pose " + out + "/cam_pose.txt --intrinsics " +
              out + "/intrinsics.txt --ngrid 4 --spread-radius 1 "
              "--near-threshold 15 --out " + lidar_out) == 0);
  const DepthMap lidar_depth = read_depth(lidar_out);
  CHECK(lidar_depth.height == 96);
  CHECK(lidar_depth.width == 128);
  CHECK(lidar_depth.valid_count() > 4000);  // completion filled holes

  const std::string stereo_out = dir / "stereo_depth.png";
  REQUIRE(run("stereo-depth --left " + out + "/left.png --right " + out +
              "/right.png --intrinsics " + out + "/intrinsics.txt "
              "--num-disparities 16 --block-size 7 --algo sgbm "
              "--wls-lambda 0.1 --out " + stereo_out) == 0);
  const DepthMap stereo_depth = read_depth(stereo_out);
  CHECK(stereo_depth.valid_count() ==
        static_cast<std::size_t>(96) * 128);  // WLS fills every pixel

  const std::string report = dir / "report.json";
  const std::string overlay = dir / "overlay.png";
  REQUIRE(run("compare --pred " + stereo_out + " --gt " + out +
              "/gt_depth.png --report " + report + " --overlay " + overlay) == 0);
  const nlohmann::json j = nlohmann::json::parse(std::ifstream(report));
  CHECK(j.at("pixel_count").get<std::size_t>() ==
        static_cast<std::size_t>(96) * 128);
  // The scene is textured and fronto-parallel; the pipeline should land
  // well under a meter of average error.
  CHECK(j.at("mean_abs_error").get<double>() < 1.0);
  CHECK(fs::exists(overlay));

  SUBCASE("text report variant") {
    const std::string txt = dir / "report.txt";
    REQUIRE(run("compare --pred " + stereo_out + " --gt " + out +
                "/gt_depth.png --report " + txt) == 0);
    std::ostringstream ss;
    ss << std::ifstream(txt).rdbuf();
    CHECK(ss.str().find("avg meter error per pixel") != std::string::npos);
  }
}

TEST_CASE("CLI runs are byte-for-byte reproducible") {
  TempDir dir;
  const std::string scene = dir / "scene.txt";
  write_scene(scene);
  const std::string out_a = dir / "a";
  const std::string out_b = dir / "b";
  REQUIRE(run("synth --scene " + scene + " --out-dir " + out_a) == 0);
  REQUIRE(run("--threads 3 synth --scene " + scene + " --out-dir " + out_b) == 0);
  for (const char* name : {"left.png", "right.png", "gt_depth.png", "cloud.txt"}) {
    CAPTURE(name);
    CHECK(slurp(out_a + "/" + std::string(name)) ==
          slurp(out_b + "/" + std::string(name)));
  }

  const std::string depth_a = dir / "da.png";
  const std::string depth_b = dir / "db.png";
  const std::string stereo_args =
      " stereo-depth --left " + out_a + "/left.png --right " + out_a +
      "/right.png --intrinsics " + out_a + "/intrinsics.txt "
      "--num-disparities 16 --block-size 5 --no-wls --out ";
  REQUIRE(run("--threads 1" + stereo_args + depth_a) == 0);
  REQUIRE(run("--threads 7" + stereo_args + depth_b) == 0);
  CHECK(slurp(depth_a) == slurp(depth_b));
}

TEST_CASE("lidar-depth with both stages disabled equals plain projection") {
  TempDir dir;
  const std::string scene = dir / "scene.txt";
  const std::string out = dir / "scene_out";
  write_scene(scene);
  REQUIRE(run("synth --scene " + scene + " --out-dir " + out) == 0);

  const std::string raw_out = dir / "raw.png";
  REQUIRE(run("lidar-depth --cloud " + out + "/cloud.txt --body-pose " + out +
              "/body_pose.txt --cam-pose " + out + "/cam_pose.txt --intrinsics " +
              out + "/intrinsics.txt --no-completion --no-preserve --out " +
              raw_out) == 0);

  // Library-side oracle: transform and rasterize directly.
  const auto cloud = load_point_cloud(out + "/cloud.txt");
  const Pose body = load_pose(out + "/body_pose.txt").pose();
  const Pose cam = load_pose(out + "/cam_pose.txt").pose();
  const CameraIntrinsics intr = load_intrinsics(out + "/intrinsics.txt");
  CompletionParams params;
  LidarPipelineOptions opts;
  opts.preserve = false;
  opts.completion = false;
  const auto expect = lidar_pipeline(cloud, body, cam, intr, params, opts);

  const DepthMap got = read_depth(raw_out);
  REQUIRE(got.height == expect.map.height);
  REQUIRE(got.width == expect.map.width);
  for (int y = 0; y < got.height; ++y) {
    for (int x = 0; x < got.width; ++x) {
      REQUIRE(got.valid(y, x) == expect.map.valid(y, x));
      if (got.valid(y, x)) {
        // File storage quantizes to 1/256 m.
        CHECK(std::fabs(got.at(y, x) - expect.map.at(y, x)) <= 0.5 / 256.0);
      }
    }
  }
}

TEST_CASE("unknown flags and missing required flags fail") {
  CHECK(run("stereo-depth --left a.png") != 0);
  CHECK(run("lidar-depth --bogus 1") != 0);
  CHECK(run("no-such-command") != 0);
}

#include <CLI11.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "depthkit/geometry.hpp"
#include "depthkit/io.hpp"
#include "depthkit/lidar_depth.hpp"
#include "depthkit/metrics.hpp"
#include "depthkit/parallel.hpp"
#include "depthkit/stereo.hpp"
#include "depthkit/synth.hpp"
#include "depthkit/wls.hpp"

namespace dk = depthkit;

namespace {

int run_lidar_depth(const std::string& cloud_path, const std::string& body_path,
                    const std::string& cam_path, const std::string& intr_path,
                    const dk::CompletionParams& params, const std::string& out_path,
                    bool no_completion, bool no_preserve) {
  const auto cloud = dk::load_point_cloud(cloud_path);
  const dk::Pose body = dk::load_pose(body_path).pose();
  const dk::Pose cam = dk::load_pose(cam_path).pose();
  const dk::CameraIntrinsics intr = dk::load_intrinsics(intr_path);

  dk::LidarPipelineOptions opts;
  opts.preserve = !no_preserve;
  opts.completion = !no_completion;
  const auto result = dk::lidar_pipeline(cloud, body, cam, intr, params, opts);
  dk::write_depth(out_path, result.map);
  std::cout << "points: " << cloud.size() << ", dropped: " << result.dropped
            << ", valid pixels: " << result.map.valid_count() << "\n";
  return 0;
}

int run_stereo_depth(const std::string& left_path, const std::string& right_path,
                     const std::string& intr_path, dk::MatchParams params,
                     const dk::WlsParams& wls_params, double blur_sigma,
                     const std::string& algo, bool no_wls, bool no_pad,
                     const std::string& out_path, const std::string& disparity_out) {
  params.validate();
  const dk::CameraIntrinsics intr = dk::load_intrinsics(intr_path);
  dk::GrayImage left = dk::gaussian_blur(dk::read_gray(left_path), blur_sigma);
  dk::GrayImage right = dk::gaussian_blur(dk::read_gray(right_path), blur_sigma);
  if (left.height != right.height || left.width != right.width) {
    throw std::runtime_error("stereo pair size mismatch");
  }

  int crop = 0;
  dk::GrayImage match_left = left, match_right_img = right;
  if (!no_pad) {
    auto padded = dk::pad_for_matching(left, right, params);
    match_left = std::move(padded.left);
    match_right_img = std::move(padded.right);
    crop = padded.crop_offset;
  }

  dk::CostVolume cost = dk::sad_cost_volume(match_left, match_right_img, params);
  if (algo == "sgbm") cost = dk::sgm_aggregate(cost, params);
  dk::DisparityMap disp = dk::bm_match(cost, params);
  if (crop > 0) disp = dk::crop_disparity(disp, crop);
  if (!no_wls) disp = dk::wls_filter(disp, left, wls_params);

  if (!disparity_out.empty()) {
    // Raw int16 fixed-point disparities, stored as a 16-bit image with the
    // invalid marker mapped to 0.
    dk::DepthMap disp_image(disp.height, disp.width);
    for (int y = 0; y < disp.height; ++y) {
      for (int x = 0; x < disp.width; ++x) {
        if (disp.valid(y, x)) {
          disp_image.set(y, x, disp.value(y, x));
        }
      }
    }
    dk::write_depth(disparity_out, disp_image);
  }

  const dk::DenseDepthMap depth = dk::disparity_to_depth(disp, intr);
  dk::write_depth(out_path, depth);
  std::cout << "valid disparities: " << depth.valid_count() << " / "
            << static_cast<std::size_t>(depth.height) * depth.width << "\n";
  return 0;
}

int run_compare(const std::string& pred_path, const std::string& gt_path,
                const std::string& report_path, const std::string& overlay_path) {
  const dk::DepthMap pred = dk::read_depth(pred_path);
  const dk::DepthMap gt = dk::read_depth(gt_path);
  const dk::ErrorReport report = dk::mean_abs_error(pred, gt);

  const bool json = report_path.size() > 5 &&
                    report_path.substr(report_path.size() - 5) == ".json";
  std::ofstream out(report_path);
  if (!out) throw std::runtime_error("cannot write report: " + report_path);
  out << (json ? report.to_json() : report.to_text());
  std::cout << "avg meter error per pixel: " << report.mean_abs_error << " ("
            << report.pixel_count << " pixels)\n";

  if (!overlay_path.empty()) {
    double lo = 1e30, hi = -1e30;
    for (int y = 0; y < pred.height; ++y) {
      for (int x = 0; x < pred.width; ++x) {
        if (pred.valid(y, x)) {
          lo = std::min(lo, pred.at(y, x));
          hi = std::max(hi, pred.at(y, x));
        }
      }
    }
    if (!(lo < hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    const dk::RgbImage base = dk::colorize_depth(pred, lo, hi);
    const std::array<std::uint8_t, 3> red = {255, 0, 0};
    dk::write_rgb(overlay_path, dk::overlay_points(base, gt, red));
  }
  return 0;
}

int run_synth(const std::string& scene_path, const std::string& out_dir) {
  const dk::SceneFile scene = dk::load_scene(scene_path);
  const dk::CameraIntrinsics& intr = scene.intrinsics;
  std::filesystem::create_directories(out_dir);
  const auto join = [&](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  const dk::RenderedScene rendered = dk::render_scene(scene.spec, intr);
  dk::write_gray(join("left.png"), rendered.left);
  dk::write_gray(join("right.png"), rendered.right);
  dk::write_depth(join("gt_depth.png"), rendered.gt_depth);

  dk::GrayImage occ(intr.height, intr.width);
  for (std::size_t i = 0; i < rendered.occlusion.size(); ++i) {
    occ.data[i] = rendered.occlusion[i] ? 1.f : 0.f;
  }
  dk::write_gray(join("occlusion.png"), occ);

  // Deterministic pose chain derived from the scene seed, so the emitted
  // cloud exercises the full global->body->camera transform.
  std::mt19937_64 rng(scene.spec.seed * 0x9e3779b97f4a7c15ULL + 77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> trans(-5.0, 5.0);
  auto random_pose = [&]() {
    dk::Quaternion q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    return dk::Pose{q, dk::Point3(trans(rng), trans(rng), trans(rng))};
  };
  const dk::Pose body = random_pose();
  const dk::Pose cam = random_pose();

  dk::PoseRecord body_rec{"body", body.translation, body.rotation};
  dk::PoseRecord cam_rec{"camera", cam.translation, cam.rotation};
  dk::write_pose(join("body_pose.txt"), body_rec);
  dk::write_pose(join("cam_pose.txt"), cam_rec);
  dk::write_intrinsics(join("intrinsics.txt"), intr);

  const auto cloud = dk::sample_lidar(scene.spec, intr, body, cam,
                                      scene.spec.lidar_count, scene.spec.seed);
  dk::write_point_cloud(join("cloud.txt"), cloud);

  std::cout << "wrote " << out_dir << " (" << cloud.size() << " lidar points)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depthkit: lidar and stereo depth estimation pipelines"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "Worker threads for data-parallel stages (0 = all cores). "
                 "Results are identical for any value.");

  // ---- lidar-depth
  auto* lidar = app.add_subcommand("lidar-depth",
                                   "Project a lidar cloud to a completed depth map");
  std::string cloud_f, body_f, cam_f, intr_f, out_f;
  dk::CompletionParams cparams;
  bool no_completion = false, no_preserve = false;
  lidar->add_option("--cloud", cloud_f, "Point cloud file (x y z per line)")->required();
  lidar->add_option("--body-pose", body_f, "Global-from-body pose file")->required();
  lidar->add_option("--cam-pose", cam_f, "Body-from-camera pose file")->required();
  lidar->add_option("--intrinsics", intr_f, "Intrinsics key/value file")->required();
  lidar->add_option("--ngrid", cparams.ngrid,
                    "Completion neighborhood radius; the window is (2*ngrid+1)^2");
  lidar->add_option("--spread-radius", cparams.spread_radius,
                    "Characteristic spread radius r: (2r+1)^2 window, or (2r)^2 with "
                    "--spread-asymmetric (offsets -(r-1)..r, e.g. r=2 gives 4x4)");
  lidar->add_flag("--spread-asymmetric", cparams.spread_asymmetric,
                  "Use the even, asymmetric-offset spread window");
  lidar->add_option("--near-threshold", cparams.near_threshold,
                    "Depth (m) below which pixels count as near and get spread");
  lidar->add_option("--out", out_f, "Output 16-bit depth map")->required();
  lidar->add_flag("--no-completion", no_completion, "Skip depth completion");
  lidar->add_flag("--no-preserve", no_preserve, "Skip characteristic preservation");

  // ---- stereo-depth
  auto* stereo = app.add_subcommand("stereo-depth",
                                    "Disparity + depth from a rectified stereo pair");
  std::string left_f, right_f, sintr_f, sout_f, disp_out_f;
  dk::MatchParams mparams;
  dk::WlsParams wparams;
  std::string algo = "sgbm";
  double blur_sigma = 1.0;
  bool no_wls = false, no_pad = false;
  stereo->add_option("--left", left_f, "Left image (8-bit gray)")->required();
  stereo->add_option("--right", right_f, "Right image (8-bit gray)")->required();
  stereo->add_option("--intrinsics", sintr_f, "Intrinsics key/value file")->required();
  stereo->add_option("--num-disparities", mparams.num_disparities,
                     "Disparity search range (multiple of 16)");
  stereo->add_option("--min-disparity", mparams.min_disparity, "Minimum disparity");
  stereo->add_option("--block-size", mparams.block_size, "SAD block size (odd, >= 3)");
  stereo->add_option("--p1", mparams.p1, "Small disparity-jump penalty");
  stereo->add_option("--p2", mparams.p2, "Large disparity-jump penalty (>= P1)");
  stereo->add_option("--algo", algo, "Matcher: bm or sgbm")
      ->check(CLI::IsMember({"bm", "sgbm"}));
  stereo->add_option("--uniqueness", mparams.uniqueness_ratio,
                     "Uniqueness ratio percent (0 disables)");
  stereo->add_option("--directions", mparams.directions,
                     "SGM aggregation directions (1, 4 or 8)");
  stereo->add_option("--blur-sigma", blur_sigma, "Gaussian pre-smoothing sigma");
  stereo->add_flag("--no-subpixel", [&](std::int64_t) { mparams.subpixel = false; },
                   "Disable parabola sub-pixel refinement");
  stereo->add_option("--wls-lambda", wparams.lambda, "WLS smoothness weight");
  stereo->add_option("--wls-alpha", wparams.alpha, "WLS gradient sensitivity");
  stereo->add_flag("--no-wls", no_wls, "Skip WLS disparity refinement");
  stereo->add_flag("--no-pad", no_pad,
                   "Skip column padding (leaves the invalid left band)");
  stereo->add_option("--out", sout_f, "Output 16-bit depth map")->required();
  stereo->add_option("--disparity-out", disp_out_f,
                     "Also write the disparity map (16-bit, 1/256 px units)");

  // ---- compare
  auto* compare = app.add_subcommand("compare", "Depth map error report");
  std::string pred_f, gt_f, report_f, overlay_f;
  compare->add_option("--pred", pred_f, "Predicted 16-bit depth map")->required();
  compare->add_option("--gt", gt_f, "Ground-truth 16-bit depth map")->required();
  compare->add_option("--report", report_f,
                      "Report file (.json for JSON, anything else for text)")
      ->required();
  compare->add_option("--overlay", overlay_f,
                      "Optional overlay image: colorized pred with gt points in red");

  // ---- synth
  auto* synth = app.add_subcommand("synth", "Render a synthetic scene");
  std::string scene_f, out_dir;
  synth->add_option("--scene", scene_f, "Scene description file")->required();
  synth->add_option("--out-dir", out_dir,
                    "Output directory (left/right/gt_depth/occlusion images, "
                    "cloud, poses, intrinsics)")
      ->required();

  CLI11_PARSE(app, argc, argv);
  dk::set_num_threads(threads);

  try {
    if (lidar->parsed()) {
      return run_lidar_depth(cloud_f, body_f, cam_f, intr_f, cparams, out_f,
                             no_completion, no_preserve);
    }
    if (stereo->parsed()) {
      return run_stereo_depth(left_f, right_f, sintr_f, mparams, wparams,
                              blur_sigma, algo, no_wls, no_pad, sout_f, disp_out_f);
    }
    if (compare->parsed()) {
      return run_compare(pred_f, gt_f, report_f, overlay_f);
    }
    if (synth->parsed()) {
      return run_synth(scene_f, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sdc/calib.hpp"
#include "sdc/config.hpp"
#include "sdc/io.hpp"
#include "sdc/metrics.hpp"
#include "sdc/pipeline.hpp"
#include "sdc/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace sdc;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 configuration, 3 file I/O and formats,
// 4 numerical/degenerate inputs, 1 anything else.
enum ExitCode : int {
  kOk = 0,
  kOtherError = 1,
  kConfigError = 2,
  kIoError = 3,
  kNumericError = 4,
};

class Stopwatch {
 public:
  long long restart() {
    const auto now = std::chrono::steady_clock::now();
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

ImageGrid load_image(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".pfm") return pfm_read_image(path);
  if (ext == ".pgm") return pgm_read(path);
  throw ConfigError("unsupported image format (use .pgm or .pfm): " + path);
}

InvDepthMap load_depth(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".pfm") return pfm_read_inv_depth(path);
  if (ext == ".png") return png16_depth_read(path);
  throw ConfigError("unsupported depth format (use .png or .pfm): " + path);
}

Eigen::Vector3d parse_vec3(const std::string& text, const std::string& what) {
  const std::vector<double> v = KeyValueConfig::parse_numbers(text);
  if (v.size() != 3) throw ConfigError(what + " needs exactly 3 numbers");
  return {v[0], v[1], v[2]};
}

Eigen::Matrix3d parse_mat3(const std::string& text, const std::string& what) {
  const std::vector<double> v = KeyValueConfig::parse_numbers(text);
  if (v.size() != 9) throw ConfigError(what + " needs exactly 9 numbers");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = v[static_cast<size_t>(3 * r + c)];
  return m;
}

json vec3_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat3_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r)
    rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << "\n";
}

// Resolves one option value: an explicitly passed CLI flag wins, then the
// config file, then the built-in default already stored in `value`.
struct Resolver {
  CLI::App* cmd;
  KeyValueConfig cfg;

  void pick(const std::string& flag, const std::string& key, double& value) const {
    if (cmd->count(flag) == 0 && cfg.has(key)) value = cfg.get_double(key);
  }
  void pick(const std::string& flag, const std::string& key, int& value) const {
    if (cmd->count(flag) == 0 && cfg.has(key))
      value = static_cast<int>(cfg.get_long(key));
  }
  void pick(const std::string& flag, const std::string& key, uint64_t& value) const {
    if (cmd->count(flag) == 0 && cfg.has(key))
      value = static_cast<uint64_t>(cfg.get_long(key));
  }
  void pick(const std::string& flag, const std::string& key, bool& value) const {
    if (cmd->count(flag) == 0 && cfg.has(key)) value = cfg.get_bool(key, value);
  }
  void pick(const std::string& flag, const std::string& key,
            std::string& value) const {
    if (cmd->count(flag) == 0 && cfg.has(key)) value = cfg.get_string(key);
  }
};

// ---------------------------------------------------------------------------
// complete

struct CompleteArgs {
  std::string config_path;
  std::string i1, i2, sparse, out = "out";
  std::string geometry_kind = "rectified";
  double focal = 0.0, baseline = 0.0;
  double fx = 0.0, fy = 0.0, cx = -1.0, cy = -1.0;
  double radius = 0.0;
  double calib_error_deg = 0.0, scanline_angle_deg = 0.4;
  int min_count = 4;
  double path_cost = 0.04;
  int window_radius = 5;
  double alpha_census = 1.0, alpha_gradient = 1.0;
  double trunc_photo = 0.5, trunc_census = 0.5, trunc_gradient = 0.5;
  double lambda_ssm = 100.0, trunc_ssm = 0.05, ssm_epsilon = 1e-4;
  int ssm_iters = 60;
  bool ground_mask = true;
  double ransac_threshold = 0.2;
  int ransac_iters = 100;
  uint64_t ransac_seed = 1;
  double depth_jump = 2.0;
  double lambda_a = 1.0, lambda_b = 8.0, weight_exponent = -2.5;
  int tgv_iters = 1000;
  bool skip_smoothing = false;
  bool write_sources = false;
  bool write_png = false;
  int workers = 0;
};

int run_complete(CLI::App* cmd, CompleteArgs& a) {
  Resolver r{cmd, a.config_path.empty() ? KeyValueConfig{}
                                        : KeyValueConfig::from_file(a.config_path)};
  r.pick("--i1", "i1", a.i1);
  r.pick("--i2", "i2", a.i2);
  r.pick("--sparse", "sparse", a.sparse);
  r.pick("--out", "out", a.out);
  r.pick("--geometry", "geometry", a.geometry_kind);
  r.pick("--focal", "focal", a.focal);
  r.pick("--baseline", "baseline", a.baseline);
  r.pick("--fx", "fx", a.fx);
  r.pick("--fy", "fy", a.fy);
  r.pick("--cx", "cx", a.cx);
  r.pick("--cy", "cy", a.cy);
  r.pick("--radius", "radius", a.radius);
  r.pick("--calib-error", "calib_error_deg", a.calib_error_deg);
  r.pick("--scanline-angle", "scanline_angle_deg", a.scanline_angle_deg);
  r.pick("--min-count", "min_count", a.min_count);
  r.pick("--path-cost", "path_cost", a.path_cost);
  r.pick("--window-radius", "window_radius", a.window_radius);
  r.pick("--alpha-census", "alpha_census", a.alpha_census);
  r.pick("--alpha-gradient", "alpha_gradient", a.alpha_gradient);
  r.pick("--trunc-photo", "trunc_photo", a.trunc_photo);
  r.pick("--trunc-census", "trunc_census", a.trunc_census);
  r.pick("--trunc-gradient", "trunc_gradient", a.trunc_gradient);
  r.pick("--lambda-ssm", "lambda_ssm", a.lambda_ssm);
  r.pick("--trunc-ssm", "trunc_ssm", a.trunc_ssm);
  r.pick("--ssm-iters", "ssm_iters", a.ssm_iters);
  r.pick("--ssm-epsilon", "ssm_epsilon", a.ssm_epsilon);
  r.pick("--ground-mask", "ground_mask", a.ground_mask);
  r.pick("--ransac-threshold", "ransac_threshold", a.ransac_threshold);
  r.pick("--ransac-iters", "ransac_iters", a.ransac_iters);
  r.pick("--ransac-seed", "ransac_seed", a.ransac_seed);
  r.pick("--depth-jump", "depth_jump", a.depth_jump);
  r.pick("--lambda-a", "lambda_a", a.lambda_a);
  r.pick("--lambda-b", "lambda_b", a.lambda_b);
  r.pick("--weight-exponent", "weight_exponent", a.weight_exponent);
  r.pick("--tgv-iters", "tgv_iters", a.tgv_iters);
  r.pick("--skip-smoothing", "skip_smoothing", a.skip_smoothing);
  r.pick("--write-sources", "write_sources", a.write_sources);
  r.pick("--write-png", "write_png", a.write_png);
  r.pick("--workers", "workers", a.workers);

  if (a.i1.empty() || a.i2.empty() || a.sparse.empty())
    throw ConfigError("complete requires i1, i2 and sparse inputs");

  Stopwatch watch;
  const ImageGrid img1 = load_image(a.i1);
  const ImageGrid img2 = load_image(a.i2);
  const InvDepthMap sparse = load_depth(a.sparse);
  const long long load_ms = watch.restart();

  CameraIntrinsics k;
  k.fx = a.fx > 0.0 ? a.fx : a.focal;
  k.fy = a.fy > 0.0 ? a.fy : k.fx;
  k.cx = a.cx >= 0.0 ? a.cx : img1.width() / 2.0;
  k.cy = a.cy >= 0.0 ? a.cy : img1.height() / 2.0;

  std::optional<StereoGeometry> geometry;
  if (a.geometry_kind == "rectified") {
    if (!(a.focal > 0.0) || !(a.baseline > 0.0))
      throw ConfigError("rectified geometry requires focal and baseline");
    geometry = StereoGeometry::rectified(a.focal, a.baseline);
  } else if (a.geometry_kind == "motion") {
    if (!r.cfg.has("motion_rotation") || !r.cfg.has("motion_translation"))
      throw ConfigError(
          "motion geometry requires motion_rotation and motion_translation");
    geometry = StereoGeometry::motion(
        k, parse_mat3(r.cfg.get_string("motion_rotation"), "motion_rotation"),
        parse_vec3(r.cfg.get_string("motion_translation"), "motion_translation"));
  } else {
    throw ConfigError("geometry must be 'rectified' or 'motion'");
  }

  PipelineParams params;
  params.radius = a.radius;
  params.calib_error_deg = a.calib_error_deg;
  params.scanline_angle_deg = a.scanline_angle_deg;
  params.min_count = a.min_count;
  params.path_cost_const = a.path_cost;
  params.cost.window_radius = a.window_radius;
  params.cost.alpha_census = a.alpha_census;
  params.cost.alpha_gradient = a.alpha_gradient;
  params.cost.trunc_photo = a.trunc_photo;
  params.cost.trunc_census = a.trunc_census;
  params.cost.trunc_gradient = a.trunc_gradient;
  params.ssm.lambda = a.lambda_ssm;
  params.ssm.trunc = a.trunc_ssm;
  params.ssm.max_iters = a.ssm_iters;
  params.ssm.epsilon = a.ssm_epsilon;
  params.ground_mask = a.ground_mask;
  params.ransac_threshold_m = a.ransac_threshold;
  params.ransac_iterations = a.ransac_iters;
  params.ransac_seed = a.ransac_seed;
  params.depth_jump_m = a.depth_jump;
  params.tgv.lambda_a = a.lambda_a;
  params.tgv.lambda_b = a.lambda_b;
  params.tgv.weight_exponent = a.weight_exponent;
  params.tgv.iterations = a.tgv_iters;
  params.skip_smoothing = a.skip_smoothing;
  params.workers = a.workers;

  const PipelineResult result = complete(img1, img2, sparse, *geometry, k, params);
  const long long pipeline_ms = watch.restart();

  fs::create_directories(a.out);
  const auto out = [&](const std::string& name) {
    return (fs::path(a.out) / name).string();
  };
  pfm_write_inv_depth(out("d_ssm.pfm"), result.selected);
  pfm_write_inv_depth(out("completed.pfm"), result.completed);
  if (a.write_png) {
    png16_depth_write(out("d_ssm.png"), result.selected);
    png16_depth_write(out("completed.png"), result.completed);
  }
  if (a.write_sources) {
    // Row-major source indices; float32 is exact for any realistic image.
    Grid<float> sources(result.sources.width(), result.sources.height(), 0.0f);
    for (int y = 0; y < result.sources.height(); ++y)
      for (int x = 0; x < result.sources.width(); ++x)
        sources(x, y) = static_cast<float>(result.sources.index(x, y));
    pfm_write(out("y_ssm.pfm"), sources);
  }
  const long long write_ms = watch.restart();

  json manifest{
      {"command", "complete"},
      {"version", kVersion},
      {"inputs", {{"i1", a.i1}, {"i2", a.i2}, {"sparse", a.sparse}}},
      {"geometry",
       {{"kind", a.geometry_kind},
        {"focal", a.focal},
        {"baseline", a.baseline},
        {"fx", k.fx},
        {"fy", k.fy},
        {"cx", k.cx},
        {"cy", k.cy}}},
      {"parameters",
       {{"radius", a.radius},
        {"radius_used", result.radius_used},
        {"calib_error_deg", a.calib_error_deg},
        {"scanline_angle_deg", a.scanline_angle_deg},
        {"min_count", a.min_count},
        {"path_cost", a.path_cost},
        {"window_radius", a.window_radius},
        {"alpha_census", a.alpha_census},
        {"alpha_gradient", a.alpha_gradient},
        {"trunc_photo", a.trunc_photo},
        {"trunc_census", a.trunc_census},
        {"trunc_gradient", a.trunc_gradient},
        {"lambda_ssm", a.lambda_ssm},
        {"trunc_ssm", a.trunc_ssm},
        {"ssm_iters", a.ssm_iters},
        {"ssm_epsilon", a.ssm_epsilon},
        {"ground_mask", a.ground_mask},
        {"ransac_threshold", a.ransac_threshold},
        {"ransac_iters", a.ransac_iters},
        {"depth_jump", a.depth_jump},
        {"lambda_a", a.lambda_a},
        {"lambda_b", a.lambda_b},
        {"weight_exponent", a.weight_exponent},
        {"tgv_iters", a.tgv_iters},
        {"skip_smoothing", a.skip_smoothing},
        {"workers", a.workers}}},
      {"seeds", {{"ransac_seed", a.ransac_seed}}},
      {"stats",
       {{"lbp_iterations", result.lbp_iterations},
        {"sparse_pixels", sparse.valid_count()}}},
      {"timings_ms",
       {{"load", load_ms}, {"pipeline", pipeline_ms}, {"write", write_ms}}},
  };
  write_json(out("manifest.json"), manifest);

  std::cout << "complete: radius " << result.radius_used << ", LBP iterations "
            << result.lbp_iterations << ", outputs in " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  std::string config_path;
  std::string i1, i2, sparse, out = "out";
  double focal = 0.0, baseline = 0.0;
  double fx = 0.0, fy = 0.0, cx = -1.0, cy = -1.0;
  double rot_half_range = 2.0, rot_step = 0.5;
  double trans_half_range = 0.2, trans_step = 0.1;
  int refinements = 2;
  bool no_background = false;
  double trunc_background = 0.5;
  int window_radius = 5;
  int max_points = 2000;
  uint64_t subsample_seed = 7;
  bool score_table = false;
  int workers = 0;
};

int run_calibrate(CLI::App* cmd, CalibrateArgs& a) {
  Resolver r{cmd, a.config_path.empty() ? KeyValueConfig{}
                                        : KeyValueConfig::from_file(a.config_path)};
  r.pick("--i1", "i1", a.i1);
  r.pick("--i2", "i2", a.i2);
  r.pick("--sparse", "sparse", a.sparse);
  r.pick("--out", "out", a.out);
  r.pick("--focal", "focal", a.focal);
  r.pick("--baseline", "baseline", a.baseline);
  r.pick("--fx", "fx", a.fx);
  r.pick("--fy", "fy", a.fy);
  r.pick("--cx", "cx", a.cx);
  r.pick("--cy", "cy", a.cy);
  r.pick("--rot-half-range", "rot_half_range", a.rot_half_range);
  r.pick("--rot-step", "rot_step", a.rot_step);
  r.pick("--trans-half-range", "trans_half_range", a.trans_half_range);
  r.pick("--trans-step", "trans_step", a.trans_step);
  r.pick("--refinements", "refinements", a.refinements);
  r.pick("--no-background-term", "no_background", a.no_background);
  r.pick("--trunc-background", "trunc_background", a.trunc_background);
  r.pick("--window-radius", "window_radius", a.window_radius);
  r.pick("--max-points", "max_points", a.max_points);
  r.pick("--subsample-seed", "subsample_seed", a.subsample_seed);
  r.pick("--score-table", "score_table", a.score_table);
  r.pick("--workers", "workers", a.workers);

  if (a.i1.empty() || a.i2.empty() || a.sparse.empty())
    throw ConfigError("calibrate requires i1, i2 and sparse inputs");
  if (!(a.focal > 0.0) || !(a.baseline > 0.0))
    throw ConfigError("calibrate requires focal and baseline");

  Stopwatch watch;
  const ImageGrid img1 = load_image(a.i1);
  const ImageGrid img2 = load_image(a.i2);
  const InvDepthMap sparse = load_depth(a.sparse);

  CameraIntrinsics k;
  k.fx = a.fx > 0.0 ? a.fx : a.focal;
  k.fy = a.fy > 0.0 ? a.fy : k.fx;
  k.cx = a.cx >= 0.0 ? a.cx : img1.width() / 2.0;
  k.cy = a.cy >= 0.0 ? a.cy : img1.height() / 2.0;

  Eigen::Matrix3d r0 = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t0 = Eigen::Vector3d::Zero();
  if (r.cfg.has("initial_rotation"))
    r0 = parse_mat3(r.cfg.get_string("initial_rotation"), "initial_rotation");
  if (r.cfg.has("initial_translation"))
    t0 = parse_vec3(r.cfg.get_string("initial_translation"), "initial_translation");

  const PointCloud cloud = back_project(sparse, k);
  const long long load_ms = watch.restart();

  CalibSearchGrid grid;
  grid.rot_half_range_deg = a.rot_half_range;
  grid.rot_step_deg = a.rot_step;
  grid.trans_half_range_m = a.trans_half_range;
  grid.trans_step_m = a.trans_step;
  grid.refinement_levels = a.refinements;
  CalibOptions options;
  options.background_term = !a.no_background;
  options.trunc_background = a.trunc_background;
  options.cost.window_radius = a.window_radius;
  options.max_points = static_cast<size_t>(a.max_points);
  options.subsample_seed = a.subsample_seed;
  options.keep_score_table = a.score_table;
  options.workers = a.workers;

  const CalibResult result = calibrate(cloud, img1, img2, {a.focal, a.baseline}, k,
                                       r0, t0, grid, options);
  const long long search_ms = watch.restart();

  fs::create_directories(a.out);
  const auto out = [&](const std::string& name) {
    return (fs::path(a.out) / name).string();
  };
  json report{
      {"command", "calibrate"},
      {"version", kVersion},
      {"rotation", mat3_json(result.rotation)},
      {"translation", vec3_json(result.translation)},
      {"rot_offset_deg", vec3_json(result.rot_offset_deg)},
      {"trans_offset_m", vec3_json(result.trans_offset_m)},
      {"score", result.score},
      {"projected_points", result.projected_points},
      {"inputs", {{"i1", a.i1}, {"i2", a.i2}, {"sparse", a.sparse}}},
      {"parameters",
       {{"focal", a.focal},
        {"baseline", a.baseline},
        {"rot_half_range", a.rot_half_range},
        {"rot_step", a.rot_step},
        {"trans_half_range", a.trans_half_range},
        {"trans_step", a.trans_step},
        {"refinements", a.refinements},
        {"background_term", !a.no_background},
        {"trunc_background", a.trunc_background},
        {"window_radius", a.window_radius},
        {"max_points", a.max_points}}},
      {"seeds", {{"subsample_seed", a.subsample_seed}}},
      {"timings_ms", {{"load", load_ms}, {"search", search_ms}}},
  };
  write_json(out("calib.json"), report);

  if (a.score_table) {
    std::ofstream table(out("score_table.csv"));
    table << "level,rot_x_deg,rot_y_deg,rot_z_deg,t_x_m,t_y_m,t_z_m,score,"
             "match_cost,background_sum,projected_points\n";
    for (const CalibCandidate& c : result.table) {
      table << c.level << "," << c.rot_offset_deg.x() << "," << c.rot_offset_deg.y()
            << "," << c.rot_offset_deg.z() << "," << c.trans_offset_m.x() << ","
            << c.trans_offset_m.y() << "," << c.trans_offset_m.z() << "," << c.score
            << "," << c.match_cost << "," << c.background_sum << ","
            << c.projected_points << "\n";
    }
  }

  std::cout << "calibrate: rotation offset (" << result.rot_offset_deg.transpose()
            << ") deg, translation offset (" << result.trans_offset_m.transpose()
            << ") m, score " << result.score << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// synth

SceneSpec scene_from_config(const KeyValueConfig& cfg) {
  SceneSpec spec;
  spec.width = static_cast<int>(cfg.get_long("width", spec.width));
  spec.height = static_cast<int>(cfg.get_long("height", spec.height));
  spec.focal = cfg.get_double("focal", spec.focal);
  spec.baseline = cfg.get_double("baseline", spec.baseline);
  spec.backdrop_depth_m = cfg.get_double("backdrop_depth", spec.backdrop_depth_m);
  spec.ground_enabled = cfg.get_bool("ground", spec.ground_enabled);
  spec.ground_height_m = cfg.get_double("ground_height", spec.ground_height_m);
  for (const std::string& rect : cfg.get_all("rect")) {
    const std::vector<double> v = KeyValueConfig::parse_numbers(rect);
    if (v.size() != 5) throw ConfigError("rect needs 5 numbers: depth x0 y0 x1 y1");
    spec.rects.push_back({v[0], static_cast<int>(v[1]), static_cast<int>(v[2]),
                          static_cast<int>(v[3]), static_cast<int>(v[4])});
  }
  spec.texture_seed = static_cast<uint32_t>(cfg.get_long("texture_seed", 1));
  spec.texture_amplitude =
      cfg.get_double("texture_amplitude", spec.texture_amplitude);
  spec.texture_octaves = static_cast<int>(cfg.get_long("texture_octaves", 3));
  spec.texture_period_px = cfg.get_double("texture_period", spec.texture_period_px);
  spec.scanline_count = static_cast<int>(cfg.get_long("scanlines", 64));
  spec.scanline_span_deg = cfg.get_double("scan_span", spec.scanline_span_deg);
  if (cfg.has("perturb_axis"))
    spec.perturbation.rotation_axis =
        parse_vec3(cfg.get_string("perturb_axis"), "perturb_axis");
  spec.perturbation.rotation_deg = cfg.get_double("perturb_deg", 0.0);
  if (cfg.has("perturb_translation"))
    spec.perturbation.translation =
        parse_vec3(cfg.get_string("perturb_translation"), "perturb_translation");
  spec.noise_stddev = cfg.get_double("noise", 0.0);
  return spec;
}

int run_synth(const std::string& spec_path, const std::string& out_dir,
              uint64_t seed, bool seed_passed) {
  const KeyValueConfig cfg = KeyValueConfig::from_file(spec_path);
  const SceneSpec spec = scene_from_config(cfg);
  if (!seed_passed) seed = static_cast<uint64_t>(cfg.get_long("seed", 1));

  Stopwatch watch;
  const Scene scene = render_scene(spec, seed);
  const PointCloud lidar =
      sample_scanlines(scene.gt_inv_depth, spec.intrinsics(), spec.scanline_count,
                       spec.scanline_span_deg);
  const InvDepthMap sparse =
      perturb_and_project(lidar, spec.intrinsics(), spec.perturbation, spec.width,
                          spec.height, spec.geometry().rectified_stereo());
  const long long render_ms = watch.restart();

  fs::create_directories(out_dir);
  const auto out = [&](const std::string& name) {
    return (fs::path(out_dir) / name).string();
  };
  pgm_write(out("i1.pgm"), scene.image1);
  pgm_write(out("i2.pgm"), scene.image2);
  pfm_write_image(out("i1.pfm"), scene.image1);
  pfm_write_image(out("i2.pfm"), scene.image2);
  pfm_write_inv_depth(out("gt.pfm"), scene.gt_inv_depth);
  png16_depth_write(out("gt_depth.png"), scene.gt_inv_depth);
  png16_depth_write(out("sparse.png"), sparse);
  ply_write(out("lidar.ply"), lidar);
  const long long write_ms = watch.restart();

  json manifest{
      {"command", "synth"},
      {"version", kVersion},
      {"spec_file", spec_path},
      {"seeds", {{"seed", seed}, {"texture_seed", spec.texture_seed}}},
      {"scene",
       {{"width", spec.width},
        {"height", spec.height},
        {"focal", spec.focal},
        {"baseline", spec.baseline},
        {"backdrop_depth", spec.backdrop_depth_m},
        {"ground", spec.ground_enabled},
        {"ground_height", spec.ground_height_m},
        {"rects", spec.rects.size()},
        {"scanlines", spec.scanline_count},
        {"scan_span_deg", spec.scanline_span_deg},
        {"perturb_deg", spec.perturbation.rotation_deg},
        {"perturb_axis", vec3_json(spec.perturbation.rotation_axis)},
        {"perturb_translation", vec3_json(spec.perturbation.translation)},
        {"noise", spec.noise_stddev}}},
      {"stats",
       {{"lidar_points", lidar.size()}, {"sparse_pixels", sparse.valid_count()}}},
      {"timings_ms", {{"render", render_ms}, {"write", write_ms}}},
  };
  write_json(out("manifest.json"), manifest);

  std::cout << "synth: " << lidar.size() << " points, " << sparse.valid_count()
            << " sparse pixels, outputs in " << out_dir << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// eval

int run_eval(const std::string& est_path, const std::string& gt_path, double focal,
             double baseline, const std::string& buckets_text,
             const std::string& out_path) {
  const InvDepthMap est = load_depth(est_path);
  const InvDepthMap gt = load_depth(gt_path);

  json report{{"command", "eval"},
              {"version", kVersion},
              {"est", est_path},
              {"gt", gt_path}};

  const double mae_m = mae(est, gt);
  const double imae_inv = imae(est, gt);
  std::cout << "MAE [m]      " << mae_m << "\n";
  std::cout << "iMAE [1/m]   " << imae_inv << "\n";
  report["mae_m"] = mae_m;
  report["imae_inv_m"] = imae_inv;

  if (focal > 0.0 && baseline > 0.0) {
    const double rate =
        error_rate(est, gt, StereoGeometry::rectified(focal, baseline));
    std::cout << "error rate   " << rate << " %\n";
    report["error_rate_percent"] = rate;
    report["focal"] = focal;
    report["baseline"] = baseline;
  }

  if (!buckets_text.empty()) {
    const std::vector<double> edges = KeyValueConfig::parse_numbers(buckets_text);
    const auto buckets = range_bucketed_mae(est, gt, edges);
    json rows = json::array();
    std::cout << "range [m]        count   MAE [m]\n";
    for (const RangeBucket& b : buckets) {
      std::cout << "  " << b.lower_m << " - " << b.upper_m << "\t" << b.count
                << "\t" << (b.mae_m ? std::to_string(*b.mae_m) : "-") << "\n";
      json row{{"lower_m", b.lower_m}, {"upper_m", b.upper_m}, {"count", b.count}};
      if (b.mae_m) row["mae_m"] = *b.mae_m;
      rows.push_back(row);
    }
    report["range_buckets"] = rows;
  }

  if (!out_path.empty()) write_json(out_path, report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereo-aided depth completion for sparse, possibly mis-projected "
               "LiDAR depth maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CompleteArgs ca;
  CLI::App* complete_cmd = app.add_subcommand(
      "complete", "Densify a sparse inverse depth map with a stereo pair");
  complete_cmd->add_option("--config", ca.config_path, "key = value config file");
  complete_cmd->add_option("--i1", ca.i1, "left/reference image (.pgm/.pfm)");
  complete_cmd->add_option("--i2", ca.i2, "right/second image (.pgm/.pfm)");
  complete_cmd->add_option("--sparse", ca.sparse, "sparse depth (.png/.pfm)");
  complete_cmd->add_option("--out", ca.out, "output directory");
  complete_cmd->add_option("--geometry", ca.geometry_kind, "rectified|motion");
  complete_cmd->add_option("--focal", ca.focal, "focal length [px]");
  complete_cmd->add_option("--baseline", ca.baseline, "stereo baseline [m]");
  complete_cmd->add_option("--fx", ca.fx);
  complete_cmd->add_option("--fy", ca.fy);
  complete_cmd->add_option("--cx", ca.cx);
  complete_cmd->add_option("--cy", ca.cy);
  complete_cmd->add_option("--radius", ca.radius,
                           "candidate radius [px]; 0 derives it");
  complete_cmd->add_option("--calib-error", ca.calib_error_deg,
                           "expected rotational error [deg] for the radius rule");
  complete_cmd->add_option("--scanline-angle", ca.scanline_angle_deg,
                           "inter-scanline angle [deg] for the radius rule");
  complete_cmd->add_option("--min-count", ca.min_count);
  complete_cmd->add_option("--path-cost", ca.path_cost);
  complete_cmd->add_option("--window-radius", ca.window_radius);
  complete_cmd->add_option("--alpha-census", ca.alpha_census);
  complete_cmd->add_option("--alpha-gradient", ca.alpha_gradient);
  complete_cmd->add_option("--trunc-photo", ca.trunc_photo);
  complete_cmd->add_option("--trunc-census", ca.trunc_census);
  complete_cmd->add_option("--trunc-gradient", ca.trunc_gradient);
  complete_cmd->add_option("--lambda-ssm", ca.lambda_ssm);
  complete_cmd->add_option("--trunc-ssm", ca.trunc_ssm);
  complete_cmd->add_option("--ssm-iters", ca.ssm_iters);
  complete_cmd->add_option("--ssm-epsilon", ca.ssm_epsilon);
  complete_cmd->add_option("--ground-mask", ca.ground_mask,
                           "RANSAC ground override (true/false)");
  complete_cmd->add_option("--ransac-threshold", ca.ransac_threshold);
  complete_cmd->add_option("--ransac-iters", ca.ransac_iters);
  complete_cmd->add_option("--ransac-seed", ca.ransac_seed);
  complete_cmd->add_option("--depth-jump", ca.depth_jump);
  complete_cmd->add_option("--lambda-a", ca.lambda_a);
  complete_cmd->add_option("--lambda-b", ca.lambda_b);
  complete_cmd->add_option("--weight-exponent", ca.weight_exponent);
  complete_cmd->add_option("--tgv-iters", ca.tgv_iters);
  complete_cmd->add_flag("--skip-smoothing", ca.skip_smoothing,
                         "stop after the selection stage");
  complete_cmd->add_flag("--write-sources", ca.write_sources,
                         "also write the selection source map");
  complete_cmd->add_flag("--write-png", ca.write_png,
                         "also write 16-bit depth PNGs");
  complete_cmd->add_option("--workers", ca.workers, "0 = SDC_WORKERS or hardware");

  CalibrateArgs ka;
  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate", "Grid-search the extrinsics of a sparse depth map");
  calibrate_cmd->add_option("--config", ka.config_path, "key = value config file");
  calibrate_cmd->add_option("--i1", ka.i1, "left/reference image");
  calibrate_cmd->add_option("--i2", ka.i2, "right image");
  calibrate_cmd->add_option("--sparse", ka.sparse,
                            "sparse depth whose back-projection is searched");
  calibrate_cmd->add_option("--out", ka.out, "output directory");
  calibrate_cmd->add_option("--focal", ka.focal);
  calibrate_cmd->add_option("--baseline", ka.baseline);
  calibrate_cmd->add_option("--fx", ka.fx);
  calibrate_cmd->add_option("--fy", ka.fy);
  calibrate_cmd->add_option("--cx", ka.cx);
  calibrate_cmd->add_option("--cy", ka.cy);
  calibrate_cmd->add_option("--rot-half-range", ka.rot_half_range, "deg");
  calibrate_cmd->add_option("--rot-step", ka.rot_step, "deg");
  calibrate_cmd->add_option("--trans-half-range", ka.trans_half_range, "m");
  calibrate_cmd->add_option("--trans-step", ka.trans_step, "m");
  calibrate_cmd->add_option("--refinements", ka.refinements);
  calibrate_cmd->add_flag("--no-background-term", ka.no_background,
                          "disable the zero-disparity background penalty");
  calibrate_cmd->add_option("--trunc-background", ka.trunc_background);
  calibrate_cmd->add_option("--window-radius", ka.window_radius);
  calibrate_cmd->add_option("--max-points", ka.max_points);
  calibrate_cmd->add_option("--subsample-seed", ka.subsample_seed);
  calibrate_cmd->add_flag("--score-table", ka.score_table,
                          "dump every candidate score as CSV");
  calibrate_cmd->add_option("--workers", ka.workers);

  std::string synth_spec, synth_out = "out";
  uint64_t synth_seed = 1;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Render a synthetic piecewise-planar scene");
  synth_cmd->add_option("--spec", synth_spec, "scene description file")->required();
  synth_cmd->add_option("--out", synth_out, "output directory");
  CLI::Option* seed_opt = synth_cmd->add_option("--seed", synth_seed);

  std::string eval_est, eval_gt, eval_buckets, eval_out;
  double eval_focal = 0.0, eval_baseline = 0.0;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Compare an estimated depth map to ground truth");
  eval_cmd->add_option("--est", eval_est, "estimate (.png/.pfm)")->required();
  eval_cmd->add_option("--gt", eval_gt, "ground truth (.png/.pfm)")->required();
  eval_cmd->add_option("--focal", eval_focal, "enables the disparity error rate");
  eval_cmd->add_option("--baseline", eval_baseline);
  eval_cmd->add_option("--buckets", eval_buckets,
                       "range bucket edges [m], e.g. \"0 10 40 80\"");
  eval_cmd->add_option("--out", eval_out, "JSON report path");

  try {
    app.parse(argc, argv);
    if (complete_cmd->parsed()) return run_complete(complete_cmd, ca);
    if (calibrate_cmd->parsed()) return run_calibrate(calibrate_cmd, ka);
    if (synth_cmd->parsed())
      return run_synth(synth_spec, synth_out, synth_seed, seed_opt->count() > 0);
    if (eval_cmd->parsed())
      return run_eval(eval_est, eval_gt, eval_focal, eval_baseline, eval_buckets,
                      eval_out);
    return kConfigError;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const FormatError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kOtherError;
  }
}

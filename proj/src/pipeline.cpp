#include "boxlab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "boxlab/error.hpp"
#include "boxlab/frame.hpp"
#include "boxlab/visibility.hpp"

namespace boxlab {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void rethrow_with_stage(const char* stage, const Error& e) {
  throw Error(e.code(), std::string(stage) + ": " + e.what());
}

AnatomicalFrame frame_stage(const SceneInput& scene,
                            const PipelineConfig& config) {
  const auto landmarks = scene.landmarks();
  try {
    return build_anatomical_frame(landmarks, config.axis_policy);
  } catch (const Error&) {
    // Landmark path unusable; PCA over the mesh vertices is the documented
    // fallback, with provenance recorded.
  }
  try {
    return pca_frame(scene.mesh.vertices);
  } catch (const Error& e) {
    rethrow_with_stage("frame", e);
  }
}

}  // namespace

LabelOutcome run_label(const SceneInput& scene, const PipelineConfig& config,
                       std::uint64_t seed, bool refine) {
  LabelOutcome out;

  const AnatomicalFrame frame = frame_stage(scene, config);
  try {
    out.box = generate_obox(scene.mesh, frame, config.epsilon);
  } catch (const Error& e) {
    rethrow_with_stage("obox", e);
  }

  const auto corrs = scene.correspondences();
  RefineDiagnostics refine_diag;
  try {
    std::mt19937_64 rng(seed);
    const RansacResult init =
        epnp_ransac(corrs, scene.intrinsics, config.ransac, rng);
    out.ransac_inliers = init.inlier_count;
    out.pose = init.pose;
    if (refine) {
      const auto covs = keypoint_covariances(corrs, scene.intrinsics,
                                             config.uncertainty_params());
      RefineOptions opts = config.refine_options();
      opts.box_corners = out.box.corners_world;
      try {
        out.pose = refine_pose(init.pose, corrs, covs, scene.mask_bbox,
                               scene.intrinsics, opts, &refine_diag);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate_result) throw;
        // Both branches degenerate: keep the initialization pose and let the
        // degeneracy check mark the label; never fail silently.
        out.pose = init.pose;
        refine_diag.restarted = true;
      }
    }
  } catch (const Error& e) {
    rethrow_with_stage("pose", e);
  }

  Label3D& label = out.label;
  label.set_pose(out.pose);
  label.intrinsics = scene.intrinsics;
  label.intrinsics_estimated = scene.intrinsics_estimated;
  label.frame_x_source = frame.x_source;
  label.frame_y_source = frame.y_source;
  label.corners_world = out.box.corners_world;

  const std::vector<Eigen::Vector3d> corners(out.box.corners_world.begin(),
                                             out.box.corners_world.end());
  const Projection projected = project(out.pose, scene.intrinsics, corners);
  std::array<Eigen::Vector2d, 8> corner_px;
  std::array<bool, 8> behind{};
  for (int i = 0; i < 8; ++i) {
    corner_px[i] = projected.pixels[i];
    behind[i] = projected.behind_camera[i];
    label.corners_px[i] = projected.pixels[i];
    label.corner_behind_camera[i] = behind[i];
  }

  try {
    for (const auto& entry :
         visibility_report(out.box, out.pose, scene.intrinsics)) {
      label.faces.push_back({face_label(entry.face), entry.visible,
                             entry.percentage, entry.projected_area});
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::camera_inside_box) rethrow_with_stage("visibility", e);
    for (const auto& def : kFaceTable) {
      label.faces.push_back({def.label, false, 0.0, 0.0});
    }
  }

  const DegeneracyVerdict verdict = detect_degenerate(
      corner_px, behind, scene.mask_area_px2, config.degenerate_area_frac);
  label.degenerate = verdict.degenerate;
  label.degenerate_reason = verdict.reason;

  try {
    label.diagnostics.reprojection_error_px =
        reprojection_error(out.pose, corrs, scene.intrinsics);
  } catch (const Error&) {
    label.diagnostics.reprojection_error_px = 0.0;
  }
  label.diagnostics.inlier_count = out.ransac_inliers;
  label.diagnostics.refinement_iterations = refine_diag.iterations;
  label.diagnostics.restarted = refine_diag.restarted;
  return out;
}

DirectoryReport evaluate_directory(const std::string& dir,
                                   const PipelineConfig& config,
                                   std::uint64_t seed) {
  std::vector<fs::path> scene_files;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::io_error, dir + " is not a directory");
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 11 &&
        name.substr(name.size() - 11) == ".scene.json") {
      scene_files.push_back(entry.path());
    }
  }
  std::sort(scene_files.begin(), scene_files.end());
  if (scene_files.empty()) {
    throw Error(ErrorCode::validation_error,
                "no *.scene.json files in " + dir);
  }

  DirectoryReport report;
  report.scenes.resize(scene_files.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scene_files.size()) return;
      SceneEvaluation& eval = report.scenes[i];
      eval.name = scene_files[i].filename().string();
      try {
        const SceneInput scene = parse_scene({scene_files[i].string()});
        const LabelOutcome basic = run_label(scene, config, seed, false);
        const LabelOutcome refined = run_label(scene, config, seed, true);
        eval.basic_reprojection_px =
            basic.label.diagnostics.reprojection_error_px;
        eval.refined_reprojection_px =
            refined.label.diagnostics.reprojection_error_px;
        eval.basic_degenerate = basic.label.degenerate;
        eval.refined_degenerate = refined.label.degenerate;
      } catch (const std::exception& e) {
        eval.failed = true;
        eval.error = e.what();
      }
    }
  };
  const unsigned n_threads = std::max(
      1u, std::min(std::thread::hardware_concurrency(),
                   static_cast<unsigned>(scene_files.size())));
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  double basic_sum = 0.0;
  double refined_sum = 0.0;
  for (const auto& eval : report.scenes) {
    if (eval.failed) {
      ++report.failures;
      continue;
    }
    ++report.processed;
    basic_sum += eval.basic_reprojection_px;
    refined_sum += eval.refined_reprojection_px;
    report.basic_degenerate += eval.basic_degenerate ? 1 : 0;
    report.refined_degenerate += eval.refined_degenerate ? 1 : 0;
  }
  if (report.processed > 0) {
    report.mean_basic_reprojection_px = basic_sum / report.processed;
    report.mean_refined_reprojection_px = refined_sum / report.processed;
  }
  return report;
}

std::string directory_report_json(const DirectoryReport& report) {
  ojson doc;
  doc["summary"] = {
      {"processed", report.processed},
      {"failures", report.failures},
      {"basic_degenerate", report.basic_degenerate},
      {"refined_degenerate", report.refined_degenerate},
      {"mean_basic_reprojection_px", report.mean_basic_reprojection_px},
      {"mean_refined_reprojection_px", report.mean_refined_reprojection_px}};
  ojson scenes = ojson::array();
  for (const auto& eval : report.scenes) {
    ojson s;
    s["name"] = eval.name;
    if (eval.failed) {
      s["error"] = eval.error;
    } else {
      s["basic"] = {{"reprojection_px", eval.basic_reprojection_px},
                    {"degenerate", eval.basic_degenerate}};
      s["refined"] = {{"reprojection_px", eval.refined_reprojection_px},
                      {"degenerate", eval.refined_degenerate}};
    }
    scenes.push_back(s);
  }
  doc["scenes"] = scenes;
  return doc.dump(2) + "\n";
}

std::string directory_report_table(const DirectoryReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-32s %14s %14s %6s %6s\n", "scene",
                "basic px", "refined px", "b.deg", "r.deg");
  out << line;
  for (const auto& eval : report.scenes) {
    if (eval.failed) {
      std::snprintf(line, sizeof(line), "%-32s FAILED: %s\n",
                    eval.name.c_str(), eval.error.c_str());
    } else {
      std::snprintf(line, sizeof(line), "%-32s %14.4f %14.4f %6s %6s\n",
                    eval.name.c_str(), eval.basic_reprojection_px,
                    eval.refined_reprojection_px,
                    eval.basic_degenerate ? "yes" : "no",
                    eval.refined_degenerate ? "yes" : "no");
    }
    out << line;
  }
  std::snprintf(line, sizeof(line),
                "processed=%d failures=%d basic_degenerate=%d "
                "refined_degenerate=%d mean_basic=%.4fpx mean_refined=%.4fpx\n",
                report.processed, report.failures, report.basic_degenerate,
                report.refined_degenerate, report.mean_basic_reprojection_px,
                report.mean_refined_reprojection_px);
  out << line;
  return out.str();
}

EvalScene make_eval_scene(const SceneInput& scene, const PipelineConfig& config,
                          std::uint64_t seed) {
  EvalScene eval;
  eval.landmarks = scene.landmarks();
  eval.corrs = scene.correspondences();
  eval.mesh = scene.mesh;
  eval.intrinsics = scene.intrinsics;
  eval.policy = config.axis_policy;
  eval.camera = run_label(scene, config, seed, true).pose;
  return eval;
}

std::string sweep_report_json(const StabilityPair& pair,
                              const NoiseSweepConfig& config) {
  ojson doc;
  doc["sigmas"] = config.sigmas;
  doc["trials_per_sigma"] = config.trials_per_sigma;
  doc["seed"] = config.seed;
  ojson methods = ojson::array();
  for (const StabilityResult* result : {&pair.anatomical, &pair.pca}) {
    ojson rows = ojson::array();
    for (const auto& row : result->per_sigma) {
      rows.push_back(
          {{"sigma", row.sigma},
           {"mean_rotation_deg", row.mean_rotation_deg},
           {"max_rotation_deg", row.max_rotation_deg},
           {"mean_alignment", row.mean_alignment},
           {"mean_axis_rotation_deg",
            {row.mean_axis_rotation_deg(0), row.mean_axis_rotation_deg(1),
             row.mean_axis_rotation_deg(2)}}});
    }
    methods.push_back({{"method", result->method}, {"per_sigma", rows}});
  }
  doc["methods"] = methods;
  return doc.dump(2) + "\n";
}

std::string sweep_report_table(const StabilityPair& pair) {
  std::ostringstream out;
  char line[200];
  std::snprintf(line, sizeof(line), "%-12s %8s %14s %14s %14s %30s\n", "method",
                "sigma", "mean rot deg", "max rot deg", "mean align",
                "per-axis mean rot deg (x,y,z)");
  out << line;
  for (const StabilityResult* result : {&pair.anatomical, &pair.pca}) {
    for (const auto& row : result->per_sigma) {
      std::snprintf(line, sizeof(line),
                    "%-12s %8.2f %14.6f %14.6f %14.6f (%8.4f %8.4f %8.4f)\n",
                    result->method.c_str(), row.sigma, row.mean_rotation_deg,
                    row.max_rotation_deg, row.mean_alignment,
                    row.mean_axis_rotation_deg(0),
                    row.mean_axis_rotation_deg(1),
                    row.mean_axis_rotation_deg(2));
      out << line;
    }
  }
  return out.str();
}

}  // namespace boxlab

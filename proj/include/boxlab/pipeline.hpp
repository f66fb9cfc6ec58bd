#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxlab/config.hpp"
#include "boxlab/evaluate.hpp"
#include "boxlab/label.hpp"
#include "boxlab/obox.hpp"
#include "boxlab/scene_io.hpp"

namespace boxlab {

struct LabelOutcome {
  Label3D label;
  CameraPose pose;
  OrientedBox box;
  int ransac_inliers = 0;
};

/// Full pipeline for one scene: anatomical frame (PCA fallback) -> oriented
/// box -> EPnP+RANSAC -> joint refinement -> visibility report -> degeneracy
/// check. With refine=false the initialization pose is used as-is (the
/// "basic" path). A degenerate outcome is never silent: the label carries the
/// flag and reason.
LabelOutcome run_label(const SceneInput& scene, const PipelineConfig& config,
                       std::uint64_t seed, bool refine = true);

struct SceneEvaluation {
  std::string name;
  bool failed = false;
  std::string error;
  double basic_reprojection_px = 0.0;
  double refined_reprojection_px = 0.0;
  bool basic_degenerate = false;
  bool refined_degenerate = false;
};

struct DirectoryReport {
  std::vector<SceneEvaluation> scenes;
  int processed = 0;
  int failures = 0;
  int basic_degenerate = 0;
  int refined_degenerate = 0;
  double mean_basic_reprojection_px = 0.0;
  double mean_refined_reprojection_px = 0.0;
};

/// Runs both the basic and refined paths over every *.scene.json in a
/// directory (parallel, per-scene isolation) and aggregates the comparison.
DirectoryReport evaluate_directory(const std::string& dir,
                                   const PipelineConfig& config,
                                   std::uint64_t seed);

std::string directory_report_json(const DirectoryReport& report);
std::string directory_report_table(const DirectoryReport& report);

/// Builds the evaluation scene for the noise sweep; the camera used for the
/// pixel-to-3D noise transfer is the refined pipeline estimate.
EvalScene make_eval_scene(const SceneInput& scene, const PipelineConfig& config,
                          std::uint64_t seed);

std::string sweep_report_json(const StabilityPair& pair,
                              const NoiseSweepConfig& config);
std::string sweep_report_table(const StabilityPair& pair);

}  // namespace boxlab

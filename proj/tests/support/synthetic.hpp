#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "boxlab/evaluate.hpp"
#include "boxlab/scene_io.hpp"
#include "boxlab/types.hpp"

namespace boxlab::testing {

/// Ground-truth synthetic scene: an elongated quadruped-like vertex cloud with
/// named landmarks, a telephoto camera at 3-15 body lengths, and exact 2D
/// observations. The mask bbox is the tight bounds of the projected keypoints
/// at the ground-truth pose (an "exact mask").
struct SyntheticScene {
  MeshVertices mesh;
  std::vector<Landmark3D> landmarks;
  std::vector<Correspondence> corrs;  // corrs[i] observes landmarks[i]
  std::vector<std::string> names;
  Intrinsics intrinsics;
  CameraPose camera;  // ground truth, world -> camera
  MaskBBox mask_bbox;
  double body_length = 0.0;

  EvalScene eval_scene() const;
  SceneInput scene_input() const;
};

struct SceneOptions {
  int min_landmarks = 12;
  int max_landmarks = 26;
  /// Body bent ~90 degrees at mid-torso: the vertex distribution loses its
  /// dominant direction while nose/tail landmarks keep a long chord.
  bool bent_pose = false;
  /// Landmarks compressed toward the sagittal plane; a classic flip-inducing
  /// configuration for pose initialization under noise.
  bool near_planar_keypoints = false;
  int occluded_landmarks = 0;
  double min_distance_body_lengths = 3.0;
  double max_distance_body_lengths = 15.0;
};

SyntheticScene make_scene(std::uint64_t seed, const SceneOptions& options = {});

/// Writes mesh/keypoints/scene JSON fixtures for the io_cli surface; returns
/// the scene descriptor path. With `raster_mask` a PNG mask is rasterized from
/// the projected mesh instead of the inline bbox.
std::string write_scene_fixture(const SyntheticScene& scene,
                                const std::string& dir,
                                const std::string& base_name,
                                bool raster_mask = false,
                                bool omit_intrinsics = false);

/// Uniformly random rotation matrix.
Eigen::Matrix3d random_rotation(std::mt19937_64& rng);

}  // namespace boxlab::testing

#pragma once

#include <array>
#include <string>
#include <vector>

#include "boxlab/types.hpp"

namespace boxlab {

struct LabelFaceEntry {
  std::string face;
  bool visible = false;
  double percentage = 0.0;
  double projected_area = 0.0;
};

struct LabelDiagnostics {
  double reprojection_error_px = 0.0;
  int inlier_count = 0;
  int refinement_iterations = 0;
  bool restarted = false;
};

/// The serialized output record: oriented box, refined pose, visibility
/// percentages, provenance and health diagnostics for one scene.
struct Label3D {
  int schema_version = 1;
  std::array<Eigen::Vector3d, 8> corners_world{};
  std::array<Eigen::Vector2d, 8> corners_px{};
  std::array<bool, 8> corner_behind_camera{};
  Eigen::Vector4d quaternion_wxyz = Eigen::Vector4d(1, 0, 0, 0);
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  bool pose_refined = false;
  Intrinsics intrinsics;
  bool intrinsics_estimated = false;
  std::vector<LabelFaceEntry> faces;
  std::string frame_x_source;
  std::string frame_y_source;
  bool degenerate = false;
  std::string degenerate_reason;
  LabelDiagnostics diagnostics;

  CameraPose pose() const;
  void set_pose(const CameraPose& pose);
};

std::string serialize_label(const Label3D& label);
Label3D parse_label(const std::string& text);

void save_label(const std::string& path, const Label3D& label);
Label3D load_label(const std::string& path);

}  // namespace boxlab

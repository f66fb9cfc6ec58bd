#pragma once

#include <optional>
#include <string>
#include <vector>

#include "boxlab/types.hpp"

namespace boxlab {

/// One keypoint record as stored on disk: co-registered 3D landmark and 2D
/// observation.
struct SceneKeypoint {
  std::string name;
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
  Eigen::Vector2d uv = Eigen::Vector2d::Zero();
  bool visible = true;
  double confidence = 1.0;
};

struct SceneInput {
  MeshVertices mesh;
  std::vector<SceneKeypoint> keypoints;
  Intrinsics intrinsics;
  MaskBBox mask_bbox;
  double mask_area_px2 = 0.0;  // nonzero pixel count for rasters, bbox area otherwise
  bool intrinsics_estimated = false;
  bool mask_from_raster = false;

  std::vector<Landmark3D> landmarks() const;
  std::vector<Correspondence> correspondences() const;
};

/// Paths making up one scene; anything except the mesh and keypoints may be
/// inline in the scene file instead.
struct ScenePaths {
  std::string scene_json;
};

/// Vertex subset of Wavefront OBJ: consumes `v x y z [w]` records, ignores
/// every other directive. Malformed `v` lines raise ParseError with the line
/// number.
std::vector<Eigen::Vector3d> parse_obj_vertices(const std::string& path);

/// Keypoints JSON: array of {name, xyz:[3], uv:[2], visible, confidence?}.
std::vector<SceneKeypoint> parse_keypoints(const std::string& path);

/// Reads and validates a scene bundle from its JSON descriptor. Missing
/// intrinsics are filled with f = 1.2 * max(width, height) and the principal
/// point at the image center, with intrinsics_estimated set.
SceneInput parse_scene(const ScenePaths& paths);

/// Tight bounds and nonzero-pixel count of a binary raster mask.
struct MaskRasterInfo {
  MaskBBox bbox;
  double nonzero_count = 0.0;
};

/// Decodes a grayscale PNG mask (nonzero = animal). Throws when PNG support
/// is compiled out or the file is unusable.
MaskRasterInfo read_mask_png(const std::string& path);

bool png_supported();

}  // namespace boxlab

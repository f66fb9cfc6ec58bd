#pragma once

#include <array>
#include <vector>

#include "boxlab/pose.hpp"
#include "boxlab/types.hpp"

namespace boxlab {

/// World-space camera center C = -R^T t.
Eigen::Vector3d camera_position(const CameraPose& pose);

struct FaceGeometry {
  Face face;
  Eigen::Vector3d normal;  // outward unit normal
  Eigen::Vector3d center;  // mean of the 4 face corners
};

/// Outward unit normals and centers for all 6 faces. Each normal comes from
/// the face's (v1-v0) x (v3-v0) triple and is flipped if it does not point
/// away from the box centroid.
std::array<FaceGeometry, kNumFaces> face_normals(const OrientedBox& box);

/// Faces whose outward normal has positive dot product with the unit view
/// vector from face center to the camera. Throws CameraInsideBox when the
/// camera is not strictly outside the box.
std::vector<Face> visible_faces(const OrientedBox& box,
                                const Eigen::Vector3d& camera);

struct ProjectedFaceArea {
  double area_px2 = 0.0;
  bool behind_camera = false;  // some corner at non-positive depth; area forced 0
};

/// Shoelace area of the projected face quad.
ProjectedFaceArea projected_area(const std::array<Eigen::Vector3d, 4>& corners,
                                 const CameraPose& pose,
                                 const Intrinsics& intrinsics);

struct FaceVisibility {
  Face face = Face::front;
  bool visible = false;
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  double projected_area = 0.0;  // px^2
  double percentage = 0.0;      // of total visible area
  bool behind_camera = false;
};

/// Per-face visibility and projected-area percentages; percentages are
/// normalized over visible faces only.
std::vector<FaceVisibility> visibility_report(const OrientedBox& box,
                                              const CameraPose& pose,
                                              const Intrinsics& intrinsics);

/// World-space corners of one face in cyclic quad order.
std::array<Eigen::Vector3d, 4> face_corners_world(const OrientedBox& box,
                                                  Face face);

}  // namespace boxlab

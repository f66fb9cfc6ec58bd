#include "boxlab/visibility.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "boxlab/error.hpp"
#include "boxlab/geometry.hpp"

namespace boxlab {

Eigen::Vector3d camera_position(const CameraPose& pose) {
  return -pose.rotation.transpose() * pose.translation;
}

std::array<Eigen::Vector3d, 4> face_corners_world(const OrientedBox& box,
                                                  Face face) {
  const FaceDef& def = kFaceTable[static_cast<int>(face)];
  return {box.corners_world[def.corners[0]], box.corners_world[def.corners[1]],
          box.corners_world[def.corners[2]], box.corners_world[def.corners[3]]};
}

std::array<FaceGeometry, kNumFaces> face_normals(const OrientedBox& box) {
  std::array<FaceGeometry, kNumFaces> out;
  for (int f = 0; f < kNumFaces; ++f) {
    const FaceDef& def = kFaceTable[f];
    const auto corners = face_corners_world(box, def.face);
    Eigen::Vector3d normal =
        (corners[1] - corners[0]).cross(corners[3] - corners[0]);
    normal.normalize();
    const Eigen::Vector3d center =
        0.25 * (corners[0] + corners[1] + corners[2] + corners[3]);
    if (normal.dot(center - box.centroid) < 0.0) normal = -normal;
    out[f] = {def.face, normal, center};
  }
  return out;
}

std::vector<Face> visible_faces(const OrientedBox& box,
                                const Eigen::Vector3d& camera) {
  const Eigen::Vector3d local =
      box.frame.rotation.transpose() * (camera - box.centroid);
  if ((local.array() >= box.local_min.array()).all() &&
      (local.array() <= box.local_max.array()).all()) {
    throw Error(ErrorCode::camera_inside_box,
                "camera must be strictly outside the box");
  }
  std::vector<Face> visible;
  for (const auto& geom : face_normals(box)) {
    const Eigen::Vector3d view = (camera - geom.center).normalized();
    if (geom.normal.dot(view) > 0.0) visible.push_back(geom.face);
  }
  return visible;
}

ProjectedFaceArea projected_area(const std::array<Eigen::Vector3d, 4>& corners,
                                 const CameraPose& pose,
                                 const Intrinsics& intrinsics) {
  ProjectedFaceArea out;
  std::vector<Eigen::Vector2d> pixels;
  pixels.reserve(4);
  for (const auto& corner : corners) {
    double depth = 0.0;
    pixels.push_back(project_point(pose, intrinsics, corner, &depth));
    if (depth <= 0.0) out.behind_camera = true;
  }
  if (!out.behind_camera) out.area_px2 = shoelace_area(pixels);
  return out;
}

std::vector<FaceVisibility> visibility_report(const OrientedBox& box,
                                              const CameraPose& pose,
                                              const Intrinsics& intrinsics) {
  const Eigen::Vector3d camera = camera_position(pose);
  const std::vector<Face> visible = visible_faces(box, camera);

  std::vector<FaceVisibility> report(kNumFaces);
  double total_area = 0.0;
  const auto geoms = face_normals(box);
  for (int f = 0; f < kNumFaces; ++f) {
    FaceVisibility& entry = report[f];
    entry.face = geoms[f].face;
    entry.normal = geoms[f].normal;
    entry.visible = std::find(visible.begin(), visible.end(), entry.face) !=
                    visible.end();
    if (entry.visible) {
      const auto area =
          projected_area(face_corners_world(box, entry.face), pose, intrinsics);
      entry.projected_area = area.area_px2;
      entry.behind_camera = area.behind_camera;
      total_area += entry.projected_area;
    }
  }
  if (total_area > 0.0) {
    for (auto& entry : report) {
      if (entry.visible) {
        entry.percentage = 100.0 * entry.projected_area / total_area;
      }
    }
  }
  return report;
}

}  // namespace boxlab

#include "boxlab/pose.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "boxlab/error.hpp"

namespace boxlab {

namespace {
constexpr double kMinDepth = 1e-9;
}

Projection project(const CameraPose& pose, const Intrinsics& intrinsics,
                   const std::vector<Eigen::Vector3d>& points) {
  Projection out;
  out.pixels.reserve(points.size());
  out.depths.reserve(points.size());
  out.behind_camera.reserve(points.size());
  for (const auto& point : points) {
    double depth = 0.0;
    out.pixels.push_back(project_point(pose, intrinsics, point, &depth));
    out.depths.push_back(depth);
    out.behind_camera.push_back(depth <= kMinDepth);
  }
  return out;
}

Eigen::Vector2d project_point(const CameraPose& pose,
                              const Intrinsics& intrinsics,
                              const Eigen::Vector3d& point, double* depth) {
  const Eigen::Vector3d cam = pose.rotation * point + pose.translation;
  if (depth) *depth = cam.z();
  // Guarded division keeps the diagnostic projection finite at the camera
  // plane; callers treat such points via the behind-camera flag.
  const double z = (std::abs(cam.z()) > kMinDepth)
                       ? cam.z()
                       : (cam.z() < 0.0 ? -kMinDepth : kMinDepth);
  return {intrinsics.fx * cam.x() / z + intrinsics.cx,
          intrinsics.fy * cam.y() / z + intrinsics.cy};
}

double KeypointCovariance::sigma() const { return std::sqrt(sigma_sq); }

KeypointCovariance keypoint_covariance(const Correspondence& corr,
                                       const Intrinsics& intrinsics,
                                       const UncertaintyParams& params) {
  KeypointCovariance cov;
  const double sigma_base =
      corr.visible ? params.sigma_vis : params.sigma_occ;
  cov.sigma_base_sq = sigma_base * sigma_base;

  const double width = static_cast<double>(intrinsics.image_width);
  const double height = static_cast<double>(intrinsics.image_height);
  const double border = std::min({corr.point2d.x(), width - corr.point2d.x(),
                                  corr.point2d.y(), height - corr.point2d.y()});
  const double margin = params.edge_margin_frac * std::min(width, height);
  cov.edge_factor =
      1.0 + std::max(0.0, 1.0 - std::max(border, 0.0) / margin);
  cov.conf_factor = 1.0 / std::max(corr.confidence, params.conf_floor);
  cov.sigma_sq = cov.sigma_base_sq * cov.edge_factor * cov.conf_factor;
  return cov;
}

std::vector<KeypointCovariance> keypoint_covariances(
    const std::vector<Correspondence>& corrs, const Intrinsics& intrinsics,
    const UncertaintyParams& params) {
  std::vector<KeypointCovariance> covs;
  covs.reserve(corrs.size());
  for (const auto& corr : corrs) {
    covs.push_back(keypoint_covariance(corr, intrinsics, params));
  }
  return covs;
}

Eigen::Matrix3d axis_angle_to_rotation(const Eigen::Vector3d& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle < 1e-12) {
    // Second-order expansion keeps the map smooth through zero.
    Eigen::Matrix3d skew;
    skew << 0, -axis_angle.z(), axis_angle.y(),  //
        axis_angle.z(), 0, -axis_angle.x(),      //
        -axis_angle.y(), axis_angle.x(), 0;
    return Eigen::Matrix3d::Identity() + skew + 0.5 * skew * skew;
  }
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

Eigen::Vector3d rotation_to_axis_angle(const Eigen::Matrix3d& rotation) {
  Eigen::AngleAxisd aa(rotation);
  return aa.angle() * aa.axis();
}

PoseParams pose_to_params(const CameraPose& pose) {
  PoseParams p;
  p.head<3>() = rotation_to_axis_angle(pose.rotation);
  p.tail<3>() = pose.translation;
  return p;
}

CameraPose params_to_pose(const PoseParams& params) {
  CameraPose pose;
  pose.rotation = axis_angle_to_rotation(params.head<3>());
  pose.translation = params.tail<3>();
  return pose;
}

CameraPose depth_flipped_pose(const CameraPose& pose,
                              const std::vector<Correspondence>& corrs) {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& corr : corrs) centroid += corr.point3d;
  centroid /= static_cast<double>(corrs.size());
  const Eigen::Vector3d cam_centroid =
      pose.rotation * centroid + pose.translation;

  // 180 degrees about the camera x-axis through the centroid: y and z (depth)
  // are mirrored about the centroid, x is preserved.
  const Eigen::Vector3d flip(1.0, -1.0, -1.0);
  CameraPose flipped;
  flipped.rotation = flip.asDiagonal() * pose.rotation;
  flipped.translation = flip.asDiagonal() * pose.translation +
                        (Eigen::Vector3d::Ones() - flip).asDiagonal() *
                            cam_centroid;
  return flipped;
}

}  // namespace boxlab

#pragma once

#include <optional>
#include <random>
#include <vector>

#include "boxlab/types.hpp"

namespace boxlab {

struct Projection {
  std::vector<Eigen::Vector2d> pixels;
  std::vector<double> depths;
  std::vector<bool> behind_camera;  // depth <= 1e-9
};

/// Pinhole projection u = fx*Xc/Zc + cx, v = fy*Yc/Zc + cy with
/// (Xc,Yc,Zc) = R*X + t. Points at non-positive depth are still projected
/// (for diagnostics) but flagged behind-camera.
Projection project(const CameraPose& pose, const Intrinsics& intrinsics,
                   const std::vector<Eigen::Vector3d>& points);

Eigen::Vector2d project_point(const CameraPose& pose,
                              const Intrinsics& intrinsics,
                              const Eigen::Vector3d& point,
                              double* depth = nullptr);

// ---------------------------------------------------------------------------
// EPnP + RANSAC initialization
// ---------------------------------------------------------------------------

struct RansacParams {
  double threshold_px = 8.0;
  double confidence = 0.999;
  int max_iters = 1000;
  int min_set = 4;
};

struct RansacResult {
  CameraPose pose;
  std::vector<bool> inliers;  // aligned with the input correspondences
  int inlier_count = 0;
  int iterations = 0;
};

/// Closed-form EPnP on >= 4 correspondences (control-point formulation with
/// Gauss-Newton beta refinement). Returns nullopt on numerically unusable
/// configurations.
std::optional<CameraPose> epnp(const std::vector<Eigen::Vector3d>& points3d,
                               const std::vector<Eigen::Vector2d>& points2d,
                               const Intrinsics& intrinsics);

/// Robust initialization: samples minimal sets among visible correspondences,
/// scores inliers by reprojection threshold, refits on the best consensus set.
/// Deterministic for a given RNG state.
RansacResult epnp_ransac(const std::vector<Correspondence>& corrs,
                         const Intrinsics& intrinsics,
                         const RansacParams& params, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Keypoint uncertainty
// ---------------------------------------------------------------------------

struct UncertaintyParams {
  double sigma_vis = 2.0;  // px
  double sigma_occ = 8.0;  // px
  double conf_floor = 0.1;
  double edge_margin_frac = 0.05;  // of min(image_width, image_height)
};

/// Isotropic per-keypoint variance sigma^2 = sigma_base^2 * edge_factor *
/// conf_factor.
struct KeypointCovariance {
  double sigma_sq = 1.0;
  double sigma_base_sq = 1.0;
  double edge_factor = 1.0;
  double conf_factor = 1.0;

  double sigma() const;
};

KeypointCovariance keypoint_covariance(const Correspondence& corr,
                                       const Intrinsics& intrinsics,
                                       const UncertaintyParams& params);

std::vector<KeypointCovariance> keypoint_covariances(
    const std::vector<Correspondence>& corrs, const Intrinsics& intrinsics,
    const UncertaintyParams& params);

// ---------------------------------------------------------------------------
// Joint refinement
// ---------------------------------------------------------------------------

/// 6-vector pose parameterization: axis-angle rotation (3) then translation (3).
using PoseParams = Eigen::Matrix<double, 6, 1>;

PoseParams pose_to_params(const CameraPose& pose);
CameraPose params_to_pose(const PoseParams& params);

Eigen::Matrix3d axis_angle_to_rotation(const Eigen::Vector3d& axis_angle);
Eigen::Vector3d rotation_to_axis_angle(const Eigen::Matrix3d& rotation);

/// Residual vector of the joint objective, 2K + 4 entries: whitened keypoint
/// reprojection residuals sqrt(lambda) * (x - x_hat) / sigma (per axis), then
/// the four mask-bounding-box differences scaled by sqrt(1 - lambda). The
/// projected keypoint bounds are taken over all correspondences.
Eigen::VectorXd residuals(const PoseParams& params,
                          const std::vector<Correspondence>& corrs,
                          const std::vector<KeypointCovariance>& covs,
                          const MaskBBox& mask_bbox,
                          const Intrinsics& intrinsics, double lambda);

/// Analytic Jacobian of `residuals` w.r.t. the 6 pose parameters. The bbox
/// rows differentiate through the currently active argmin/argmax keypoint.
Eigen::MatrixXd residuals_jacobian(const PoseParams& params,
                                   const std::vector<Correspondence>& corrs,
                                   const std::vector<KeypointCovariance>& covs,
                                   const MaskBBox& mask_bbox,
                                   const Intrinsics& intrinsics, double lambda);

struct RefineOptions {
  double lambda = 0.8;
  double xtol = 1e-8;
  double ftol = 1e-8;
  int max_iterations = 200;
  double degenerate_area_frac = 0.01;
  /// World-space box corners used for the degenerate-projection test of the
  /// converged pose; when absent only the keypoint depth test applies.
  std::optional<std::array<Eigen::Vector3d, 8>> box_corners;
};

struct RefineDiagnostics {
  int iterations = 0;
  bool restarted = false;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

/// Levenberg-Marquardt over the 6 pose parameters starting from `init`.
/// A converged pose must be non-degenerate (all keypoint depths positive and,
/// when box corners are supplied, a healthy projected box area); otherwise a
/// single restart from a depth-flipped init is attempted and the better
/// non-degenerate result kept.
CameraPose refine_pose(const CameraPose& init,
                       const std::vector<Correspondence>& corrs,
                       const std::vector<KeypointCovariance>& covs,
                       const MaskBBox& mask_bbox, const Intrinsics& intrinsics,
                       const RefineOptions& opts,
                       RefineDiagnostics* diagnostics = nullptr);

/// The restart pose: `pose` rotated 180 degrees about the camera x-axis
/// through the camera-space centroid of the correspondences, which mirrors
/// every keypoint depth about the centroid depth.
CameraPose depth_flipped_pose(const CameraPose& pose,
                              const std::vector<Correspondence>& corrs);

}  // namespace boxlab

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "boxlab/error.hpp"
#include "boxlab/geometry.hpp"
#include "boxlab/pose.hpp"

namespace boxlab {

namespace {

constexpr double kMinDepth = 1e-9;

// Left Jacobian of SO(3): exp((w + d)^) ~ exp((J_l(w) d)^) exp(w^).
Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  Eigen::Matrix3d skew;
  skew << 0, -omega.z(), omega.y(),  //
      omega.z(), 0, -omega.x(),      //
      -omega.y(), omega.x(), 0;
  double a, b;
  if (theta < 1e-6) {
    const double t2 = theta * theta;
    a = 0.5 - t2 / 24.0;
    b = 1.0 / 6.0 - t2 / 120.0;
  } else {
    a = (1.0 - std::cos(theta)) / (theta * theta);
    b = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  return Eigen::Matrix3d::Identity() + a * skew + b * skew * skew;
}

struct ProjectedPoint {
  Eigen::Vector2d pixel;
  Eigen::Vector3d cam;
  double safe_z;
};

ProjectedPoint project_for_jacobian(const CameraPose& pose,
                                    const Intrinsics& K,
                                    const Eigen::Vector3d& point) {
  ProjectedPoint out;
  out.cam = pose.rotation * point + pose.translation;
  out.safe_z = (std::abs(out.cam.z()) > kMinDepth)
                   ? out.cam.z()
                   : (out.cam.z() < 0.0 ? -kMinDepth : kMinDepth);
  out.pixel = {K.fx * out.cam.x() / out.safe_z + K.cx,
               K.fy * out.cam.y() / out.safe_z + K.cy};
  return out;
}

// d(pixel)/d(params) for one point: chain of pinhole derivative and
// d(cam)/d(omega) = -[R X]x J_l(omega), d(cam)/d(t) = I.
Eigen::Matrix<double, 2, 6> pixel_jacobian(const ProjectedPoint& pp,
                                           const Eigen::Vector3d& rotated,
                                           const Eigen::Matrix3d& left_jac,
                                           const Intrinsics& K) {
  Eigen::Matrix<double, 2, 3> dpix_dcam;
  const double z = pp.safe_z;
  dpix_dcam << K.fx / z, 0.0, -K.fx * pp.cam.x() / (z * z),  //
      0.0, K.fy / z, -K.fy * pp.cam.y() / (z * z);

  Eigen::Matrix3d skew;
  skew << 0, -rotated.z(), rotated.y(),  //
      rotated.z(), 0, -rotated.x(),      //
      -rotated.y(), rotated.x(), 0;

  Eigen::Matrix<double, 2, 6> jac;
  jac.block<2, 3>(0, 0) = dpix_dcam * (-skew * left_jac);
  jac.block<2, 3>(0, 3) = dpix_dcam;
  return jac;
}

struct BBoxExtremes {
  int min_u = 0, min_v = 0, max_u = 0, max_v = 0;
  Eigen::Vector4d values = Eigen::Vector4d::Zero();
};

BBoxExtremes projected_extremes(const std::vector<ProjectedPoint>& pts) {
  BBoxExtremes ex;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const auto& p = pts[i].pixel;
    if (p.x() < pts[ex.min_u].pixel.x()) ex.min_u = i;
    if (p.y() < pts[ex.min_v].pixel.y()) ex.min_v = i;
    if (p.x() > pts[ex.max_u].pixel.x()) ex.max_u = i;
    if (p.y() > pts[ex.max_v].pixel.y()) ex.max_v = i;
  }
  ex.values << pts[ex.min_u].pixel.x(), pts[ex.min_v].pixel.y(),
      pts[ex.max_u].pixel.x(), pts[ex.max_v].pixel.y();
  return ex;
}

void check_inputs(const std::vector<Correspondence>& corrs,
                  const std::vector<KeypointCovariance>& covs, double lambda) {
  if (corrs.empty()) {
    throw Error(ErrorCode::empty_correspondences, "no correspondences");
  }
  if (covs.size() != corrs.size()) {
    throw Error(ErrorCode::validation_error,
                "covariance count does not match correspondence count");
  }
  if (lambda < 0.0 || lambda > 1.0) {
    throw Error(ErrorCode::validation_error, "lambda must be in [0, 1]");
  }
}

}  // namespace

Eigen::VectorXd residuals(const PoseParams& params,
                          const std::vector<Correspondence>& corrs,
                          const std::vector<KeypointCovariance>& covs,
                          const MaskBBox& mask_bbox, const Intrinsics& K,
                          double lambda) {
  check_inputs(corrs, covs, lambda);
  const CameraPose pose = params_to_pose(params);
  const double sqrt_lambda = std::sqrt(lambda);
  const double sqrt_mask = std::sqrt(1.0 - lambda);

  const std::size_t k = corrs.size();
  Eigen::VectorXd r(2 * k + 4);
  std::vector<ProjectedPoint> projected(k);
  for (std::size_t i = 0; i < k; ++i) {
    projected[i] = project_for_jacobian(pose, K, corrs[i].point3d);
    const Eigen::Vector2d diff = corrs[i].point2d - projected[i].pixel;
    r(2 * i) = sqrt_lambda * diff.x() / covs[i].sigma();
    r(2 * i + 1) = sqrt_lambda * diff.y() / covs[i].sigma();
  }

  const BBoxExtremes ex = projected_extremes(projected);
  const Eigen::Vector4d mask(mask_bbox.x_min, mask_bbox.y_min, mask_bbox.x_max,
                             mask_bbox.y_max);
  r.tail<4>() = sqrt_mask * (ex.values - mask);
  return r;
}

Eigen::MatrixXd residuals_jacobian(const PoseParams& params,
                                   const std::vector<Correspondence>& corrs,
                                   const std::vector<KeypointCovariance>& covs,
                                   const MaskBBox& /*mask_bbox*/,
                                   const Intrinsics& K, double lambda) {
  check_inputs(corrs, covs, lambda);
  const CameraPose pose = params_to_pose(params);
  const Eigen::Matrix3d left_jac = so3_left_jacobian(params.head<3>());
  const double sqrt_lambda = std::sqrt(lambda);
  const double sqrt_mask = std::sqrt(1.0 - lambda);

  const std::size_t k = corrs.size();
  Eigen::MatrixXd jac(2 * k + 4, 6);
  std::vector<ProjectedPoint> projected(k);
  std::vector<Eigen::Matrix<double, 2, 6>> pixel_jacs(k);
  for (std::size_t i = 0; i < k; ++i) {
    projected[i] = project_for_jacobian(pose, K, corrs[i].point3d);
    const Eigen::Vector3d rotated = pose.rotation * corrs[i].point3d;
    pixel_jacs[i] = pixel_jacobian(projected[i], rotated, left_jac, K);
    jac.row(2 * i) = -sqrt_lambda / covs[i].sigma() * pixel_jacs[i].row(0);
    jac.row(2 * i + 1) = -sqrt_lambda / covs[i].sigma() * pixel_jacs[i].row(1);
  }

  const BBoxExtremes ex = projected_extremes(projected);
  jac.row(2 * k + 0) = sqrt_mask * pixel_jacs[ex.min_u].row(0);
  jac.row(2 * k + 1) = sqrt_mask * pixel_jacs[ex.min_v].row(1);
  jac.row(2 * k + 2) = sqrt_mask * pixel_jacs[ex.max_u].row(0);
  jac.row(2 * k + 3) = sqrt_mask * pixel_jacs[ex.max_v].row(1);
  return jac;
}

namespace {

struct LmOutcome {
  PoseParams params;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

LmOutcome levenberg_marquardt(const PoseParams& start,
                              const std::vector<Correspondence>& corrs,
                              const std::vector<KeypointCovariance>& covs,
                              const MaskBBox& mask_bbox, const Intrinsics& K,
                              const RefineOptions& opts) {
  LmOutcome out;
  out.params = start;

  auto eval = [&](const PoseParams& p) {
    const Eigen::VectorXd r =
        residuals(p, corrs, covs, mask_bbox, K, opts.lambda);
    return std::make_pair(r, 0.5 * r.squaredNorm());
  };

  auto [r, cost] = eval(out.params);
  out.cost = cost;
  double mu = -1.0;
  double nu = 2.0;

  for (; out.iterations < opts.max_iterations; ++out.iterations) {
    if (out.cost <= std::numeric_limits<double>::min()) {
      out.converged = true;
      return out;
    }
    const Eigen::MatrixXd jac = residuals_jacobian(out.params, corrs, covs,
                                                   mask_bbox, K, opts.lambda);
    const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
    const Eigen::Matrix<double, 6, 1> g = jac.transpose() * r;
    if (mu < 0.0) mu = 1e-3 * jtj.diagonal().maxCoeff();

    const Eigen::Matrix<double, 6, 1> diag =
        jtj.diagonal().cwiseMax(1e-12);
    Eigen::Matrix<double, 6, 6> damped = jtj;
    damped.diagonal() += mu * diag;
    const Eigen::Matrix<double, 6, 1> step = damped.ldlt().solve(-g);
    if (!step.allFinite()) {
      mu *= nu;
      nu *= 2.0;
      continue;
    }

    const PoseParams trial = out.params + step;
    const auto [r_new, cost_new] = eval(trial);
    const double predicted =
        0.5 * step.dot(mu * diag.asDiagonal() * step - g);
    const double rho =
        predicted > 0.0 ? (out.cost - cost_new) / predicted : -1.0;

    if (cost_new < out.cost) {
      const double improvement = out.cost - cost_new;
      const bool small_step =
          step.norm() <= opts.xtol * (opts.xtol + out.params.norm());
      const bool small_decrease = improvement <= opts.ftol * out.cost;
      out.params = trial;
      r = r_new;
      out.cost = cost_new;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3.0));
      nu = 2.0;
      if (small_step || small_decrease) {
        out.converged = true;
        ++out.iterations;
        return out;
      }
    } else {
      if (step.norm() <= opts.xtol * (opts.xtol + out.params.norm())) {
        // Damping cannot shrink the step further; treat as converged in x.
        out.converged = true;
        ++out.iterations;
        return out;
      }
      mu *= nu;
      nu *= 2.0;
    }
  }
  return out;
}

bool pose_is_degenerate(const CameraPose& pose,
                        const std::vector<Correspondence>& corrs,
                        const MaskBBox& mask_bbox, const Intrinsics& K,
                        const RefineOptions& opts) {
  for (const auto& corr : corrs) {
    const Eigen::Vector3d cam = pose.rotation * corr.point3d + pose.translation;
    if (cam.z() <= 0.0) return true;
  }
  if (opts.box_corners) {
    std::vector<Eigen::Vector2d> pixels;
    pixels.reserve(8);
    for (const auto& corner : *opts.box_corners) {
      double depth = 0.0;
      pixels.push_back(project_point(pose, K, corner, &depth));
      if (depth <= kMinDepth) return true;
    }
    const double area = convex_hull_area(pixels);
    if (area < opts.degenerate_area_frac * mask_bbox.area()) return true;
  }
  return false;
}

}  // namespace

CameraPose refine_pose(const CameraPose& init,
                       const std::vector<Correspondence>& corrs,
                       const std::vector<KeypointCovariance>& covs,
                       const MaskBBox& mask_bbox, const Intrinsics& K,
                       const RefineOptions& opts,
                       RefineDiagnostics* diagnostics) {
  check_inputs(corrs, covs, opts.lambda);
  if (corrs.size() < 4) {
    throw Error(ErrorCode::too_few_correspondences,
                "refinement needs >= 4 correspondences");
  }

  const PoseParams start = pose_to_params(init);
  LmOutcome first =
      levenberg_marquardt(start, corrs, covs, mask_bbox, K, opts);
  if (!first.converged) {
    throw Error(ErrorCode::did_not_converge,
                "no tolerance satisfied within " +
                    std::to_string(opts.max_iterations) + " iterations");
  }

  RefineDiagnostics diag;
  diag.iterations = first.iterations;
  diag.initial_cost = 0.5 * residuals(start, corrs, covs, mask_bbox, K,
                                      opts.lambda)
                                .squaredNorm();
  diag.final_cost = first.cost;

  CameraPose result = params_to_pose(first.params);
  if (pose_is_degenerate(result, corrs, mask_bbox, K, opts)) {
    const CameraPose flipped_init = depth_flipped_pose(init, corrs);
    LmOutcome second = levenberg_marquardt(pose_to_params(flipped_init), corrs,
                                           covs, mask_bbox, K, opts);
    diag.restarted = true;
    const CameraPose retry = params_to_pose(second.params);
    const bool retry_ok =
        second.converged && !pose_is_degenerate(retry, corrs, mask_bbox, K, opts);
    if (!retry_ok) {
      throw Error(ErrorCode::degenerate_result,
                  "both refinement branches converged to degenerate poses");
    }
    result = retry;
    diag.iterations += second.iterations;
    diag.final_cost = second.cost;
  }

  result.refined = true;
  if (diagnostics) *diagnostics = diag;
  return result;
}

}  // namespace boxlab

#include "boxlab/evaluate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "boxlab/error.hpp"
#include "boxlab/geometry.hpp"

namespace boxlab {

namespace {

constexpr double kRad2Deg = 180.0 / M_PI;

void check_rotation(const Eigen::Matrix3d& r) {
  const double ortho =
      (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-6 || r.determinant() < 0.0) {
    throw Error(ErrorCode::not_a_rotation, "input is not a proper rotation");
  }
}

}  // namespace

double rotation_variation(const Eigen::Matrix3d& r1,
                          const Eigen::Matrix3d& r2) {
  check_rotation(r1);
  check_rotation(r2);
  const Eigen::Matrix3d r_d = r1 * r2.transpose();
  const double arg = std::clamp((r_d.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(arg) * kRad2Deg;
}

AxisDecomposition decompose_variation(const Eigen::Matrix3d& r_d,
                                      const AnatomicalFrame& frame) {
  check_rotation(r_d);
  const Eigen::Matrix3d& basis = frame.rotation;
  // R_d expressed in anatomical coordinates, then intrinsic XYZ extraction:
  // R = Rx(a) Ry(b) Rz(c) with R(0,2)=sin b, R(1,2)=-sin a cos b,
  // R(0,1)=-cos b sin c.
  const Eigen::Matrix3d r = basis.transpose() * r_d * basis;

  AxisDecomposition out;
  const double sin_b = std::clamp(r(0, 2), -1.0, 1.0);
  const double b = std::asin(sin_b);
  out.gimbal_lock = std::abs(std::abs(sin_b) - 1.0) < 1e-6;
  double a, c;
  if (!out.gimbal_lock) {
    a = std::atan2(-r(1, 2), r(2, 2));
    c = std::atan2(-r(0, 1), r(0, 0));
  } else {
    // x and z rotations are coupled; conventionally put everything into a.
    a = std::atan2(r(2, 1), r(1, 1));
    c = 0.0;
  }
  out.angles_deg = Eigen::Vector3d(a, b, c) * kRad2Deg;
  return out;
}

double alignment_variation(const Eigen::Vector3d& v_ideal,
                           const Eigen::Vector3d& v_actual) {
  const double ni = v_ideal.norm();
  const double na = v_actual.norm();
  if (ni <= 0.0 || na <= 0.0) {
    throw Error(ErrorCode::zero_vector, "alignment vector has zero length");
  }
  const double cos_theta = v_ideal.dot(v_actual) / (ni * na);
  return std::clamp(1.0 - cos_theta, 0.0, 2.0);
}

std::vector<Correspondence> perturb_keypoints(
    const std::vector<Correspondence>& corrs, double sigma,
    const Intrinsics& intrinsics, const CameraPose& pose,
    std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double focal = 0.5 * (intrinsics.fx + intrinsics.fy);
  std::vector<Correspondence> out = corrs;
  for (auto& corr : out) {
    corr.point2d.x() += sigma * gauss(rng);
    corr.point2d.y() += sigma * gauss(rng);
    const double depth =
        (pose.rotation * corr.point3d + pose.translation).z();
    const double sigma3d = sigma * std::abs(depth) / focal;
    corr.point3d.x() += sigma3d * gauss(rng);
    corr.point3d.y() += sigma3d * gauss(rng);
    corr.point3d.z() += sigma3d * gauss(rng);
  }
  return out;
}

namespace {

struct TrialAccumulator {
  double rotation_sum = 0.0;
  double rotation_max = 0.0;
  double alignment_sum = 0.0;
  Eigen::Vector3d axis_sum = Eigen::Vector3d::Zero();
  int count = 0;

  void add(const AnatomicalFrame& noisy, const AnatomicalFrame& base) {
    const double theta = rotation_variation(noisy.rotation, base.rotation);
    rotation_sum += theta;
    rotation_max = std::max(rotation_max, theta);
    double alignment = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      alignment += alignment_variation(base.rotation.col(axis),
                                       noisy.rotation.col(axis));
    }
    alignment_sum += alignment / 3.0;
    const Eigen::Matrix3d r_d = noisy.rotation * base.rotation.transpose();
    axis_sum += decompose_variation(r_d, base).angles_deg.cwiseAbs();
    ++count;
  }

  SigmaStability finish(double sigma) const {
    SigmaStability s;
    s.sigma = sigma;
    if (count > 0) {
      s.mean_rotation_deg = rotation_sum / count;
      s.max_rotation_deg = rotation_max;
      s.mean_alignment = alignment_sum / count;
      s.mean_axis_rotation_deg = axis_sum / count;
    }
    return s;
  }
};

std::vector<Eigen::Vector3d> landmark_positions(
    const std::vector<Landmark3D>& landmarks) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(landmarks.size());
  for (const auto& lm : landmarks) out.push_back(lm.position);
  return out;
}

}  // namespace

StabilityPair stability_sweep(const EvalScene& scene,
                              const NoiseSweepConfig& config) {
  if (scene.landmarks.size() != scene.corrs.size()) {
    throw Error(ErrorCode::validation_error,
                "landmarks and correspondences must be co-indexed");
  }
  const AnatomicalFrame base_anatomical =
      build_anatomical_frame(scene.landmarks, scene.policy);
  const AnatomicalFrame base_pca =
      pca_frame(landmark_positions(scene.landmarks));

  StabilityPair pair;
  pair.anatomical.method = "anatomical";
  pair.pca.method = "pca";

  for (std::size_t si = 0; si < config.sigmas.size(); ++si) {
    const double sigma = config.sigmas[si];
    TrialAccumulator acc_anatomical;
    TrialAccumulator acc_pca;
    for (int trial = 0; trial < config.trials_per_sigma; ++trial) {
      // Independent stream per (seed, sigma, trial): order-independent.
      std::seed_seq seq{config.seed, static_cast<std::uint64_t>(si),
                        static_cast<std::uint64_t>(trial)};
      std::mt19937_64 rng(seq);
      const auto noisy_corrs = perturb_keypoints(
          scene.corrs, sigma, scene.intrinsics, scene.camera, rng);

      std::vector<Landmark3D> noisy_landmarks = scene.landmarks;
      for (std::size_t i = 0; i < noisy_landmarks.size(); ++i) {
        noisy_landmarks[i].position = noisy_corrs[i].point3d;
      }
      acc_anatomical.add(build_anatomical_frame(noisy_landmarks, scene.policy),
                         base_anatomical);
      acc_pca.add(pca_frame(landmark_positions(noisy_landmarks)), base_pca);
    }
    pair.anatomical.per_sigma.push_back(acc_anatomical.finish(sigma));
    pair.pca.per_sigma.push_back(acc_pca.finish(sigma));
  }
  return pair;
}

double reprojection_error(const CameraPose& pose,
                          const std::vector<Correspondence>& corrs,
                          const Intrinsics& intrinsics) {
  double sum = 0.0;
  int count = 0;
  for (const auto& corr : corrs) {
    if (!corr.visible) continue;
    sum += (project_point(pose, intrinsics, corr.point3d) - corr.point2d).norm();
    ++count;
  }
  if (count == 0) {
    throw Error(ErrorCode::no_visible_keypoints,
                "no visible correspondences to evaluate");
  }
  return sum / count;
}

DegeneracyVerdict detect_degenerate(
    const std::array<Eigen::Vector2d, 8>& projected_corners,
    const std::array<bool, 8>& behind_camera, double mask_area_px2,
    double area_frac) {
  DegeneracyVerdict verdict;
  if (std::any_of(behind_camera.begin(), behind_camera.end(),
                  [](bool b) { return b; })) {
    verdict.degenerate = true;
    verdict.reason = "behind_camera";
    return verdict;
  }
  const std::vector<Eigen::Vector2d> pts(projected_corners.begin(),
                                         projected_corners.end());
  if (convex_hull_area(pts) < area_frac * mask_area_px2) {
    verdict.degenerate = true;
    verdict.reason = "tiny_area";
  }
  return verdict;
}

}  // namespace boxlab

#pragma once

#include <random>
#include <string>
#include <vector>

#include "boxlab/frame.hpp"
#include "boxlab/pose.hpp"
#include "boxlab/types.hpp"

namespace boxlab {

/// Geodesic angle (degrees) of R_d = r1 * r2^-1, via
/// arccos((trace(R_d) - 1) / 2) with the argument clamped to [-1, 1].
double rotation_variation(const Eigen::Matrix3d& r1, const Eigen::Matrix3d& r2);

struct AxisDecomposition {
  // Rotation about the anatomical x (anterior-posterior), y (left-right) and
  // z (dorsal-ventral) axes, degrees, intrinsic XYZ order.
  Eigen::Vector3d angles_deg = Eigen::Vector3d::Zero();
  bool gimbal_lock = false;
};

/// Expresses R_d in the anatomical basis and extracts intrinsic XYZ Euler
/// angles. Values are still returned under gimbal lock, with the flag set.
AxisDecomposition decompose_variation(const Eigen::Matrix3d& r_d,
                                      const AnatomicalFrame& frame);

/// 1 - cos(angle between the vectors), clamped to [0, 2]. Inputs are
/// renormalized; zero-length input throws.
double alignment_variation(const Eigen::Vector3d& v_ideal,
                           const Eigen::Vector3d& v_actual);

/// Adds N(0, sigma^2) pixel noise per 2D coordinate and the back-projected
/// 3D equivalent (sigma * depth / focal per coordinate, depth from the given
/// pose). The input is left unmodified; deterministic for a given RNG state.
std::vector<Correspondence> perturb_keypoints(
    const std::vector<Correspondence>& corrs, double sigma,
    const Intrinsics& intrinsics, const CameraPose& pose, std::mt19937_64& rng);

struct NoiseSweepConfig {
  std::vector<double> sigmas = {0.5, 1.0, 2.0, 3.0, 4.0};
  int trials_per_sigma = 100;
  std::uint64_t seed = 42;
};

struct SigmaStability {
  double sigma = 0.0;
  double mean_rotation_deg = 0.0;
  double max_rotation_deg = 0.0;
  double mean_alignment = 0.0;  // mean over the three axes and trials
  Eigen::Vector3d mean_axis_rotation_deg = Eigen::Vector3d::Zero();
};

struct StabilityResult {
  std::string method;  // "anatomical" or "pca"
  std::vector<SigmaStability> per_sigma;
};

/// A scene as consumed by the evaluation harness: co-indexed landmarks and
/// correspondences plus the camera that generated the observations.
struct EvalScene {
  std::vector<Landmark3D> landmarks;
  std::vector<Correspondence> corrs;  // corrs[i] observes landmarks[i]
  MeshVertices mesh;
  Intrinsics intrinsics;
  CameraPose camera;
  AxisPolicy policy = AxisPolicy::quadruped_default();
};

struct StabilityPair {
  StabilityResult anatomical;
  StabilityResult pca;
};

/// Perturbs the scene keypoints per sigma/trial, rebuilds the anatomical frame
/// from the noisy landmarks and the PCA frame from the noisy landmark
/// positions, and aggregates rotation/alignment variation against the
/// unperturbed frames. Each trial draws from its own (seed, sigma, trial) RNG
/// stream so results are order-independent.
StabilityPair stability_sweep(const EvalScene& scene,
                              const NoiseSweepConfig& config);

/// Mean Euclidean pixel error over visible correspondences.
double reprojection_error(const CameraPose& pose,
                          const std::vector<Correspondence>& corrs,
                          const Intrinsics& intrinsics);

struct DegeneracyVerdict {
  bool degenerate = false;
  std::string reason;  // "behind_camera" or "tiny_area" when degenerate
};

/// Degenerate iff any corner is behind the camera or the convex-hull area of
/// the projected corners is below area_frac of the mask area.
DegeneracyVerdict detect_degenerate(
    const std::array<Eigen::Vector2d, 8>& projected_corners,
    const std::array<bool, 8>& behind_camera, double mask_area_px2,
    double area_frac = 0.01);

}  // namespace boxlab

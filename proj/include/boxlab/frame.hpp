#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boxlab/types.hpp"

namespace boxlab {

/// Ordered candidate landmark pairs per axis, tried first-match. An x pair is
/// (anterior, posterior): the axis is `posterior - anterior`. A y pair is
/// (left, right): the axis is `right - left`. Pair endpoints may name a
/// synthetic midpoint (see `midpoints`), computed only when both constituent
/// landmarks are reliable.
struct AxisPolicy {
  struct Pair {
    std::string from;
    std::string to;
  };
  struct Midpoint {
    std::string name;
    std::string a;
    std::string b;
  };

  std::vector<Pair> x_pairs;
  std::vector<Pair> y_pairs;
  std::vector<Midpoint> midpoints;
  double min_confidence = 0.3;

  /// Quadruped default: x: nose->tail_base, neck->tail_base, nose->hip_midpoint;
  /// y: left_shoulder->right_shoulder, left_hip->right_hip.
  static AxisPolicy quadruped_default();
};

/// Gram-Schmidt step shared by the frame builders: x = normalize(x_raw),
/// z = normalize(x cross y_raw), y = z cross x. Throws ParallelAxes when the
/// inputs subtend less than ~1e-6 rad.
AnatomicalFrame orthonormalize(const Eigen::Vector3d& x_raw,
                               const Eigen::Vector3d& y_raw);

/// Builds the anatomically oriented frame from named landmarks, trying the
/// policy's candidate pairs in order and falling back to a PCA axis when no
/// pair has two reliable endpoints. A landmark is reliable when it is visible
/// and its confidence is at least policy.min_confidence.
AnatomicalFrame build_anatomical_frame(const std::vector<Landmark3D>& landmarks,
                                       const AxisPolicy& policy);

/// PCA baseline: columns are covariance eigenvectors by descending eigenvalue,
/// each sign-fixed so its largest-magnitude component is positive, then the
/// last column flipped if needed to make det = +1. Provenance "pca".
AnatomicalFrame pca_frame(const std::vector<Eigen::Vector3d>& vertices);

}  // namespace boxlab

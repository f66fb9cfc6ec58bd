#include "boxlab/frame.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "boxlab/error.hpp"

namespace boxlab {

namespace {

constexpr double kDegenerateAxisTol = 1e-9;
constexpr double kParallelTol = 1e-6;

bool reliable(const Landmark3D& lm, double min_confidence) {
  return lm.visible && lm.confidence >= min_confidence;
}

const Landmark3D* find_landmark(const std::vector<Landmark3D>& landmarks,
                                const std::string& name) {
  for (const auto& lm : landmarks) {
    if (lm.name == name) return &lm;
  }
  return nullptr;
}

// Resolves a policy endpoint to a position: either a reliable landmark with
// that exact name, or a midpoint whose two constituents are both reliable.
std::optional<Eigen::Vector3d> resolve_endpoint(
    const std::vector<Landmark3D>& landmarks, const AxisPolicy& policy,
    const std::string& name) {
  if (const Landmark3D* lm = find_landmark(landmarks, name)) {
    if (reliable(*lm, policy.min_confidence)) return lm->position;
    return std::nullopt;
  }
  for (const auto& mid : policy.midpoints) {
    if (mid.name != name) continue;
    const Landmark3D* a = find_landmark(landmarks, mid.a);
    const Landmark3D* b = find_landmark(landmarks, mid.b);
    if (a && b && reliable(*a, policy.min_confidence) &&
        reliable(*b, policy.min_confidence)) {
      return 0.5 * (a->position + b->position);
    }
    return std::nullopt;
  }
  return std::nullopt;
}

struct AxisCandidate {
  Eigen::Vector3d direction;
  std::string source;
};

// First policy pair with two reliable endpoints and a non-degenerate span.
// Distinguishes "no reliable pair" (fallback allowed) from "reliable pairs
// exist but all are degenerate" (error).
std::optional<AxisCandidate> pick_axis(const std::vector<Landmark3D>& landmarks,
                                       const AxisPolicy& policy,
                                       const std::vector<AxisPolicy::Pair>& pairs,
                                       const Eigen::Vector3d* must_not_align) {
  bool saw_reliable_pair = false;
  for (const auto& pair : pairs) {
    auto a = resolve_endpoint(landmarks, policy, pair.from);
    auto b = resolve_endpoint(landmarks, policy, pair.to);
    if (!a || !b) continue;
    saw_reliable_pair = true;
    Eigen::Vector3d d = *b - *a;
    if (d.norm() <= kDegenerateAxisTol) continue;
    if (must_not_align) {
      // A y pair collinear with the x axis cannot complete the frame.
      Eigen::Vector3d dn = d.normalized();
      if (dn.cross(*must_not_align).norm() < kParallelTol) continue;
    }
    return AxisCandidate{d, pair.from + "/" + pair.to};
  }
  if (saw_reliable_pair) {
    throw Error(ErrorCode::degenerate_axis,
                "all reliable candidate pairs are degenerate");
  }
  return std::nullopt;
}

Eigen::Matrix3d landmark_covariance(const std::vector<Landmark3D>& landmarks,
                                    Eigen::Vector3d* centroid_out) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& lm : landmarks) c += lm.position;
  c /= static_cast<double>(landmarks.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& lm : landmarks) {
    Eigen::Vector3d d = lm.position - c;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(landmarks.size());
  if (centroid_out) *centroid_out = c;
  return cov;
}

// Eigenvectors by descending eigenvalue.
void sorted_eigenbasis(const Eigen::Matrix3d& cov, Eigen::Matrix3d* vectors,
                       Eigen::Vector3d* values) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  for (int k = 0; k < 3; ++k) {
    vectors->col(k) = solver.eigenvectors().col(2 - k);
    (*values)(k) = solver.eigenvalues()(2 - k);
  }
}

void fix_largest_component_positive(Eigen::Vector3d* v) {
  int idx = 0;
  v->cwiseAbs().maxCoeff(&idx);
  if ((*v)(idx) < 0.0) *v = -*v;
}

}  // namespace

AxisPolicy AxisPolicy::quadruped_default() {
  AxisPolicy policy;
  policy.x_pairs = {{"nose", "tail_base"},
                    {"neck", "tail_base"},
                    {"nose", "hip_midpoint"}};
  policy.y_pairs = {{"left_shoulder", "right_shoulder"},
                    {"left_hip", "right_hip"}};
  policy.midpoints = {{"hip_midpoint", "left_hip", "right_hip"},
                      {"shoulder_midpoint", "left_shoulder", "right_shoulder"}};
  return policy;
}

AnatomicalFrame orthonormalize(const Eigen::Vector3d& x_raw,
                               const Eigen::Vector3d& y_raw) {
  const double nx = x_raw.norm();
  const double ny = y_raw.norm();
  if (nx <= 0.0 || ny <= 0.0) {
    throw Error(ErrorCode::parallel_axes, "zero-length axis vector");
  }
  Eigen::Vector3d x = x_raw / nx;
  Eigen::Vector3d yn = y_raw / ny;
  Eigen::Vector3d zc = x.cross(yn);
  if (zc.norm() < kParallelTol) {
    throw Error(ErrorCode::parallel_axes, "axis vectors are (anti)parallel");
  }
  Eigen::Vector3d z = zc.normalized();
  Eigen::Vector3d y = z.cross(x);
  AnatomicalFrame frame;
  frame.rotation.col(0) = x;
  frame.rotation.col(1) = y;
  frame.rotation.col(2) = z;
  return frame;
}

AnatomicalFrame build_anatomical_frame(const std::vector<Landmark3D>& landmarks,
                                       const AxisPolicy& policy) {
  if (landmarks.size() < 2) {
    throw Error(ErrorCode::insufficient_landmarks,
                "need at least 2 landmarks");
  }

  std::optional<AxisCandidate> x_axis = pick_axis(landmarks, policy,
                                                  policy.x_pairs, nullptr);
  Eigen::Vector3d centroid;
  Eigen::Matrix3d eigvecs;
  Eigen::Vector3d eigvals;
  bool have_eigen = false;
  auto ensure_eigen = [&]() {
    if (!have_eigen) {
      sorted_eigenbasis(landmark_covariance(landmarks, &centroid), &eigvecs,
                        &eigvals);
      have_eigen = true;
    }
  };

  if (!x_axis) {
    // No reliable x pair: PCA principal axis over all landmark positions,
    // oriented away from the most anterior reliable landmark so it still
    // points anterior->posterior.
    ensure_eigen();
    if (eigvals(0) <= 0.0 || eigvals(0) < kDegenerateAxisTol * kDegenerateAxisTol) {
      throw Error(ErrorCode::insufficient_landmarks,
                  "landmarks coincide; no axis derivable via fallback");
    }
    const Landmark3D* anchor = nullptr;
    for (const auto& pair : policy.x_pairs) {
      if (const Landmark3D* lm = find_landmark(landmarks, pair.from)) {
        if (reliable(*lm, policy.min_confidence)) {
          anchor = lm;
          break;
        }
      }
    }
    if (!anchor) {
      for (const auto& lm : landmarks) {
        if (reliable(lm, policy.min_confidence)) {
          anchor = &lm;
          break;
        }
      }
    }
    if (!anchor) {
      throw Error(ErrorCode::insufficient_landmarks,
                  "no reliable landmark to orient the fallback axis");
    }
    Eigen::Vector3d principal = eigvecs.col(0);
    if (principal.dot(anchor->position - centroid) > 0.0) principal = -principal;
    x_axis = AxisCandidate{principal, "pca_fallback"};
  }

  Eigen::Vector3d x_dir = x_axis->direction.normalized();
  std::optional<AxisCandidate> y_axis =
      pick_axis(landmarks, policy, policy.y_pairs, &x_dir);

  if (!y_axis) {
    // No reliable y pair: use the covariance eigenvector most orthogonal to x,
    // projected into x's orthogonal plane, with a deterministic sign.
    ensure_eigen();
    int best = 1;
    double best_align = 2.0;
    for (int k = 0; k < 3; ++k) {
      double align = std::abs(eigvecs.col(k).dot(x_dir));
      if (align < best_align) {
        best_align = align;
        best = k;
      }
    }
    Eigen::Vector3d y_raw =
        eigvecs.col(best) - eigvecs.col(best).dot(x_dir) * x_dir;
    if (y_raw.norm() < kParallelTol) {
      throw Error(ErrorCode::insufficient_landmarks,
                  "landmarks are collinear; no lateral axis derivable");
    }
    fix_largest_component_positive(&y_raw);
    y_axis = AxisCandidate{y_raw, "pca_fallback"};
  }

  AnatomicalFrame frame = orthonormalize(x_axis->direction, y_axis->direction);
  frame.x_source = x_axis->source;
  frame.y_source = y_axis->source;
  return frame;
}

AnatomicalFrame pca_frame(const std::vector<Eigen::Vector3d>& vertices) {
  if (vertices.size() < 3) {
    throw Error(ErrorCode::degenerate_cloud, "need at least 3 vertices");
  }
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& v : vertices) c += v;
  c /= static_cast<double>(vertices.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& v : vertices) {
    Eigen::Vector3d d = v - c;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(vertices.size());

  Eigen::Matrix3d vectors;
  Eigen::Vector3d values;
  sorted_eigenbasis(cov, &vectors, &values);
  if (values(0) <= 0.0 || values(1) <= 1e-12 * values(0)) {
    throw Error(ErrorCode::degenerate_cloud, "vertex covariance has rank < 2");
  }

  AnatomicalFrame frame;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d col = vectors.col(k);
    fix_largest_component_positive(&col);
    frame.rotation.col(k) = col;
  }
  if (frame.rotation.determinant() < 0.0) {
    frame.rotation.col(2) = -frame.rotation.col(2);
  }
  frame.x_source = "pca";
  frame.y_source = "pca";
  return frame;
}

}  // namespace boxlab

#include "boxlab/obox.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "boxlab/error.hpp"

namespace boxlab {

namespace {

constexpr double kOrthonormalTol = 1e-9;
constexpr double kCoplanarTol = 1e-12;

bool is_proper_rotation(const Eigen::Matrix3d& r, double tol) {
  return (r.transpose() * r - Eigen::Matrix3d::Identity())
                 .cwiseAbs()
                 .maxCoeff() <= tol &&
         r.determinant() > 0.0;
}

}  // namespace

Eigen::Vector3d compute_centroid(const MeshVertices& mesh) {
  if (mesh.vertices.empty()) {
    throw Error(ErrorCode::empty_mesh, "mesh has no vertices");
  }
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& v : mesh.vertices) sum += v;
  return sum / static_cast<double>(mesh.vertices.size());
}

OrientedBox generate_obox(const MeshVertices& mesh, const AnatomicalFrame& frame,
                          double epsilon) {
  if (mesh.vertices.empty()) {
    throw Error(ErrorCode::empty_mesh, "mesh has no vertices");
  }
  if (epsilon < 0.0 || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::invalid_frame, "epsilon must be >= 0");
  }
  if (!is_proper_rotation(frame.rotation, kOrthonormalTol)) {
    throw Error(ErrorCode::invalid_frame, "frame is not a proper rotation");
  }

  OrientedBox box;
  box.centroid = compute_centroid(mesh);
  box.frame = frame;
  box.margin = epsilon;

  const Eigen::Matrix3d rt = frame.rotation.transpose();
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(
      std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (const auto& v : mesh.vertices) {
    Eigen::Vector3d local = rt * (v - box.centroid);
    lo = lo.cwiseMin(local);
    hi = hi.cwiseMax(local);
  }
  box.coplanar = (hi - lo).minCoeff() <= kCoplanarTol;
  box.local_min = lo.array() - epsilon;
  box.local_max = hi.array() + epsilon;

  for (int i = 0; i < 8; ++i) {
    box.corners_world[i] = frame.rotation * box.local_corner(i) + box.centroid;
  }
  return box;
}

double enclosure_check(const OrientedBox& box, const MeshVertices& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  const Eigen::Matrix3d rt = box.frame.rotation.transpose();
  std::size_t inside = 0;
  for (const auto& v : mesh.vertices) {
    Eigen::Vector3d local = rt * (v - box.centroid);
    if ((local.array() >= box.local_min.array()).all() &&
        (local.array() <= box.local_max.array()).all()) {
      ++inside;
    }
  }
  return static_cast<double>(inside) / static_cast<double>(mesh.vertices.size());
}

}  // namespace boxlab

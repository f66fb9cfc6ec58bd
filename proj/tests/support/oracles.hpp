#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "boxlab/types.hpp"

// Independent reference implementations used only to check the library. They
// deliberately take different algorithmic routes than the code under test.

namespace boxlab::testing {

/// Relative rotation angle in degrees via the quaternion route:
/// 2 * atan2(||vec(q_d)||, |w(q_d)|).
double quaternion_angle_deg(const Eigen::Matrix3d& r1,
                            const Eigen::Matrix3d& r2);

/// 3x3 symmetric eigendecomposition through the characteristic polynomial
/// (trigonometric closed form); eigenvalues descending.
struct SymmetricEigen3 {
  Eigen::Vector3d values;
  Eigen::Matrix3d vectors;  // columns
};
SymmetricEigen3 eigen3_characteristic(const Eigen::Matrix3d& symmetric);

/// Compensated (Kahan) mean of 3D points.
Eigen::Vector3d kahan_mean(const std::vector<Eigen::Vector3d>& points);

/// Point-in-polygon by even-odd crossings.
bool point_in_polygon(const Eigen::Vector2d& point,
                      const std::vector<Eigen::Vector2d>& polygon);

/// Supersampled pixel-counting area of a projected quad (reference for the
/// shoelace route). Samples a grid over the quad's bounding box.
double rasterized_quad_area(const std::array<Eigen::Vector2d, 4>& quad,
                            int samples_per_pixel_axis = 4,
                            int max_axis_samples = 1200);

/// Ray-casting visibility: a face is visible from `camera` iff the segment to
/// its center is not blocked by any other box face.
std::vector<Face> raycast_visible_faces(const OrientedBox& box,
                                        const Eigen::Vector3d& camera);

/// Intrinsic XYZ recomposition Rx(a) Ry(b) Rz(c), angles in degrees.
Eigen::Matrix3d recompose_xyz(const Eigen::Vector3d& angles_deg);

/// Minimal XML well-formedness check (tag balance, attribute quoting);
/// returns an empty string when OK, else a description of the defect.
std::string check_xml_well_formed(const std::string& text);

}  // namespace boxlab::testing

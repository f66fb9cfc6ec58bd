#pragma once

#include "boxlab/types.hpp"

namespace boxlab {

/// Arithmetic mean of the mesh vertices.
Eigen::Vector3d compute_centroid(const MeshVertices& mesh);

/// Tight oriented box around the mesh in the given frame: local extents are
/// the componentwise min/max of R^T (v - c) padded by +-epsilon, corners in
/// the fixed {x_min,x_max} x {y_min,y_max} x {z_min,z_max} order (x slowest)
/// mapped back to world coordinates.
OrientedBox generate_obox(const MeshVertices& mesh, const AnatomicalFrame& frame,
                          double epsilon = 1e-5);

/// Fraction of vertices inside the closed local-extent interval.
double enclosure_check(const OrientedBox& box, const MeshVertices& mesh);

}  // namespace boxlab

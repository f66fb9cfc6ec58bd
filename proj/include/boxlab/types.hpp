#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

namespace boxlab {

/// Named 3D landmark with its image-space visibility and detector confidence.
struct Landmark3D {
  std::string name;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  bool visible = true;
  double confidence = 1.0;
};

/// Orthonormal frame with provenance: which landmark pair (or fallback)
/// defined each axis. Columns of `rotation` are the x, y, z axes in world
/// coordinates.
struct AnatomicalFrame {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  std::string x_source;
  std::string y_source;
};

struct MeshVertices {
  std::vector<Eigen::Vector3d> vertices;
};

/// Pinhole intrinsics, pixels.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int image_width = 0;
  int image_height = 0;
};

/// World-to-camera rigid transform: x_cam = R * X_world + t.
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  bool refined = false;
};

/// One 2D-3D keypoint correspondence.
struct Correspondence {
  Eigen::Vector3d point3d = Eigen::Vector3d::Zero();
  Eigen::Vector2d point2d = Eigen::Vector2d::Zero();
  bool visible = true;
  double confidence = 1.0;
};

/// Tight pixel bounds of the binary segmentation mask.
struct MaskBBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
};

// ---------------------------------------------------------------------------
// Cuboid face table.
//
// Corner order is the Cartesian product {x_min,x_max} x {y_min,y_max} x
// {z_min,z_max} with x slowest-varying: corner index i = (xbit<<2)|(ybit<<1)|zbit,
// bit 0 = min, 1 = max.
//
// Semantic labels follow the anatomical axis convention (x anterior->posterior,
// y left->right, z ventral->dorsal): the anterior face (nose side) is "front"
// on -x, "back" is +x, "left" is -y, "right" +y, "top" +z, "bottom" -z.
// ---------------------------------------------------------------------------

enum class Face { front = 0, back, left, right, top, bottom };

inline constexpr int kNumFaces = 6;

struct FaceDef {
  Face face;
  const char* label;
  int axis;   // 0=x, 1=y, 2=z
  int sign;   // -1 = min side, +1 = max side
  // Corner indices in cyclic quad order (v0,v1,v2,v3); the face normal is
  // computed from (v1-v0) x (v3-v0) and then outward-corrected.
  std::array<int, 4> corners;
};

inline constexpr std::array<FaceDef, kNumFaces> kFaceTable = {{
    {Face::front, "front", 0, -1, {0, 2, 3, 1}},
    {Face::back, "back", 0, +1, {4, 5, 7, 6}},
    {Face::left, "left", 1, -1, {0, 1, 5, 4}},
    {Face::right, "right", 1, +1, {2, 6, 7, 3}},
    {Face::top, "top", 2, +1, {1, 3, 7, 5}},
    {Face::bottom, "bottom", 2, -1, {0, 4, 6, 2}},
}};

const char* face_label(Face face);

/// The 12 box edges as corner-index pairs, each with its two adjacent faces.
struct EdgeDef {
  std::array<int, 2> corners;
  std::array<Face, 2> faces;
};

const std::array<EdgeDef, 12>& box_edges();

/// Oriented bounding box: centroid + anatomical rotation + padded local
/// extents + the 8 world-space corners in the fixed corner order.
struct OrientedBox {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  AnatomicalFrame frame;
  Eigen::Vector3d local_min = Eigen::Vector3d::Zero();
  Eigen::Vector3d local_max = Eigen::Vector3d::Zero();
  std::array<Eigen::Vector3d, 8> corners_world;
  double margin = 0.0;
  bool coplanar = false;

  Eigen::Vector3d local_corner(int index) const;
};

}  // namespace boxlab

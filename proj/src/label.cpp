#include "boxlab/label.hpp"

#include <Eigen/Geometry>
#include <fstream>

#include <nlohmann/json.hpp>

#include "boxlab/error.hpp"

namespace boxlab {

// ordered_json keeps insertion order, which together with the library's
// shortest round-trip double formatting gives byte-stable output.
using ojson = nlohmann::ordered_json;

CameraPose Label3D::pose() const {
  const Eigen::Quaterniond q(quaternion_wxyz(0), quaternion_wxyz(1),
                             quaternion_wxyz(2), quaternion_wxyz(3));
  CameraPose pose;
  pose.rotation = q.normalized().toRotationMatrix();
  pose.translation = translation;
  pose.refined = pose_refined;
  return pose;
}

void Label3D::set_pose(const CameraPose& p) {
  Eigen::Quaterniond q(p.rotation);
  q.normalize();
  // Canonical sign: first nonzero of (w,x,y,z) positive.
  const double comps[4] = {q.w(), q.x(), q.y(), q.z()};
  for (double c : comps) {
    if (c != 0.0) {
      if (c < 0.0) q.coeffs() = -q.coeffs();
      break;
    }
  }
  quaternion_wxyz << q.w(), q.x(), q.y(), q.z();
  translation = p.translation;
  pose_refined = p.refined;
}

namespace {

ojson vec_to_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
ojson vec_to_json(const Eigen::Vector2d& v) { return {v.x(), v.y()}; }

Eigen::Vector3d vec3_from_json(const ojson& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

Eigen::Vector2d vec2_from_json(const ojson& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

std::string serialize_label(const Label3D& label) {
  ojson doc;
  doc["schema_version"] = label.schema_version;

  ojson corners = ojson::array();
  ojson corners_px = ojson::array();
  ojson behind = ojson::array();
  for (int i = 0; i < 8; ++i) {
    corners.push_back(vec_to_json(label.corners_world[i]));
    corners_px.push_back(vec_to_json(label.corners_px[i]));
    behind.push_back(label.corner_behind_camera[i]);
  }
  doc["corners_world"] = corners;
  doc["corners_px"] = corners_px;
  doc["corner_behind_camera"] = behind;

  doc["pose"] = {{"quaternion_wxyz",
                  {label.quaternion_wxyz(0), label.quaternion_wxyz(1),
                   label.quaternion_wxyz(2), label.quaternion_wxyz(3)}},
                 {"translation", vec_to_json(label.translation)},
                 {"refined", label.pose_refined}};
  doc["intrinsics"] = {{"fx", label.intrinsics.fx},
                       {"fy", label.intrinsics.fy},
                       {"cx", label.intrinsics.cx},
                       {"cy", label.intrinsics.cy},
                       {"width", label.intrinsics.image_width},
                       {"height", label.intrinsics.image_height},
                       {"estimated", label.intrinsics_estimated}};

  ojson faces = ojson::array();
  for (const auto& face : label.faces) {
    faces.push_back({{"face", face.face},
                     {"visible", face.visible},
                     {"percentage", face.percentage},
                     {"projected_area", face.projected_area}});
  }
  doc["faces"] = faces;
  doc["frame"] = {{"x_source", label.frame_x_source},
                  {"y_source", label.frame_y_source}};
  doc["degenerate"] =
      {{"flag", label.degenerate}, {"reason", label.degenerate_reason}};
  doc["diagnostics"] = {
      {"reprojection_error_px", label.diagnostics.reprojection_error_px},
      {"inlier_count", label.diagnostics.inlier_count},
      {"refinement_iterations", label.diagnostics.refinement_iterations},
      {"restarted", label.diagnostics.restarted}};
  return doc.dump(2) + "\n";
}

Label3D parse_label(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("label: ") + e.what());
  }
  try {
    Label3D label;
    label.schema_version = doc.at("schema_version").get<int>();
    for (int i = 0; i < 8; ++i) {
      label.corners_world[i] = vec3_from_json(doc.at("corners_world").at(i));
      label.corners_px[i] = vec2_from_json(doc.at("corners_px").at(i));
      label.corner_behind_camera[i] =
          doc.at("corner_behind_camera").at(i).get<bool>();
    }
    const ojson& pose = doc.at("pose");
    for (int i = 0; i < 4; ++i) {
      label.quaternion_wxyz(i) =
          pose.at("quaternion_wxyz").at(i).get<double>();
    }
    label.translation = vec3_from_json(pose.at("translation"));
    label.pose_refined = pose.at("refined").get<bool>();

    const ojson& k = doc.at("intrinsics");
    label.intrinsics.fx = k.at("fx").get<double>();
    label.intrinsics.fy = k.at("fy").get<double>();
    label.intrinsics.cx = k.at("cx").get<double>();
    label.intrinsics.cy = k.at("cy").get<double>();
    label.intrinsics.image_width = k.at("width").get<int>();
    label.intrinsics.image_height = k.at("height").get<int>();
    label.intrinsics_estimated = k.at("estimated").get<bool>();

    for (const auto& face : doc.at("faces")) {
      label.faces.push_back({face.at("face").get<std::string>(),
                             face.at("visible").get<bool>(),
                             face.at("percentage").get<double>(),
                             face.at("projected_area").get<double>()});
    }
    label.frame_x_source = doc.at("frame").at("x_source").get<std::string>();
    label.frame_y_source = doc.at("frame").at("y_source").get<std::string>();
    label.degenerate = doc.at("degenerate").at("flag").get<bool>();
    label.degenerate_reason =
        doc.at("degenerate").at("reason").get<std::string>();

    const ojson& diag = doc.at("diagnostics");
    label.diagnostics.reprojection_error_px =
        diag.at("reprojection_error_px").get<double>();
    label.diagnostics.inlier_count = diag.at("inlier_count").get<int>();
    label.diagnostics.refinement_iterations =
        diag.at("refinement_iterations").get<int>();
    label.diagnostics.restarted = diag.at("restarted").get<bool>();
    return label;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error,
                std::string("label: missing or mistyped field: ") + e.what());
  }
}

void save_label(const std::string& path, const Label3D& label) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << serialize_label(label);
}

Label3D load_label(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_label(buffer.str());
}

}  // namespace boxlab

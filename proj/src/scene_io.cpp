#include "boxlab/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "boxlab/error.hpp"
#include "boxlab/image_io.hpp"

namespace boxlab {

using nlohmann::json;

std::vector<Landmark3D> SceneInput::landmarks() const {
  std::vector<Landmark3D> out;
  out.reserve(keypoints.size());
  for (const auto& kp : keypoints) {
    out.push_back({kp.name, kp.xyz, kp.visible, kp.confidence});
  }
  return out;
}

std::vector<Correspondence> SceneInput::correspondences() const {
  std::vector<Correspondence> out;
  out.reserve(keypoints.size());
  for (const auto& kp : keypoints) {
    out.push_back({kp.xyz, kp.uv, kp.visible, kp.confidence});
  }
  return out;
}

std::vector<Eigen::Vector3d> parse_obj_vertices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open mesh " + path);

  std::vector<Eigen::Vector3d> vertices;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tag;
    if (!(tokens >> tag)) continue;
    if (tag != "v") continue;  // only vertex records are consumed
    Eigen::Vector3d v;
    if (!(tokens >> v.x() >> v.y() >> v.z())) {
      throw Error(ErrorCode::parse_error,
                  path + ":" + std::to_string(line_no) +
                      ": vertex record needs 3 coordinates");
    }
    if (!v.allFinite()) {
      throw Error(ErrorCode::validation_error,
                  path + ":" + std::to_string(line_no) +
                      ": vertex coordinate is not finite");
    }
    vertices.push_back(v);
  }
  return vertices;
}

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
}

Eigen::Vector3d json_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::parse_error, field + " must be a 3-array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::Vector2d json_vec2(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::parse_error, field + " must be a 2-array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::vector<SceneKeypoint> parse_keypoints(const std::string& path) {
  const json doc = load_json(path);
  if (!doc.is_array()) {
    throw Error(ErrorCode::parse_error, path + ": expected a JSON array");
  }
  std::vector<SceneKeypoint> keypoints;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    const std::string at = path + "[" + std::to_string(i) + "]";
    if (!entry.is_object() || !entry.contains("name")) {
      throw Error(ErrorCode::parse_error, at + ": keypoint needs a name");
    }
    SceneKeypoint kp;
    kp.name = entry["name"].get<std::string>();
    if (!entry.contains("xyz") || !entry.contains("uv") ||
        !entry.contains("visible")) {
      throw Error(ErrorCode::parse_error,
                  at + " (" + kp.name + "): needs xyz, uv and visible");
    }
    kp.xyz = json_vec3(entry["xyz"], at + ".xyz");
    kp.uv = json_vec2(entry["uv"], at + ".uv");
    kp.visible = entry["visible"].get<bool>();
    if (entry.contains("confidence")) {
      kp.confidence = entry["confidence"].get<double>();
    }
    if (!kp.xyz.allFinite()) {
      throw Error(ErrorCode::validation_error,
                  at + " (" + kp.name + "): xyz is not finite");
    }
    if (kp.confidence < 0.0 || kp.confidence > 1.0) {
      throw Error(ErrorCode::validation_error,
                  at + " (" + kp.name + "): confidence outside [0, 1]");
    }
    keypoints.push_back(std::move(kp));
  }
  return keypoints;
}

MaskRasterInfo read_mask_png(const std::string& path) {
  const GrayImage image = read_gray_png(path);
  MaskRasterInfo info;
  long count = 0;
  int x_min = image.width, y_min = image.height, x_max = -1, y_max = -1;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (image.at(x, y) == 0) continue;
      ++count;
      x_min = std::min(x_min, x);
      y_min = std::min(y_min, y);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
  }
  if (count == 0) {
    throw Error(ErrorCode::validation_error, path + ": mask is empty");
  }
  // +1: bounds cover the far edge of the last nonzero pixel.
  info.bbox = {static_cast<double>(x_min), static_cast<double>(y_min),
               static_cast<double>(x_max + 1), static_cast<double>(y_max + 1)};
  info.nonzero_count = static_cast<double>(count);
  return info;
}

bool png_supported() { return png_backend_available(); }

SceneInput parse_scene(const ScenePaths& paths) {
  const json doc = load_json(paths.scene_json);
  if (!doc.is_object()) {
    throw Error(ErrorCode::parse_error,
                paths.scene_json + ": expected a JSON object");
  }
  auto require = [&](const char* field) -> const json& {
    if (!doc.contains(field)) {
      throw Error(ErrorCode::parse_error, paths.scene_json +
                                              ": missing field '" +
                                              std::string(field) + "'");
    }
    return doc[field];
  };

  SceneInput scene;
  scene.intrinsics.image_width = require("width").get<int>();
  scene.intrinsics.image_height = require("height").get<int>();
  if (scene.intrinsics.image_width <= 0 || scene.intrinsics.image_height <= 0) {
    throw Error(ErrorCode::validation_error,
                "image dimensions must be positive");
  }

  scene.mesh.vertices = parse_obj_vertices(require("mesh").get<std::string>());
  if (scene.mesh.vertices.empty()) {
    throw Error(ErrorCode::validation_error, "mesh has no vertices");
  }
  scene.keypoints = parse_keypoints(require("keypoints").get<std::string>());
  if (scene.keypoints.empty()) {
    throw Error(ErrorCode::validation_error, "scene has no keypoints");
  }

  std::set<std::string> names;
  for (const auto& kp : scene.keypoints) {
    if (!names.insert(kp.name).second) {
      throw Error(ErrorCode::validation_error,
                  "duplicate keypoint name '" + kp.name + "'");
    }
  }
  const double w = scene.intrinsics.image_width;
  const double h = scene.intrinsics.image_height;
  for (const auto& kp : scene.keypoints) {
    // 10% slack beyond the image bounds.
    if (kp.uv.x() < -0.1 * w || kp.uv.x() > 1.1 * w || kp.uv.y() < -0.1 * h ||
        kp.uv.y() > 1.1 * h) {
      throw Error(ErrorCode::validation_error,
                  "keypoint '" + kp.name + "' uv outside image bounds + 10%");
    }
  }

  if (doc.contains("intrinsics")) {
    const json& k = doc["intrinsics"];
    scene.intrinsics.fx = k.at("fx").get<double>();
    scene.intrinsics.fy = k.at("fy").get<double>();
    scene.intrinsics.cx = k.at("cx").get<double>();
    scene.intrinsics.cy = k.at("cy").get<double>();
  } else if (doc.contains("intrinsics_path")) {
    const json k = load_json(doc["intrinsics_path"].get<std::string>());
    scene.intrinsics.fx = k.at("fx").get<double>();
    scene.intrinsics.fy = k.at("fy").get<double>();
    scene.intrinsics.cx = k.at("cx").get<double>();
    scene.intrinsics.cy = k.at("cy").get<double>();
  } else {
    scene.intrinsics.fx = scene.intrinsics.fy = 1.2 * std::max(w, h);
    scene.intrinsics.cx = 0.5 * w;
    scene.intrinsics.cy = 0.5 * h;
    scene.intrinsics_estimated = true;
  }
  if (scene.intrinsics.fx <= 0.0 || scene.intrinsics.fy <= 0.0) {
    throw Error(ErrorCode::validation_error, "focal lengths must be positive");
  }
  if (scene.intrinsics.cx < 0.0 || scene.intrinsics.cx > w ||
      scene.intrinsics.cy < 0.0 || scene.intrinsics.cy > h) {
    throw Error(ErrorCode::validation_error,
                "principal point outside image bounds");
  }

  if (doc.contains("mask")) {
    const MaskRasterInfo info =
        read_mask_png(doc["mask"].get<std::string>());
    scene.mask_bbox = info.bbox;
    scene.mask_area_px2 = info.nonzero_count;
    scene.mask_from_raster = true;
  } else if (doc.contains("mask_bbox")) {
    const json& b = doc["mask_bbox"];
    if (!b.is_array() || b.size() != 4) {
      throw Error(ErrorCode::parse_error,
                  "mask_bbox must be [x_min, y_min, x_max, y_max]");
    }
    scene.mask_bbox = {b[0].get<double>(), b[1].get<double>(),
                       b[2].get<double>(), b[3].get<double>()};
    scene.mask_area_px2 = scene.mask_bbox.area();
  } else {
    throw Error(ErrorCode::parse_error,
                paths.scene_json + ": needs 'mask' or 'mask_bbox'");
  }
  if (scene.mask_bbox.x_min >= scene.mask_bbox.x_max ||
      scene.mask_bbox.y_min >= scene.mask_bbox.y_max) {
    throw Error(ErrorCode::validation_error, "mask bbox is empty");
  }
  return scene;
}

}  // namespace boxlab

#include "support/synthetic.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "boxlab/error.hpp"
#include "boxlab/image_io.hpp"
#include "boxlab/pose.hpp"

namespace boxlab::testing {

namespace {

struct TemplateLandmark {
  const char* name;
  Eigen::Vector3d position;
};

// Canonical animal frame: x nose->tail, y left->right, z up. The first seven
// entries carry the default axis-policy pairs and are always included.
const std::vector<TemplateLandmark>& landmark_template() {
  static const std::vector<TemplateLandmark> table = {
      {"nose", {-1.05, 0.0, 0.45}},
      {"tail_base", {0.80, 0.0, 0.35}},
      {"neck", {-0.75, 0.0, 0.50}},
      {"left_shoulder", {-0.50, -0.50, 0.32}},
      {"right_shoulder", {-0.50, 0.50, 0.32}},
      {"left_hip", {0.55, -0.44, 0.30}},
      {"right_hip", {0.55, 0.44, 0.30}},
      {"left_front_knee", {-0.55, -0.30, -0.25}},
      {"right_front_knee", {-0.55, 0.30, -0.25}},
      {"left_back_knee", {0.55, -0.28, -0.25}},
      {"right_back_knee", {0.55, 0.28, -0.25}},
      {"withers", {-0.40, 0.0, 0.66}},
      {"left_front_foot", {-0.55, -0.30, -0.55}},
      {"right_front_foot", {-0.55, 0.30, -0.55}},
      {"left_back_foot", {0.55, -0.28, -0.55}},
      {"right_back_foot", {0.55, 0.28, -0.55}},
      {"left_ear", {-0.98, -0.14, 0.62}},
      {"right_ear", {-0.98, 0.14, 0.62}},
      {"left_eye", {-1.02, -0.09, 0.50}},
      {"right_eye", {-1.02, 0.09, 0.50}},
      {"spine_mid", {0.05, 0.0, 0.65}},
      {"croup", {0.60, 0.0, 0.60}},
      {"tail_tip", {1.05, 0.0, 0.15}},
      {"chin", {-1.03, 0.0, 0.35}},
      {"chest", {-0.45, 0.0, -0.12}},
      {"belly", {0.0, 0.0, -0.14}},
  };
  return table;
}

Eigen::Vector3d sample_torso(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(-0.70, 0.78);
  std::uniform_real_distribution<double> utheta(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  const double x = ux(rng);
  const double theta = utheta(rng);
  // Taper toward both ends keeps the cloud ellipsoid-like.
  const double taper = std::sqrt(std::max(0.05, 1.0 - std::pow(x / 0.85, 2)));
  const double r = std::sqrt(ur(rng));
  return {x, 0.46 * taper * r * std::cos(theta),
          0.25 + 0.42 * taper * r * std::sin(theta)};
}

void append_leg(std::mt19937_64& rng, double x, double y,
                std::vector<Eigen::Vector3d>* points) {
  std::uniform_real_distribution<double> uz(-0.55, 0.05);
  std::uniform_real_distribution<double> uoff(-0.06, 0.06);
  for (int i = 0; i < 220; ++i) {
    points->push_back({x + uoff(rng), y + uoff(rng), uz(rng)});
  }
}

void bend_in_place(std::vector<Eigen::Vector3d>* points) {
  // Rigid ~90 degree bend of the hindquarters about a vertical axis at
  // x = 0.1; keeps point-to-point structure but removes the dominant axis.
  const double angle = M_PI / 2.0;
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& p : *points) {
    if (p.x() <= 0.1) continue;
    const double dx = p.x() - 0.1;
    const double dy = p.y();
    p.x() = 0.1 + c * dx - s * dy;
    p.y() = s * dx + c * dy;
  }
}

}  // namespace

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  while (q.norm() < 1e-6) {
    q = Eigen::Quaterniond(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  }
  q.normalize();
  return q.toRotationMatrix();
}

EvalScene SyntheticScene::eval_scene() const {
  EvalScene scene;
  scene.landmarks = landmarks;
  scene.corrs = corrs;
  scene.mesh = mesh;
  scene.intrinsics = intrinsics;
  scene.camera = camera;
  return scene;
}

SceneInput SyntheticScene::scene_input() const {
  SceneInput input;
  input.mesh = mesh;
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    input.keypoints.push_back({names[i], landmarks[i].position,
                               corrs[i].point2d, landmarks[i].visible,
                               landmarks[i].confidence});
  }
  input.intrinsics = intrinsics;
  input.mask_bbox = mask_bbox;
  input.mask_area_px2 = mask_bbox.area();
  return input;
}

SyntheticScene make_scene(std::uint64_t seed, const SceneOptions& options) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(0x5ce9e5)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uscale(0.85, 1.15);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SyntheticScene scene;
  const double scale = uscale(rng);

  // --- body cloud in the canonical animal frame
  std::vector<Eigen::Vector3d> body;
  body.reserve(5400);
  for (int i = 0; i < 3600; ++i) body.push_back(sample_torso(rng));
  {
    std::normal_distribution<double> head(0.0, 0.16);
    for (int i = 0; i < 600; ++i) {
      body.push_back(Eigen::Vector3d(-0.95, 0.0, 0.45) +
                     Eigen::Vector3d(head(rng), head(rng), head(rng)));
    }
    append_leg(rng, -0.55, -0.30, &body);
    append_leg(rng, -0.55, 0.30, &body);
    append_leg(rng, 0.55, -0.28, &body);
    append_leg(rng, 0.55, 0.28, &body);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    for (int i = 0; i < 120; ++i) {
      const double t = ut(rng);
      body.push_back({0.80 + 0.25 * t, 0.02 * std::sin(20 * t),
                      0.35 - 0.20 * t});
    }
  }

  // --- landmarks
  const auto& table = landmark_template();
  std::uniform_int_distribution<int> ucount(options.min_landmarks,
                                            options.max_landmarks);
  const int n_landmarks =
      std::clamp(ucount(rng), 7, static_cast<int>(table.size()));
  std::vector<Eigen::Vector3d> lm_pos;
  for (int i = 0; i < n_landmarks; ++i) {
    scene.names.push_back(table[i].name);
    lm_pos.push_back(table[i].position);
  }

  // Small anatomical jitter, isotropic so the lateral/vertical balance below
  // survives.
  {
    std::normal_distribution<double> jitter(0.0, 0.008);
    for (auto& p : lm_pos) {
      p += Eigen::Vector3d(jitter(rng), jitter(rng), jitter(rng));
    }
  }

  if (options.bent_pose) {
    bend_in_place(&body);
    bend_in_place(&lm_pos);
  } else if (!options.near_planar_keypoints) {
    // Round out the landmark cross-section: stretch along the smallest
    // covariance eigenvector until the two minor eigenvalues agree to a
    // fraction of a percent. Quadruped torsos are nearly cylindrical, which
    // is the regime where PCA cannot pin down its minor axes.
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& p : lm_pos) c += p;
    c /= static_cast<double>(lm_pos.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : lm_pos) cov += (p - c) * (p - c).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);  // ascending
    std::uniform_real_distribution<double> ugap(-0.006, 0.006);
    const double target = eig.eigenvalues()(1) * (1.0 + ugap(rng));
    const double stretch = std::sqrt(target / eig.eigenvalues()(0));
    const Eigen::Vector3d minor = eig.eigenvectors().col(0);
    const Eigen::Matrix3d t =
        Eigen::Matrix3d::Identity() + (stretch - 1.0) * minor * minor.transpose();
    for (auto& p : lm_pos) p = c + t * (p - c);
  }

  if (options.near_planar_keypoints) {
    for (auto& p : lm_pos) p.y() *= 0.04;
  }

  for (auto& p : body) p *= scale;
  for (auto& p : lm_pos) p *= scale;

  double x_min = body.front().x(), x_max = body.front().x();
  for (const auto& p : body) {
    x_min = std::min(x_min, p.x());
    x_max = std::max(x_max, p.x());
  }
  scene.body_length = x_max - x_min;

  // --- world placement
  const Eigen::Matrix3d world_rot = random_rotation(rng);
  std::uniform_real_distribution<double> upos(-5.0, 5.0);
  const Eigen::Vector3d world_pos(upos(rng), upos(rng), upos(rng));
  for (auto& p : body) p = world_rot * p + world_pos;
  for (auto& p : lm_pos) p = world_rot * p + world_pos;
  scene.mesh.vertices = body;

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : body) centroid += p;
  centroid /= static_cast<double>(body.size());

  // --- camera: telephoto look-at from 3-15 body lengths; resample until the
  // whole animal projects inside the frame.
  scene.intrinsics.fx = scene.intrinsics.fy = 13000.0;
  scene.intrinsics.image_width = 5472;
  scene.intrinsics.image_height = 3648;
  scene.intrinsics.cx = scene.intrinsics.image_width / 2.0;
  scene.intrinsics.cy = scene.intrinsics.image_height / 2.0;

  std::uniform_real_distribution<double> ulogd(
      std::log(options.min_distance_body_lengths),
      std::log(options.max_distance_body_lengths));
  bool placed = false;
  for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
    const double distance = std::exp(ulogd(rng)) * scene.body_length;
    Eigen::Vector3d dir(0, 0, 1);
    do {
      std::normal_distribution<double> gauss(0.0, 1.0);
      dir = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    } while (dir.norm() < 1e-6);
    dir.normalize();
    const Eigen::Vector3d eye = centroid + distance * dir;

    Eigen::Vector3d forward = (centroid - eye).normalized();
    Eigen::Vector3d up(0, 0, 1);
    if (std::abs(forward.dot(up)) > 0.98) up = Eigen::Vector3d(0, 1, 0);
    const Eigen::Vector3d right = forward.cross(up).normalized();
    const Eigen::Vector3d down = forward.cross(right).normalized();
    CameraPose pose;
    pose.rotation.row(0) = right;
    pose.rotation.row(1) = down;
    pose.rotation.row(2) = forward;
    pose.translation = -pose.rotation * eye;

    const double w = scene.intrinsics.image_width;
    const double h = scene.intrinsics.image_height;
    bool ok = true;
    for (std::size_t i = 0; i < body.size() && ok; i += 7) {
      double depth = 0.0;
      const Eigen::Vector2d px =
          project_point(pose, scene.intrinsics, body[i], &depth);
      ok = depth > 0.0 && px.x() > 0.03 * w && px.x() < 0.97 * w &&
           px.y() > 0.03 * h && px.y() < 0.97 * h;
    }
    for (const auto& p : lm_pos) {
      if (!ok) break;
      double depth = 0.0;
      const Eigen::Vector2d px =
          project_point(pose, scene.intrinsics, p, &depth);
      ok = depth > 0.0 && px.x() > 0.03 * w && px.x() < 0.97 * w &&
           px.y() > 0.03 * h && px.y() < 0.97 * h;
    }
    if (ok) {
      scene.camera = pose;
      placed = true;
    }
  }
  if (!placed) {
    throw Error(ErrorCode::validation_error,
                "could not place camera for synthetic scene");
  }

  // --- exact observations and the keypoint-tight mask bbox
  std::vector<int> occludable;
  for (int i = 0; i < n_landmarks; ++i) {
    if (i >= 7) occludable.push_back(i);  // keep the policy pairs visible
  }
  std::vector<bool> occluded(n_landmarks, false);
  for (int k = 0; k < options.occluded_landmarks && !occludable.empty(); ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, occludable.size() - 1);
    const std::size_t at = pick(rng);
    occluded[occludable[at]] = true;
    occludable.erase(occludable.begin() + static_cast<long>(at));
  }

  double bx0 = 1e30, by0 = 1e30, bx1 = -1e30, by1 = -1e30;
  for (int i = 0; i < n_landmarks; ++i) {
    Landmark3D lm;
    lm.name = scene.names[i];
    lm.position = lm_pos[i];
    lm.visible = !occluded[i];
    lm.confidence = occluded[i] ? 0.2 + 0.3 * unit(rng) : 0.75 + 0.25 * unit(rng);
    scene.landmarks.push_back(lm);

    Correspondence corr;
    corr.point3d = lm_pos[i];
    corr.point2d = project_point(scene.camera, scene.intrinsics, lm_pos[i]);
    corr.visible = lm.visible;
    corr.confidence = lm.confidence;
    scene.corrs.push_back(corr);

    bx0 = std::min(bx0, corr.point2d.x());
    by0 = std::min(by0, corr.point2d.y());
    bx1 = std::max(bx1, corr.point2d.x());
    by1 = std::max(by1, corr.point2d.y());
  }
  scene.mask_bbox = {bx0, by0, bx1, by1};
  return scene;
}

std::string write_scene_fixture(const SyntheticScene& scene,
                                const std::string& dir,
                                const std::string& base_name, bool raster_mask,
                                bool omit_intrinsics) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string mesh_path = dir + "/" + base_name + ".obj";
  const std::string keypoints_path = dir + "/" + base_name + ".keypoints.json";
  const std::string scene_path = dir + "/" + base_name + ".scene.json";

  {
    std::ofstream obj(mesh_path);
    obj << "# synthetic quadruped cloud\n";
    obj.precision(17);
    for (const auto& v : scene.mesh.vertices) {
      obj << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
    }
  }
  {
    std::ofstream kp(keypoints_path);
    kp.precision(17);
    kp << "[\n";
    for (std::size_t i = 0; i < scene.landmarks.size(); ++i) {
      const auto& lm = scene.landmarks[i];
      const auto& corr = scene.corrs[i];
      kp << "  {\"name\": \"" << lm.name << "\", \"xyz\": [" << lm.position.x()
         << ", " << lm.position.y() << ", " << lm.position.z()
         << "], \"uv\": [" << corr.point2d.x() << ", " << corr.point2d.y()
         << "], \"visible\": " << (lm.visible ? "true" : "false")
         << ", \"confidence\": " << lm.confidence << "}"
         << (i + 1 < scene.landmarks.size() ? "," : "") << "\n";
    }
    kp << "]\n";
  }

  std::string mask_field;
  if (raster_mask) {
    const std::string mask_path = dir + "/" + base_name + ".mask.png";
    GrayImage mask;
    mask.width = scene.intrinsics.image_width;
    mask.height = scene.intrinsics.image_height;
    mask.pixels.assign(static_cast<std::size_t>(mask.width) * mask.height, 0);
    // Blobby silhouette stamped from the projected mesh points.
    for (std::size_t i = 0; i < scene.mesh.vertices.size(); i += 3) {
      double depth = 0.0;
      const Eigen::Vector2d px = project_point(
          scene.camera, scene.intrinsics, scene.mesh.vertices[i], &depth);
      if (depth <= 0.0) continue;
      const int x = static_cast<int>(px.x());
      const int y = static_cast<int>(px.y());
      for (int dy = -8; dy <= 8; ++dy) {
        for (int dx = -8; dx <= 8; ++dx) {
          if (x + dx < 0 || y + dy < 0 || x + dx >= mask.width ||
              y + dy >= mask.height) {
            continue;
          }
          mask.pixels[static_cast<std::size_t>(y + dy) * mask.width + x + dx] =
              255;
        }
      }
    }
    write_gray_png(mask_path, mask);
    mask_field = "\"mask\": \"" + mask_path + "\"";
  } else {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "\"mask_bbox\": [%.17g, %.17g, %.17g, %.17g]",
                  scene.mask_bbox.x_min, scene.mask_bbox.y_min,
                  scene.mask_bbox.x_max, scene.mask_bbox.y_max);
    mask_field = buf;
  }

  std::ofstream sj(scene_path);
  sj.precision(17);
  sj << "{\n"
     << "  \"mesh\": \"" << mesh_path << "\",\n"
     << "  \"keypoints\": \"" << keypoints_path << "\",\n"
     << "  " << mask_field << ",\n";
  sj << "  \"width\": " << scene.intrinsics.image_width << ",\n"
     << "  \"height\": " << scene.intrinsics.image_height << ",\n";
  if (!omit_intrinsics) {
    sj << "  \"intrinsics\": {\"fx\": " << scene.intrinsics.fx
       << ", \"fy\": " << scene.intrinsics.fy
       << ", \"cx\": " << scene.intrinsics.cx
       << ", \"cy\": " << scene.intrinsics.cy << "},\n";
  }
  sj << "  \"comment\": \"synthetic fixture\"\n}\n";
  return scene_path;
}

}  // namespace boxlab::testing

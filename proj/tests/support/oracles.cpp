#include "support/oracles.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cctype>
#include <cmath>

namespace boxlab::testing {

double quaternion_angle_deg(const Eigen::Matrix3d& r1,
                            const Eigen::Matrix3d& r2) {
  const Eigen::Quaterniond q1(r1);
  const Eigen::Quaterniond q2(r2);
  const Eigen::Quaterniond qd = q1 * q2.conjugate();
  const double angle =
      2.0 * std::atan2(qd.vec().norm(), std::abs(qd.w()));
  return angle * 180.0 / M_PI;
}

SymmetricEigen3 eigen3_characteristic(const Eigen::Matrix3d& a) {
  SymmetricEigen3 out;
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  Eigen::Vector3d eig;
  if (p1 < 1e-30) {
    eig = a.diagonal();
    std::sort(eig.data(), eig.data() + 3, std::greater<double>());
  } else {
    const double q = a.trace() / 3.0;
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) +
                      (a(1, 1) - q) * (a(1, 1) - q) +
                      (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
    const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    eig(0) = q + 2.0 * p * std::cos(phi);
    eig(2) = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    eig(1) = 3.0 * q - eig(0) - eig(2);
  }
  out.values = eig;

  for (int k = 0; k < 3; ++k) {
    const Eigen::Matrix3d m = a - eig(k) * Eigen::Matrix3d::Identity();
    // Null vector from the best-conditioned pair of row cross products.
    Eigen::Vector3d best = Eigen::Vector3d::Zero();
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const Eigen::Vector3d c =
            m.row(i).transpose().cross(m.row(j).transpose());
        if (c.norm() > best.norm()) best = c;
      }
    }
    out.vectors.col(k) =
        best.norm() > 1e-14 ? best.normalized() : Eigen::Vector3d::Unit(k);
  }
  return out;
}

Eigen::Vector3d kahan_mean(const std::vector<Eigen::Vector3d>& points) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Vector3d comp = Eigen::Vector3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d y = p - comp;
    const Eigen::Vector3d t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(points.size());
}

bool point_in_polygon(const Eigen::Vector2d& point,
                      const std::vector<Eigen::Vector2d>& polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.y() > point.y()) != (b.y() > point.y()) &&
        point.x() <
            (b.x() - a.x()) * (point.y() - a.y()) / (b.y() - a.y()) + a.x()) {
      inside = !inside;
    }
  }
  return inside;
}

double rasterized_quad_area(const std::array<Eigen::Vector2d, 4>& quad,
                            int samples_per_pixel_axis, int max_axis_samples) {
  const std::vector<Eigen::Vector2d> poly(quad.begin(), quad.end());
  double x0 = quad[0].x(), x1 = x0, y0 = quad[0].y(), y1 = y0;
  for (const auto& p : quad) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  const double extent = std::max(x1 - x0, y1 - y0);
  if (extent <= 0.0) return 0.0;
  double step = 1.0 / samples_per_pixel_axis;
  if (extent / step > max_axis_samples) step = extent / max_axis_samples;

  long count = 0;
  for (double y = y0 + step / 2; y < y1; y += step) {
    for (double x = x0 + step / 2; x < x1; x += step) {
      if (point_in_polygon({x, y}, poly)) ++count;
    }
  }
  return count * step * step;
}

namespace {

bool ray_hits_triangle(const Eigen::Vector3d& origin,
                       const Eigen::Vector3d& dir, const Eigen::Vector3d& v0,
                       const Eigen::Vector3d& v1, const Eigen::Vector3d& v2,
                       double* t_out) {
  const Eigen::Vector3d e1 = v1 - v0;
  const Eigen::Vector3d e2 = v2 - v0;
  const Eigen::Vector3d h = dir.cross(e2);
  const double det = e1.dot(h);
  if (std::abs(det) < 1e-14) return false;
  const double inv = 1.0 / det;
  const Eigen::Vector3d s = origin - v0;
  const double u = inv * s.dot(h);
  if (u < 0.0 || u > 1.0) return false;
  const Eigen::Vector3d q = s.cross(e1);
  const double v = inv * dir.dot(q);
  if (v < 0.0 || u + v > 1.0) return false;
  const double t = inv * e2.dot(q);
  if (t <= 0.0) return false;
  *t_out = t;
  return true;
}

}  // namespace

std::vector<Face> raycast_visible_faces(const OrientedBox& box,
                                        const Eigen::Vector3d& camera) {
  std::vector<Face> visible;
  for (const auto& def : kFaceTable) {
    std::array<Eigen::Vector3d, 4> corners;
    for (int i = 0; i < 4; ++i) corners[i] = box.corners_world[def.corners[i]];
    const Eigen::Vector3d center =
        0.25 * (corners[0] + corners[1] + corners[2] + corners[3]);
    const Eigen::Vector3d dir = center - camera;

    bool blocked = false;
    for (const auto& other : kFaceTable) {
      if (other.face == def.face) continue;
      std::array<Eigen::Vector3d, 4> oc;
      for (int i = 0; i < 4; ++i) oc[i] = box.corners_world[other.corners[i]];
      for (int tri = 0; tri < 2 && !blocked; ++tri) {
        const Eigen::Vector3d& a = oc[0];
        const Eigen::Vector3d& b = oc[tri == 0 ? 1 : 2];
        const Eigen::Vector3d& c = oc[tri == 0 ? 2 : 3];
        double t = 0.0;
        if (ray_hits_triangle(camera, dir, a, b, c, &t) && t < 1.0 - 1e-9) {
          blocked = true;
        }
      }
      if (blocked) break;
    }
    if (!blocked) visible.push_back(def.face);
  }
  return visible;
}

Eigen::Matrix3d recompose_xyz(const Eigen::Vector3d& angles_deg) {
  const Eigen::Vector3d rad = angles_deg * M_PI / 180.0;
  return (Eigen::AngleAxisd(rad(0), Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(rad(1), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rad(2), Eigen::Vector3d::UnitZ()))
      .toRotationMatrix();
}

std::string check_xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto fail = [&](const std::string& what) {
    return what + " near offset " + std::to_string(i);
  };

  while (i < n) {
    const char c = text[i];
    if (c == '<') {
      if (i + 1 < n && text[i + 1] == '?') {  // declaration
        const auto end = text.find("?>", i);
        if (end == std::string::npos) return fail("unterminated declaration");
        i = end + 2;
        continue;
      }
      const bool closing = i + 1 < n && text[i + 1] == '/';
      std::size_t j = i + (closing ? 2 : 1);
      std::string name;
      while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                       text[j] == ':' || text[j] == '-' || text[j] == '_')) {
        name += text[j++];
      }
      if (name.empty()) return fail("tag without a name");

      bool self_closing = false;
      bool in_quote = false;
      while (j < n) {
        const char t = text[j];
        if (t == '"') in_quote = !in_quote;
        if (!in_quote && t == '<') return fail("nested '<' in tag");
        if (!in_quote && t == '>') break;
        if (!in_quote && t == '/' && j + 1 < n && text[j + 1] == '>') {
          self_closing = true;
        }
        ++j;
      }
      if (j >= n) return fail("unterminated tag");
      if (in_quote) return fail("unterminated attribute quote");

      if (closing) {
        if (stack.empty() || stack.back() != name) {
          return fail("mismatched closing tag " + name);
        }
        stack.pop_back();
      } else if (!self_closing) {
        stack.push_back(name);
      }
      i = j + 1;
      continue;
    }
    if (c == '>') return fail("stray '>'");
    if (c == '&') {
      static const char* entities[] = {"&amp;", "&lt;", "&gt;", "&quot;",
                                       "&apos;"};
      bool ok = false;
      for (const char* e : entities) {
        if (text.compare(i, std::string(e).size(), e) == 0) ok = true;
      }
      if (!ok) return fail("bare '&'");
    }
    ++i;
  }
  if (!stack.empty()) return "unclosed tag " + stack.back();
  return "";
}

}  // namespace boxlab::testing

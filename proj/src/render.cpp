#include "boxlab/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "boxlab/error.hpp"
#include "boxlab/image_io.hpp"

namespace boxlab {

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kFrontColor{44, 160, 44};   // green
constexpr Rgb kBackColor{31, 119, 180};   // blue
constexpr Rgb kEdgeColor{70, 70, 70};
constexpr Rgb kTextColor{20, 20, 20};

std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

const LabelFaceEntry* find_face(const Label3D& label, const char* name) {
  for (const auto& face : label.faces) {
    if (face.face == name) return &face;
  }
  return nullptr;
}

bool face_visible(const Label3D& label, Face face) {
  const LabelFaceEntry* entry = find_face(label, face_label(face));
  return entry && entry->visible;
}

Rgb edge_color(const EdgeDef& edge) {
  for (Face f : edge.faces) {
    if (f == Face::front) return kFrontColor;
  }
  for (Face f : edge.faces) {
    if (f == Face::back) return kBackColor;
  }
  return kEdgeColor;
}

std::string format_pct(double pct) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f%%", pct);
  return buf;
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string watermark_svg(const Label3D& label, int width, int height) {
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\""
      << height << "\" fill=\"#f2f2f2\"/>\n"
      << "  <text x=\"" << width / 2 << "\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-size=\"" << std::max(16, height / 24)
      << "\" fill=\"#b00020\">degenerate: "
      << svg_escape(label.degenerate_reason) << "</text>\n</svg>\n";
  return svg.str();
}

std::string overlay_svg(const Label3D& label, int width, int height) {
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\""
      << height << "\" fill=\"#ffffff\"/>\n";

  // Mask footprint context is intentionally omitted: the overlay is meant to
  // be composited over the source image by downstream tooling.
  auto face_points = [&](Face face) {
    const FaceDef& def = kFaceTable[static_cast<int>(face)];
    std::ostringstream pts;
    for (int i = 0; i < 4; ++i) {
      const auto& p = label.corners_px[def.corners[i]];
      if (i) pts << " ";
      pts << p.x() << "," << p.y();
    }
    return pts.str();
  };
  for (Face face : {Face::front, Face::back}) {
    const Rgb color = face == Face::front ? kFrontColor : kBackColor;
    svg << "  <polygon points=\"" << face_points(face) << "\" fill=\""
        << hex(color) << "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
  }

  // Hidden edges first so solid ones draw on top.
  for (bool hidden_pass : {true, false}) {
    for (const EdgeDef& edge : box_edges()) {
      const bool visible = face_visible(label, edge.faces[0]) ||
                           face_visible(label, edge.faces[1]);
      if (visible == hidden_pass) continue;
      const auto& a = label.corners_px[edge.corners[0]];
      const auto& b = label.corners_px[edge.corners[1]];
      svg << "  <line x1=\"" << a.x() << "\" y1=\"" << a.y() << "\" x2=\""
          << b.x() << "\" y2=\"" << b.y() << "\" stroke=\""
          << hex(edge_color(edge)) << "\" stroke-width=\"2\"";
      if (!visible) svg << " stroke-dasharray=\"8 6\"";
      svg << "/>\n";
    }
  }

  // Legend: visible faces with their projected-area percentages.
  int row = 0;
  const int font = std::max(12, height / 48);
  for (const auto& face : label.faces) {
    if (!face.visible) continue;
    const int y = 10 + font + row * (font + 6);
    Rgb swatch = kEdgeColor;
    if (face.face == "front") swatch = kFrontColor;
    if (face.face == "back") swatch = kBackColor;
    svg << "  <rect x=\"10\" y=\"" << y - font << "\" width=\"" << font
        << "\" height=\"" << font << "\" fill=\"" << hex(swatch) << "\"/>\n"
        << "  <text x=\"" << 16 + font << "\" y=\"" << y - font / 5
        << "\" font-size=\"" << font << "\" fill=\"" << hex(kTextColor)
        << "\">" << svg_escape(face.face) << " " << format_pct(face.percentage)
        << "</text>\n";
    ++row;
  }
  svg << "</svg>\n";
  return svg.str();
}

// ---- minimal raster backend -------------------------------------------------

void blend(RgbImage* img, int x, int y, const Rgb& c, double alpha) {
  if (x < 0 || y < 0 || x >= img->width || y >= img->height) return;
  std::uint8_t* px = &img->pixels[(static_cast<std::size_t>(y) * img->width + x) * 3];
  px[0] = static_cast<std::uint8_t>(px[0] * (1 - alpha) + c.r * alpha);
  px[1] = static_cast<std::uint8_t>(px[1] * (1 - alpha) + c.g * alpha);
  px[2] = static_cast<std::uint8_t>(px[2] * (1 - alpha) + c.b * alpha);
}

void draw_line(RgbImage* img, Eigen::Vector2d a, Eigen::Vector2d b,
               const Rgb& color, bool dashed) {
  const double length = (b - a).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(length)));
  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    if (dashed && static_cast<int>(t * length / 7.0) % 2 == 1) continue;
    const Eigen::Vector2d p = a + t * (b - a);
    const int x = static_cast<int>(std::lround(p.x()));
    const int y = static_cast<int>(std::lround(p.y()));
    // 2px-wide stroke
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) blend(img, x + dx, y + dy, color, 1.0);
    }
  }
}

void fill_quad(RgbImage* img, const std::array<Eigen::Vector2d, 4>& quad,
               const Rgb& color, double alpha) {
  double y_min = quad[0].y(), y_max = quad[0].y();
  for (const auto& p : quad) {
    y_min = std::min(y_min, p.y());
    y_max = std::max(y_max, p.y());
  }
  const int y0 = std::max(0, static_cast<int>(std::floor(y_min)));
  const int y1 = std::min(img->height - 1, static_cast<int>(std::ceil(y_max)));
  for (int y = y0; y <= y1; ++y) {
    const double yc = y + 0.5;
    std::vector<double> xs;
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector2d& a = quad[i];
      const Eigen::Vector2d& b = quad[(i + 1) % 4];
      if ((a.y() <= yc && b.y() > yc) || (b.y() <= yc && a.y() > yc)) {
        xs.push_back(a.x() + (yc - a.y()) / (b.y() - a.y()) * (b.x() - a.x()));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
      const int x1 =
          std::min(img->width - 1, static_cast<int>(std::floor(xs[i + 1] - 0.5)));
      for (int x = x0; x <= x1; ++x) blend(img, x, y, color, alpha);
    }
  }
}

// 3x5 glyphs for the legend percentages.
const std::array<std::uint8_t, 5>* glyph(char c) {
  static const std::array<std::uint8_t, 5> digits[10] = {
      {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7},
      {5, 5, 7, 1, 1}, {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1},
      {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7}};
  static const std::array<std::uint8_t, 5> dot = {0, 0, 0, 0, 2};
  static const std::array<std::uint8_t, 5> pct = {5, 1, 2, 4, 5};
  if (c >= '0' && c <= '9') return &digits[c - '0'];
  if (c == '.') return &dot;
  if (c == '%') return &pct;
  return nullptr;
}

void draw_text(RgbImage* img, int x, int y, const std::string& text,
               const Rgb& color, int scale) {
  int cx = x;
  for (char c : text) {
    if (const auto* g = glyph(c)) {
      for (int row = 0; row < 5; ++row) {
        for (int col = 0; col < 3; ++col) {
          if ((*g)[row] & (4 >> col)) {
            for (int sy = 0; sy < scale; ++sy) {
              for (int sx = 0; sx < scale; ++sx) {
                blend(img, cx + col * scale + sx, y + row * scale + sy, color,
                      1.0);
              }
            }
          }
        }
      }
    }
    cx += 4 * scale;
  }
}

RgbImage overlay_png(const Label3D& label, int width, int height) {
  RgbImage img(width, height, 255);
  for (Face face : {Face::front, Face::back}) {
    const FaceDef& def = kFaceTable[static_cast<int>(face)];
    std::array<Eigen::Vector2d, 4> quad;
    for (int i = 0; i < 4; ++i) quad[i] = label.corners_px[def.corners[i]];
    fill_quad(&img, quad, face == Face::front ? kFrontColor : kBackColor, 0.25);
  }
  for (bool hidden_pass : {true, false}) {
    for (const EdgeDef& edge : box_edges()) {
      const bool visible = face_visible(label, edge.faces[0]) ||
                           face_visible(label, edge.faces[1]);
      if (visible == hidden_pass) continue;
      draw_line(&img, label.corners_px[edge.corners[0]],
                label.corners_px[edge.corners[1]], edge_color(edge), !visible);
    }
  }
  const int scale = std::max(2, height / 256);
  int row = 0;
  for (const auto& face : label.faces) {
    if (!face.visible) continue;
    Rgb swatch = kEdgeColor;
    if (face.face == "front") swatch = kFrontColor;
    if (face.face == "back") swatch = kBackColor;
    const int y = 10 + row * (7 * scale);
    for (int sy = 0; sy < 5 * scale; ++sy) {
      for (int sx = 0; sx < 5 * scale; ++sx) {
        blend(&img, 10 + sx, y + sy, swatch, 1.0);
      }
    }
    draw_text(&img, 10 + 7 * scale, y, format_pct(face.percentage), kTextColor,
              scale);
    ++row;
  }
  return img;
}

RgbImage watermark_png(int width, int height) {
  RgbImage img(width, height, 242);
  const Rgb red{176, 0, 32};
  const int scale = std::max(4, height / 128);
  draw_text(&img, width / 4, height / 2, "0.0%", red, scale);  // placeholder mark
  return img;
}

std::string with_extension(const std::string& path, const std::string& ext) {
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + ext;
  }
  return path.substr(0, dot) + ext;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << content;
}

}  // namespace

RenderResult render_overlay(const SceneInput& scene, const Label3D& label,
                            const std::string& out_path, bool also_png) {
  RenderResult result;
  const int width = scene.intrinsics.image_width;
  const int height = scene.intrinsics.image_height;

  result.svg_path = with_extension(out_path, ".svg");
  if (label.degenerate) {
    result.refused = true;
    write_text_file(result.svg_path, watermark_svg(label, width, height));
    if (also_png && png_backend_available()) {
      result.png_path = with_extension(out_path, ".png");
      write_rgb_png(*result.png_path, watermark_png(width, height));
    }
    return result;
  }

  write_text_file(result.svg_path, overlay_svg(label, width, height));
  if (also_png && png_backend_available()) {
    result.png_path = with_extension(out_path, ".png");
    write_rgb_png(*result.png_path, overlay_png(label, width, height));
  }
  return result;
}

}  // namespace boxlab

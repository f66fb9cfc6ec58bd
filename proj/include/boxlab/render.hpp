#pragma once

#include <optional>
#include <string>

#include "boxlab/label.hpp"
#include "boxlab/scene_io.hpp"

namespace boxlab {

struct RenderResult {
  bool refused = false;  // label was degenerate; only a watermark was emitted
  std::string svg_path;
  std::optional<std::string> png_path;
};

/// Draws the reprojected box over the image plane: the 12 edges (dashed when
/// both adjacent faces are hidden), the front face tinted green and the back
/// face blue, and a legend with per-face visibility percentages. SVG is always
/// written; a PNG sibling is written when the raster backend is available and
/// `also_png` is set. A degenerate label is refused: only a watermark carrying
/// the reason is emitted.
RenderResult render_overlay(const SceneInput& scene, const Label3D& label,
                            const std::string& out_path, bool also_png = false);

}  // namespace boxlab

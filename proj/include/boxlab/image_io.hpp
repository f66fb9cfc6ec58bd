#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace boxlab {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 1 byte per pixel

  std::uint8_t at(int x, int y) const { return pixels[y * width + x]; }
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 3 bytes per pixel

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t fill = 255)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}
};

/// True when the raster (PNG) backend was compiled in.
bool png_backend_available();

/// Decodes any libpng-readable image to 8-bit grayscale.
GrayImage read_gray_png(const std::string& path);

void write_gray_png(const std::string& path, const GrayImage& image);
void write_rgb_png(const std::string& path, const RgbImage& image);

}  // namespace boxlab

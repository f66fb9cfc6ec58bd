#include "boxlab/image_io.hpp"

#include <cstdio>
#include <memory>

#include "boxlab/error.hpp"

#ifdef BOXLAB_HAVE_PNG
#include <png.h>
#endif

namespace boxlab {

#ifdef BOXLAB_HAVE_PNG

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

bool png_backend_available() { return true; }

GrayImage read_gray_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorCode::io_error, "cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::io_error, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::parse_error, path + ": not a valid PNG");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);

  // Normalize everything to 8-bit grayscale.
  const png_byte color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_GRAY &&
      png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color_type == PNG_COLOR_TYPE_RGB ||
      color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
      color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_rgb_to_gray(png, 1, -1.0, -1.0);
  }
  png_read_update_info(png, info);

  GrayImage image;
  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);

  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y) {
    rows[y] = image.pixels.data() + static_cast<std::size_t>(y) * image.width;
  }
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

namespace {

void write_png(const std::string& path, int width, int height, int color_type,
               const std::uint8_t* pixels, int bytes_per_pixel) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorCode::io_error, "cannot open " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::io_error, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::io_error, "failed writing " + path);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(
                           pixels + static_cast<std::size_t>(y) * width *
                                        bytes_per_pixel));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_gray_png(const std::string& path, const GrayImage& image) {
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_GRAY,
            image.pixels.data(), 1);
}

void write_rgb_png(const std::string& path, const RgbImage& image) {
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_RGB,
            image.pixels.data(), 3);
}

#else  // !BOXLAB_HAVE_PNG

bool png_backend_available() { return false; }

GrayImage read_gray_png(const std::string&) {
  throw Error(ErrorCode::io_error, "built without PNG support");
}

void write_gray_png(const std::string&, const GrayImage&) {
  throw Error(ErrorCode::io_error, "built without PNG support");
}

void write_rgb_png(const std::string&, const RgbImage&) {
  throw Error(ErrorCode::io_error, "built without PNG support");
}

#endif

}  // namespace boxlab

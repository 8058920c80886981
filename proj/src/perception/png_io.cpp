#include "qslam/perception/png_io.hpp"

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

#include <png.h>

namespace qslam::perception {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

DepthImage read_depth_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw std::runtime_error("cannot open depth image " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("failed to decode PNG " + path);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth != 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("depth PNG must be 16-bit grayscale: " + path);
  }
  png_set_swap(png);  // PNG stores big-endian samples
  png_read_update_info(png, info);

  DepthImage out(static_cast<int>(width), static_cast<int>(height));
  std::vector<uint16_t> row(width);
  std::vector<uint16_t> raw(static_cast<size_t>(width) * height);
  for (png_uint_32 v = 0; v < height; ++v) {
    png_read_row(png, reinterpret_cast<png_bytep>(row.data()), nullptr);
    std::copy(row.begin(), row.end(), raw.begin() + static_cast<size_t>(v) * width);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  for (size_t i = 0; i < raw.size(); ++i) out.data[i] = static_cast<double>(raw[i]);
  return out;
}

void write_depth_png(const std::string& path, const DepthImage& depth) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("failed to encode PNG " + path);
  }

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(depth.width), static_cast<png_uint_32>(depth.height),
               16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_set_swap(png);

  std::vector<uint16_t> row(static_cast<size_t>(depth.width));
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double value = std::max(0.0, std::min(65535.0, std::round(depth.at(u, v))));
      row[static_cast<size_t>(u)] = static_cast<uint16_t>(value);
    }
    png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace qslam::perception

#pragma once

#include <string>

#include "qslam/perception/image.hpp"

namespace qslam::perception {

/// Reads a 16-bit grayscale PNG depth map (TUM RGB-D convention).
DepthImage read_depth_png(const std::string& path);

/// Writes a depth image as 16-bit grayscale PNG; values are clamped to
/// [0, 65535] and rounded.
void write_depth_png(const std::string& path, const DepthImage& depth);

}  // namespace qslam::perception

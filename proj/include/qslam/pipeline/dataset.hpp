#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qslam/perception/image.hpp"

namespace qslam::pipeline {

struct DatasetFrame {
  double timestamp = 0.0;
  std::string depth_path;
  std::string rgb_path;  // empty when the dataset has no paired colour image
};

/// TUM RGB-D directory: `associations.txt` pairing rgb and depth timestamps
/// (either column order), with `depth.txt` as a fallback. Depth images are
/// 16-bit PNGs at depth_scale 5000 per metre.
class TumDataset {
 public:
  explicit TumDataset(const std::string& directory);

  size_t size() const { return frames_.size(); }
  const DatasetFrame& frame(size_t i) const { return frames_.at(i); }

  perception::DepthImage load_depth(size_t i) const;

 private:
  std::string directory_;
  std::vector<DatasetFrame> frames_;
};

}  // namespace qslam::pipeline

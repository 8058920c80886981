#include "qslam/pipeline/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qslam/perception/png_io.hpp"

namespace qslam::pipeline {

namespace {

bool looks_like_depth(const std::string& path) { return path.find("depth") != std::string::npos; }

}  // namespace

TumDataset::TumDataset(const std::string& directory) : directory_(directory) {
  namespace fs = std::filesystem;
  const fs::path assoc = fs::path(directory) / "associations.txt";
  const fs::path depth_list = fs::path(directory) / "depth.txt";

  if (fs::exists(assoc)) {
    std::ifstream is(assoc);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      double t1, t2;
      std::string p1, p2;
      if (!(ls >> t1 >> p1 >> t2 >> p2)) continue;
      DatasetFrame frame;
      if (looks_like_depth(p1)) {
        frame.timestamp = t1;
        frame.depth_path = p1;
        frame.rgb_path = p2;
      } else {
        frame.timestamp = t2;
        frame.depth_path = p2;
        frame.rgb_path = p1;
      }
      frames_.push_back(std::move(frame));
    }
  } else if (fs::exists(depth_list)) {
    std::ifstream is(depth_list);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      DatasetFrame frame;
      if (!(ls >> frame.timestamp >> frame.depth_path)) continue;
      frames_.push_back(std::move(frame));
    }
  } else {
    throw std::runtime_error("dataset directory has neither associations.txt nor depth.txt: " +
                             directory);
  }
  if (frames_.empty()) throw std::runtime_error("dataset is empty: " + directory);
}

perception::DepthImage TumDataset::load_depth(size_t i) const {
  return perception::read_depth_png(directory_ + "/" + frame(i).depth_path);
}

}  // namespace qslam::pipeline

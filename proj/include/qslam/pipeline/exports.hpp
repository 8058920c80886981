#pragma once

#include <string>
#include <vector>

#include "qslam/core/lie.hpp"

namespace qslam::pipeline {

/// TUM trajectory line: `timestamp tx ty tz qx qy qz qw`.
void write_tum_trajectory(const std::string& path,
                          const std::vector<std::pair<double, RigidTransform>>& trajectory);

std::vector<std::pair<double, RigidTransform>> read_tum_trajectory(const std::string& path);

}  // namespace qslam::pipeline

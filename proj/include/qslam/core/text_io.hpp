#pragma once

#include <string>

#include "qslam/core/quadric.hpp"

namespace qslam {

/// One-line text form: `class rho1 rho2 rho3 q_w q_x q_y q_z a b c`, with a
/// trailing `sig s1 s2 s3 s4` block for general quadrics. Round-trips exactly.
std::string quadric_to_line(const Quadric& q);
Quadric quadric_from_line(const std::string& line);

}  // namespace qslam

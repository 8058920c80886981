#pragma once

#include <iosfwd>
#include <string>

#include "qslam/graph/factors.hpp"

namespace qslam::graph {

/// Line-oriented snapshot of a graph and its estimate, for debugging and
/// regression fixtures. Doubles are printed with enough digits to round-trip.
///
///   pose <id> tx ty tz q_w q_x q_y q_z
///   quadric <id> <quadric line>
///   prior <pose> tx ty tz q_w q_x q_y q_z cov <21 upper-triangular entries>
///   odom <from> <to> tx ty tz q_w q_x q_y q_z cov <21>
///   obs <pose> <quadric> <measured quadric line> cov <dof*(dof+1)/2>
void write_snapshot(std::ostream& os, const FactorGraph& graph, const Values& values);
void read_snapshot(std::istream& is, FactorGraph& graph, Values& values);

void save_snapshot(const std::string& path, const FactorGraph& graph, const Values& values);
void load_snapshot(const std::string& path, FactorGraph& graph, Values& values);

}  // namespace qslam::graph

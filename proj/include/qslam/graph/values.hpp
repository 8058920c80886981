#pragma once

#include <map>
#include <variant>
#include <vector>

#include "qslam/core/quadric.hpp"

namespace qslam::graph {

struct VariableKey {
  enum class Kind { Pose, Quadric };
  Kind kind = Kind::Pose;
  int index = 0;

  friend auto operator<=>(const VariableKey&, const VariableKey&) = default;
};

inline VariableKey pose_key(int index) { return {VariableKey::Kind::Pose, index}; }
inline VariableKey quadric_key(int index) { return {VariableKey::Kind::Quadric, index}; }

std::string key_name(const VariableKey& key);

/// Estimate for every variable in a graph. Ordered by key, so iteration and
/// tangent-space stacking are deterministic.
class Values {
 public:
  using Value = std::variant<RigidTransform, Quadric>;

  bool has(const VariableKey& key) const { return map_.count(key) != 0; }
  void insert_pose(int index, const RigidTransform& pose);
  void insert_quadric(int index, const Quadric& q);
  void update(const VariableKey& key, const Value& v);

  const RigidTransform& at_pose(const VariableKey& key) const;
  const Quadric& at_quadric(const VariableKey& key) const;

  /// Tangent dimension of one variable (6 for poses, class dof for quadrics).
  int dim(const VariableKey& key) const;

  size_t size() const { return map_.size(); }
  const std::map<VariableKey, Value>& map() const { return map_; }

  /// Applies a per-variable tangent segment with the variable's retraction.
  Values retract(const std::vector<VariableKey>& order, const std::vector<int>& offsets,
                 const Eigen::VectorXd& delta) const;

 private:
  std::map<VariableKey, Value> map_;
};

}  // namespace qslam::graph

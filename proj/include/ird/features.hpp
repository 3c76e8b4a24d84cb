#pragma once

#include "ird/grid_world.hpp"
#include "ird/types.hpp"

#include <Eigen/Dense>

namespace ird {

// Per-state feature vectors. Column s of the matrix is the feature vector of
// state s; trajectory features are the sum over the H+1 visited states.
class FeatureMap {
 public:
  FeatureMap() = default;
  explicit FeatureMap(Eigen::MatrixXd state_features);

  int dim() const { return static_cast<int>(values_.rows()); }
  int num_states() const { return static_cast<int>(values_.cols()); }

  Eigen::MatrixXd::ConstColXpr state(StateId s) const {
    return values_.col(s);
  }
  const Eigen::MatrixXd& matrix() const { return values_; }

  // wᵀφ(s) for every state at once.
  Eigen::VectorXd state_rewards(const WeightVector& w) const;

  // New map with offset added to every state's features.
  FeatureMap shifted(const Eigen::VectorXd& offset) const;

 private:
  Eigen::MatrixXd values_;
};

Eigen::VectorXd trajectory_features(const Trajectory& traj,
                                    const FeatureMap& fmap);

double trajectory_reward(const Trajectory& traj, const WeightVector& w,
                         const FeatureMap& fmap);

void check_dimensions(const WorldModel& world, const FeatureMap& fmap,
                      const WeightVector& w);

}  // namespace ird

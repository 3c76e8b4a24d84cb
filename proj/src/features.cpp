#include "ird/features.hpp"

#include <stdexcept>

namespace ird {

FeatureMap::FeatureMap(Eigen::MatrixXd state_features)
    : values_(std::move(state_features)) {
  if (values_.rows() == 0 || values_.cols() == 0)
    throw std::invalid_argument("FeatureMap: empty feature matrix");
}

Eigen::VectorXd FeatureMap::state_rewards(const WeightVector& w) const {
  if (w.size() != values_.rows())
    throw std::invalid_argument("FeatureMap: weight dimension mismatch");
  return values_.transpose() * w;
}

FeatureMap FeatureMap::shifted(const Eigen::VectorXd& offset) const {
  if (offset.size() != values_.rows())
    throw std::invalid_argument("FeatureMap: shift dimension mismatch");
  return FeatureMap(values_.colwise() + offset);
}

Eigen::VectorXd trajectory_features(const Trajectory& traj,
                                    const FeatureMap& fmap) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(fmap.dim());
  for (StateId s : traj.states) {
    if (s < 0 || s >= fmap.num_states())
      throw std::invalid_argument("trajectory_features: state not covered");
    acc += fmap.state(s);
  }
  return acc;
}

double trajectory_reward(const Trajectory& traj, const WeightVector& w,
                         const FeatureMap& fmap) {
  if (w.size() != fmap.dim())
    throw std::invalid_argument("trajectory_reward: dimension mismatch");
  return w.dot(trajectory_features(traj, fmap));
}

void check_dimensions(const WorldModel& world, const FeatureMap& fmap,
                      const WeightVector& w) {
  if (fmap.num_states() != world.num_states())
    throw std::invalid_argument("feature map does not cover the world");
  if (w.size() != fmap.dim())
    throw std::invalid_argument("weight dimension mismatch");
  if (!w.allFinite()) throw std::invalid_argument("weights must be finite");
}

}  // namespace ird

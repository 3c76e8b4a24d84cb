#include "ird/maxent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ird {

MaxEntEvaluator::MaxEntEvaluator(const WorldModel& world,
                                 const FeatureMap& fmap)
    : world_(&world), fmap_(&fmap) {
  if (fmap.num_states() != world.num_states()) {
    throw std::invalid_argument("feature map does not cover this world");
  }
  const int S = world.num_states();
  rewards_.resize(S);
  values_.resize(S, world.horizon + 1);
  lse_.resize(S, world.horizon);
  for (auto& g : gathered_) g.resize(S);
  max_.resize(S);
  sum_.resize(S);
  occupancy_.resize(S);
  next_occupancy_.resize(S);
  visits_.resize(S);
  probs_.resize(S);
}

void MaxEntEvaluator::backward(const WeightVector& w) {
  check_dimensions(*world_, *fmap_, w);
  const int S = world_->num_states();
  const int H = world_->horizon;
  rewards_.noalias() = fmap_->matrix().transpose() * w;
  values_.col(H) = rewards_;
  for (int t = H - 1; t >= 0; --t) {
    const double* next = values_.col(t + 1).data();
    for (int a = 0; a < kNumActions; ++a) {
      const StateId* succ = world_->successor[a].data();
      double* g = gathered_[a].data();
      for (int s = 0; s < S; ++s) g[s] = next[succ[s]];
    }
    max_ = gathered_[0].max(gathered_[1]).max(gathered_[2].max(gathered_[3]));
    sum_ = (gathered_[0] - max_).exp() + (gathered_[1] - max_).exp() +
           (gathered_[2] - max_).exp() + (gathered_[3] - max_).exp();
    lse_.col(t).array() = max_ + sum_.log();
    values_.col(t).array() = rewards_.array() + lse_.col(t).array();
  }
}

double MaxEntEvaluator::log_partition(const WeightVector& w) {
  backward(w);
  return values_(world_->start, 0);
}

double MaxEntEvaluator::log_partition_and_features(
    const WeightVector& w, Eigen::VectorXd& features_out) {
  backward(w);
  const int S = world_->num_states();
  const int H = world_->horizon;
  occupancy_.setZero();
  occupancy_[world_->start] = 1.0;
  visits_.setZero();
  for (int t = 0; t < H; ++t) {
    visits_ += occupancy_;
    next_occupancy_.setZero();
    const double* next = values_.col(t + 1).data();
    const double* lse = lse_.col(t).data();
    double* dn = next_occupancy_.data();
    const double* d = occupancy_.data();
    for (int a = 0; a < kNumActions; ++a) {
      const StateId* succ = world_->successor[a].data();
      double* g = gathered_[a].data();
      for (int s = 0; s < S; ++s) g[s] = next[succ[s]];
      probs_ = (gathered_[a] - Eigen::Map<const Eigen::ArrayXd>(lse, S)).exp();
      const double* p = probs_.data();
      for (int s = 0; s < S; ++s) {
        if (d[s] != 0.0) dn[succ[s]] += d[s] * p[s];
      }
    }
    occupancy_.swap(next_occupancy_);
  }
  visits_ += occupancy_;
  features_out.noalias() = fmap_->matrix() * visits_.matrix();
  return values_(world_->start, 0);
}

MaxEntSolution soft_value_iteration(const WorldModel& world,
                                    const FeatureMap& fmap,
                                    const WeightVector& w) {
  check_dimensions(world, fmap, w);
  MaxEntSolution sol;
  const int S = world.num_states();
  const int H = world.horizon;
  sol.values.resize(S, H + 1);
  sol.action_log_probs.assign(H, Eigen::MatrixXd(kNumActions, S));

  Eigen::VectorXd rewards = fmap.matrix().transpose() * w;
  sol.values.col(H) = rewards;
  for (int t = H - 1; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double m = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < kNumActions; ++a) {
        m = std::max(m, sol.values(world.successor[a][s], t + 1));
      }
      double acc = 0.0;
      for (int a = 0; a < kNumActions; ++a) {
        acc += std::exp(sol.values(world.successor[a][s], t + 1) - m);
      }
      const double lse = m + std::log(acc);
      sol.values(s, t) = rewards[s] + lse;
      for (int a = 0; a < kNumActions; ++a) {
        sol.action_log_probs[t](a, s) =
            sol.values(world.successor[a][s], t + 1) - lse;
      }
    }
  }
  sol.log_partition = sol.values(world.start, 0);
  return sol;
}

Eigen::VectorXd expected_feature_counts(const MaxEntSolution& sol,
                                        const WorldModel& world,
                                        const FeatureMap& fmap) {
  const int S = world.num_states();
  const int H = world.horizon;
  if (sol.values.rows() != S || sol.values.cols() != H + 1 ||
      static_cast<int>(sol.action_log_probs.size()) != H) {
    throw std::invalid_argument("solution does not match this world");
  }
  Eigen::VectorXd occupancy = Eigen::VectorXd::Zero(S);
  occupancy[world.start] = 1.0;
  Eigen::VectorXd visits = Eigen::VectorXd::Zero(S);
  Eigen::VectorXd next(S);
  for (int t = 0; t < H; ++t) {
    visits += occupancy;
    next.setZero();
    for (int s = 0; s < S; ++s) {
      if (occupancy[s] == 0.0) continue;
      for (int a = 0; a < kNumActions; ++a) {
        next[world.successor[a][s]] +=
            occupancy[s] * std::exp(sol.action_log_probs[t](a, s));
      }
    }
    occupancy.swap(next);
  }
  visits += occupancy;
  return fmap.matrix() * visits;
}

Trajectory plan_with_state_rewards(const WorldModel& world,
                                   const Eigen::VectorXd& state_rewards) {
  const int S = world.num_states();
  const int H = world.horizon;
  if (state_rewards.size() != S) {
    throw std::invalid_argument("state reward vector does not match world");
  }
  if (!state_rewards.allFinite()) {
    throw std::invalid_argument("state rewards must be finite");
  }
  Eigen::MatrixXd values(S, H + 1);
  values.col(H) = state_rewards;
  for (int t = H - 1; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < kNumActions; ++a) {
        best = std::max(best, values(world.successor[a][s], t + 1));
      }
      values(s, t) = state_rewards[s] + best;
    }
  }
  Trajectory traj;
  traj.states.reserve(H + 1);
  traj.actions.reserve(H);
  StateId s = world.start;
  traj.states.push_back(s);
  for (int t = 0; t < H; ++t) {
    int best_a = 0;
    double best = values(world.successor[0][s], t + 1);
    for (int a = 1; a < kNumActions; ++a) {
      const double v = values(world.successor[a][s], t + 1);
      if (v > best) {
        best = v;
        best_a = a;
      }
    }
    traj.actions.push_back(static_cast<Action>(best_a));
    s = world.successor[best_a][s];
    traj.states.push_back(s);
  }
  return traj;
}

Trajectory optimal_trajectory(const WorldModel& world, const FeatureMap& fmap,
                              const WeightVector& w) {
  check_dimensions(world, fmap, w);
  return plan_with_state_rewards(world, fmap.state_rewards(w));
}

}  // namespace ird

#pragma once

#include "ird/features.hpp"
#include "ird/grid_world.hpp"
#include "ird/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ird {

// Result of soft value iteration: the trajectory distribution
// π(ξ|w) ∝ exp(wᵀφ(ξ)) in backed-up form.
//
// values:           column t holds the soft values V_t(s); V_H(s) = wᵀφ(s),
//                   V_t(s) = wᵀφ(s) + logΣ_a exp(V_{t+1}(T(s,a))).
// action_log_probs: one 4×S matrix per action step t = 0..H-1;
//                   entry (a, s) = log π_t(a|s).
// log_partition:    V_0(start) = log Σ_ξ exp(wᵀφ(ξ)).
struct MaxEntSolution {
  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> action_log_probs;
  double log_partition = 0.0;
};

MaxEntSolution soft_value_iteration(const WorldModel& world,
                                    const FeatureMap& fmap,
                                    const WeightVector& w);

// Expected trajectory feature counts Σ_{t=0..H} E[φ(s_t)] under the soft
// policy. The solution must have been computed for this world and map.
Eigen::VectorXd expected_feature_counts(const MaxEntSolution& sol,
                                        const WorldModel& world,
                                        const FeatureMap& fmap);

// Exact reward-maximising trajectory by hard value iteration. Ties are broken
// by fixed action order (up, down, left, right).
Trajectory optimal_trajectory(const WorldModel& world, const FeatureMap& fmap,
                              const WeightVector& w);

// Hard value iteration on an arbitrary per-state reward vector; the basis for
// optimal_trajectory and for pessimistic per-state planning.
Trajectory plan_with_state_rewards(const WorldModel& world,
                                   const Eigen::VectorXd& state_rewards);

// Reusable-buffer evaluator for the likelihood hot path: many soft-planner
// solves against one fixed (world, feature map) pair with varying weights.
class MaxEntEvaluator {
 public:
  MaxEntEvaluator(const WorldModel& world, const FeatureMap& fmap);

  double log_partition(const WeightVector& w);
  double log_partition_and_features(const WeightVector& w,
                                    Eigen::VectorXd& features_out);

  const WorldModel& world() const { return *world_; }
  const FeatureMap& features() const { return *fmap_; }

 private:
  void backward(const WeightVector& w);

  const WorldModel* world_;
  const FeatureMap* fmap_;
  Eigen::VectorXd rewards_;
  Eigen::MatrixXd values_;       // S x (H+1)
  Eigen::MatrixXd lse_;          // S x H, logΣ_a exp(V_{t+1}(T(s,a)))
  std::array<Eigen::ArrayXd, kNumActions> gathered_;
  Eigen::ArrayXd max_, sum_, occupancy_, next_occupancy_, visits_, probs_;
};

}  // namespace ird

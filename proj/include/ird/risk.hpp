#pragma once

#include "ird/enumerate.hpp"
#include "ird/features.hpp"
#include "ird/grid_world.hpp"
#include "ird/maxent.hpp"
#include "ird/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ird {

enum class RiskGranularity { TrajectoryWide, PerTimestep };
enum class RiskBaseline { InitialState, TrainingFeatureCounts, LogPartition };

const char* risk_granularity_name(RiskGranularity g);
const char* risk_baseline_name(RiskBaseline b);

// Worst-case planning setup: maximize the minimum offset-calibrated score
// over the particle set (posterior weight samples).
struct RiskConfig {
  RiskGranularity granularity = RiskGranularity::PerTimestep;
  RiskBaseline baseline = RiskBaseline::TrainingFeatureCounts;
  std::vector<WeightVector> particles;
};

// Per-particle reference scores c_i that make rewards comparable across
// particles. world/fmap are the world being planned in:
//   initial-state:           c_i = (H+1) * w_i'phi(start)
//   training-feature-counts: c_i = w_i'phi_train (pass the training counts)
//   log-partition:           c_i = soft log-partition of w_i in this world
Eigen::VectorXd compute_offsets(const std::vector<WeightVector>& particles,
                                RiskBaseline baseline, const WorldModel& world,
                                const FeatureMap& fmap,
                                const Eigen::VectorXd* training_feature_counts);

// min_i [w_i'phi(traj) - c_i]; the trajectory-wide objective.
double trajectory_minimax_score(const Trajectory& traj, const FeatureMap& fmap,
                                const std::vector<WeightVector>& particles,
                                const Eigen::VectorXd& offsets);

// Scalar pessimistic state reward min_i [w_i'phi(s) - c_i/(H+1)]; offsets are
// spread uniformly over the H+1 visited states so the two granularities are
// comparable.
Eigen::VectorXd pessimistic_state_rewards(
    const FeatureMap& fmap, const std::vector<WeightVector>& particles,
    const Eigen::VectorXd& offsets, int horizon);

struct TrajectoryMinimaxReport {
  bool exact = false;              // solved by full enumeration
  int best_response_rounds = 0;    // fallback iterations used
  bool improved_over_mean_plan = true;
  double score = 0.0;
};

// argmax over trajectories of min_i [w_i'phi(traj) - c_i]. Exhaustive when
// the trajectory count fits the enumeration guard; otherwise iterated best
// response: repeatedly plan optimally against the particle that currently
// attains the min, keeping the best-scoring trajectory seen.
Trajectory plan_trajectory_minimax(const WorldModel& world,
                                   const FeatureMap& fmap,
                                   const std::vector<WeightVector>& particles,
                                   const Eigen::VectorXd& offsets,
                                   TrajectoryMinimaxReport* report = nullptr);

// Exact hard value iteration on the pessimistic state reward; optimal for
// the per-timestep objective sum_t min_i [w_i'phi(s_t) - c_i/(H+1)].
Trajectory plan_per_timestep_minimax(const WorldModel& world,
                                     const FeatureMap& fmap,
                                     const std::vector<WeightVector>& particles,
                                     const Eigen::VectorXd& offsets);

// Dispatch on cfg.granularity; offsets computed per cfg.baseline.
Trajectory plan_risk_averse(const WorldModel& world, const FeatureMap& fmap,
                            const RiskConfig& cfg,
                            const Eigen::VectorXd* training_feature_counts,
                            TrajectoryMinimaxReport* report = nullptr);

}  // namespace ird

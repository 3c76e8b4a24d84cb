#pragma once

#include "ird/features.hpp"
#include "ird/grid_world.hpp"
#include "ird/types.hpp"

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

namespace ird {

// Brute-force references computed by full trajectory enumeration. These are
// deliberately independent of the planner implementations so the two can be
// cross-checked.
double enum_log_partition(const WorldModel& world, const FeatureMap& fmap,
                          const WeightVector& w);
Eigen::VectorXd enum_expected_features(const WorldModel& world,
                                       const FeatureMap& fmap,
                                       const WeightVector& w);

// Maximum over trajectories of the per-state reward sum, accumulated
// suffix-first exactly like backward value iteration so the comparison with
// the planner is valid at full precision.
double enum_max_state_reward_sum(const WorldModel& world,
                                 const Eigen::VectorXd& state_rewards);

// Random small instances shared by the verification suite.
struct RandomInstance {
  TerrainLayout layout;
  WorldModel world;
  FeatureMap features;
};

RandomInstance random_instance(std::mt19937_64& rng, int max_side,
                               int max_horizon, int max_dim);
WeightVector random_weights(std::mt19937_64& rng, int dim, double lo,
                            double hi);

struct OracleCheckResult {
  std::string name;
  bool passed = false;
  double worst_error = 0.0;
  double budget = 0.0;
  double seconds = 0.0;
  std::string detail;
};

// The four verification families, with the sizes the repository is gated on.
OracleCheckResult check_planner_oracle(std::uint64_t seed);
OracleCheckResult check_inference_grid_oracle(std::uint64_t seed);
OracleCheckResult check_shift_invariance(std::uint64_t seed);
OracleCheckResult check_maximin_exactness(std::uint64_t seed);

std::vector<OracleCheckResult> run_oracle_checks(std::uint64_t seed);
bool all_passed(const std::vector<OracleCheckResult>& results);
std::string format_check_line(const OracleCheckResult& r);

}  // namespace ird

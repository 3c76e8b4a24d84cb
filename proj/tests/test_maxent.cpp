#include <doctest.h>

#include "ird/enumerate.hpp"
#include "ird/maxent.hpp"
#include "ird/oracle_checks.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace ird;

namespace {

TerrainLayout plain_layout(int width, int height) {
  TerrainLayout layout;
  layout.width = width;
  layout.height = height;
  layout.cells.assign(static_cast<std::size_t>(width) * height, Terrain::Dirt);
  return layout;
}

double suffix_sum(const Trajectory& traj, const Eigen::VectorXd& rewards) {
  double acc = 0.0;
  for (auto it = traj.states.rbegin(); it != traj.states.rend(); ++it) {
    acc = rewards[*it] + acc;
  }
  return acc;
}

}  // namespace

TEST_CASE("zero weights give the uniform trajectory distribution") {
  const WorldModel world = build_world(plain_layout(3, 2), 4, 0);
  const FeatureMap fmap(Eigen::MatrixXd::Random(2, 6));
  const MaxEntSolution sol =
      soft_value_iteration(world, fmap, Eigen::VectorXd::Zero(2));
  CHECK(sol.log_partition == doctest::Approx(4 * std::log(4.0)).epsilon(1e-12));
  for (const Eigen::MatrixXd& log_probs : sol.action_log_probs) {
    CHECK((log_probs.array() - std::log(0.25)).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("single-state world has a closed-form log partition") {
  const WorldModel world = build_world(plain_layout(1, 1), 6, 0);
  Eigen::MatrixXd f(2, 1);
  f.col(0) << 0.7, -1.3;
  const FeatureMap fmap(f);
  WeightVector w(2);
  w << 2.0, 0.5;
  const MaxEntSolution sol = soft_value_iteration(world, fmap, w);
  const double expect = 7.0 * w.dot(f.col(0)) + 6.0 * std::log(4.0);
  CHECK(sol.log_partition == doctest::Approx(expect).epsilon(1e-12));
  const Eigen::VectorXd phi = expected_feature_counts(sol, world, fmap);
  CHECK(phi.isApprox(7.0 * f.col(0), 1e-12));
}

TEST_CASE("log partition and feature counts match enumeration") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 5; ++trial) {
    const RandomInstance inst = random_instance(rng, 4, 5, 4);
    const WeightVector w = random_weights(rng, inst.features.dim(), -2.0, 2.0);
    const MaxEntSolution sol =
        soft_value_iteration(inst.world, inst.features, w);
    CHECK(sol.log_partition ==
          doctest::Approx(enum_log_partition(inst.world, inst.features, w))
              .epsilon(1e-9));
    const Eigen::VectorXd phi =
        expected_feature_counts(sol, inst.world, inst.features);
    const Eigen::VectorXd ref =
        enum_expected_features(inst.world, inst.features, w);
    CHECK((phi - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("fast evaluator agrees with the reference recursion") {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 5; ++trial) {
    const RandomInstance inst = random_instance(rng, 4, 5, 4);
    const WeightVector w = random_weights(rng, inst.features.dim(), -2.0, 2.0);
    const MaxEntSolution sol =
        soft_value_iteration(inst.world, inst.features, w);
    const Eigen::VectorXd phi =
        expected_feature_counts(sol, inst.world, inst.features);
    MaxEntEvaluator eval(inst.world, inst.features);
    CHECK(eval.log_partition(w) ==
          doctest::Approx(sol.log_partition).epsilon(1e-10));
    Eigen::VectorXd fast_phi;
    const double log_z = eval.log_partition_and_features(w, fast_phi);
    CHECK(log_z == doctest::Approx(sol.log_partition).epsilon(1e-10));
    CHECK((fast_phi - phi).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("action probabilities are normalized") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 5; ++trial) {
    const RandomInstance inst = random_instance(rng, 4, 4, 4);
    const WeightVector w = random_weights(rng, inst.features.dim(), -3.0, 3.0);
    const MaxEntSolution sol =
        soft_value_iteration(inst.world, inst.features, w);
    for (const Eigen::MatrixXd& log_probs : sol.action_log_probs) {
      const Eigen::VectorXd sums = log_probs.array().exp().colwise().sum();
      CHECK((sums.array() - 1.0).abs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("feature expectations respect mirror symmetry at zero weights") {
  const WorldModel world = build_world(plain_layout(3, 3), 4, 4);
  const FeatureMap fmap(Eigen::MatrixXd::Identity(9, 9));
  const MaxEntSolution sol =
      soft_value_iteration(world, fmap, Eigen::VectorXd::Zero(9));
  const Eigen::VectorXd visits = expected_feature_counts(sol, world, fmap);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) {
      const int mirrored = world.state_at(2 - x, y);
      CHECK(visits[world.state_at(x, y)] ==
            doctest::Approx(visits[mirrored]).epsilon(1e-12));
    }
  }
}

TEST_CASE("feature shifts leave the policy unchanged and shift the counts") {
  std::mt19937_64 rng(104);
  const RandomInstance inst = random_instance(rng, 3, 4, 3);
  const WeightVector w = random_weights(rng, inst.features.dim(), -2.0, 2.0);
  Eigen::VectorXd offset(inst.features.dim());
  for (int i = 0; i < offset.size(); ++i) offset[i] = 0.5 - 0.1 * i;
  const FeatureMap shifted = inst.features.shifted(offset);

  const MaxEntSolution base = soft_value_iteration(inst.world, inst.features, w);
  const MaxEntSolution moved = soft_value_iteration(inst.world, shifted, w);
  for (std::size_t t = 0; t < base.action_log_probs.size(); ++t) {
    CHECK((base.action_log_probs[t] - moved.action_log_probs[t])
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
  const Eigen::VectorXd phi_base =
      expected_feature_counts(base, inst.world, inst.features);
  const Eigen::VectorXd phi_moved =
      expected_feature_counts(moved, inst.world, shifted);
  const Eigen::VectorXd expect =
      phi_base + (inst.world.horizon + 1.0) * offset;
  CHECK((phi_moved - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("expected reward is nondecreasing in the rationality scale") {
  std::mt19937_64 rng(105);
  const RandomInstance inst = random_instance(rng, 3, 4, 3);
  const WeightVector w = random_weights(rng, inst.features.dim(), -1.5, 1.5);
  double prev = -std::numeric_limits<double>::infinity();
  for (double c : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const MaxEntSolution sol =
        soft_value_iteration(inst.world, inst.features, WeightVector(c * w));
    const double value =
        w.dot(expected_feature_counts(sol, inst.world, inst.features));
    CHECK(value >= prev - 1e-9);
    prev = value;
  }
}

TEST_CASE("zero weights plan the all-up trajectory") {
  const WorldModel world = build_world(plain_layout(3, 3), 4, 4);
  const FeatureMap fmap(Eigen::MatrixXd::Random(2, 9));
  const Trajectory traj =
      optimal_trajectory(world, fmap, Eigen::VectorXd::Zero(2));
  for (Action a : traj.actions) CHECK(a == Action::Up);
}

TEST_CASE("forced optimum in a two-cell world") {
  const WorldModel world = build_world(plain_layout(2, 1), 3, 0);
  Eigen::MatrixXd f(1, 2);
  f << 0.0, 1.0;
  const FeatureMap fmap(f);
  WeightVector w(1);
  w << 1.0;
  const Trajectory traj = optimal_trajectory(world, fmap, w);
  CHECK(traj.states == std::vector<StateId>{0, 1, 1, 1});
  CHECK(traj.actions[0] == Action::Right);
  // Staying actions tie; the fixed order picks "up".
  CHECK(traj.actions[1] == Action::Up);
  CHECK(traj.actions[2] == Action::Up);
}

TEST_CASE("hard planner attains the enumerated maximum exactly") {
  std::mt19937_64 rng(106);
  for (int trial = 0; trial < 10; ++trial) {
    const RandomInstance inst = random_instance(rng, 4, 5, 4);
    const WeightVector w = random_weights(rng, inst.features.dim(), -2.0, 2.0);
    const Eigen::VectorXd rewards = inst.features.state_rewards(w);
    const Trajectory traj = optimal_trajectory(inst.world, inst.features, w);
    const double attained = suffix_sum(traj, rewards);
    CHECK(attained == enum_max_state_reward_sum(inst.world, rewards));
    CHECK(trajectory_reward(traj, w, inst.features) ==
          doctest::Approx(attained).epsilon(1e-9));
  }
}

TEST_CASE("state-reward planner maximizes arbitrary scalar rewards") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 5; ++trial) {
    const RandomInstance inst = random_instance(rng, 4, 4, 2);
    Eigen::VectorXd rewards(inst.world.num_states());
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int s = 0; s < rewards.size(); ++s) rewards[s] = normal(rng);
    const Trajectory traj = plan_with_state_rewards(inst.world, rewards);
    CHECK(suffix_sum(traj, rewards) ==
          enum_max_state_reward_sum(inst.world, rewards));
  }
}

TEST_CASE("planners reject malformed weights") {
  const WorldModel world = build_world(plain_layout(2, 2), 2, 0);
  const FeatureMap fmap(Eigen::MatrixXd::Ones(2, 4));
  WeightVector inf2(2);
  inf2 << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(soft_value_iteration(world, fmap, inf2),
                  std::invalid_argument);
  CHECK_THROWS_AS(optimal_trajectory(world, fmap, inf2), std::invalid_argument);
  WeightVector bad(3);
  bad << 1, 2, 3;
  CHECK_THROWS_AS(soft_value_iteration(world, fmap, bad),
                  std::invalid_argument);
}

TEST_CASE("feature-count pass validates the solution shape") {
  const WorldModel small = build_world(plain_layout(2, 2), 2, 0);
  const WorldModel large = build_world(plain_layout(3, 3), 2, 0);
  const FeatureMap small_map(Eigen::MatrixXd::Ones(2, 4));
  const FeatureMap large_map(Eigen::MatrixXd::Ones(2, 9));
  const MaxEntSolution sol =
      soft_value_iteration(small, small_map, Eigen::VectorXd::Zero(2));
  CHECK_THROWS_AS(expected_feature_counts(sol, large, large_map),
                  std::invalid_argument);
}

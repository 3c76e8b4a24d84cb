#include "ird/risk.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ird {

const char* risk_granularity_name(RiskGranularity g) {
  return g == RiskGranularity::TrajectoryWide ? "trajectory-wide"
                                              : "per-timestep";
}

const char* risk_baseline_name(RiskBaseline b) {
  switch (b) {
    case RiskBaseline::InitialState:
      return "initial-state";
    case RiskBaseline::TrainingFeatureCounts:
      return "training-feature-counts";
    case RiskBaseline::LogPartition:
      return "log-partition";
  }
  return "?";
}

namespace {

void check_particles(const std::vector<WeightVector>& particles,
                     const FeatureMap& fmap) {
  if (particles.empty()) {
    throw std::invalid_argument("need at least one particle");
  }
  for (const WeightVector& w : particles) {
    if (w.size() != fmap.dim()) {
      throw std::invalid_argument("particle dimension does not match features");
    }
  }
}

// Particles as columns of a dim x K matrix for batched scoring.
Eigen::MatrixXd stack_particles(const std::vector<WeightVector>& particles) {
  Eigen::MatrixXd W(particles[0].size(), particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) W.col(i) = particles[i];
  return W;
}

}  // namespace

Eigen::VectorXd compute_offsets(const std::vector<WeightVector>& particles,
                                RiskBaseline baseline, const WorldModel& world,
                                const FeatureMap& fmap,
                                const Eigen::VectorXd* training_feature_counts) {
  check_particles(particles, fmap);
  const int k = static_cast<int>(particles.size());
  Eigen::VectorXd offsets(k);
  switch (baseline) {
    case RiskBaseline::InitialState: {
      const Eigen::VectorXd phi0 = fmap.state(world.start);
      for (int i = 0; i < k; ++i) {
        offsets[i] = (world.horizon + 1) * particles[i].dot(phi0);
      }
      break;
    }
    case RiskBaseline::TrainingFeatureCounts: {
      if (training_feature_counts == nullptr) {
        throw std::invalid_argument(
            "training-feature-counts baseline needs the training counts");
      }
      if (training_feature_counts->size() != fmap.dim()) {
        throw std::invalid_argument("training feature counts dimension mismatch");
      }
      for (int i = 0; i < k; ++i) {
        offsets[i] = particles[i].dot(*training_feature_counts);
      }
      break;
    }
    case RiskBaseline::LogPartition: {
      MaxEntEvaluator eval(world, fmap);
      for (int i = 0; i < k; ++i) offsets[i] = eval.log_partition(particles[i]);
      break;
    }
  }
  return offsets;
}

double trajectory_minimax_score(const Trajectory& traj, const FeatureMap& fmap,
                                const std::vector<WeightVector>& particles,
                                const Eigen::VectorXd& offsets) {
  check_particles(particles, fmap);
  if (offsets.size() != static_cast<int>(particles.size())) {
    throw std::invalid_argument("one offset per particle required");
  }
  const Eigen::VectorXd phi = trajectory_features(traj, fmap);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < particles.size(); ++i) {
    worst = std::min(worst, particles[i].dot(phi) - offsets[i]);
  }
  return worst;
}

Eigen::VectorXd pessimistic_state_rewards(
    const FeatureMap& fmap, const std::vector<WeightVector>& particles,
    const Eigen::VectorXd& offsets, int horizon) {
  check_particles(particles, fmap);
  if (offsets.size() != static_cast<int>(particles.size())) {
    throw std::invalid_argument("one offset per particle required");
  }
  const Eigen::MatrixXd W = stack_particles(particles);
  Eigen::MatrixXd scores = fmap.matrix().transpose() * W;  // S x K
  scores.rowwise() -= (offsets / (horizon + 1)).transpose();
  return scores.rowwise().minCoeff();
}

Trajectory plan_per_timestep_minimax(const WorldModel& world,
                                     const FeatureMap& fmap,
                                     const std::vector<WeightVector>& particles,
                                     const Eigen::VectorXd& offsets) {
  return plan_with_state_rewards(
      world,
      pessimistic_state_rewards(fmap, particles, offsets, world.horizon));
}

Trajectory plan_trajectory_minimax(const WorldModel& world,
                                   const FeatureMap& fmap,
                                   const std::vector<WeightVector>& particles,
                                   const Eigen::VectorXd& offsets,
                                   TrajectoryMinimaxReport* report) {
  check_particles(particles, fmap);
  if (offsets.size() != static_cast<int>(particles.size())) {
    throw std::invalid_argument("one offset per particle required");
  }
  TrajectoryMinimaxReport local;
  TrajectoryMinimaxReport& rep = report != nullptr ? *report : local;
  rep = TrajectoryMinimaxReport{};

  const long long count = trajectory_count(world.horizon);
  if (count > 0 && count <= kEnumerationGuard) {
    rep.exact = true;
    Trajectory best;
    double best_score = -std::numeric_limits<double>::infinity();
    for_each_trajectory(world, [&](const Trajectory& traj) {
      const double score =
          trajectory_minimax_score(traj, fmap, particles, offsets);
      if (best.states.empty() || score > best_score) {
        best = traj;
        best_score = score;
      }
    });
    rep.score = best_score;
    rep.improved_over_mean_plan = true;
    return best;
  }

  // Iterated best response. Seed with the plan for the mean particle, then
  // repeatedly plan against whichever particle attains the current minimum.
  const Eigen::MatrixXd W = stack_particles(particles);
  const int k = static_cast<int>(particles.size());
  Eigen::VectorXd mean_w = W.rowwise().mean();
  const double mean_offset = offsets.mean();
  auto plan_against = [&](const WeightVector& w, double c) {
    Eigen::VectorXd r = fmap.matrix().transpose() * w;
    r.array() -= c / (world.horizon + 1);
    return plan_with_state_rewards(world, r);
  };
  auto min_particle = [&](const Trajectory& traj) {
    const Eigen::VectorXd phi = trajectory_features(traj, fmap);
    int arg = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      const double v = particles[i].dot(phi) - offsets[i];
      if (v < worst) {
        worst = v;
        arg = i;
      }
    }
    return std::pair<int, double>(arg, worst);
  };

  Trajectory current = plan_against(mean_w, mean_offset);
  auto [worst_i, worst_v] = min_particle(current);
  Trajectory best = current;
  double best_score = worst_v;
  const double seed_score = worst_v;

  std::vector<bool> active(k, false);
  constexpr int kMaxRounds = 64;
  for (int round = 0; round < kMaxRounds; ++round) {
    if (active[worst_i]) break;  // fixed point: minimizer already answered
    active[worst_i] = true;
    ++rep.best_response_rounds;
    current = plan_against(particles[worst_i], offsets[worst_i]);
    std::tie(worst_i, worst_v) = min_particle(current);
    if (worst_v > best_score) {
      best = current;
      best_score = worst_v;
    }
  }
  rep.score = best_score;
  rep.improved_over_mean_plan = best_score > seed_score;
  return best;
}

Trajectory plan_risk_averse(const WorldModel& world, const FeatureMap& fmap,
                            const RiskConfig& cfg,
                            const Eigen::VectorXd* training_feature_counts,
                            TrajectoryMinimaxReport* report) {
  const Eigen::VectorXd offsets = compute_offsets(
      cfg.particles, cfg.baseline, world, fmap, training_feature_counts);
  if (cfg.granularity == RiskGranularity::PerTimestep) {
    Trajectory traj =
        plan_per_timestep_minimax(world, fmap, cfg.particles, offsets);
    if (report != nullptr) {
      *report = TrajectoryMinimaxReport{};
      report->exact = true;
      report->score =
          trajectory_minimax_score(traj, fmap, cfg.particles, offsets);
    }
    return traj;
  }
  return plan_trajectory_minimax(world, fmap, cfg.particles, offsets, report);
}

}  // namespace ird

#include "ird/oracle_checks.hpp"

#include "ird/enumerate.hpp"
#include "ird/inference.hpp"
#include "ird/maxent.hpp"
#include "ird/risk.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

namespace ird {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// sum_t state_rewards[s_t], accumulated suffix-first to mirror backward
// value iteration.
double suffix_reward_sum(const Trajectory& traj,
                         const Eigen::VectorXd& state_rewards) {
  double sum = 0.0;
  for (auto it = traj.states.rbegin(); it != traj.states.rend(); ++it) {
    sum = state_rewards[*it] + sum;
  }
  return sum;
}

}  // namespace

double enum_log_partition(const WorldModel& world, const FeatureMap& fmap,
                          const WeightVector& w) {
  double max_r = -kInf;
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(trajectory_count(world.horizon)));
  for_each_trajectory(world, [&](const Trajectory& traj) {
    const double r = trajectory_reward(traj, w, fmap);
    rewards.push_back(r);
    max_r = std::max(max_r, r);
  });
  double acc = 0.0;
  for (double r : rewards) acc += std::exp(r - max_r);
  return max_r + std::log(acc);
}

Eigen::VectorXd enum_expected_features(const WorldModel& world,
                                       const FeatureMap& fmap,
                                       const WeightVector& w) {
  const double log_z = enum_log_partition(world, fmap, w);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(fmap.dim());
  for_each_trajectory(world, [&](const Trajectory& traj) {
    const Eigen::VectorXd f = trajectory_features(traj, fmap);
    phi += std::exp(w.dot(f) - log_z) * f;
  });
  return phi;
}

double enum_max_state_reward_sum(const WorldModel& world,
                                 const Eigen::VectorXd& state_rewards) {
  double best = -kInf;
  for_each_trajectory(world, [&](const Trajectory& traj) {
    best = std::max(best, suffix_reward_sum(traj, state_rewards));
  });
  return best;
}

RandomInstance random_instance(std::mt19937_64& rng, int max_side,
                               int max_horizon, int max_dim) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::uniform_int_distribution<int> hor(1, max_horizon);
  std::uniform_int_distribution<int> dims(1, max_dim);
  std::uniform_int_distribution<int> terrain(0, kNumTerrains - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  RandomInstance inst;
  inst.layout.width = side(rng);
  inst.layout.height = side(rng);
  inst.layout.cells.resize(inst.layout.num_cells());
  for (Terrain& t : inst.layout.cells) {
    t = static_cast<Terrain>(terrain(rng));
  }
  std::uniform_int_distribution<int> cell(0, inst.layout.num_cells() - 1);
  inst.world = build_world(inst.layout, hor(rng), cell(rng));
  const int dim = dims(rng);
  Eigen::MatrixXd values(dim, inst.layout.num_cells());
  for (int c = 0; c < values.cols(); ++c) {
    for (int r = 0; r < values.rows(); ++r) values(r, c) = normal(rng);
  }
  inst.features = FeatureMap(std::move(values));
  return inst;
}

WeightVector random_weights(std::mt19937_64& rng, int dim, double lo,
                            double hi) {
  std::uniform_real_distribution<double> unif(lo, hi);
  WeightVector w(dim);
  for (int i = 0; i < dim; ++i) w[i] = unif(rng);
  return w;
}

OracleCheckResult check_planner_oracle(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  OracleCheckResult res;
  res.name = "planner-oracle";
  res.budget = 1e-9;
  res.passed = true;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < 50 && res.passed; ++k) {
    const RandomInstance inst = random_instance(rng, 4, 5, 6);
    const WeightVector w = random_weights(rng, inst.features.dim(), -2.0, 2.0);

    const double ref_log_z = enum_log_partition(inst.world, inst.features, w);
    const Eigen::VectorXd ref_phi =
        enum_expected_features(inst.world, inst.features, w);

    const MaxEntSolution sol =
        soft_value_iteration(inst.world, inst.features, w);
    const Eigen::VectorXd phi =
        expected_feature_counts(sol, inst.world, inst.features);

    MaxEntEvaluator eval(inst.world, inst.features);
    Eigen::VectorXd fast_phi;
    const double fast_log_z = eval.log_partition_and_features(w, fast_phi);

    res.worst_error = std::max(res.worst_error,
                               std::abs(sol.log_partition - ref_log_z));
    res.worst_error = std::max(res.worst_error,
                               std::abs(fast_log_z - ref_log_z));
    res.worst_error = std::max(
        res.worst_error, (phi - ref_phi).cwiseAbs().maxCoeff());
    res.worst_error = std::max(
        res.worst_error, (fast_phi - ref_phi).cwiseAbs().maxCoeff());
    if (res.worst_error > res.budget) {
      res.passed = false;
      res.detail = "soft planner disagrees with enumeration on instance " +
                   std::to_string(k);
      break;
    }

    const Eigen::VectorXd rewards = inst.features.state_rewards(w);
    const Trajectory best = optimal_trajectory(inst.world, inst.features, w);
    const double best_sum = suffix_reward_sum(best, rewards);
    const double ref_best = enum_max_state_reward_sum(inst.world, rewards);
    if (best_sum != ref_best) {
      res.passed = false;
      res.worst_error = std::max(res.worst_error, std::abs(best_sum - ref_best));
      res.detail = "hard planner missed the enumerated maximum on instance " +
                   std::to_string(k);
      break;
    }
  }
  res.seconds = elapsed_since(t0);
  return res;
}

namespace {

// Trajectory features of every trajectory of a small world, cached as
// columns; the basis of the independent posterior-density oracle.
struct EnumCache {
  Eigen::MatrixXd features;  // dim x T

  EnumCache(const WorldModel& world, const FeatureMap& fmap) {
    const std::vector<Trajectory> all = enumerate_trajectories(world);
    features.resize(fmap.dim(), static_cast<int>(all.size()));
    for (std::size_t i = 0; i < all.size(); ++i) {
      features.col(static_cast<int>(i)) = trajectory_features(all[i], fmap);
    }
  }

  double log_partition(const WeightVector& w) const {
    const Eigen::VectorXd r = features.transpose() * w;
    const double m = r.maxCoeff();
    return m + std::log((r.array() - m).exp().sum());
  }

  Eigen::VectorXd expected_features(const WeightVector& w) const {
    const Eigen::VectorXd r = features.transpose() * w;
    const double log_z = log_partition(w);
    const Eigen::VectorXd p = (r.array() - log_z).exp();
    return features * p;
  }
};

double log_sum_exp(const std::vector<double>& xs) {
  double m = -kInf;
  for (double x : xs) m = std::max(m, x);
  if (m == -kInf) return -kInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

OracleCheckResult check_inference_grid_oracle(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  OracleCheckResult res;
  res.name = "inference-grid-oracle";
  res.budget = 1e-8;
  res.passed = true;

  constexpr int kInstances = 10;
  constexpr int kDensityGrid = 21;
  constexpr int kMeanGrid = 201;
  constexpr int kChains = 32;
  constexpr double kLo = -2.0;
  constexpr double kHi = 2.0;
  constexpr double kBeta = 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> side(2, 3);
  std::uniform_int_distribution<int> hor(3, 4);
  std::uniform_int_distribution<int> terrain(0, kNumTerrains - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (int k = 0; k < kInstances && res.passed; ++k) {
    TerrainLayout layout;
    layout.width = side(rng);
    layout.height = side(rng);
    layout.cells.resize(layout.num_cells());
    for (Terrain& t : layout.cells) t = static_cast<Terrain>(terrain(rng));
    std::uniform_int_distribution<int> cell(0, layout.num_cells() - 1);
    const WorldModel world = build_world(layout, hor(rng), cell(rng));
    Eigen::MatrixXd values(2, layout.num_cells());
    for (int c = 0; c < values.cols(); ++c) {
      values(0, c) = normal(rng);
      values(1, c) = normal(rng);
    }
    const FeatureMap fmap(std::move(values));
    const WeightVector proxy_w = random_weights(rng, 2, kLo, kHi);
    const ProxyObservation proxy(proxy_w, world, fmap, kBeta);
    const Prior prior = Prior::uniform_box(2, kLo, kHi);
    const NormalizerCandidates cands = draw_normalizer_candidates(
        prior, 8, proxy, derive_seed(seed, 0xca, k));

    const EnumCache cache(world, fmap);
    const Eigen::VectorXd ref_proxy_phi = cache.expected_features(proxy_w);
    std::vector<Eigen::VectorXd> ref_cand_phi;
    ref_cand_phi.reserve(cands.weights.size());
    for (const WeightVector& cw : cands.weights) {
      ref_cand_phi.push_back(cache.expected_features(cw));
    }

    const auto oracle_density = [&](const WeightVector& w, ZMode mode) {
      const double loglik = kBeta * w.dot(ref_proxy_phi);
      double log_z;
      if (mode == ZMode::MaxEntZ) {
        log_z = kBeta * cache.log_partition(w);
      } else {
        std::vector<double> terms;
        terms.reserve(ref_cand_phi.size() + 1);
        terms.push_back(kBeta * w.dot(cache.expected_features(w)));
        for (const Eigen::VectorXd& phi : ref_cand_phi) {
          terms.push_back(kBeta * w.dot(phi));
        }
        log_z = log_sum_exp(terms);
      }
      return loglik - log_z + prior.log_density(w);
    };

    for (ZMode mode : {ZMode::SampleZ, ZMode::MaxEntZ}) {
      PosteriorDensity density(proxy, prior, mode,
                               mode == ZMode::SampleZ ? &cands : nullptr);

      // Normalized log densities over the evaluation grid must agree.
      std::vector<double> lib_vals, ref_vals;
      WeightVector w(2);
      for (int i = 0; i < kDensityGrid; ++i) {
        for (int j = 0; j < kDensityGrid; ++j) {
          w[0] = kLo + (kHi - kLo) * i / (kDensityGrid - 1);
          w[1] = kLo + (kHi - kLo) * j / (kDensityGrid - 1);
          lib_vals.push_back(density.log_density(w));
          ref_vals.push_back(oracle_density(w, mode));
        }
      }
      const double lib_norm = log_sum_exp(lib_vals);
      const double ref_norm = log_sum_exp(ref_vals);
      for (std::size_t i = 0; i < lib_vals.size(); ++i) {
        const double err =
            std::abs((lib_vals[i] - lib_norm) - (ref_vals[i] - ref_norm));
        res.worst_error = std::max(res.worst_error, err);
      }
      if (res.worst_error > res.budget) {
        res.passed = false;
        res.detail = "grid-normalized densities disagree (instance " +
                     std::to_string(k) + ", " + z_mode_name(mode) + ")";
        break;
      }

      // Midpoint-quadrature oracle mean on a refined mesh of the same box.
      Eigen::Vector2d ref_mean = Eigen::Vector2d::Zero();
      {
        std::vector<double> vals;
        vals.reserve(kMeanGrid * kMeanGrid);
        std::vector<Eigen::Vector2d> points;
        points.reserve(kMeanGrid * kMeanGrid);
        const double h = (kHi - kLo) / kMeanGrid;
        for (int i = 0; i < kMeanGrid; ++i) {
          for (int j = 0; j < kMeanGrid; ++j) {
            w[0] = kLo + (i + 0.5) * h;
            w[1] = kLo + (j + 0.5) * h;
            vals.push_back(oracle_density(w, mode));
            points.emplace_back(w[0], w[1]);
          }
        }
        const double norm = log_sum_exp(vals);
        for (std::size_t i = 0; i < vals.size(); ++i) {
          ref_mean += std::exp(vals[i] - norm) * points[i];
        }
      }

      // Independent short chains; the spread of their means estimates the
      // Monte-Carlo standard error.
      McmcConfig mcmc;
      mcmc.chain_length = 8000;
      mcmc.burn_in = 2000;
      mcmc.thinning = 5;
      mcmc.proposal_stddev = 0.4;
      std::vector<Eigen::Vector2d> chain_means;
      for (int c = 0; c < kChains; ++c) {
        mcmc.seed = derive_seed(seed, 0x4d43, k * 64 + c * 2 +
                                              (mode == ZMode::SampleZ ? 0 : 1));
        const PosteriorSamples post = sample_posterior(
            proxy, prior, mode, mcmc,
            mode == ZMode::SampleZ ? &cands : nullptr);
        Eigen::Vector2d mean = Eigen::Vector2d::Zero();
        for (const WeightVector& s : post.samples) mean += s.head<2>();
        chain_means.push_back(mean / static_cast<double>(post.samples.size()));
      }
      Eigen::Vector2d overall = Eigen::Vector2d::Zero();
      for (const auto& m : chain_means) overall += m;
      overall /= kChains;
      Eigen::Vector2d var = Eigen::Vector2d::Zero();
      for (const auto& m : chain_means) {
        var += (m - overall).cwiseProduct(m - overall);
      }
      var /= (kChains - 1);
      const Eigen::Vector2d se = (var / kChains).cwiseSqrt();
      for (int d = 0; d < 2; ++d) {
        if (std::abs(overall[d] - ref_mean[d]) > 3.0 * se[d]) {
          res.passed = false;
          res.detail = "MCMC mean outside 3 standard errors (instance " +
                       std::to_string(k) + ", " + z_mode_name(mode) + ", dim " +
                       std::to_string(d) + ")";
          break;
        }
      }
      if (!res.passed) break;
    }
  }
  res.seconds = elapsed_since(t0);
  return res;
}

OracleCheckResult check_shift_invariance(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  OracleCheckResult res;
  res.name = "feature-shift-invariance";
  res.budget = 1e-8;
  res.passed = true;

  constexpr int kShifts = 20;
  constexpr int kPairs = 20;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> beta_draw(0.5, 2.0);
  std::uniform_real_distribution<double> shift_draw(-1.0, 1.0);

  for (int k = 0; k < kShifts && res.passed; ++k) {
    const RandomInstance inst = random_instance(rng, 4, 4, 4);
    const int dim = inst.features.dim();
    const double beta = beta_draw(rng);
    const WeightVector proxy_w = random_weights(rng, dim, -2.0, 2.0);
    const Prior prior = Prior::uniform_box(dim, -2.0, 2.0);

    Eigen::VectorXd offset(dim);
    for (int i = 0; i < dim; ++i) offset[i] = shift_draw(rng);
    const FeatureMap shifted = inst.features.shifted(offset);

    const ProxyObservation base(proxy_w, inst.world, inst.features, beta);
    const ProxyObservation moved(proxy_w, inst.world, shifted, beta);

    std::vector<WeightVector> cand_weights;
    for (int i = 0; i < 8; ++i) {
      cand_weights.push_back(random_weights(rng, dim, -2.0, 2.0));
    }
    const NormalizerCandidates base_cands =
        candidates_for_weights(cand_weights, base);
    const NormalizerCandidates moved_cands =
        candidates_for_weights(cand_weights, moved);

    for (ZMode mode : {ZMode::SampleZ, ZMode::MaxEntZ}) {
      PosteriorDensity base_density(
          base, prior, mode, mode == ZMode::SampleZ ? &base_cands : nullptr);
      PosteriorDensity moved_density(
          moved, prior, mode, mode == ZMode::SampleZ ? &moved_cands : nullptr);
      for (int p = 0; p < kPairs; ++p) {
        const WeightVector wa = random_weights(rng, dim, -2.0, 2.0);
        const WeightVector wb = random_weights(rng, dim, -2.0, 2.0);
        const double before = base_density.log_density(wa) -
                              base_density.log_density(wb);
        const double after = moved_density.log_density(wa) -
                             moved_density.log_density(wb);
        res.worst_error = std::max(res.worst_error, std::abs(after - before));
      }
      if (res.worst_error > res.budget) {
        res.passed = false;
        res.detail = std::string("density differences moved under a feature "
                                 "shift (") +
                     z_mode_name(mode) + ", shift " + std::to_string(k) + ")";
        break;
      }
    }
  }
  res.seconds = elapsed_since(t0);
  return res;
}

OracleCheckResult check_maximin_exactness(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  OracleCheckResult res;
  res.name = "maximin-exactness";
  res.budget = 0.0;
  res.passed = true;

  constexpr std::array<RiskBaseline, 3> kBaselines = {
      RiskBaseline::InitialState, RiskBaseline::TrainingFeatureCounts,
      RiskBaseline::LogPartition};

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> particles_draw(1, 5);

  for (int k = 0; k < 25 && res.passed; ++k) {
    const RandomInstance inst = random_instance(rng, 4, 5, 6);
    const int dim = inst.features.dim();
    const int n_particles = particles_draw(rng);
    std::vector<WeightVector> particles;
    for (int i = 0; i < n_particles; ++i) {
      particles.push_back(random_weights(rng, dim, -2.0, 2.0));
    }
    const Eigen::VectorXd train_counts =
        random_weights(rng, dim, 0.0, inst.world.horizon + 1.0);
    const RiskBaseline baseline = kBaselines[k % kBaselines.size()];
    const Eigen::VectorXd offsets = compute_offsets(
        particles, baseline, inst.world, inst.features, &train_counts);

    // Trajectory-wide: exhaustive argmax-min, scored independently.
    Trajectory ref_best;
    double ref_best_score = -kInf;
    std::vector<Trajectory> all = enumerate_trajectories(inst.world);
    for (const Trajectory& traj : all) {
      const Eigen::VectorXd phi = trajectory_features(traj, inst.features);
      double worst = kInf;
      for (int i = 0; i < n_particles; ++i) {
        worst = std::min(worst, particles[i].dot(phi) - offsets[i]);
      }
      if (ref_best.states.empty() || worst > ref_best_score) {
        ref_best = traj;
        ref_best_score = worst;
      }
    }
    TrajectoryMinimaxReport report;
    const Trajectory tw = plan_trajectory_minimax(inst.world, inst.features,
                                                  particles, offsets, &report);
    const double tw_score =
        trajectory_minimax_score(tw, inst.features, particles, offsets);
    if (!report.exact || tw_score != ref_best_score || !(tw == ref_best)) {
      res.passed = false;
      res.worst_error = std::abs(tw_score - ref_best_score);
      res.detail = "trajectory-wide planner missed the exhaustive optimum "
                   "on instance " +
                   std::to_string(k);
      break;
    }

    // Per-timestep: value iteration must attain the enumerated maximum of
    // its own objective.
    const Eigen::VectorXd pess = pessimistic_state_rewards(
        inst.features, particles, offsets, inst.world.horizon);
    const Trajectory pt =
        plan_per_timestep_minimax(inst.world, inst.features, particles, offsets);
    const double pt_sum = suffix_reward_sum(pt, pess);
    const double pt_ref = enum_max_state_reward_sum(inst.world, pess);
    if (pt_sum != pt_ref) {
      res.passed = false;
      res.worst_error = std::abs(pt_sum - pt_ref);
      res.detail = "per-timestep planner missed the enumerated maximum on "
                   "instance " +
                   std::to_string(k);
      break;
    }

    // Dominance: the per-timestep objective never exceeds the
    // trajectory-wide objective, for every trajectory.
    for (const Trajectory& traj : all) {
      const double lhs = suffix_reward_sum(traj, pess);
      const double rhs =
          trajectory_minimax_score(traj, inst.features, particles, offsets);
      const double slack = 1e-9 * std::max(1.0, std::abs(rhs));
      if (lhs > rhs + slack) {
        res.passed = false;
        res.worst_error = lhs - rhs;
        res.detail = "dominance inequality violated on instance " +
                     std::to_string(k);
        break;
      }
    }
  }
  res.seconds = elapsed_since(t0);
  return res;
}

std::vector<OracleCheckResult> run_oracle_checks(std::uint64_t seed) {
  std::vector<OracleCheckResult> results;
  results.push_back(check_planner_oracle(derive_seed(seed, 0x01)));
  results.push_back(check_inference_grid_oracle(derive_seed(seed, 0x02)));
  results.push_back(check_shift_invariance(derive_seed(seed, 0x03)));
  results.push_back(check_maximin_exactness(derive_seed(seed, 0x04)));
  return results;
}

bool all_passed(const std::vector<OracleCheckResult>& results) {
  for (const OracleCheckResult& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

std::string format_check_line(const OracleCheckResult& r) {
  char buf[256];
  if (r.passed) {
    std::snprintf(buf, sizeof(buf), "PASS %-24s worst %.3g (budget %.3g) %.1fs",
                  r.name.c_str(), r.worst_error, r.budget, r.seconds);
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "FAIL %-24s worst %.3g (budget %.3g) %.1fs: %s",
                r.name.c_str(), r.worst_error, r.budget, r.seconds,
                r.detail.c_str());
  return buf;
}

}  // namespace ird

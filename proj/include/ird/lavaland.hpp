#pragma once

#include "ird/features.hpp"
#include "ird/terrain.hpp"
#include "ird/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <random>
#include <string>

namespace ird {

enum class MapPhase { Train, Test };

const char* map_phase_name(MapPhase phase);

// Metropolis map sampler configuration. target_ratios is indexed by terrain;
// the target-terrain entry is ignored (a single target cell is placed after
// sampling) and any shortfall from 1 is absorbed by dirt.
struct MapGenConfig {
  int width = 10;
  int height = 10;
  std::array<double, kNumTerrains> target_ratios{0.7, 0.3, 0.0, 0.0};
  double lambda_same = 1.0;
  double lambda_ratio = 5000.0;  // 50 * cell count at the default 10x10
  int metropolis_steps = 5000;
  std::uint64_t seed = 0;
};

std::array<double, kNumTerrains> train_terrain_ratios();  // 70% dirt, 30% grass
std::array<double, kNumTerrains> test_terrain_ratios();   // 5% lava share

MapGenConfig default_map_config(int width, int height, MapPhase phase,
                                std::uint64_t seed);

// Single-site Metropolis chain over terrain labelings with energy
//   E = -lambda_same * (#equal-label neighbor pairs)
//       + lambda_ratio * sum_k (ratio_k - target_ratio_k)^2
// summed over the labels allowed in the phase (train never proposes lava).
// Exposed so the sampler can be validated against the exact Boltzmann
// distribution on tiny grids.
class MapChain {
 public:
  MapChain(const MapGenConfig& cfg, MapPhase phase);

  void step();
  void run(int steps);

  const TerrainLayout& layout() const { return layout_; }
  double energy() const { return energy_; }
  std::mt19937_64& rng() { return rng_; }

 private:
  double relabel_delta(int cell, Terrain to) const;

  MapGenConfig cfg_;
  std::array<Terrain, kNumTerrains> allowed_{};
  int n_allowed_ = 0;
  std::array<double, kNumTerrains> effective_ratios_{};
  TerrainLayout layout_;
  std::array<int, kNumTerrains> counts_{};
  double energy_ = 0.0;
  std::mt19937_64 rng_;
};

// Runs the chain, then overwrites one uniformly chosen cell with the single
// target. Test maps are resampled (bounded retries, derived seeds) until at
// least one lava cell survives target placement.
TerrainLayout sample_map(const MapGenConfig& cfg, MapPhase phase);

// 4-dim one-hot of the cell's terrain (dirt, grass, target, lava).
FeatureMap indicator_features(const TerrainLayout& layout);

// Two 3-dim sensor blocks over the safe classes (dirt, grass, target). Safe
// cells report their true class on both sensors; lava cells (test only) read
// as grass on sensor 1 and target on sensor 2. Lava in a train layout throws.
FeatureMap two_sensor_features(const TerrainLayout& layout, MapPhase phase);

// Per-terrain diagonal Gaussian over raw observation vectors.
struct LatentFeatureModel {
  int dim = 50;
  std::array<Eigen::VectorXd, kNumTerrains> mean;
  std::array<Eigen::VectorXd, kNumTerrains> variance;
  std::uint64_t seed = 0;

  // Means drawn from N(0, I) per terrain, unit variances.
  static LatentFeatureModel sample_default(int dim, std::uint64_t seed);

  std::string to_json() const;
  static LatentFeatureModel from_json(const std::string& text);
};

// Independent draw phi_s ~ N(mean[terrain], diag(variance[terrain])) per cell.
FeatureMap sample_latent_features(const TerrainLayout& layout,
                                  const LatentFeatureModel& model,
                                  std::uint64_t seed);

// Reward targets per terrain used for both latent conditions; the lava entry
// is never consulted (the designer does not model lava).
inline constexpr std::array<double, kNumTerrains> kClassTargets = {
    0.1, -0.2, 1.0, 0.0};

struct RegressionReport {
  int rank = 0;
  bool rank_deficient = false;
};

// Intercept-free least squares from raw observation draws (n_per_class per
// safe class) to the class targets; minimum-norm solution when the design is
// rank deficient.
WeightVector fit_raw_observation_proxy(
    const LatentFeatureModel& model, int n_per_class,
    const std::array<double, kNumTerrains>& class_targets, std::uint64_t seed,
    RegressionReport* report = nullptr);

// Per-class diagonal Gaussian maximum-likelihood classifier over the three
// safe classes; every input, lava included, is assigned a safe class.
class TerrainClassifier {
 public:
  static constexpr int kNumClasses = 3;  // dirt, grass, target

  TerrainClassifier(std::array<Eigen::VectorXd, kNumClasses> mean,
                    std::array<Eigen::VectorXd, kNumClasses> variance);

  int classify(const Eigen::VectorXd& phi) const;
  Terrain classify_terrain(const Eigen::VectorXd& phi) const;
  int dim() const { return static_cast<int>(mean_[0].size()); }

  const Eigen::VectorXd& class_mean(int c) const { return mean_[c]; }
  const Eigen::VectorXd& class_variance(int c) const { return variance_[c]; }

 private:
  std::array<Eigen::VectorXd, kNumClasses> mean_;
  std::array<Eigen::VectorXd, kNumClasses> variance_;
};

// Sample mean / floored diagonal sample variance fit on n_per_class draws
// per safe class.
TerrainClassifier fit_classifier(const LatentFeatureModel& model,
                                 int n_per_class, std::uint64_t seed);

// 3-dim one-hot of the predicted class for every cell of a raw FeatureMap.
FeatureMap classified_features(const TerrainClassifier& classifier,
                               const FeatureMap& raw);

// Uniform draw in [lo, hi] per safe-terrain coordinate; the lava coordinate
// is fixed to 0 (the designer leaves unseen terrain out of the proxy).
WeightVector random_side_effects_proxy(std::uint64_t seed, double lo,
                                       double hi);

// Uniform draw on the sensor-1 block, zeros on the sensor-2 block, redrawn
// until the target coordinate is the strict maximum of the block so the
// navigation task stays well posed.
WeightVector random_two_sensor_proxy(std::uint64_t seed, double lo, double hi);

}  // namespace ird

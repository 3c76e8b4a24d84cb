#pragma once

#include "ird/inference.hpp"
#include "ird/lavaland.hpp"
#include "ird/maxent.hpp"
#include "ird/risk.hpp"
#include "ird/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ird {

enum class Condition { SideEffects, RewardHacking, LatentRaw, LatentClassifier };
enum class AgentMode { Literal, SampleZ, MaxEntZ };

const char* condition_name(Condition c);
const char* agent_mode_name(AgentMode m);
Condition parse_condition(const std::string& name);
AgentMode parse_agent_mode(const std::string& name);

inline constexpr std::array<Condition, 4> kAllConditions = {
    Condition::SideEffects, Condition::RewardHacking, Condition::LatentRaw,
    Condition::LatentClassifier};
inline constexpr std::array<AgentMode, 3> kAllAgentModes = {
    AgentMode::Literal, AgentMode::SampleZ, AgentMode::MaxEntZ};

// Full description of one experiment cell. Every random stream is derived
// from master_seed and the map index, so runs are reproducible and map
// realizations are shared across agent modes (paired comparisons).
struct ExperimentConfig {
  Condition condition = Condition::SideEffects;
  AgentMode mode = AgentMode::MaxEntZ;
  int n_test_maps = 100;

  int width = 10;
  int height = 10;
  int horizon = 20;
  // Minimum Manhattan distance from the start cell to the target so that
  // every episode is a real navigation task and the designer's training
  // behavior visits enough terrain to be informative. -1 = auto,
  // (width + height) / 2 + 2, clamped to the farthest available cell;
  // 0 disables the constraint.
  int start_min_distance = -1;

  double beta = 1.0;
  double prior_lo = -2.0;
  double prior_hi = 2.0;
  // mcmc.seed is ignored; per-map seeds are derived. Nonpositive fields mean
  // auto: chain length scales with the weight dimension, burn-in and thinning
  // follow the chain, and the proposal step is tuned by pilot rounds.
  McmcConfig mcmc = [] {
    McmcConfig m;
    m.chain_length = 0;
    m.burn_in = 0;
    m.thinning = 0;
    m.proposal_stddev = 0.0;
    return m;
  }();
  int n_candidates = 100;
  bool sample_z_literal = false;

  RiskGranularity risk_granularity = RiskGranularity::PerTimestep;
  RiskBaseline risk_baseline = RiskBaseline::TrainingFeatureCounts;
  int risk_particles = 0;  // 0 = use every posterior sample

  double lambda_same = 1.0;
  double lambda_ratio = 0.0;  // 0 = auto: 50 * cell count
  int metropolis_steps = 5000;

  int latent_dim = 50;
  int samples_per_class = 1000;

  std::uint64_t master_seed = 0;
  int workers = 0;  // 0 = hardware concurrency
  bool record_wall_time = true;
};

// Per-experiment fitted artifacts shared by every map of a run.
struct ExperimentSetup {
  int feature_dim = 0;
  std::optional<LatentFeatureModel> model;
  std::optional<TerrainClassifier> classifier;
  std::optional<WeightVector> regression_proxy;
  RegressionReport regression_report;
};

ExperimentSetup make_setup(const ExperimentConfig& cfg);

// One map index expanded into worlds, features and the proxy reward; mode
// independent by construction.
struct MapInstance {
  TerrainLayout train_layout;
  TerrainLayout test_layout;
  WorldModel train_world;
  WorldModel test_world;
  FeatureMap train_features;
  FeatureMap test_features;
  WeightVector proxy;
};

MapInstance make_map_instance(const ExperimentConfig& cfg,
                              const ExperimentSetup& setup, int map_index);

struct MapRecord {
  int map_index = 0;
  bool ok = false;
  std::string error;
  bool hit_lava = false;
  int lava_cells_entered = 0;
  double planner_objective = 0.0;
  double acceptance_rate = 0.0;  // NaN for the literal agent
  Trajectory trajectory;
};

struct RunMetrics {
  Condition condition = Condition::SideEffects;
  AgentMode mode = AgentMode::Literal;
  std::string variant;  // set when a run sweeps risk configurations
  int n_maps_requested = 0;
  int n_maps_ok = 0;
  double lava_fraction = 0.0;   // NaN when no map succeeded
  double mean_lava_cells = 0.0; // NaN likewise
  double wall_seconds = 0.0;
  std::uint64_t master_seed = 0;
  std::vector<MapRecord> maps;
};

struct RiskVariant {
  RiskGranularity granularity = RiskGranularity::PerTimestep;
  RiskBaseline baseline = RiskBaseline::TrainingFeatureCounts;
};

std::string risk_variant_label(const RiskVariant& v);

// Runs one experiment cell: per map, plan literally with the proxy in the
// test world, or sample the posterior in the training world and plan
// risk-aversely in the test world. Map failures are recorded and excluded
// from aggregates rather than aborting the run.
RunMetrics run_condition(const ExperimentConfig& cfg);

// Same pipeline, but each map's posterior is planned under every risk
// variant; returns one RunMetrics per variant. Avoids re-running MCMC when
// comparing risk configurations.
std::vector<RunMetrics> run_condition_risk_variants(
    const ExperimentConfig& cfg, const std::vector<RiskVariant>& variants);

// All condition x mode cells under one master seed (shared map realizations
// within each condition).
std::vector<RunMetrics> run_factorial(const ExperimentConfig& base);

// Posterior for a single map index of a condition, for inspection dumps.
PosteriorSamples posterior_for_map(const ExperimentConfig& cfg, int map_index);

std::string results_to_csv(const std::vector<RunMetrics>& rows);
std::string results_to_json(const std::vector<RunMetrics>& rows);
std::vector<RunMetrics> results_from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Flat key=value configuration text ('#' comments); unknown keys throw.
std::map<std::string, std::string> parse_config_text(const std::string& text);
void apply_config(ExperimentConfig& cfg,
                  const std::map<std::string, std::string>& kv);

// Runs fn(i) for i in [0, n) on a small thread pool; fn must only touch
// index-private state. Exceptions are rethrown on the caller thread.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace ird

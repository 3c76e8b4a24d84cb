#include "ird/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ird {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent random-stream tags; each map index gets its own stream per tag.
enum SeedTag : std::uint64_t {
  kTagTrainMap = 0x11,
  kTagTestMap = 0x22,
  kTagTrainStart = 0x33,
  kTagTestStart = 0x44,
  kTagProxy = 0x55,
  kTagTrainFeatures = 0x66,
  kTagTestFeatures = 0x77,
  kTagMcmc = 0x88,
  kTagCandidates = 0x99,
  kTagLatentModel = 0xaa,
  kTagRegression = 0xbb,
  kTagClassifier = 0xcc,
  kTagParticles = 0xdd,
};

}  // namespace

const char* condition_name(Condition c) {
  switch (c) {
    case Condition::SideEffects:
      return "side-effects";
    case Condition::RewardHacking:
      return "reward-hacking";
    case Condition::LatentRaw:
      return "latent-raw";
    case Condition::LatentClassifier:
      return "latent-classifier";
  }
  return "?";
}

const char* agent_mode_name(AgentMode m) {
  switch (m) {
    case AgentMode::Literal:
      return "literal";
    case AgentMode::SampleZ:
      return "sample-z";
    case AgentMode::MaxEntZ:
      return "maxent-z";
  }
  return "?";
}

Condition parse_condition(const std::string& name) {
  for (Condition c : kAllConditions) {
    if (name == condition_name(c)) return c;
  }
  throw std::invalid_argument("unknown condition: " + name);
}

AgentMode parse_agent_mode(const std::string& name) {
  for (AgentMode m : kAllAgentModes) {
    if (name == agent_mode_name(m)) return m;
  }
  throw std::invalid_argument("unknown mode: " + name);
}

namespace {

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n_test_maps < 0) throw std::invalid_argument("maps must be >= 0");
  if (cfg.width < 1 || cfg.height < 1) {
    throw std::invalid_argument("world dimensions must be positive");
  }
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(cfg.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(cfg.prior_lo < cfg.prior_hi)) {
    throw std::invalid_argument("prior bounds must satisfy lo < hi");
  }
  if (cfg.mode == AgentMode::SampleZ && cfg.n_candidates < 1) {
    throw std::invalid_argument("sample-z needs at least one candidate");
  }
  if (cfg.risk_particles < 0) {
    throw std::invalid_argument("risk_particles must be >= 0");
  }
  if (cfg.start_min_distance < -1) {
    throw std::invalid_argument("start_min_distance must be >= -1");
  }
  if (cfg.latent_dim < 1) throw std::invalid_argument("latent_dim must be >= 1");
  if (cfg.samples_per_class < 2) {
    throw std::invalid_argument("samples_per_class must be >= 2");
  }
  if (cfg.metropolis_steps < 1) {
    throw std::invalid_argument("metropolis_steps must be >= 1");
  }
  if (cfg.lambda_same < 0.0 || cfg.lambda_ratio < 0.0) {
    throw std::invalid_argument("map energy weights must be nonnegative");
  }
  if (cfg.workers < 0) throw std::invalid_argument("workers must be >= 0");
}

MapGenConfig map_config_for(const ExperimentConfig& cfg, MapPhase phase,
                            std::uint64_t seed) {
  MapGenConfig m = default_map_config(cfg.width, cfg.height, phase, seed);
  m.lambda_same = cfg.lambda_same;
  if (cfg.lambda_ratio > 0.0) m.lambda_ratio = cfg.lambda_ratio;
  m.metropolis_steps = cfg.metropolis_steps;
  return m;
}

// Seeds the chain for one map and, unless a step size was given, tunes one
// with pilot rounds. A step sized for 4 indicator features stalls the chain
// on 50-dimensional observations, so the step has to follow the posterior.
McmcConfig resolve_mcmc(const ExperimentConfig& cfg,
                        const ProxyObservation& obs, const Prior& prior,
                        ZMode zmode, const NormalizerCandidates* cands,
                        int map_index) {
  McmcConfig mcmc = cfg.mcmc;
  mcmc.seed = derive_seed(cfg.master_seed, kTagMcmc, map_index);
  // Nonpositive fields mean auto. Chain length grows with weight dimension
  // (random-walk mixing time does); burn-in and thinning follow the chain so
  // the particle count stays near 1,500.
  if (mcmc.chain_length <= 0) {
    const int dim = static_cast<int>(obs.proxy_weights().size());
    mcmc.chain_length = std::max(20000, 1200 * dim);
  }
  if (mcmc.burn_in <= 0) mcmc.burn_in = mcmc.chain_length / 4;
  if (mcmc.thinning <= 0) {
    mcmc.thinning = std::max(1, (mcmc.chain_length - mcmc.burn_in) / 1500);
  }
  if (mcmc.proposal_stddev <= 0.0) {
    mcmc.proposal_stddev = tune_proposal_stddev(obs, prior, zmode, mcmc, cands,
                                                cfg.sample_z_literal);
  }
  return mcmc;
}

// Uniform over dirt/grass cells at least min_distance (Manhattan) from the
// target. Keeping the start away from the target makes the episode a real
// navigation task: the designer's training behavior then visits enough
// non-target terrain for the posterior to be informative about it. Falls
// back to the farthest safe cells when the constraint is unsatisfiable.
StateId random_safe_start(const TerrainLayout& layout, std::uint64_t seed,
                          int min_distance) {
  StateId target = -1;
  for (StateId s = 0; s < layout.num_cells(); ++s) {
    if (layout.at_state(s) == Terrain::Target) {
      target = s;
      break;
    }
  }
  const auto distance = [&](StateId s) {
    if (target < 0) return 0;
    const int w = layout.width;
    return std::abs(s % w - target % w) + std::abs(s / w - target / w);
  };
  std::vector<StateId> safe;
  int farthest = 0;
  safe.reserve(layout.num_cells());
  for (StateId s = 0; s < layout.num_cells(); ++s) {
    const Terrain t = layout.at_state(s);
    if (t != Terrain::Dirt && t != Terrain::Grass) continue;
    safe.push_back(s);
    farthest = std::max(farthest, distance(s));
  }
  if (safe.empty()) {
    throw std::runtime_error("no dirt or grass cell available as start");
  }
  const int required = std::min(min_distance, farthest);
  std::vector<StateId> eligible;
  for (StateId s : safe) {
    if (distance(s) >= required) eligible.push_back(s);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  return eligible[pick(rng)];
}

int condition_feature_dim(const ExperimentConfig& cfg) {
  switch (cfg.condition) {
    case Condition::SideEffects:
      return kNumTerrains;
    case Condition::RewardHacking:
      return 6;
    case Condition::LatentRaw:
      return cfg.latent_dim;
    case Condition::LatentClassifier:
      return TerrainClassifier::kNumClasses;
  }
  return 0;
}

}  // namespace

ExperimentSetup make_setup(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentSetup setup;
  setup.feature_dim = condition_feature_dim(cfg);
  if (cfg.condition == Condition::LatentRaw ||
      cfg.condition == Condition::LatentClassifier) {
    setup.model = LatentFeatureModel::sample_default(
        cfg.latent_dim, derive_seed(cfg.master_seed, kTagLatentModel));
  }
  if (cfg.condition == Condition::LatentRaw) {
    setup.regression_proxy = fit_raw_observation_proxy(
        *setup.model, cfg.samples_per_class, kClassTargets,
        derive_seed(cfg.master_seed, kTagRegression), &setup.regression_report);
    if (setup.regression_report.rank_deficient) {
      std::fprintf(stderr,
                   "warning: proxy regression design is rank deficient "
                   "(rank %d of %d); using the minimum-norm solution\n",
                   setup.regression_report.rank, cfg.latent_dim);
    }
  }
  if (cfg.condition == Condition::LatentClassifier) {
    setup.classifier = fit_classifier(
        *setup.model, cfg.samples_per_class,
        derive_seed(cfg.master_seed, kTagClassifier));
  }
  return setup;
}

MapInstance make_map_instance(const ExperimentConfig& cfg,
                              const ExperimentSetup& setup, int map_index) {
  const std::uint64_t master = cfg.master_seed;
  const std::uint64_t idx = static_cast<std::uint64_t>(map_index);
  const int min_dist = cfg.start_min_distance >= 0
                           ? cfg.start_min_distance
                           : (cfg.width + cfg.height) / 2 + 2;
  MapInstance inst;
  inst.train_layout = sample_map(
      map_config_for(cfg, MapPhase::Train, derive_seed(master, kTagTrainMap, idx)),
      MapPhase::Train);
  inst.test_layout = sample_map(
      map_config_for(cfg, MapPhase::Test, derive_seed(master, kTagTestMap, idx)),
      MapPhase::Test);
  inst.train_world = build_world(
      inst.train_layout, cfg.horizon,
      random_safe_start(inst.train_layout,
                        derive_seed(master, kTagTrainStart, idx), min_dist));
  inst.test_world = build_world(
      inst.test_layout, cfg.horizon,
      random_safe_start(inst.test_layout,
                        derive_seed(master, kTagTestStart, idx), min_dist));
  switch (cfg.condition) {
    case Condition::SideEffects:
      inst.train_features = indicator_features(inst.train_layout);
      inst.test_features = indicator_features(inst.test_layout);
      inst.proxy = random_side_effects_proxy(
          derive_seed(master, kTagProxy, idx), cfg.prior_lo, cfg.prior_hi);
      break;
    case Condition::RewardHacking:
      inst.train_features = two_sensor_features(inst.train_layout, MapPhase::Train);
      inst.test_features = two_sensor_features(inst.test_layout, MapPhase::Test);
      inst.proxy = random_two_sensor_proxy(derive_seed(master, kTagProxy, idx),
                                           cfg.prior_lo, cfg.prior_hi);
      break;
    case Condition::LatentRaw:
      inst.train_features = sample_latent_features(
          inst.train_layout, *setup.model,
          derive_seed(master, kTagTrainFeatures, idx));
      inst.test_features = sample_latent_features(
          inst.test_layout, *setup.model,
          derive_seed(master, kTagTestFeatures, idx));
      inst.proxy = *setup.regression_proxy;
      break;
    case Condition::LatentClassifier: {
      const FeatureMap raw_train = sample_latent_features(
          inst.train_layout, *setup.model,
          derive_seed(master, kTagTrainFeatures, idx));
      const FeatureMap raw_test = sample_latent_features(
          inst.test_layout, *setup.model,
          derive_seed(master, kTagTestFeatures, idx));
      inst.train_features = classified_features(*setup.classifier, raw_train);
      inst.test_features = classified_features(*setup.classifier, raw_test);
      inst.proxy = WeightVector(TerrainClassifier::kNumClasses);
      for (int c = 0; c < TerrainClassifier::kNumClasses; ++c) {
        inst.proxy[c] = kClassTargets[c];
      }
      break;
    }
  }
  return inst;
}

std::string risk_variant_label(const RiskVariant& v) {
  return std::string(risk_granularity_name(v.granularity)) + "/" +
         risk_baseline_name(v.baseline);
}

namespace {

void count_lava(const TerrainLayout& layout, const Trajectory& traj,
                MapRecord& rec) {
  rec.hit_lava = false;
  rec.lava_cells_entered = 0;
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    if (layout.at_state(traj.states[t]) != Terrain::Lava) continue;
    rec.hit_lava = true;
    if (t == 0 || traj.states[t] != traj.states[t - 1]) {
      ++rec.lava_cells_entered;
    }
  }
}

std::vector<WeightVector> select_particles(const std::vector<WeightVector>& all,
                                           int k, std::uint64_t seed) {
  if (k <= 0 || k >= static_cast<int>(all.size())) return all;
  std::vector<WeightVector> out;
  out.reserve(k);
  std::mt19937_64 rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(out), k, rng);
  return out;
}

// Plans one map under every requested risk variant; one record per variant.
// The literal agent ignores the variants (same plan for each).
std::vector<MapRecord> process_map(const ExperimentConfig& cfg,
                                   const ExperimentSetup& setup, int map_index,
                                   const std::vector<RiskVariant>& variants) {
  std::vector<MapRecord> records(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) {
    records[v].map_index = map_index;
    records[v].acceptance_rate = kNaN;
  }
  try {
    const MapInstance inst = make_map_instance(cfg, setup, map_index);
    if (cfg.mode == AgentMode::Literal) {
      MapRecord rec = records[0];
      rec.trajectory =
          optimal_trajectory(inst.test_world, inst.test_features, inst.proxy);
      rec.planner_objective =
          trajectory_reward(rec.trajectory, inst.proxy, inst.test_features);
      count_lava(inst.test_layout, rec.trajectory, rec);
      rec.ok = true;
      for (std::size_t v = 0; v < variants.size(); ++v) records[v] = rec;
      return records;
    }

    const ProxyObservation proxy_obs(inst.proxy, inst.train_world,
                                     inst.train_features, cfg.beta);
    const Prior prior =
        Prior::uniform_box(setup.feature_dim, cfg.prior_lo, cfg.prior_hi);
    NormalizerCandidates cands;
    const NormalizerCandidates* cands_ptr = nullptr;
    const ZMode zmode =
        cfg.mode == AgentMode::SampleZ ? ZMode::SampleZ : ZMode::MaxEntZ;
    if (zmode == ZMode::SampleZ) {
      cands = draw_normalizer_candidates(
          prior, cfg.n_candidates, proxy_obs,
          derive_seed(cfg.master_seed, kTagCandidates, map_index));
      cands_ptr = &cands;
    }
    const McmcConfig mcmc =
        resolve_mcmc(cfg, proxy_obs, prior, zmode, cands_ptr, map_index);
    const PosteriorSamples posterior = sample_posterior(
        proxy_obs, prior, zmode, mcmc, cands_ptr, cfg.sample_z_literal);
    const std::vector<WeightVector> particles = select_particles(
        posterior.samples, cfg.risk_particles,
        derive_seed(cfg.master_seed, kTagParticles, map_index));

    for (std::size_t v = 0; v < variants.size(); ++v) {
      MapRecord& rec = records[v];
      RiskConfig risk;
      risk.granularity = variants[v].granularity;
      risk.baseline = variants[v].baseline;
      risk.particles = particles;
      TrajectoryMinimaxReport report;
      rec.trajectory =
          plan_risk_averse(inst.test_world, inst.test_features, risk,
                           &proxy_obs.proxy_feature_counts(), &report);
      rec.planner_objective = report.score;
      rec.acceptance_rate = posterior.acceptance_rate;
      count_lava(inst.test_layout, rec.trajectory, rec);
      rec.ok = true;
    }
  } catch (const std::exception& e) {
    for (MapRecord& rec : records) {
      rec.ok = false;
      rec.error = e.what();
      rec.trajectory = Trajectory{};
    }
    std::fprintf(stderr, "map %d failed and was excluded: %s\n", map_index,
                 e.what());
  }
  return records;
}

RunMetrics aggregate(const ExperimentConfig& cfg, std::vector<MapRecord> maps,
                     double wall_seconds, std::string variant) {
  RunMetrics out;
  out.condition = cfg.condition;
  out.mode = cfg.mode;
  out.variant = std::move(variant);
  out.n_maps_requested = cfg.n_test_maps;
  out.master_seed = cfg.master_seed;
  out.wall_seconds = wall_seconds;
  out.maps = std::move(maps);
  int ok = 0;
  int hits = 0;
  long long cells = 0;
  for (const MapRecord& rec : out.maps) {
    if (!rec.ok) continue;
    ++ok;
    hits += rec.hit_lava ? 1 : 0;
    cells += rec.lava_cells_entered;
  }
  out.n_maps_ok = ok;
  out.lava_fraction = ok > 0 ? static_cast<double>(hits) / ok : kNaN;
  out.mean_lava_cells = ok > 0 ? static_cast<double>(cells) / ok : kNaN;
  return out;
}

}  // namespace

std::vector<RunMetrics> run_condition_risk_variants(
    const ExperimentConfig& cfg, const std::vector<RiskVariant>& variants) {
  if (variants.empty()) {
    throw std::invalid_argument("need at least one risk variant");
  }
  const ExperimentSetup setup = make_setup(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<MapRecord>> per_map(cfg.n_test_maps);
  parallel_for(cfg.n_test_maps, cfg.workers, [&](int i) {
    per_map[i] = process_map(cfg, setup, i, variants);
  });
  double wall = 0.0;
  if (cfg.record_wall_time) {
    wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
               .count();
  }
  std::vector<RunMetrics> out;
  out.reserve(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) {
    std::vector<MapRecord> records;
    records.reserve(cfg.n_test_maps);
    for (int i = 0; i < cfg.n_test_maps; ++i) records.push_back(per_map[i][v]);
    out.push_back(aggregate(cfg, std::move(records), wall,
                            variants.size() > 1 ? risk_variant_label(variants[v])
                                                : std::string()));
  }
  return out;
}

RunMetrics run_condition(const ExperimentConfig& cfg) {
  RiskVariant variant;
  variant.granularity = cfg.risk_granularity;
  variant.baseline = cfg.risk_baseline;
  return std::move(run_condition_risk_variants(cfg, {variant}).front());
}

std::vector<RunMetrics> run_factorial(const ExperimentConfig& base) {
  std::vector<RunMetrics> rows;
  rows.reserve(kAllConditions.size() * kAllAgentModes.size());
  for (Condition c : kAllConditions) {
    for (AgentMode m : kAllAgentModes) {
      ExperimentConfig cfg = base;
      cfg.condition = c;
      cfg.mode = m;
      rows.push_back(run_condition(cfg));
    }
  }
  return rows;
}

PosteriorSamples posterior_for_map(const ExperimentConfig& cfg, int map_index) {
  if (cfg.mode == AgentMode::Literal) {
    throw std::invalid_argument("the literal agent has no posterior");
  }
  if (map_index < 0) throw std::invalid_argument("map index must be >= 0");
  const ExperimentSetup setup = make_setup(cfg);
  const MapInstance inst = make_map_instance(cfg, setup, map_index);
  const ProxyObservation proxy_obs(inst.proxy, inst.train_world,
                                   inst.train_features, cfg.beta);
  const Prior prior =
      Prior::uniform_box(setup.feature_dim, cfg.prior_lo, cfg.prior_hi);
  NormalizerCandidates cands;
  const NormalizerCandidates* cands_ptr = nullptr;
  const ZMode zmode =
      cfg.mode == AgentMode::SampleZ ? ZMode::SampleZ : ZMode::MaxEntZ;
  if (zmode == ZMode::SampleZ) {
    cands = draw_normalizer_candidates(
        prior, cfg.n_candidates, proxy_obs,
        derive_seed(cfg.master_seed, kTagCandidates, map_index));
    cands_ptr = &cands;
  }
  const McmcConfig mcmc =
      resolve_mcmc(cfg, proxy_obs, prior, zmode, cands_ptr, map_index);
  return sample_posterior(proxy_obs, prior, zmode, mcmc, cands_ptr,
                          cfg.sample_z_literal);
}

namespace {

std::string format_fraction(double x, const char* fmt) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

}  // namespace

std::string results_to_csv(const std::vector<RunMetrics>& rows) {
  std::string out =
      "condition,z_approx,n_maps,lava_fraction,mean_lava_cells,wall_seconds,"
      "master_seed\n";
  char buf[128];
  for (const RunMetrics& row : rows) {
    out += condition_name(row.condition);
    out += ',';
    out += agent_mode_name(row.mode);
    out += ',';
    std::snprintf(buf, sizeof(buf), "%d", row.n_maps_ok);
    out += buf;
    out += ',';
    out += format_fraction(row.lava_fraction, "%.6f");
    out += ',';
    out += format_fraction(row.mean_lava_cells, "%.6f");
    out += ',';
    out += format_fraction(row.wall_seconds, "%.3f");
    out += ',';
    std::snprintf(buf, sizeof(buf), "%llu",
                  static_cast<unsigned long long>(row.master_seed));
    out += buf;
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json nan_to_null(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

double null_to_nan(const nlohmann::json& j) {
  if (j.is_null()) return kNaN;
  return j.get<double>();
}

Action parse_action(const std::string& name) {
  for (Action a : kActionOrder) {
    if (name == action_name(a)) return a;
  }
  throw std::invalid_argument("unknown action: " + name);
}

}  // namespace

std::string results_to_json(const std::vector<RunMetrics>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RunMetrics& row : rows) {
    nlohmann::json maps = nlohmann::json::array();
    for (const MapRecord& rec : row.maps) {
      nlohmann::json states = nlohmann::json::array();
      for (StateId s : rec.trajectory.states) states.push_back(s);
      nlohmann::json actions = nlohmann::json::array();
      for (Action a : rec.trajectory.actions) actions.push_back(action_name(a));
      nlohmann::json m = {{"map_index", rec.map_index},
                          {"ok", rec.ok},
                          {"hit_lava", rec.hit_lava},
                          {"lava_cells_entered", rec.lava_cells_entered},
                          {"planner_objective", rec.planner_objective},
                          {"acceptance_rate", nan_to_null(rec.acceptance_rate)},
                          {"trajectory",
                           {{"states", std::move(states)},
                            {"actions", std::move(actions)}}}};
      if (!rec.ok) m["error"] = rec.error;
      maps.push_back(std::move(m));
    }
    nlohmann::json r = {{"condition", condition_name(row.condition)},
                        {"z_approx", agent_mode_name(row.mode)},
                        {"n_maps_requested", row.n_maps_requested},
                        {"n_maps", row.n_maps_ok},
                        {"lava_fraction", nan_to_null(row.lava_fraction)},
                        {"mean_lava_cells", nan_to_null(row.mean_lava_cells)},
                        {"wall_seconds", row.wall_seconds},
                        {"master_seed", row.master_seed},
                        {"maps", std::move(maps)}};
    if (!row.variant.empty()) r["variant"] = row.variant;
    arr.push_back(std::move(r));
  }
  return arr.dump(2);
}

std::vector<RunMetrics> results_from_json(const std::string& text) {
  const nlohmann::json parsed = nlohmann::json::parse(text);
  std::vector<RunMetrics> rows;
  for (const nlohmann::json& r : parsed) {
    RunMetrics row;
    row.condition = parse_condition(r.at("condition").get<std::string>());
    row.mode = parse_agent_mode(r.at("z_approx").get<std::string>());
    if (r.contains("variant")) row.variant = r.at("variant").get<std::string>();
    row.n_maps_requested = r.at("n_maps_requested").get<int>();
    row.n_maps_ok = r.at("n_maps").get<int>();
    row.lava_fraction = null_to_nan(r.at("lava_fraction"));
    row.mean_lava_cells = null_to_nan(r.at("mean_lava_cells"));
    row.wall_seconds = r.at("wall_seconds").get<double>();
    row.master_seed = r.at("master_seed").get<std::uint64_t>();
    for (const nlohmann::json& m : r.at("maps")) {
      MapRecord rec;
      rec.map_index = m.at("map_index").get<int>();
      rec.ok = m.at("ok").get<bool>();
      if (m.contains("error")) rec.error = m.at("error").get<std::string>();
      rec.hit_lava = m.at("hit_lava").get<bool>();
      rec.lava_cells_entered = m.at("lava_cells_entered").get<int>();
      rec.planner_objective = m.at("planner_objective").get<double>();
      rec.acceptance_rate = null_to_nan(m.at("acceptance_rate"));
      const nlohmann::json& traj = m.at("trajectory");
      for (const nlohmann::json& s : traj.at("states")) {
        rec.trajectory.states.push_back(s.get<StateId>());
      }
      for (const nlohmann::json& a : traj.at("actions")) {
        rec.trajectory.actions.push_back(parse_action(a.get<std::string>()));
      }
      row.maps.push_back(std::move(rec));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

long long parse_ll(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not an integer: " + value);
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config key " + key + ": not an integer: " + value);
  }
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  return static_cast<int>(parse_ll(key, value));
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not an integer: " + value);
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config key " + key + ": not an integer: " + value);
  }
  return v;
}

double parse_dbl(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not a number: " + value);
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config key " + key + ": not a number: " + value);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config key " + key + ": not a boolean: " + value);
}

RiskGranularity parse_granularity(const std::string& value) {
  if (value == "per-timestep") return RiskGranularity::PerTimestep;
  if (value == "trajectory-wide") return RiskGranularity::TrajectoryWide;
  throw std::invalid_argument("unknown risk granularity: " + value);
}

RiskBaseline parse_baseline(const std::string& value) {
  if (value == "initial-state") return RiskBaseline::InitialState;
  if (value == "training-feature-counts") {
    return RiskBaseline::TrainingFeatureCounts;
  }
  if (value == "log-partition") return RiskBaseline::LogPartition;
  throw std::invalid_argument("unknown risk baseline: " + value);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

void apply_config(ExperimentConfig& cfg,
                  const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "condition") {
      cfg.condition = parse_condition(value);
    } else if (key == "mode") {
      cfg.mode = parse_agent_mode(value);
    } else if (key == "maps") {
      cfg.n_test_maps = parse_int(key, value);
    } else if (key == "width") {
      cfg.width = parse_int(key, value);
    } else if (key == "height") {
      cfg.height = parse_int(key, value);
    } else if (key == "horizon") {
      cfg.horizon = parse_int(key, value);
    } else if (key == "beta") {
      cfg.beta = parse_dbl(key, value);
    } else if (key == "prior_lo") {
      cfg.prior_lo = parse_dbl(key, value);
    } else if (key == "prior_hi") {
      cfg.prior_hi = parse_dbl(key, value);
    } else if (key == "chain_length") {
      cfg.mcmc.chain_length = parse_int(key, value);
    } else if (key == "burn_in") {
      cfg.mcmc.burn_in = parse_int(key, value);
    } else if (key == "thinning") {
      cfg.mcmc.thinning = parse_int(key, value);
    } else if (key == "proposal_stddev") {
      cfg.mcmc.proposal_stddev = parse_dbl(key, value);
    } else if (key == "start_min_distance") {
      cfg.start_min_distance = parse_int(key, value);
    } else if (key == "candidates") {
      cfg.n_candidates = parse_int(key, value);
    } else if (key == "sample_z_literal") {
      cfg.sample_z_literal = parse_bool(key, value);
    } else if (key == "risk_granularity") {
      cfg.risk_granularity = parse_granularity(value);
    } else if (key == "risk_baseline") {
      cfg.risk_baseline = parse_baseline(value);
    } else if (key == "risk_particles") {
      cfg.risk_particles = parse_int(key, value);
    } else if (key == "lambda_same") {
      cfg.lambda_same = parse_dbl(key, value);
    } else if (key == "lambda_ratio") {
      cfg.lambda_ratio = parse_dbl(key, value);
    } else if (key == "metropolis_steps") {
      cfg.metropolis_steps = parse_int(key, value);
    } else if (key == "latent_dim") {
      cfg.latent_dim = parse_int(key, value);
    } else if (key == "samples_per_class") {
      cfg.samples_per_class = parse_int(key, value);
    } else if (key == "seed") {
      cfg.master_seed = parse_u64(key, value);
    } else if (key == "workers") {
      cfg.workers = parse_int(key, value);
    } else if (key == "record_wall_time") {
      cfg.record_wall_time = parse_bool(key, value);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int count = workers > 0 ? workers
                          : static_cast<int>(std::thread::hardware_concurrency());
  if (count < 1) count = 1;
  count = std::min(count, n);
  if (count == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ird

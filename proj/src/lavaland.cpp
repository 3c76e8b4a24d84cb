#include "ird/lavaland.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ird {

namespace {

constexpr std::uint64_t kMapAttemptTag = 0x6d61702d63686169ULL;
constexpr int kMaxMapAttempts = 100;
constexpr int kMaxProxyDraws = 1000;
constexpr double kVarianceFloor = 1e-6;

constexpr std::array<Terrain, 3> kSafeTerrains = {Terrain::Dirt, Terrain::Grass,
                                                  Terrain::Target};

}  // namespace

const char* map_phase_name(MapPhase phase) {
  return phase == MapPhase::Train ? "train" : "test";
}

std::array<double, kNumTerrains> train_terrain_ratios() {
  return {0.7, 0.3, 0.0, 0.0};
}

std::array<double, kNumTerrains> test_terrain_ratios() {
  return {0.665, 0.285, 0.0, 0.05};
}

MapGenConfig default_map_config(int width, int height, MapPhase phase,
                                std::uint64_t seed) {
  MapGenConfig cfg;
  cfg.width = width;
  cfg.height = height;
  cfg.target_ratios = phase == MapPhase::Train ? train_terrain_ratios()
                                               : test_terrain_ratios();
  cfg.lambda_same = 1.0;
  cfg.lambda_ratio = 50.0 * width * height;
  cfg.metropolis_steps = 5000;
  cfg.seed = seed;
  return cfg;
}

MapChain::MapChain(const MapGenConfig& cfg, MapPhase phase)
    : cfg_(cfg), rng_(cfg.seed) {
  if (cfg.width < 1 || cfg.height < 1) {
    throw std::invalid_argument("map dimensions must be positive");
  }
  if (cfg.metropolis_steps < 1) {
    throw std::invalid_argument("need at least one chain step");
  }
  if (cfg.lambda_same < 0.0 || cfg.lambda_ratio < 0.0) {
    throw std::invalid_argument("energy weights must be nonnegative");
  }
  double sum = 0.0;
  for (Terrain t : {Terrain::Dirt, Terrain::Grass, Terrain::Lava}) {
    const double r = cfg.target_ratios[terrain_index(t)];
    if (r < 0.0 || r > 1.0) {
      throw std::invalid_argument("terrain ratios must lie in [0, 1]");
    }
    sum += r;
  }
  if (sum > 1.0 + 1e-9) {
    throw std::invalid_argument("terrain ratios must sum to at most 1");
  }
  if (phase == MapPhase::Train &&
      cfg.target_ratios[terrain_index(Terrain::Lava)] > 0.0) {
    throw std::invalid_argument("train maps cannot request lava");
  }

  effective_ratios_ = cfg.target_ratios;
  effective_ratios_[terrain_index(Terrain::Target)] = 0.0;
  effective_ratios_[terrain_index(Terrain::Dirt)] += 1.0 - sum;

  n_allowed_ = 0;
  allowed_[n_allowed_++] = Terrain::Dirt;
  allowed_[n_allowed_++] = Terrain::Grass;
  if (phase == MapPhase::Test) allowed_[n_allowed_++] = Terrain::Lava;

  layout_.width = cfg.width;
  layout_.height = cfg.height;
  layout_.cells.resize(cfg.width * cfg.height);
  std::uniform_int_distribution<int> pick(0, n_allowed_ - 1);
  counts_ = {};
  for (Terrain& cell : layout_.cells) {
    cell = allowed_[pick(rng_)];
    ++counts_[terrain_index(cell)];
  }

  const double n = layout_.num_cells();
  int equal_pairs = 0;
  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) {
      if (x + 1 < cfg.width && layout_.at(x, y) == layout_.at(x + 1, y)) {
        ++equal_pairs;
      }
      if (y + 1 < cfg.height && layout_.at(x, y) == layout_.at(x, y + 1)) {
        ++equal_pairs;
      }
    }
  }
  energy_ = -cfg_.lambda_same * equal_pairs;
  for (int i = 0; i < n_allowed_; ++i) {
    const int k = terrain_index(allowed_[i]);
    const double d = counts_[k] / n - effective_ratios_[k];
    energy_ += cfg_.lambda_ratio * d * d;
  }
}

double MapChain::relabel_delta(int cell, Terrain to) const {
  const Terrain from = layout_.cells[cell];
  if (from == to) return 0.0;
  const int x = cell % cfg_.width;
  const int y = cell / cfg_.width;
  int pair_delta = 0;
  const auto visit = [&](int nx, int ny) {
    const Terrain nb = layout_.at(nx, ny);
    pair_delta += (nb == to) - (nb == from);
  };
  if (x > 0) visit(x - 1, y);
  if (x + 1 < cfg_.width) visit(x + 1, y);
  if (y > 0) visit(x, y - 1);
  if (y + 1 < cfg_.height) visit(x, y + 1);

  const double n = layout_.num_cells();
  const int f = terrain_index(from);
  const int t = terrain_index(to);
  const double df_old = counts_[f] / n - effective_ratios_[f];
  const double df_new = (counts_[f] - 1) / n - effective_ratios_[f];
  const double dt_old = counts_[t] / n - effective_ratios_[t];
  const double dt_new = (counts_[t] + 1) / n - effective_ratios_[t];
  return -cfg_.lambda_same * pair_delta +
         cfg_.lambda_ratio *
             (df_new * df_new - df_old * df_old + dt_new * dt_new -
              dt_old * dt_old);
}

void MapChain::step() {
  std::uniform_int_distribution<int> pick_cell(0, layout_.num_cells() - 1);
  std::uniform_int_distribution<int> pick_label(0, n_allowed_ - 1);
  const int cell = pick_cell(rng_);
  const Terrain to = allowed_[pick_label(rng_)];
  const double delta = relabel_delta(cell, to);
  bool accept = delta <= 0.0;
  if (!accept) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    accept = unif(rng_) < std::exp(-delta);
  }
  if (accept && to != layout_.cells[cell]) {
    --counts_[terrain_index(layout_.cells[cell])];
    ++counts_[terrain_index(to)];
    layout_.cells[cell] = to;
    energy_ += delta;
  }
}

void MapChain::run(int steps) {
  for (int i = 0; i < steps; ++i) step();
}

TerrainLayout sample_map(const MapGenConfig& cfg, MapPhase phase) {
  for (int attempt = 0; attempt < kMaxMapAttempts; ++attempt) {
    MapGenConfig attempt_cfg = cfg;
    attempt_cfg.seed = derive_seed(cfg.seed, kMapAttemptTag, attempt);
    MapChain chain(attempt_cfg, phase);
    chain.run(cfg.metropolis_steps);
    TerrainLayout layout = chain.layout();
    std::uniform_int_distribution<int> pick(0, layout.num_cells() - 1);
    layout.cells[pick(chain.rng())] = Terrain::Target;
    if (phase == MapPhase::Train || layout.count(Terrain::Lava) >= 1) {
      return layout;
    }
  }
  throw std::runtime_error(
      "test map sampling produced no lava within the retry budget");
}

FeatureMap indicator_features(const TerrainLayout& layout) {
  Eigen::MatrixXd values =
      Eigen::MatrixXd::Zero(kNumTerrains, layout.num_cells());
  for (int s = 0; s < layout.num_cells(); ++s) {
    values(terrain_index(layout.at_state(s)), s) = 1.0;
  }
  return FeatureMap(std::move(values));
}

FeatureMap two_sensor_features(const TerrainLayout& layout, MapPhase phase) {
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(6, layout.num_cells());
  for (int s = 0; s < layout.num_cells(); ++s) {
    const Terrain t = layout.at_state(s);
    if (t == Terrain::Lava) {
      if (phase == MapPhase::Train) {
        throw std::invalid_argument("train layouts cannot contain lava");
      }
      values(terrain_index(Terrain::Grass), s) = 1.0;       // sensor 1
      values(3 + terrain_index(Terrain::Target), s) = 1.0;  // sensor 2
    } else {
      values(terrain_index(t), s) = 1.0;
      values(3 + terrain_index(t), s) = 1.0;
    }
  }
  return FeatureMap(std::move(values));
}

LatentFeatureModel LatentFeatureModel::sample_default(int dim,
                                                      std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("latent dimension must be >= 1");
  LatentFeatureModel model;
  model.dim = dim;
  model.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Terrain t : kTerrainOrder) {
    Eigen::VectorXd mu(dim);
    for (int i = 0; i < dim; ++i) mu[i] = normal(rng);
    model.mean[terrain_index(t)] = std::move(mu);
    model.variance[terrain_index(t)] = Eigen::VectorXd::Ones(dim);
  }
  return model;
}

std::string LatentFeatureModel::to_json() const {
  nlohmann::json j;
  for (Terrain t : kTerrainOrder) {
    const int k = terrain_index(t);
    nlohmann::json mu = nlohmann::json::array();
    nlohmann::json sigma = nlohmann::json::array();
    for (int i = 0; i < mean[k].size(); ++i) mu.push_back(mean[k][i]);
    for (int i = 0; i < variance[k].size(); ++i) sigma.push_back(variance[k][i]);
    j[terrain_name(t)] = {{"mu", std::move(mu)}, {"sigma_diag", std::move(sigma)}};
  }
  return j.dump(2);
}

LatentFeatureModel LatentFeatureModel::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  LatentFeatureModel model;
  model.dim = 0;
  for (Terrain t : kTerrainOrder) {
    const int k = terrain_index(t);
    const nlohmann::json& entry = j.at(terrain_name(t));
    const auto& mu = entry.at("mu");
    const auto& sigma = entry.at("sigma_diag");
    if (mu.size() != sigma.size() || mu.empty()) {
      throw std::invalid_argument("latent model entries must be non-empty and "
                                  "equally sized");
    }
    Eigen::VectorXd m(mu.size()), v(sigma.size());
    for (std::size_t i = 0; i < mu.size(); ++i) m[i] = mu[i].get<double>();
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      v[i] = sigma[i].get<double>();
      if (!(v[i] > 0.0)) {
        throw std::invalid_argument("latent variances must be positive");
      }
    }
    if (model.dim == 0) {
      model.dim = static_cast<int>(m.size());
    } else if (model.dim != m.size()) {
      throw std::invalid_argument("latent model dimensions disagree");
    }
    model.mean[k] = std::move(m);
    model.variance[k] = std::move(v);
  }
  return model;
}

namespace {

void check_model_covers(const LatentFeatureModel& model, Terrain t) {
  const int k = terrain_index(t);
  if (model.mean[k].size() != model.dim ||
      model.variance[k].size() != model.dim || model.dim < 1) {
    throw std::invalid_argument(std::string("latent model lacks parameters for ") +
                                terrain_name(t));
  }
  if ((model.variance[k].array() <= 0.0).any()) {
    throw std::invalid_argument("latent variances must be positive");
  }
}

// One draw from the terrain's Gaussian; consumes dim normals from rng.
void draw_latent(const LatentFeatureModel& model, Terrain t,
                 std::mt19937_64& rng, std::normal_distribution<double>& normal,
                 Eigen::Ref<Eigen::VectorXd> out) {
  const int k = terrain_index(t);
  for (int i = 0; i < model.dim; ++i) {
    out[i] = model.mean[k][i] + std::sqrt(model.variance[k][i]) * normal(rng);
  }
}

}  // namespace

FeatureMap sample_latent_features(const TerrainLayout& layout,
                                  const LatentFeatureModel& model,
                                  std::uint64_t seed) {
  for (Terrain t : kTerrainOrder) {
    if (layout.count(t) > 0) check_model_covers(model, t);
  }
  Eigen::MatrixXd values(model.dim, layout.num_cells());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < layout.num_cells(); ++s) {
    draw_latent(model, layout.at_state(s), rng, normal, values.col(s));
  }
  return FeatureMap(std::move(values));
}

WeightVector fit_raw_observation_proxy(
    const LatentFeatureModel& model, int n_per_class,
    const std::array<double, kNumTerrains>& class_targets, std::uint64_t seed,
    RegressionReport* report) {
  if (n_per_class < 1) throw std::invalid_argument("n_per_class must be >= 1");
  for (Terrain t : kSafeTerrains) check_model_covers(model, t);
  const int rows = 3 * n_per_class;
  Eigen::MatrixXd design(rows, model.dim);
  Eigen::VectorXd targets(rows);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  int r = 0;
  for (Terrain t : kSafeTerrains) {
    for (int i = 0; i < n_per_class; ++i, ++r) {
      Eigen::VectorXd row(model.dim);
      draw_latent(model, t, rng, normal, row);
      design.row(r) = row.transpose();
      targets[r] = class_targets[terrain_index(t)];
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  RegressionReport local;
  RegressionReport& rep = report != nullptr ? *report : local;
  rep.rank = static_cast<int>(cod.rank());
  rep.rank_deficient = rep.rank < model.dim;
  return cod.solve(targets);
}

TerrainClassifier::TerrainClassifier(
    std::array<Eigen::VectorXd, kNumClasses> mean,
    std::array<Eigen::VectorXd, kNumClasses> variance)
    : mean_(std::move(mean)), variance_(std::move(variance)) {
  const auto d = mean_[0].size();
  for (int c = 0; c < kNumClasses; ++c) {
    if (mean_[c].size() != d || variance_[c].size() != d || d < 1) {
      throw std::invalid_argument("classifier parameter sizes disagree");
    }
    if ((variance_[c].array() <= 0.0).any()) {
      throw std::invalid_argument("classifier variances must be positive");
    }
  }
}

int TerrainClassifier::classify(const Eigen::VectorXd& phi) const {
  if (phi.size() != dim()) {
    throw std::invalid_argument("input dimension does not match classifier");
  }
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < kNumClasses; ++c) {
    const Eigen::ArrayXd diff = (phi - mean_[c]).array();
    const double score =
        -0.5 * (diff.square() / variance_[c].array()).sum() -
        0.5 * variance_[c].array().log().sum();
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

Terrain TerrainClassifier::classify_terrain(const Eigen::VectorXd& phi) const {
  return kSafeTerrains[classify(phi)];
}

TerrainClassifier fit_classifier(const LatentFeatureModel& model,
                                 int n_per_class, std::uint64_t seed) {
  if (n_per_class < 2) throw std::invalid_argument("n_per_class must be >= 2");
  for (Terrain t : kSafeTerrains) check_model_covers(model, t);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<Eigen::VectorXd, TerrainClassifier::kNumClasses> means;
  std::array<Eigen::VectorXd, TerrainClassifier::kNumClasses> variances;
  Eigen::MatrixXd samples(n_per_class, model.dim);
  Eigen::VectorXd row(model.dim);
  for (int c = 0; c < TerrainClassifier::kNumClasses; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      draw_latent(model, kSafeTerrains[c], rng, normal, row);
      samples.row(i) = row.transpose();
    }
    means[c] = samples.colwise().mean().transpose();
    Eigen::VectorXd var = (samples.rowwise() - means[c].transpose())
                              .array()
                              .square()
                              .colwise()
                              .sum()
                              .transpose() /
                          n_per_class;
    variances[c] = var.cwiseMax(kVarianceFloor);
  }
  return TerrainClassifier(std::move(means), std::move(variances));
}

FeatureMap classified_features(const TerrainClassifier& classifier,
                               const FeatureMap& raw) {
  Eigen::MatrixXd values =
      Eigen::MatrixXd::Zero(TerrainClassifier::kNumClasses, raw.num_states());
  for (int s = 0; s < raw.num_states(); ++s) {
    values(classifier.classify(raw.state(s)), s) = 1.0;
  }
  return FeatureMap(std::move(values));
}

WeightVector random_side_effects_proxy(std::uint64_t seed, double lo,
                                       double hi) {
  if (!(lo < hi)) throw std::invalid_argument("bounds must satisfy lo < hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  WeightVector w = WeightVector::Zero(kNumTerrains);
  for (Terrain t : kSafeTerrains) w[terrain_index(t)] = unif(rng);
  return w;
}

WeightVector random_two_sensor_proxy(std::uint64_t seed, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("bounds must satisfy lo < hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  WeightVector w = WeightVector::Zero(6);
  for (int attempt = 0; attempt < kMaxProxyDraws; ++attempt) {
    for (int i = 0; i < 3; ++i) w[i] = unif(rng);
    if (w[2] > w[0] && w[2] > w[1]) return w;
  }
  throw std::runtime_error("could not draw a proxy with the target dominant");
}

}  // namespace ird

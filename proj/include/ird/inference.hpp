#pragma once

#include "ird/features.hpp"
#include "ird/grid_world.hpp"
#include "ird/maxent.hpp"
#include "ird/types.hpp"

#include <Eigen/Dense>

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace ird {

enum class PriorKind { UniformBox, Gaussian };

// Proper prior over weight vectors; log_density is normalized and returns
// -inf outside a box prior's support.
struct Prior {
  PriorKind kind = PriorKind::UniformBox;
  Eigen::VectorXd lower, upper;   // uniform box bounds
  Eigen::VectorXd mean, stddev;   // gaussian parameters

  static Prior uniform_box(int dim, double lo, double hi);
  static Prior gaussian(Eigen::VectorXd mean, Eigen::VectorXd stddev);

  int dim() const;
  double log_density(const WeightVector& w) const;
  WeightVector sample(std::mt19937_64& rng) const;
  WeightVector clip_to_support(const WeightVector& w) const;
};

// The observed proxy reward together with the world it was designed for.
// Caches the expected feature counts of the soft-planner policy for the
// proxy weights, which every likelihood evaluation reuses.
class ProxyObservation {
 public:
  ProxyObservation(WeightVector proxy_weights, const WorldModel& world,
                   const FeatureMap& fmap, double beta);

  const WeightVector& proxy_weights() const { return proxy_weights_; }
  const WorldModel& training_world() const { return *world_; }
  const FeatureMap& training_features() const { return *fmap_; }
  double beta() const { return beta_; }
  const Eigen::VectorXd& proxy_feature_counts() const {
    return proxy_feature_counts_;
  }

 private:
  WeightVector proxy_weights_;
  const WorldModel* world_;
  const FeatureMap* fmap_;
  double beta_;
  Eigen::VectorXd proxy_feature_counts_;
};

// Weight samples used by the finite-sum normalizer, with their expected
// feature counts precomputed in the training world. world_fingerprint guards
// against reusing counts computed for a different world.
struct NormalizerCandidates {
  std::vector<WeightVector> weights;
  std::vector<Eigen::VectorXd> feature_counts;
  std::uint64_t world_fingerprint = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

enum class ZMode { SampleZ, MaxEntZ };

const char* z_mode_name(ZMode mode);

double designer_log_likelihood(const WeightVector& w,
                               const ProxyObservation& proxy);

// Finite-sum normalizer over the candidate weights plus the evaluated weight
// itself. literal_self_term reproduces a published variant that leaves the
// self term outside the exponential; with it the sum can go nonpositive, in
// which case the result is -inf.
double log_normalizer_sample_z(const WeightVector& w,
                               const NormalizerCandidates& cands,
                               const ProxyObservation& proxy,
                               bool literal_self_term = false);

// Trajectory-integral normalizer: beta times the soft planner's log-partition
// for w in the training world.
double log_normalizer_maxent_z(const WeightVector& w,
                               const ProxyObservation& proxy);

double posterior_log_density(const WeightVector& w,
                             const ProxyObservation& proxy, const Prior& prior,
                             ZMode mode,
                             const NormalizerCandidates* cands = nullptr,
                             bool literal_self_term = false);

// Buffer-reusing posterior evaluator for the sampler hot path. Holds
// references to proxy/prior/cands; keep them alive while in use.
class PosteriorDensity {
 public:
  PosteriorDensity(const ProxyObservation& proxy, const Prior& prior,
                   ZMode mode, const NormalizerCandidates* cands = nullptr,
                   bool literal_self_term = false);

  double log_density(const WeightVector& w);

 private:
  const ProxyObservation* proxy_;
  const Prior* prior_;
  ZMode mode_;
  const NormalizerCandidates* cands_;
  bool literal_self_term_;
  MaxEntEvaluator eval_;
  Eigen::MatrixXd candidate_features_;  // dim x N
  Eigen::VectorXd candidate_dots_;
  Eigen::VectorXd self_features_;
};

struct McmcConfig {
  int chain_length = 20000;
  int burn_in = 5000;
  int thinning = 10;
  double proposal_stddev = 0.25;
  std::uint64_t seed = 0;
};

struct PosteriorSamples {
  std::vector<WeightVector> samples;
  double acceptance_rate = 0.0;
  McmcConfig config;
  ZMode mode = ZMode::MaxEntZ;
  bool sample_z_literal = false;
  int n_candidates = 0;
  double beta = 1.0;
};

// Expected feature counts for each weight vector, computed in the proxy's
// training world.
NormalizerCandidates candidates_for_weights(std::vector<WeightVector> weights,
                                            const ProxyObservation& proxy);

NormalizerCandidates draw_normalizer_candidates(const Prior& prior, int n,
                                                const ProxyObservation& proxy,
                                                std::uint64_t seed);

// Random-walk Metropolis-Hastings with isotropic Gaussian proposals, started
// from the proxy weights clipped to the prior support. Records the current
// state every `thinning` steps after burn-in. Throws if no proposal is
// accepted after burn-in.
PosteriorSamples sample_posterior(const ProxyObservation& proxy,
                                  const Prior& prior, ZMode mode,
                                  const McmcConfig& mcmc,
                                  const NormalizerCandidates* cands = nullptr,
                                  bool literal_self_term = false);

// Pilot chains that pick a proposal step for sample_posterior. Runs short
// Metropolis rounds, nudging log(stddev) toward the 0.234 random-walk
// acceptance optimum with a decaying gain; a fixed stddev is wasteful in high
// dimension where near-certain acceptance means the chain barely moves.
// Deterministic given mcmc.seed; ignores mcmc.proposal_stddev.
double tune_proposal_stddev(const ProxyObservation& proxy, const Prior& prior,
                            ZMode mode, const McmcConfig& mcmc,
                            const NormalizerCandidates* cands = nullptr,
                            bool literal_self_term = false);

std::string posterior_to_json(const PosteriorSamples& samples);
PosteriorSamples posterior_from_json(const std::string& text);

}  // namespace ird

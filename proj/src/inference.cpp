#include "ird/inference.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ird {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

Prior Prior::uniform_box(int dim, double lo, double hi) {
  if (dim < 1) throw std::invalid_argument("prior dimension must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("box bounds must satisfy lo < hi");
  Prior p;
  p.kind = PriorKind::UniformBox;
  p.lower = Eigen::VectorXd::Constant(dim, lo);
  p.upper = Eigen::VectorXd::Constant(dim, hi);
  return p;
}

Prior Prior::gaussian(Eigen::VectorXd mean, Eigen::VectorXd stddev) {
  if (mean.size() < 1 || mean.size() != stddev.size()) {
    throw std::invalid_argument("gaussian prior parameter sizes disagree");
  }
  if ((stddev.array() <= 0.0).any()) {
    throw std::invalid_argument("gaussian prior stddev must be positive");
  }
  Prior p;
  p.kind = PriorKind::Gaussian;
  p.mean = std::move(mean);
  p.stddev = std::move(stddev);
  return p;
}

int Prior::dim() const {
  return kind == PriorKind::UniformBox ? static_cast<int>(lower.size())
                                       : static_cast<int>(mean.size());
}

double Prior::log_density(const WeightVector& w) const {
  if (w.size() != dim()) {
    throw std::invalid_argument("weight dimension does not match prior");
  }
  if (kind == PriorKind::UniformBox) {
    if ((w.array() < lower.array()).any() || (w.array() > upper.array()).any()) {
      return kNegInf;
    }
    return -(upper - lower).array().log().sum();
  }
  const Eigen::ArrayXd z = (w - mean).array() / stddev.array();
  return -0.5 * z.square().sum() - stddev.array().log().sum() -
         0.5 * dim() * std::log(2.0 * M_PI);
}

WeightVector Prior::sample(std::mt19937_64& rng) const {
  WeightVector w(dim());
  if (kind == PriorKind::UniformBox) {
    for (int i = 0; i < w.size(); ++i) {
      std::uniform_real_distribution<double> u(lower[i], upper[i]);
      w[i] = u(rng);
    }
  } else {
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < w.size(); ++i) w[i] = mean[i] + stddev[i] * n(rng);
  }
  return w;
}

WeightVector Prior::clip_to_support(const WeightVector& w) const {
  if (w.size() != dim()) {
    throw std::invalid_argument("weight dimension does not match prior");
  }
  if (kind != PriorKind::UniformBox) return w;
  return w.cwiseMax(lower).cwiseMin(upper);
}

ProxyObservation::ProxyObservation(WeightVector proxy_weights,
                                   const WorldModel& world,
                                   const FeatureMap& fmap, double beta)
    : proxy_weights_(std::move(proxy_weights)),
      world_(&world),
      fmap_(&fmap),
      beta_(beta) {
  if (!(beta >= 0.0)) {
    throw std::invalid_argument("beta must be finite and >= 0");
  }
  check_dimensions(world, fmap, proxy_weights_);
  MaxEntEvaluator eval(world, fmap);
  eval.log_partition_and_features(proxy_weights_, proxy_feature_counts_);
}

const char* z_mode_name(ZMode mode) {
  return mode == ZMode::SampleZ ? "sample-z" : "maxent-z";
}

double designer_log_likelihood(const WeightVector& w,
                               const ProxyObservation& proxy) {
  if (w.size() != proxy.proxy_weights().size()) {
    throw std::invalid_argument("weight dimension does not match proxy");
  }
  if (!w.allFinite()) throw std::invalid_argument("weights must be finite");
  return proxy.beta() * w.dot(proxy.proxy_feature_counts());
}

namespace {

double sample_z_from_terms(double beta, double self_dot,
                           const Eigen::VectorXd& cand_dots, bool literal) {
  const int n = static_cast<int>(cand_dots.size());
  if (literal) {
    // Self term enters the sum un-exponentiated; the total can then be
    // nonpositive, which has no log.
    double total = self_dot;
    for (int i = 0; i < n; ++i) total += std::exp(beta * cand_dots[i]);
    return total > 0.0 ? std::log(total) : kNegInf;
  }
  double m = beta * self_dot;
  for (int i = 0; i < n; ++i) m = std::max(m, beta * cand_dots[i]);
  double acc = std::exp(beta * self_dot - m);
  for (int i = 0; i < n; ++i) acc += std::exp(beta * cand_dots[i] - m);
  return m + std::log(acc);
}

}  // namespace

double log_normalizer_sample_z(const WeightVector& w,
                               const NormalizerCandidates& cands,
                               const ProxyObservation& proxy,
                               bool literal_self_term) {
  if (cands.world_fingerprint != 0 &&
      cands.world_fingerprint != proxy.training_world().fingerprint()) {
    throw std::invalid_argument(
        "candidate feature counts were computed for a different world");
  }
  MaxEntEvaluator eval(proxy.training_world(), proxy.training_features());
  Eigen::VectorXd self_features;
  eval.log_partition_and_features(w, self_features);
  Eigen::VectorXd dots(cands.size());
  for (int i = 0; i < cands.size(); ++i) dots[i] = w.dot(cands.feature_counts[i]);
  return sample_z_from_terms(proxy.beta(), w.dot(self_features), dots,
                             literal_self_term);
}

double log_normalizer_maxent_z(const WeightVector& w,
                               const ProxyObservation& proxy) {
  MaxEntEvaluator eval(proxy.training_world(), proxy.training_features());
  return proxy.beta() * eval.log_partition(w);
}

PosteriorDensity::PosteriorDensity(const ProxyObservation& proxy,
                                   const Prior& prior, ZMode mode,
                                   const NormalizerCandidates* cands,
                                   bool literal_self_term)
    : proxy_(&proxy),
      prior_(&prior),
      mode_(mode),
      cands_(cands),
      literal_self_term_(literal_self_term),
      eval_(proxy.training_world(), proxy.training_features()) {
  if (prior.dim() != proxy.proxy_weights().size()) {
    throw std::invalid_argument("prior dimension does not match proxy");
  }
  if (mode_ == ZMode::SampleZ) {
    if (cands_ == nullptr) {
      throw std::invalid_argument("sample-z requires normalizer candidates");
    }
    if (cands_->world_fingerprint != 0 &&
        cands_->world_fingerprint != proxy.training_world().fingerprint()) {
      throw std::invalid_argument(
          "candidate feature counts were computed for a different world");
    }
    const int dim = static_cast<int>(proxy.proxy_weights().size());
    candidate_features_.resize(dim, cands_->size());
    for (int i = 0; i < cands_->size(); ++i) {
      if (cands_->feature_counts[i].size() != dim) {
        throw std::invalid_argument("candidate feature dimension mismatch");
      }
      candidate_features_.col(i) = cands_->feature_counts[i];
    }
    candidate_dots_.resize(cands_->size());
  }
}

double PosteriorDensity::log_density(const WeightVector& w) {
  const double prior_ld = prior_->log_density(w);
  if (prior_ld == kNegInf) return kNegInf;
  const double loglik = proxy_->beta() * w.dot(proxy_->proxy_feature_counts());
  double log_z;
  if (mode_ == ZMode::MaxEntZ) {
    log_z = proxy_->beta() * eval_.log_partition(w);
  } else {
    eval_.log_partition_and_features(w, self_features_);
    candidate_dots_.noalias() = candidate_features_.transpose() * w;
    log_z = sample_z_from_terms(proxy_->beta(), w.dot(self_features_),
                                candidate_dots_, literal_self_term_);
    if (!std::isfinite(log_z)) return kNegInf;
  }
  return loglik - log_z + prior_ld;
}

double posterior_log_density(const WeightVector& w,
                             const ProxyObservation& proxy, const Prior& prior,
                             ZMode mode, const NormalizerCandidates* cands,
                             bool literal_self_term) {
  PosteriorDensity density(proxy, prior, mode, cands, literal_self_term);
  return density.log_density(w);
}

NormalizerCandidates candidates_for_weights(std::vector<WeightVector> weights,
                                            const ProxyObservation& proxy) {
  NormalizerCandidates cands;
  cands.weights = std::move(weights);
  cands.feature_counts.reserve(cands.weights.size());
  MaxEntEvaluator eval(proxy.training_world(), proxy.training_features());
  Eigen::VectorXd phi;
  for (const WeightVector& w : cands.weights) {
    eval.log_partition_and_features(w, phi);
    cands.feature_counts.push_back(phi);
  }
  cands.world_fingerprint = proxy.training_world().fingerprint();
  return cands;
}

NormalizerCandidates draw_normalizer_candidates(const Prior& prior, int n,
                                                const ProxyObservation& proxy,
                                                std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one candidate");
  if (prior.dim() != proxy.proxy_weights().size()) {
    throw std::invalid_argument("prior dimension does not match proxy");
  }
  std::mt19937_64 rng(seed);
  std::vector<WeightVector> weights;
  weights.reserve(n);
  for (int i = 0; i < n; ++i) weights.push_back(prior.sample(rng));
  return candidates_for_weights(std::move(weights), proxy);
}

PosteriorSamples sample_posterior(const ProxyObservation& proxy,
                                  const Prior& prior, ZMode mode,
                                  const McmcConfig& mcmc,
                                  const NormalizerCandidates* cands,
                                  bool literal_self_term) {
  if (mcmc.chain_length <= mcmc.burn_in) {
    throw std::invalid_argument("chain_length must exceed burn_in");
  }
  if (mcmc.burn_in < 0 || mcmc.thinning < 1) {
    throw std::invalid_argument("burn_in must be >= 0 and thinning >= 1");
  }
  if (!(mcmc.proposal_stddev > 0.0)) {
    throw std::invalid_argument("proposal_stddev must be positive");
  }
  PosteriorDensity density(proxy, prior, mode, cands, literal_self_term);

  std::mt19937_64 rng(mcmc.seed);
  std::normal_distribution<double> step(0.0, mcmc.proposal_stddev);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  WeightVector current = prior.clip_to_support(proxy.proxy_weights());
  double current_ld = density.log_density(current);
  WeightVector proposal(current.size());

  PosteriorSamples out;
  out.config = mcmc;
  out.mode = mode;
  out.sample_z_literal = literal_self_term;
  out.n_candidates = cands != nullptr ? cands->size() : 0;
  out.beta = proxy.beta();
  out.samples.reserve((mcmc.chain_length - mcmc.burn_in + mcmc.thinning - 1) /
                      mcmc.thinning);

  long long accepted = 0;
  long long accepted_after_burn_in = 0;
  for (int t = 0; t < mcmc.chain_length; ++t) {
    for (int i = 0; i < proposal.size(); ++i) proposal[i] = current[i] + step(rng);
    const double proposal_ld = density.log_density(proposal);
    bool accept = false;
    if (proposal_ld != kNegInf) {
      accept = proposal_ld >= current_ld ||
               std::log(unif(rng)) < proposal_ld - current_ld;
    }
    if (accept) {
      current.swap(proposal);
      current_ld = proposal_ld;
      ++accepted;
      if (t >= mcmc.burn_in) ++accepted_after_burn_in;
    }
    if (t >= mcmc.burn_in && (t - mcmc.burn_in) % mcmc.thinning == 0) {
      out.samples.push_back(current);
    }
  }
  out.acceptance_rate = static_cast<double>(accepted) / mcmc.chain_length;
  if (accepted_after_burn_in == 0) {
    throw std::runtime_error(
        "no proposals accepted after burn-in; adjust proposal_stddev or chain "
        "length");
  }
  return out;
}

double tune_proposal_stddev(const ProxyObservation& proxy, const Prior& prior,
                            ZMode mode, const McmcConfig& mcmc,
                            const NormalizerCandidates* cands,
                            bool literal_self_term) {
  constexpr int kRounds = 15;
  constexpr int kStepsPerRound = 400;
  constexpr double kTargetAcceptance = 0.234;
  PosteriorDensity density(proxy, prior, mode, cands, literal_self_term);

  std::mt19937_64 rng(mix_seed(mcmc.seed ^ 0xad0be5u));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  WeightVector current = prior.clip_to_support(proxy.proxy_weights());
  double current_ld = density.log_density(current);
  WeightVector proposal(current.size());

  // 2.38/sqrt(d) is the classical step for a unit-scale d-dimensional target;
  // the rounds correct for the actual posterior scale.
  double log_sigma = std::log(2.38 / std::sqrt(static_cast<double>(current.size())));
  for (int round = 0; round < kRounds; ++round) {
    const double sigma = std::exp(log_sigma);
    int accepted = 0;
    for (int t = 0; t < kStepsPerRound; ++t) {
      for (int i = 0; i < proposal.size(); ++i) {
        proposal[i] = current[i] + sigma * unit(rng);
      }
      const double proposal_ld = density.log_density(proposal);
      if (proposal_ld != kNegInf &&
          (proposal_ld >= current_ld ||
           std::log(unif(rng)) < proposal_ld - current_ld)) {
        current.swap(proposal);
        current_ld = proposal_ld;
        ++accepted;
      }
    }
    const double rate = static_cast<double>(accepted) / kStepsPerRound;
    const double gain = 1.2 / std::sqrt(static_cast<double>(round + 1));
    log_sigma += gain * (rate - kTargetAcceptance);
    log_sigma = std::clamp(log_sigma, std::log(1e-4), std::log(4.0));
  }
  return std::exp(log_sigma);
}

std::string posterior_to_json(const PosteriorSamples& samples) {
  nlohmann::json j;
  j["mode"] = z_mode_name(samples.mode);
  j["beta"] = samples.beta;
  j["seed"] = samples.config.seed;
  j["config"] = {{"chain_length", samples.config.chain_length},
                 {"burn_in", samples.config.burn_in},
                 {"thinning", samples.config.thinning},
                 {"proposal_stddev", samples.config.proposal_stddev},
                 {"sample_z_literal", samples.sample_z_literal},
                 {"n_candidates", samples.n_candidates}};
  nlohmann::json rows = nlohmann::json::array();
  for (const WeightVector& w : samples.samples) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < w.size(); ++i) row.push_back(w[i]);
    rows.push_back(std::move(row));
  }
  j["samples"] = std::move(rows);
  j["acceptance_rate"] = samples.acceptance_rate;
  return j.dump(2);
}

PosteriorSamples posterior_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  PosteriorSamples out;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "sample-z") {
    out.mode = ZMode::SampleZ;
  } else if (mode == "maxent-z") {
    out.mode = ZMode::MaxEntZ;
  } else {
    throw std::invalid_argument("unknown posterior mode: " + mode);
  }
  out.beta = j.at("beta").get<double>();
  out.config.seed = j.at("seed").get<std::uint64_t>();
  const nlohmann::json& cfg = j.at("config");
  out.config.chain_length = cfg.at("chain_length").get<int>();
  out.config.burn_in = cfg.at("burn_in").get<int>();
  out.config.thinning = cfg.at("thinning").get<int>();
  out.config.proposal_stddev = cfg.at("proposal_stddev").get<double>();
  out.sample_z_literal = cfg.at("sample_z_literal").get<bool>();
  out.n_candidates = cfg.at("n_candidates").get<int>();
  for (const nlohmann::json& row : j.at("samples")) {
    WeightVector w(row.size());
    for (int i = 0; i < w.size(); ++i) w[i] = row[i].get<double>();
    out.samples.push_back(std::move(w));
  }
  out.acceptance_rate = j.at("acceptance_rate").get<double>();
  return out;
}

}  // namespace ird

#include <doctest.h>

#include "ird/inference.hpp"
#include "ird/oracle_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

using namespace ird;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

TerrainLayout plain_layout(int width, int height) {
  TerrainLayout layout;
  layout.width = width;
  layout.height = height;
  layout.cells.assign(static_cast<std::size_t>(width) * height, Terrain::Dirt);
  return layout;
}

FeatureMap gaussian_features(std::mt19937_64& rng, int dim, int states) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd f(dim, states);
  for (int c = 0; c < states; ++c)
    for (int r = 0; r < dim; ++r) f(r, c) = normal(rng);
  return FeatureMap(std::move(f));
}

// Kolmogorov-Smirnov distance of samples against Uniform(lo, hi).
double ks_uniform(std::vector<double> xs, double lo, double hi) {
  std::sort(xs.begin(), xs.end());
  const int n = static_cast<int>(xs.size());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = (xs[i] - lo) / (hi - lo);
    d = std::max(d, std::abs(cdf - (i + 1.0) / n));
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace

TEST_CASE("uniform box prior density and support") {
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  WeightVector in(2), out(2);
  in << 0.5, -1.0;
  out << 2.5, 0.0;
  CHECK(prior.log_density(in) == doctest::Approx(-std::log(16.0)));
  CHECK(prior.log_density(out) == kNegInf);
  CHECK(prior.clip_to_support(out)[0] == 2.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const WeightVector w = prior.sample(rng);
    CHECK(prior.log_density(w) > kNegInf);
  }
  CHECK_THROWS_AS(Prior::uniform_box(0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Prior::uniform_box(2, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("gaussian prior density matches the closed form") {
  Eigen::VectorXd mean(2), stddev(2);
  mean << 1.0, -1.0;
  stddev << 0.5, 2.0;
  const Prior prior = Prior::gaussian(mean, stddev);
  WeightVector w(2);
  w << 1.5, 0.0;
  const double expect = -0.5 * (1.0 + 0.25) - std::log(0.5) - std::log(2.0) -
                        std::log(2.0 * M_PI);
  CHECK(prior.log_density(w) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(prior.clip_to_support(w) == w);  // unbounded support
  Eigen::VectorXd bad_sd(2);
  bad_sd << 1.0, 0.0;
  CHECK_THROWS_AS(Prior::gaussian(mean, bad_sd), std::invalid_argument);
}

TEST_CASE("proxy observation caches the training feature counts") {
  std::mt19937_64 rng(7);
  const WorldModel world = build_world(plain_layout(3, 3), 4, 0);
  const FeatureMap fmap = gaussian_features(rng, 3, 9);
  WeightVector proxy_w(3);
  proxy_w << 0.8, -0.3, 1.1;
  const ProxyObservation proxy(proxy_w, world, fmap, 1.5);
  const Eigen::VectorXd ref = enum_expected_features(world, fmap, proxy_w);
  CHECK((proxy.proxy_feature_counts() - ref).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(proxy.beta() == 1.5);
  CHECK_THROWS_AS(ProxyObservation(proxy_w, world, fmap, -0.5),
                  std::invalid_argument);
}

TEST_CASE("designer log likelihood is the scaled feature projection") {
  std::mt19937_64 rng(8);
  const WorldModel world = build_world(plain_layout(4, 4), 4, 5);
  const FeatureMap fmap = gaussian_features(rng, 3, 16);
  const WeightVector proxy_w = random_weights(rng, 3, -1.0, 1.0);
  const ProxyObservation hot(proxy_w, world, fmap, 2.0);
  const ProxyObservation cold(proxy_w, world, fmap, 0.0);
  const WeightVector w = random_weights(rng, 3, -1.0, 1.0);
  CHECK(designer_log_likelihood(w, cold) == 0.0);
  CHECK(designer_log_likelihood(Eigen::VectorXd::Zero(3), hot) == 0.0);
  const Eigen::VectorXd ref = enum_expected_features(world, fmap, proxy_w);
  CHECK(designer_log_likelihood(w, hot) ==
        doctest::Approx(2.0 * w.dot(ref)).epsilon(1e-9));
  // Doubling beta doubles the log likelihood.
  CHECK(designer_log_likelihood(w, hot) ==
        doctest::Approx(2.0 * designer_log_likelihood(
                                  w, ProxyObservation(proxy_w, world, fmap, 1.0)))
            .epsilon(1e-12));
  WeightVector nan3(3);
  nan3 << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
  CHECK_THROWS_AS(designer_log_likelihood(nan3, hot), std::invalid_argument);
}

TEST_CASE("candidate-sum normalizer special values") {
  std::mt19937_64 rng(9);
  const WorldModel world = build_world(plain_layout(2, 2), 3, 0);
  const FeatureMap fmap = gaussian_features(rng, 2, 4);
  const WeightVector proxy_w = random_weights(rng, 2, -1.0, 1.0);
  const ProxyObservation proxy(proxy_w, world, fmap, 1.0);
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  const NormalizerCandidates cands =
      draw_normalizer_candidates(prior, 8, proxy, 11);

  // w = 0: every term is exp(0), so the normalizer is log(N + 1).
  CHECK(log_normalizer_sample_z(Eigen::VectorXd::Zero(2), cands, proxy) ==
        doctest::Approx(std::log(9.0)).epsilon(1e-12));

  // Empty candidate set leaves only the self term.
  NormalizerCandidates empty;
  empty.world_fingerprint = world.fingerprint();
  const WeightVector w = random_weights(rng, 2, -1.0, 1.0);
  MaxEntEvaluator eval(world, fmap);
  Eigen::VectorXd phi_w;
  eval.log_partition_and_features(w, phi_w);
  CHECK(log_normalizer_sample_z(w, empty, proxy) ==
        doctest::Approx(w.dot(phi_w)).epsilon(1e-10));

  // Direct recomputation with enumeration-oracle feature counts.
  double max_term = w.dot(enum_expected_features(world, fmap, w));
  std::vector<double> terms = {max_term};
  for (const WeightVector& cw : cands.weights) {
    terms.push_back(w.dot(enum_expected_features(world, fmap, cw)));
  }
  for (double t : terms) max_term = std::max(max_term, t);
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  CHECK(log_normalizer_sample_z(w, cands, proxy) ==
        doctest::Approx(max_term + std::log(acc)).epsilon(1e-9));
}

TEST_CASE("beta zero collapses the candidate-sum normalizer") {
  std::mt19937_64 rng(10);
  const WorldModel world = build_world(plain_layout(2, 2), 3, 0);
  const FeatureMap fmap = gaussian_features(rng, 2, 4);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               0.0);
  const NormalizerCandidates cands = draw_normalizer_candidates(
      Prior::uniform_box(2, -2.0, 2.0), 5, proxy, 12);
  const WeightVector w = random_weights(rng, 2, -1.5, 1.5);
  CHECK(log_normalizer_sample_z(w, cands, proxy) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("trajectory-integral normalizer special values") {
  std::mt19937_64 rng(13);
  const WorldModel world = build_world(plain_layout(3, 2), 4, 0);
  const FeatureMap fmap = gaussian_features(rng, 2, 6);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               1.7);
  CHECK(log_normalizer_maxent_z(Eigen::VectorXd::Zero(2), proxy) ==
        doctest::Approx(1.7 * 4.0 * std::log(4.0)).epsilon(1e-12));
  const WeightVector w = random_weights(rng, 2, -1.5, 1.5);
  CHECK(log_normalizer_maxent_z(w, proxy) ==
        doctest::Approx(1.7 * enum_log_partition(world, fmap, w))
            .epsilon(1e-9));
}

TEST_CASE("literal self-term variant follows the printed formula") {
  const WorldModel world = build_world(plain_layout(1, 1), 3, 0);
  Eigen::MatrixXd f(1, 1);
  f << 1.0;
  const FeatureMap fmap(f);
  WeightVector proxy_w(1);
  proxy_w << 0.5;
  const ProxyObservation proxy(proxy_w, world, fmap, 1.0);
  WeightVector cand(1);
  cand << -5.0;
  const NormalizerCandidates cands = candidates_for_weights({cand}, proxy);

  // phi_w = phi_i = (H+1) f = 4 for every weight in this world, so the
  // candidate term is exp(beta * w * 4) regardless of the candidate draw.
  WeightVector w(1);
  w << 0.5;
  const double expect = std::log(0.5 * 4.0 + std::exp(0.5 * 4.0));
  CHECK(log_normalizer_sample_z(w, cands, proxy, true) ==
        doctest::Approx(expect).epsilon(1e-12));

  // Strongly negative self dot makes the literal total nonpositive.
  w << -10.0;
  CHECK(log_normalizer_sample_z(w, cands, proxy, true) == kNegInf);
  const Prior prior = Prior::uniform_box(1, -12.0, 12.0);
  CHECK(posterior_log_density(w, proxy, prior, ZMode::SampleZ, &cands, true) ==
        kNegInf);
  // The default exponentiated form stays finite at the same point.
  CHECK(std::isfinite(
      posterior_log_density(w, proxy, prior, ZMode::SampleZ, &cands, false)));
}

TEST_CASE("posterior density differences are prior-constant-free") {
  std::mt19937_64 rng(14);
  const WorldModel world = build_world(plain_layout(3, 3), 4, 2);
  const FeatureMap fmap = gaussian_features(rng, 2, 9);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               1.0);
  const Prior narrow = Prior::uniform_box(2, -2.0, 2.0);
  const Prior wide = Prior::uniform_box(2, -4.0, 4.0);
  const NormalizerCandidates cands =
      draw_normalizer_candidates(narrow, 6, proxy, 15);
  for (ZMode mode : {ZMode::SampleZ, ZMode::MaxEntZ}) {
    const NormalizerCandidates* c = mode == ZMode::SampleZ ? &cands : nullptr;
    for (int trial = 0; trial < 5; ++trial) {
      const WeightVector wa = random_weights(rng, 2, -1.9, 1.9);
      const WeightVector wb = random_weights(rng, 2, -1.9, 1.9);
      const double narrow_diff =
          posterior_log_density(wa, proxy, narrow, mode, c) -
          posterior_log_density(wb, proxy, narrow, mode, c);
      const double wide_diff =
          posterior_log_density(wa, proxy, wide, mode, c) -
          posterior_log_density(wb, proxy, wide, mode, c);
      CHECK(narrow_diff == doctest::Approx(wide_diff).epsilon(1e-10));
    }
  }
}

TEST_CASE("posterior density is minus infinity outside the prior box") {
  std::mt19937_64 rng(16);
  const WorldModel world = build_world(plain_layout(2, 2), 3, 0);
  const FeatureMap fmap = gaussian_features(rng, 2, 4);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               1.0);
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  WeightVector outside(2);
  outside << 3.0, 0.0;
  CHECK(posterior_log_density(outside, proxy, prior, ZMode::MaxEntZ) == kNegInf);
}

TEST_CASE("feature translations preserve posterior density differences") {
  std::mt19937_64 rng(17);
  const RandomInstance inst = random_instance(rng, 3, 4, 3);
  const int dim = inst.features.dim();
  const WeightVector proxy_w = random_weights(rng, dim, -1.5, 1.5);
  const Prior prior = Prior::uniform_box(dim, -2.0, 2.0);
  Eigen::VectorXd offset(dim);
  for (int i = 0; i < dim; ++i) offset[i] = 0.3 + 0.2 * i;
  const FeatureMap shifted = inst.features.shifted(offset);
  const ProxyObservation base(proxy_w, inst.world, inst.features, 1.0);
  const ProxyObservation moved(proxy_w, inst.world, shifted, 1.0);
  std::vector<WeightVector> cw;
  for (int i = 0; i < 6; ++i) cw.push_back(random_weights(rng, dim, -2.0, 2.0));
  const NormalizerCandidates base_cands = candidates_for_weights(cw, base);
  const NormalizerCandidates moved_cands = candidates_for_weights(cw, moved);
  for (ZMode mode : {ZMode::SampleZ, ZMode::MaxEntZ}) {
    for (int trial = 0; trial < 5; ++trial) {
      const WeightVector wa = random_weights(rng, dim, -2.0, 2.0);
      const WeightVector wb = random_weights(rng, dim, -2.0, 2.0);
      const double before =
          posterior_log_density(wa, base, prior, mode,
                                mode == ZMode::SampleZ ? &base_cands : nullptr) -
          posterior_log_density(wb, base, prior, mode,
                                mode == ZMode::SampleZ ? &base_cands : nullptr);
      const double after =
          posterior_log_density(wa, moved, prior, mode,
                                mode == ZMode::SampleZ ? &moved_cands : nullptr) -
          posterior_log_density(wb, moved, prior, mode,
                                mode == ZMode::SampleZ ? &moved_cands : nullptr);
      CHECK(before == doctest::Approx(after).epsilon(1e-8));
    }
  }
}

TEST_CASE("single-state training world carries no reward information") {
  std::mt19937_64 rng(18);
  const WorldModel world = build_world(plain_layout(1, 1), 3, 0);
  Eigen::MatrixXd f(2, 1);
  f.col(0) << 0.4, -0.9;
  const FeatureMap fmap(f);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               1.3);
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  const NormalizerCandidates cands =
      draw_normalizer_candidates(prior, 4, proxy, 19);
  for (ZMode mode : {ZMode::SampleZ, ZMode::MaxEntZ}) {
    const NormalizerCandidates* c = mode == ZMode::SampleZ ? &cands : nullptr;
    for (int trial = 0; trial < 5; ++trial) {
      const WeightVector wa = random_weights(rng, 2, -1.9, 1.9);
      const WeightVector wb = random_weights(rng, 2, -1.9, 1.9);
      const double diff = posterior_log_density(wa, proxy, prior, mode, c) -
                          posterior_log_density(wb, proxy, prior, mode, c);
      CHECK(diff == doctest::Approx(prior.log_density(wa) -
                                    prior.log_density(wb))
                        .epsilon(1e-10));
    }
  }
}

TEST_CASE("candidate draws are reproducible and oracle-consistent") {
  std::mt19937_64 rng(20);
  const WorldModel world = build_world(plain_layout(4, 4), 4, 3);
  const FeatureMap fmap = gaussian_features(rng, 3, 16);
  const ProxyObservation proxy(random_weights(rng, 3, -1.0, 1.0), world, fmap,
                               1.0);
  const Prior prior = Prior::uniform_box(3, -2.0, 2.0);
  const NormalizerCandidates a = draw_normalizer_candidates(prior, 5, proxy, 77);
  const NormalizerCandidates b = draw_normalizer_candidates(prior, 5, proxy, 77);
  REQUIRE(a.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(a.weights[i] == b.weights[i]);
    CHECK(a.feature_counts[i] == b.feature_counts[i]);
    const Eigen::VectorXd ref =
        enum_expected_features(world, fmap, a.weights[i]);
    CHECK((a.feature_counts[i] - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK_THROWS_AS(draw_normalizer_candidates(prior, 0, proxy, 1),
                  std::invalid_argument);
}

TEST_CASE("candidates bound to one world are rejected in another") {
  std::mt19937_64 rng(21);
  const WorldModel world_a = build_world(plain_layout(3, 3), 3, 0);
  const WorldModel world_b = build_world(plain_layout(3, 3), 3, 1);
  const FeatureMap fmap = gaussian_features(rng, 2, 9);
  const WeightVector proxy_w = random_weights(rng, 2, -1.0, 1.0);
  const ProxyObservation proxy_a(proxy_w, world_a, fmap, 1.0);
  const ProxyObservation proxy_b(proxy_w, world_b, fmap, 1.0);
  const NormalizerCandidates cands = draw_normalizer_candidates(
      Prior::uniform_box(2, -2.0, 2.0), 3, proxy_a, 5);
  const WeightVector w = random_weights(rng, 2, -1.0, 1.0);
  CHECK_THROWS_AS(log_normalizer_sample_z(w, cands, proxy_b),
                  std::invalid_argument);
}

TEST_CASE("sampler validates its configuration") {
  std::mt19937_64 rng(22);
  const WorldModel world = build_world(plain_layout(2, 2), 3, 0);
  const FeatureMap fmap = gaussian_features(rng, 2, 4);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               1.0);
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  McmcConfig mcmc;
  mcmc.chain_length = 100;
  mcmc.burn_in = 100;
  CHECK_THROWS_AS(sample_posterior(proxy, prior, ZMode::MaxEntZ, mcmc),
                  std::invalid_argument);
  mcmc.burn_in = 10;
  mcmc.thinning = 0;
  CHECK_THROWS_AS(sample_posterior(proxy, prior, ZMode::MaxEntZ, mcmc),
                  std::invalid_argument);
  mcmc.thinning = 1;
  mcmc.proposal_stddev = 0.0;
  CHECK_THROWS_AS(sample_posterior(proxy, prior, ZMode::MaxEntZ, mcmc),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_posterior(proxy, prior, ZMode::SampleZ, mcmc),
                  std::invalid_argument);  // missing candidates
}

TEST_CASE("sampler reports a pathological configuration") {
  std::mt19937_64 rng(23);
  const WorldModel world = build_world(plain_layout(2, 2), 3, 0);
  const FeatureMap fmap = gaussian_features(rng, 2, 4);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               1.0);
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  McmcConfig mcmc;
  mcmc.chain_length = 200;
  mcmc.burn_in = 20;
  mcmc.thinning = 1;
  mcmc.proposal_stddev = 1e9;  // proposals always leave the box
  CHECK_THROWS_AS(sample_posterior(proxy, prior, ZMode::MaxEntZ, mcmc),
                  std::runtime_error);
}

TEST_CASE("identical seeds reproduce the chain bitwise") {
  std::mt19937_64 rng(24);
  const WorldModel world = build_world(plain_layout(3, 3), 4, 4);
  const FeatureMap fmap = gaussian_features(rng, 2, 9);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               1.0);
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  McmcConfig mcmc;
  mcmc.chain_length = 2000;
  mcmc.burn_in = 200;
  mcmc.thinning = 4;
  mcmc.seed = 99;
  const PosteriorSamples a = sample_posterior(proxy, prior, ZMode::MaxEntZ, mcmc);
  const PosteriorSamples b = sample_posterior(proxy, prior, ZMode::MaxEntZ, mcmc);
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(a.acceptance_rate == b.acceptance_rate);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i] == b.samples[i]);
  }
  // Every recorded sample lies in the prior support.
  for (const WeightVector& w : a.samples) {
    CHECK(prior.log_density(w) > kNegInf);
  }
}

TEST_CASE("irrational designer recovers the prior") {
  std::mt19937_64 rng(25);
  const WorldModel world = build_world(plain_layout(2, 2), 3, 0);
  const FeatureMap fmap = gaussian_features(rng, 2, 4);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               0.0);
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  McmcConfig mcmc;
  mcmc.chain_length = 105000;
  mcmc.burn_in = 5000;
  mcmc.thinning = 10;
  mcmc.proposal_stddev = 1.0;
  mcmc.seed = 4;
  const PosteriorSamples post =
      sample_posterior(proxy, prior, ZMode::MaxEntZ, mcmc);
  REQUIRE(post.samples.size() == 10000);
  for (int d = 0; d < 2; ++d) {
    std::vector<double> xs;
    xs.reserve(post.samples.size());
    for (const WeightVector& w : post.samples) xs.push_back(w[d]);
    CHECK(ks_uniform(std::move(xs), -2.0, 2.0) < 0.05);
  }
}

TEST_CASE("single-state training world recovers the prior") {
  const WorldModel world = build_world(plain_layout(1, 1), 3, 0);
  Eigen::MatrixXd f(2, 1);
  f.col(0) << 1.0, -0.5;
  const FeatureMap fmap(f);
  WeightVector proxy_w(2);
  proxy_w << 1.2, 0.3;
  const ProxyObservation proxy(proxy_w, world, fmap, 1.0);
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  McmcConfig mcmc;
  mcmc.chain_length = 105000;
  mcmc.burn_in = 5000;
  mcmc.thinning = 10;
  mcmc.proposal_stddev = 1.0;
  mcmc.seed = 6;
  const PosteriorSamples post =
      sample_posterior(proxy, prior, ZMode::MaxEntZ, mcmc);
  for (int d = 0; d < 2; ++d) {
    std::vector<double> xs;
    xs.reserve(post.samples.size());
    for (const WeightVector& w : post.samples) xs.push_back(w[d]);
    CHECK(ks_uniform(std::move(xs), -2.0, 2.0) < 0.05);
  }
}

TEST_CASE("proxy weights globally maximize the trajectory-integral likelihood") {
  std::mt19937_64 rng(26);
  const WorldModel world = build_world(plain_layout(3, 3), 4, 0);
  const FeatureMap fmap = gaussian_features(rng, 3, 9);
  const WeightVector proxy_w = random_weights(rng, 3, -1.5, 1.5);
  const ProxyObservation proxy(proxy_w, world, fmap, 1.0);
  const Prior prior = Prior::uniform_box(3, -2.0, 2.0);
  McmcConfig mcmc;
  mcmc.chain_length = 5000;
  mcmc.burn_in = 1000;
  mcmc.thinning = 10;
  mcmc.seed = 31;
  const PosteriorSamples post =
      sample_posterior(proxy, prior, ZMode::MaxEntZ, mcmc);
  const auto loglik = [&](const WeightVector& w) {
    return designer_log_likelihood(w, proxy) - log_normalizer_maxent_z(w, proxy);
  };
  const double at_proxy = loglik(proxy_w);
  for (const WeightVector& w : post.samples) {
    CHECK(loglik(w) <= at_proxy + 1e-9);
  }
}

TEST_CASE("posterior samples round-trip through JSON exactly") {
  std::mt19937_64 rng(27);
  const WorldModel world = build_world(plain_layout(2, 2), 3, 0);
  const FeatureMap fmap = gaussian_features(rng, 2, 4);
  const ProxyObservation proxy(random_weights(rng, 2, -1.0, 1.0), world, fmap,
                               1.0);
  const Prior prior = Prior::uniform_box(2, -2.0, 2.0);
  const NormalizerCandidates cands =
      draw_normalizer_candidates(prior, 3, proxy, 8);
  McmcConfig mcmc;
  mcmc.chain_length = 500;
  mcmc.burn_in = 100;
  mcmc.thinning = 5;
  mcmc.seed = 12345;
  const PosteriorSamples post =
      sample_posterior(proxy, prior, ZMode::SampleZ, mcmc, &cands);
  const PosteriorSamples back = posterior_from_json(posterior_to_json(post));
  CHECK(back.mode == post.mode);
  CHECK(back.beta == post.beta);
  CHECK(back.acceptance_rate == post.acceptance_rate);
  CHECK(back.config.chain_length == post.config.chain_length);
  CHECK(back.config.burn_in == post.config.burn_in);
  CHECK(back.config.thinning == post.config.thinning);
  CHECK(back.config.proposal_stddev == post.config.proposal_stddev);
  CHECK(back.config.seed == post.config.seed);
  CHECK(back.n_candidates == post.n_candidates);
  REQUIRE(back.samples.size() == post.samples.size());
  for (std::size_t i = 0; i < post.samples.size(); ++i) {
    CHECK(back.samples[i] == post.samples[i]);
  }
}

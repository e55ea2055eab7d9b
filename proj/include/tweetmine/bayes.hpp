#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tweetmine/features.hpp"

namespace tweetmine {

struct ChainDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CoefPrior { gaussian, laplace };
enum class Likelihood { gaussian, student_t };

struct PriorSpec {
  CoefPrior coef_prior = CoefPrior::gaussian;
  double coef_scale = 1.0;        // prior scale on standardized features
  double intercept_scale = 10.0;  // gaussian prior scale on the intercept
  double sigma_scale = 1.0;       // half-normal prior scale on sigma
  std::optional<double> sigma_fixed;  // pin sigma instead of sampling it
  Likelihood likelihood = Likelihood::gaussian;
  std::optional<double> nu_fixed;     // pin the t dof (> 2)
  double nu_exp_rate = 1.0 / 29.0;    // otherwise nu ~ 2 + Exp(rate)
};

struct McmcConfig {
  int chains = 4;
  int iterations = 3000;  // per chain, including burn-in
  int burn_in = 1000;
  int thin = 1;           // must divide (iterations - burn_in)
  std::uint64_t seed = 0;
  double coef_step = 0.1;   // initial random-walk steps, adapted in burn-in
  double sigma_step = 0.5;  // on log sigma
  double nu_step = 0.5;     // on log(nu - 2)
};

struct PosteriorSamples {
  std::vector<std::string> param_names;  // intercept, features, [sigma], [nu]
  std::vector<std::vector<double>> draws;  // kept draws x params, chain-major
  int chains = 0;
  std::size_t draws_per_chain = 0;
  std::uint64_t seed = 0;

  std::vector<double> rhat;  // split-Rhat per parameter
  // post-burn-in acceptance rate per chain and proposal block
  std::vector<double> accept_coef, accept_sigma, accept_nu;

  std::vector<double> column(std::size_t param) const;
};

// Metropolis-within-Gibbs sampler: one joint random-walk block for the
// intercept+coefficients, a log-scale block for sigma, a log-scale block for
// nu when sampled. Step sizes adapt toward 20-40% acceptance during burn-in
// and are frozen afterwards. Identical seed+config give identical draws.
//
// Features are centered and scaled internally; draws are reported on the
// original scale. Zero-variance columns stay in the model (their posterior
// is the prior).
PosteriorSamples fit_bayes(const FeatureMatrix& X, const ReturnSeries& y,
                           const PriorSpec& prior, const McmcConfig& cfg);

// Per-parameter empirical quantiles with linear interpolation between order
// statistics (h = (n-1)q convention).
std::map<std::string, std::vector<double>> posterior_summary(
    const PosteriorSamples& s,
    const std::vector<double>& quantiles = {0.025, 0.25, 0.5, 0.75, 0.975});

double empirical_quantile(std::vector<double> draws, double q);

// Split-Rhat over per-chain sequences (each chain halved).
double split_rhat(const std::vector<std::vector<double>>& chains);

}  // namespace tweetmine

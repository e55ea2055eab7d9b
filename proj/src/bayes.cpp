#include "tweetmine/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tweetmine/rng.hpp"

namespace tweetmine {

std::vector<double> PosteriorSamples::column(std::size_t param) const {
  std::vector<double> out(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) out[i] = draws[i][param];
  return out;
}

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct Design {
  std::vector<std::vector<double>> cols;  // centered, scaled where possible
  std::vector<double> means, scales;      // scale 1 for constant columns
  std::vector<std::string> names;
  std::vector<double> y_centered;
  double y_mean = 0.0;
  std::size_t n = 0;
};

Design prepare(const FeatureMatrix& X, const ReturnSeries& y) {
  if (X.rows() != y.size() || X.dates != y.dates)
    throw std::invalid_argument("features and target are not aligned");
  if (y.size() < 2) throw std::invalid_argument("need at least two rows");

  Design d;
  d.n = y.size();
  const double n = static_cast<double>(d.n);
  for (double v : y.values) d.y_mean += v;
  d.y_mean /= n;
  d.y_centered.resize(d.n);
  for (std::size_t i = 0; i < d.n; ++i)
    d.y_centered[i] = y.values[i] - d.y_mean;

  for (std::size_t c = 0; c < X.cols(); ++c) {
    const auto& col = X.columns[c];
    double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= n;
    double sd = std::sqrt(var);
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) sd = 0.0;
    const double scale = sd > 0.0 ? sd : 1.0;
    std::vector<double> z(d.n);
    for (std::size_t i = 0; i < d.n; ++i) z[i] = (col[i] - mean) / scale;
    d.cols.push_back(std::move(z));
    d.means.push_back(mean);
    d.scales.push_back(scale);
    d.names.push_back(X.names[c]);
  }
  return d;
}

// State on the sampling scale: theta = [intercept, coefs...], u = log sigma,
// v = log(nu - 2).
struct ChainState {
  std::vector<double> theta;
  double u = 0.0;
  double v = 0.0;
};

class LogPosterior {
 public:
  LogPosterior(const Design& d, const PriorSpec& prior)
      : d_(d), prior_(prior) {}

  double operator()(const ChainState& s) const {
    const double sigma = prior_.sigma_fixed ? *prior_.sigma_fixed
                                            : std::exp(s.u);
    const double nu = nu_of(s);

    double lp = 0.0;
    // likelihood
    const std::size_t n = d_.n;
    for (std::size_t i = 0; i < n; ++i) {
      double mu = s.theta[0];
      for (std::size_t j = 0; j < d_.cols.size(); ++j)
        mu += s.theta[j + 1] * d_.cols[j][i];
      const double e = (d_.y_centered[i] - mu) / sigma;
      if (prior_.likelihood == Likelihood::gaussian) {
        lp += -0.5 * e * e - std::log(sigma);
      } else {
        lp += std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
              0.5 * std::log(nu * kPi) - std::log(sigma) -
              0.5 * (nu + 1.0) * std::log1p(e * e / nu);
      }
    }
    // priors
    const double a = s.theta[0] / prior_.intercept_scale;
    lp += -0.5 * a * a;
    for (std::size_t j = 1; j < s.theta.size(); ++j) {
      if (prior_.coef_prior == CoefPrior::gaussian) {
        const double b = s.theta[j] / prior_.coef_scale;
        lp += -0.5 * b * b;
      } else {
        lp += -std::abs(s.theta[j]) / prior_.coef_scale;
      }
    }
    if (!prior_.sigma_fixed) {
      const double hs = sigma / prior_.sigma_scale;
      lp += -0.5 * hs * hs + s.u;  // half-normal density + log-scale Jacobian
    }
    if (samples_nu()) {
      lp += -prior_.nu_exp_rate * (nu - 2.0) + s.v;  // Exp prior + Jacobian
    }
    return lp;
  }

  bool samples_sigma() const { return !prior_.sigma_fixed.has_value(); }
  bool samples_nu() const {
    return prior_.likelihood == Likelihood::student_t &&
           !prior_.nu_fixed.has_value();
  }
  double nu_of(const ChainState& s) const {
    if (prior_.likelihood != Likelihood::student_t) return 0.0;
    return prior_.nu_fixed ? *prior_.nu_fixed : 2.0 + std::exp(s.v);
  }

 private:
  const Design& d_;
  const PriorSpec& prior_;
};

void validate(const PriorSpec& prior, const McmcConfig& cfg) {
  if (prior.coef_scale <= 0 || prior.intercept_scale <= 0 ||
      prior.sigma_scale <= 0)
    throw std::invalid_argument("prior scales must be positive");
  if (prior.sigma_fixed && *prior.sigma_fixed <= 0)
    throw std::invalid_argument("fixed sigma must be positive");
  if (prior.nu_fixed && *prior.nu_fixed <= 2)
    throw std::invalid_argument("fixed nu must exceed 2");
  if (prior.likelihood == Likelihood::student_t && !prior.nu_fixed &&
      prior.nu_exp_rate <= 0)
    throw std::invalid_argument("nu prior rate must be positive");
  if (cfg.chains < 2) throw std::invalid_argument("need at least 2 chains");
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.iterations)
    throw std::invalid_argument("burn_in must be < iterations");
  if (cfg.thin < 1 || (cfg.iterations - cfg.burn_in) % cfg.thin != 0)
    throw std::invalid_argument("thin must divide iterations - burn_in");
}

struct BlockSampler {
  double step;
  long accepted = 0, proposed = 0;      // post burn-in
  long win_accepted = 0, win_proposed = 0;  // adaptation window

  void adapt() {
    if (win_proposed == 0) return;
    const double rate =
        static_cast<double>(win_accepted) / static_cast<double>(win_proposed);
    if (rate < 0.2)
      step *= 0.8;
    else if (rate > 0.4)
      step *= 1.25;
    step = std::clamp(step, 1e-8, 1e8);
    win_accepted = win_proposed = 0;
  }
  void record(bool accept, bool burn_in) {
    if (burn_in) {
      ++win_proposed;
      win_accepted += accept ? 1 : 0;
    } else {
      ++proposed;
      accepted += accept ? 1 : 0;
    }
  }
  double rate() const {
    return proposed > 0
               ? static_cast<double>(accepted) / static_cast<double>(proposed)
               : 0.0;
  }
};

}  // namespace

PosteriorSamples fit_bayes(const FeatureMatrix& X, const ReturnSeries& y,
                           const PriorSpec& prior, const McmcConfig& cfg) {
  validate(prior, cfg);
  Design d = prepare(X, y);
  LogPosterior logpost(d, prior);
  const std::size_t p = d.cols.size();

  PosteriorSamples out;
  out.chains = cfg.chains;
  out.seed = cfg.seed;
  out.draws_per_chain =
      static_cast<std::size_t>((cfg.iterations - cfg.burn_in) / cfg.thin);
  out.param_names.push_back("intercept");
  for (const auto& n : d.names) out.param_names.push_back(n);
  if (logpost.samples_sigma()) out.param_names.push_back("sigma");
  if (logpost.samples_nu()) out.param_names.push_back("nu");

  double y_sd = 0.0;
  for (double v : d.y_centered) y_sd += v * v;
  y_sd = std::sqrt(y_sd / static_cast<double>(d.n));
  if (y_sd <= 0.0) y_sd = 1.0;

  for (int chain = 0; chain < cfg.chains; ++chain) {
    RngStream rng = RngStream::derive(cfg.seed, "mcmc_chain",
                                      static_cast<std::uint64_t>(chain));
    ChainState state;
    state.theta.assign(p + 1, 0.0);
    state.u = std::log(prior.sigma_fixed ? *prior.sigma_fixed : y_sd);
    state.v = std::log(10.0 - 2.0);

    double current = logpost(state);
    if (!std::isfinite(current))
      throw ChainDiverged("initial log-posterior is not finite");

    BlockSampler coef{cfg.coef_step};
    BlockSampler sigma{cfg.sigma_step};
    BlockSampler nu{cfg.nu_step};

    for (int iter = 0; iter < cfg.iterations; ++iter) {
      const bool warm = iter < cfg.burn_in;

      {  // joint random walk over intercept + coefficients
        ChainState prop = state;
        for (double& t : prop.theta) t += coef.step * rng.normal();
        const double lp = logpost(prop);
        const bool accept =
            std::isfinite(lp) && std::log(1.0 - rng.uniform()) < lp - current;
        if (accept) {
          state = std::move(prop);
          current = lp;
        }
        coef.record(accept, warm);
      }
      if (logpost.samples_sigma()) {
        ChainState prop = state;
        prop.u += sigma.step * rng.normal();
        const double lp = logpost(prop);
        const bool accept =
            std::isfinite(lp) && std::log(1.0 - rng.uniform()) < lp - current;
        if (accept) {
          state = std::move(prop);
          current = lp;
        }
        sigma.record(accept, warm);
      }
      if (logpost.samples_nu()) {
        ChainState prop = state;
        prop.v += nu.step * rng.normal();
        const double lp = logpost(prop);
        const bool accept =
            std::isfinite(lp) && std::log(1.0 - rng.uniform()) < lp - current;
        if (accept) {
          state = std::move(prop);
          current = lp;
        }
        nu.record(accept, warm);
      }
      if (!std::isfinite(current))
        throw ChainDiverged("log-posterior became non-finite");

      if (warm && (iter + 1) % 25 == 0) {
        coef.adapt();
        sigma.adapt();
        nu.adapt();
      }

      if (!warm && (iter - cfg.burn_in) % cfg.thin == 0) {
        // report on the original feature scale
        std::vector<double> row;
        row.reserve(out.param_names.size());
        double intercept = d.y_mean + state.theta[0];
        for (std::size_t j = 0; j < p; ++j)
          intercept -= state.theta[j + 1] * d.means[j] / d.scales[j];
        row.push_back(intercept);
        for (std::size_t j = 0; j < p; ++j)
          row.push_back(state.theta[j + 1] / d.scales[j]);
        if (logpost.samples_sigma()) row.push_back(std::exp(state.u));
        if (logpost.samples_nu()) row.push_back(2.0 + std::exp(state.v));
        out.draws.push_back(std::move(row));
      }
    }
    out.accept_coef.push_back(coef.rate());
    out.accept_sigma.push_back(logpost.samples_sigma() ? sigma.rate() : 0.0);
    out.accept_nu.push_back(logpost.samples_nu() ? nu.rate() : 0.0);
  }

  // split-Rhat per parameter
  out.rhat.resize(out.param_names.size());
  for (std::size_t param = 0; param < out.param_names.size(); ++param) {
    std::vector<std::vector<double>> per_chain(cfg.chains);
    for (int chain = 0; chain < cfg.chains; ++chain) {
      auto& seq = per_chain[chain];
      seq.reserve(out.draws_per_chain);
      const std::size_t base = static_cast<std::size_t>(chain) *
                               out.draws_per_chain;
      for (std::size_t i = 0; i < out.draws_per_chain; ++i)
        seq.push_back(out.draws[base + i][param]);
    }
    out.rhat[param] = split_rhat(per_chain);
  }
  return out;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> halves;
  for (const auto& ch : chains) {
    const std::size_t half = ch.size() / 2;
    if (half < 2) return std::numeric_limits<double>::quiet_NaN();
    halves.emplace_back(ch.begin(), ch.begin() + half);
    halves.emplace_back(ch.begin() + half, ch.begin() + 2 * half);
  }
  const double m = static_cast<double>(halves.size());
  const double len = static_cast<double>(halves.front().size());

  std::vector<double> means(halves.size()), vars(halves.size());
  for (std::size_t c = 0; c < halves.size(); ++c) {
    double mu = 0.0;
    for (double v : halves[c]) mu += v;
    mu /= len;
    double var = 0.0;
    for (double v : halves[c]) var += (v - mu) * (v - mu);
    vars[c] = var / (len - 1.0);
    means[c] = mu;
  }
  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= m;
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= len / (m - 1.0);
  double w = 0.0;
  for (double v : vars) w += v;
  w /= m;
  if (w <= 0.0) return 1.0;  // constant chains
  const double var_plus = (len - 1.0) / len * w + b / len;
  return std::sqrt(var_plus / w);
}

double empirical_quantile(std::vector<double> draws, double q) {
  if (draws.empty()) throw std::invalid_argument("no draws");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile outside [0,1]");
  std::sort(draws.begin(), draws.end());
  const double h = (static_cast<double>(draws.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, draws.size() - 1);
  const double frac = h - std::floor(h);
  return draws[lo] + frac * (draws[hi] - draws[lo]);
}

std::map<std::string, std::vector<double>> posterior_summary(
    const PosteriorSamples& s, const std::vector<double>& quantiles) {
  if (s.draws.empty()) throw std::invalid_argument("no draws");
  std::map<std::string, std::vector<double>> table;
  for (std::size_t param = 0; param < s.param_names.size(); ++param) {
    auto col = s.column(param);
    std::vector<double> qs;
    qs.reserve(quantiles.size());
    for (double q : quantiles) qs.push_back(empirical_quantile(col, q));
    table[s.param_names[param]] = std::move(qs);
  }
  return table;
}

}  // namespace tweetmine

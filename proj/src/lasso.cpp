#include "tweetmine/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tweetmine {

namespace {

struct Standardized {
  std::vector<std::vector<double>> cols;  // kept columns, mean 0, pop-std 1
  std::vector<std::string> names;         // kept column names
  std::vector<double> means, stds;        // for kept columns
  std::vector<std::string> dropped;       // zero-variance column names
  std::map<std::string, std::pair<double, double>> all_stats;
  std::vector<double> y_centered;
  double y_mean = 0.0;
  std::size_t n = 0;
};

Standardized standardize(const FeatureMatrix& X, const ReturnSeries& y) {
  if (X.rows() != y.size() || X.dates != y.dates)
    throw std::invalid_argument("features and target are not aligned");
  if (y.size() < 2) throw std::invalid_argument("need at least two rows");

  Standardized s;
  s.n = y.size();
  const double n = static_cast<double>(s.n);

  for (double v : y.values) s.y_mean += v;
  s.y_mean /= n;
  s.y_centered.resize(s.n);
  for (std::size_t i = 0; i < s.n; ++i)
    s.y_centered[i] = y.values[i] - s.y_mean;

  for (std::size_t c = 0; c < X.cols(); ++c) {
    const auto& col = X.columns[c];
    double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= n;
    const double sd = std::sqrt(var);
    s.all_stats[X.names[c]] = {mean, sd};
    // constant columns have no defined standardization; they are dropped and
    // reported back with coefficient exactly 0
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      s.dropped.push_back(X.names[c]);
      continue;
    }
    std::vector<double> z(s.n);
    for (std::size_t i = 0; i < s.n; ++i) z[i] = (col[i] - mean) / sd;
    s.cols.push_back(std::move(z));
    s.names.push_back(X.names[c]);
    s.means.push_back(mean);
    s.stds.push_back(sd);
  }
  return s;
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

struct CdFit {
  std::vector<double> beta;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_history;
};

// Cyclic coordinate descent on standardized data; beta may arrive warm.
CdFit coordinate_descent(const Standardized& s, double lambda, double tol,
                         int max_iter, std::vector<double> beta) {
  const std::size_t p = s.cols.size();
  const double n = static_cast<double>(s.n);
  if (beta.size() != p) beta.assign(p, 0.0);

  std::vector<double> residual = s.y_centered;
  for (std::size_t j = 0; j < p; ++j) {
    if (beta[j] == 0.0) continue;
    for (std::size_t i = 0; i < s.n; ++i)
      residual[i] -= s.cols[j][i] * beta[j];
  }

  CdFit fit;
  fit.beta = std::move(beta);
  for (fit.iterations = 0; fit.iterations < max_iter; ++fit.iterations) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      // <x_j, x_j> = n for unit-population-variance columns
      double rho = 0.0;
      for (std::size_t i = 0; i < s.n; ++i) rho += s.cols[j][i] * residual[i];
      rho = rho / n + fit.beta[j];
      const double updated = soft_threshold(rho, lambda);
      const double change = updated - fit.beta[j];
      if (change != 0.0) {
        for (std::size_t i = 0; i < s.n; ++i)
          residual[i] -= s.cols[j][i] * change;
        fit.beta[j] = updated;
      }
      max_change = std::max(max_change, std::abs(change));
    }
    double obj = 0.0;
    for (double r : residual) obj += r * r;
    obj /= 2.0 * n;
    for (double b : fit.beta) obj += lambda * std::abs(b);
    fit.objective_history.push_back(obj);

    if (max_change < tol) {
      fit.converged = true;
      ++fit.iterations;
      break;
    }
  }
  return fit;
}

LassoModel assemble_model(const Standardized& s, const CdFit& fit,
                          double lambda) {
  LassoModel m;
  m.lambda = lambda;
  m.converged = fit.converged;
  m.iterations = fit.iterations;
  m.objective_history = fit.objective_history;
  m.standardization = s.all_stats;
  m.dropped_features = s.dropped;

  m.intercept = s.y_mean;
  for (std::size_t j = 0; j < s.cols.size(); ++j) {
    const double b = fit.beta[j] / s.stds[j];
    m.coefficients[s.names[j]] = b;
    m.intercept -= b * s.means[j];
  }
  for (const auto& name : s.dropped) m.coefficients[name] = 0.0;
  return m;
}

}  // namespace

double lambda_max(const FeatureMatrix& X, const ReturnSeries& y) {
  Standardized s = standardize(X, y);
  double y_var = 0.0;
  for (double v : s.y_centered) y_var += v * v;
  if (y_var == 0.0) throw DegenerateTarget("target variable is constant");

  double lmax = 0.0;
  for (const auto& col : s.cols) {
    double dot = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) dot += col[i] * s.y_centered[i];
    lmax = std::max(lmax, std::abs(dot) / static_cast<double>(s.n));
  }
  return lmax;
}

LassoModel fit_lasso(const FeatureMatrix& X, const ReturnSeries& y,
                     double lambda, double tol, int max_iter) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  Standardized s = standardize(X, y);
  CdFit fit = coordinate_descent(s, lambda, tol, max_iter, {});
  return assemble_model(s, fit, lambda);
}

CvResult cv_lasso(const FeatureMatrix& X, const ReturnSeries& y,
                  std::vector<double> lambdas, int folds, std::uint64_t seed,
                  double tol, int max_iter) {
  (void)seed;  // folds are contiguous time blocks, no shuffling
  if (folds < 2) throw std::invalid_argument("need at least 2 folds");
  if (lambdas.empty()) throw std::invalid_argument("empty lambda grid");
  const std::size_t n = y.size();
  if (n < static_cast<std::size_t>(folds))
    throw std::invalid_argument("need at least one row per fold");
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

  std::vector<double> mse_sum(lambdas.size(), 0.0);

  for (int f = 0; f < folds; ++f) {
    const std::size_t lo = n * static_cast<std::size_t>(f) /
                           static_cast<std::size_t>(folds);
    const std::size_t hi = n * static_cast<std::size_t>(f + 1) /
                           static_cast<std::size_t>(folds);

    FeatureMatrix train_x, val_x;
    ReturnSeries train_y, val_y;
    train_x.names = val_x.names = X.names;
    train_x.columns.resize(X.cols());
    val_x.columns.resize(X.cols());
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_val = i >= lo && i < hi;
      auto& mx = in_val ? val_x : train_x;
      auto& my = in_val ? val_y : train_y;
      mx.dates.push_back(X.dates[i]);
      for (std::size_t c = 0; c < X.cols(); ++c)
        mx.columns[c].push_back(X.columns[c][i]);
      my.dates.push_back(y.dates[i]);
      my.values.push_back(y.values[i]);
    }

    Standardized s = standardize(train_x, train_y);
    std::vector<double> warm;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      CdFit fit = coordinate_descent(s, lambdas[li], tol, max_iter, warm);
      warm = fit.beta;
      LassoModel m = assemble_model(s, fit, lambdas[li]);
      const auto pred = predict_linear(m, val_x);
      double mse = 0.0;
      for (std::size_t i = 0; i < val_y.size(); ++i) {
        const double e = pred[i] - val_y.values[i];
        mse += e * e;
      }
      mse_sum[li] += mse / static_cast<double>(val_y.size());
    }
  }

  CvResult res;
  std::size_t best = 0;
  for (std::size_t li = 1; li < lambdas.size(); ++li)
    if (mse_sum[li] < mse_sum[best]) best = li;  // ties keep the larger lambda
  res.best_lambda = lambdas[best];
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    res.cv_mse.emplace_back(lambdas[li],
                            mse_sum[li] / static_cast<double>(folds));
  res.model = fit_lasso(X, y, res.best_lambda, tol, max_iter);
  return res;
}

std::vector<double> predict_linear(const LassoModel& m,
                                   const FeatureMatrix& X) {
  std::vector<double> out(X.rows(), m.intercept);
  for (const auto& [name, beta] : m.coefficients) {
    const int c = X.column_index(name);
    if (c < 0) throw MissingFeature("feature missing from input: " + name);
    if (beta == 0.0) continue;
    const auto& col = X.columns[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += beta * col[i];
  }
  return out;
}

std::vector<double> lambda_grid(double lambda_max_value, std::size_t size,
                                double min_ratio) {
  if (size == 0 || lambda_max_value <= 0.0 || min_ratio <= 0.0 ||
      min_ratio > 1.0)
    throw std::invalid_argument("bad lambda grid parameters");
  std::vector<double> grid(size);
  if (size == 1) {
    grid[0] = lambda_max_value;
    return grid;
  }
  const double log_max = std::log(lambda_max_value);
  const double log_min = std::log(lambda_max_value * min_ratio);
  for (std::size_t i = 0; i < size; ++i)
    grid[i] = std::exp(log_max + (log_min - log_max) * static_cast<double>(i) /
                                     static_cast<double>(size - 1));
  return grid;
}

}  // namespace tweetmine

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tweetmine/features.hpp"

namespace tweetmine {

struct DegenerateTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingFeature : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// L1-penalized least squares fitted by cyclic coordinate descent on
// standardized columns, reported on the original scale.
struct LassoModel {
  std::map<std::string, double> coefficients;  // original scale; zero-variance
                                               // features carry exactly 0
  double intercept = 0.0;
  double lambda = 0.0;
  // per-feature (mean, population std) used internally; std 0 => dropped
  std::map<std::string, std::pair<double, double>> standardization;
  std::vector<std::string> dropped_features;

  bool converged = true;
  int iterations = 0;
  // (1/2n)||r||^2 + lambda*||beta||_1 on the standardized problem, one entry
  // per completed sweep; non-increasing by construction.
  std::vector<double> objective_history;
};

// Smallest penalty for which every coefficient is zero:
// max_j |<x_j, y - mean(y)>| / n over standardized columns.
double lambda_max(const FeatureMatrix& X, const ReturnSeries& y);

LassoModel fit_lasso(const FeatureMatrix& X, const ReturnSeries& y,
                     double lambda, double tol = 1e-9, int max_iter = 10000);

struct CvResult {
  double best_lambda = 0.0;
  LassoModel model;                                  // refit on all data
  std::vector<std::pair<double, double>> cv_mse;     // (lambda, mean MSE)
};

// Contiguous-block k-fold cross validation in time order, warm-started along
// the descending lambda grid; ties go to the larger lambda. `seed` is
// accepted for interface symmetry but unused: the folds are deterministic.
CvResult cv_lasso(const FeatureMatrix& X, const ReturnSeries& y,
                  std::vector<double> lambdas, int folds, std::uint64_t seed,
                  double tol = 1e-9, int max_iter = 10000);

// intercept + sum_j beta_j * x_j; every model feature must be present.
std::vector<double> predict_linear(const LassoModel& m, const FeatureMatrix& X);

// Log-spaced descending grid from lambda_max down to ratio*lambda_max.
std::vector<double> lambda_grid(double lambda_max_value, std::size_t size,
                                double min_ratio);

}  // namespace tweetmine

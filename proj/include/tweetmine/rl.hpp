#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tweetmine/features.hpp"

namespace tweetmine {

struct Misaligned : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EpisodeFinished : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixed action order; greedy ties resolve to the first maximum in this order.
enum class Action { Buy = 0, Hold = 1, Sell = 2 };
enum class Position { Flat = 0, Long = 1 };

constexpr std::array<Action, 3> kActions{Action::Buy, Action::Hold,
                                         Action::Sell};

// Historical replay environment. Acting at step t earns
//   reward = position_after * returns[t+1] - cost * [position changed],
// so the observation at t never sees the return it is paid on.
struct MarketEnv {
  std::vector<std::int64_t> dates;
  std::vector<std::vector<double>> feature_rows;
  std::vector<double> returns;
  double transaction_cost = 0.0;
  std::size_t episode_length = 0;  // steps per episode; terminal index is
                                   // episode_length - 1

  std::size_t terminal() const { return episode_length - 1; }
};

MarketEnv make_env(const FeatureMatrix& X, const ReturnSeries& r, double cost);

struct AgentState {
  std::size_t t = 0;
  Position position = Position::Flat;
};

struct StepResult {
  AgentState next;
  double reward = 0.0;
  bool done = false;
};

// Buy while long and sell while flat act as hold (and cost nothing).
StepResult step(const MarketEnv& env, const AgentState& s, Action a);

enum class QMode { tabular, linear };

struct QHyperparams {
  int episodes = 500;
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.01;
  double epsilon_decay = 0.98;  // eps = end + (start-end) * decay^episode
  QMode mode = QMode::tabular;
  int bins = 3;  // equal-width observation bins per feature (tabular)
  std::uint64_t seed = 0;
};

// Action values over (discretized observation, position) for tabular mode,
// or linear weights per action over (observation ⊕ long-indicator ⊕ bias).
struct QModel {
  QMode mode = QMode::tabular;

  // tabular: key = per-feature bin indices with the position appended
  std::map<std::vector<int>, std::array<double, 3>> table;
  std::vector<double> bin_low, bin_width;  // per feature, from training data
  int bins = 3;

  // linear
  std::array<std::vector<double>, 3> weights;

  std::vector<int> discretize(const std::vector<double>& obs,
                              Position pos) const;
  std::array<double, 3> action_values(const std::vector<double>& obs,
                                      Position pos) const;
  Action greedy(const std::vector<double>& obs, Position pos) const;
};

struct EpisodeLog {
  std::vector<double> cum_return;
  std::vector<int> trades;
  std::vector<double> epsilon;
};

// Epsilon-greedy Q-learning over replayed episodes:
//   tabular  Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))
//   linear   semi-gradient TD(0) on the acting action's weights
// Bit-identical results for identical seeds.
std::pair<QModel, EpisodeLog> train_q(const MarketEnv& env,
                                      const QHyperparams& hp);

struct EvalResult {
  double cum_return = 0.0;
  int trades = 0;
};

// One greedy (epsilon = 0) episode.
EvalResult evaluate(const MarketEnv& env, const QModel& q);

}  // namespace tweetmine

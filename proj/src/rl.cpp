#include "tweetmine/rl.hpp"

#include <algorithm>
#include <cmath>

#include "tweetmine/rng.hpp"

namespace tweetmine {

MarketEnv make_env(const FeatureMatrix& X, const ReturnSeries& r, double cost) {
  if (X.rows() != r.size() || X.dates != r.dates)
    throw Misaligned("features and returns are not aligned");
  if (X.rows() < 2) throw Misaligned("need at least two steps");
  if (cost < 0.0) throw std::invalid_argument("cost must be >= 0");

  MarketEnv env;
  env.dates = X.dates;
  env.returns = r.values;
  env.feature_rows.reserve(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i)
    env.feature_rows.push_back(X.row(i));
  env.transaction_cost = cost;
  env.episode_length = X.rows();
  for (const auto& row : env.feature_rows)
    for (double v : row)
      if (!std::isfinite(v)) throw Misaligned("non-finite feature value");
  for (double v : env.returns)
    if (!std::isfinite(v)) throw Misaligned("non-finite return value");
  return env;
}

namespace {

Position transition(Position pos, Action a) {
  switch (a) {
    case Action::Buy:
      return Position::Long;
    case Action::Sell:
      return Position::Flat;
    case Action::Hold:
      return pos;
  }
  return pos;
}

}  // namespace

StepResult step(const MarketEnv& env, const AgentState& s, Action a) {
  if (s.t >= env.terminal())
    throw EpisodeFinished("step past the terminal index");

  const Position next_pos = transition(s.position, a);
  const bool changed = next_pos != s.position;
  double reward = next_pos == Position::Long ? env.returns[s.t + 1] : 0.0;
  if (changed) reward -= env.transaction_cost;

  StepResult r;
  r.next = {s.t + 1, next_pos};
  r.reward = reward;
  r.done = s.t + 1 == env.terminal();
  return r;
}

std::vector<int> QModel::discretize(const std::vector<double>& obs,
                                    Position pos) const {
  std::vector<int> key(obs.size() + 1);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    int b = 0;
    if (bin_width[i] > 0.0)
      b = static_cast<int>(std::floor((obs[i] - bin_low[i]) / bin_width[i]));
    key[i] = std::clamp(b, 0, bins - 1);
  }
  key.back() = static_cast<int>(pos);
  return key;
}

std::array<double, 3> QModel::action_values(const std::vector<double>& obs,
                                            Position pos) const {
  if (mode == QMode::tabular) {
    auto it = table.find(discretize(obs, pos));
    return it == table.end() ? std::array<double, 3>{0.0, 0.0, 0.0}
                             : it->second;
  }
  std::array<double, 3> q{};
  for (std::size_t a = 0; a < 3; ++a) {
    const auto& w = weights[a];
    double v = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) v += w[i] * obs[i];
    v += w[obs.size()] * (pos == Position::Long ? 1.0 : 0.0);
    v += w[obs.size() + 1];  // bias
    q[a] = v;
  }
  return q;
}

Action QModel::greedy(const std::vector<double>& obs, Position pos) const {
  const auto q = action_values(obs, pos);
  std::size_t best = 0;
  for (std::size_t a = 1; a < 3; ++a)
    if (q[a] > q[best]) best = a;  // ties keep the earlier action
  return kActions[best];
}

std::pair<QModel, EpisodeLog> train_q(const MarketEnv& env,
                                      const QHyperparams& hp) {
  if (hp.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (hp.mode == QMode::tabular && hp.bins < 1)
    throw std::invalid_argument("bins must be >= 1");

  const std::size_t dim = env.feature_rows.front().size();
  QModel q;
  q.mode = hp.mode;
  q.bins = hp.bins;
  q.bin_low.assign(dim, 0.0);
  q.bin_width.assign(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    double lo = env.feature_rows.front()[i], hi = lo;
    for (const auto& row : env.feature_rows) {
      lo = std::min(lo, row[i]);
      hi = std::max(hi, row[i]);
    }
    q.bin_low[i] = lo;
    q.bin_width[i] = (hi - lo) / static_cast<double>(hp.bins);
  }
  if (hp.mode == QMode::linear)
    for (auto& w : q.weights) w.assign(dim + 2, 0.0);

  RngStream rng = RngStream::derive(hp.seed, "q_train");
  EpisodeLog log;

  for (int ep = 0; ep < hp.episodes; ++ep) {
    const double eps =
        hp.epsilon_end +
        (hp.epsilon_start - hp.epsilon_end) * std::pow(hp.epsilon_decay, ep);

    AgentState s;
    double cum = 0.0;
    int trades = 0;
    bool done = false;
    while (!done) {
      const auto& obs = env.feature_rows[s.t];
      Action a;
      if (rng.uniform() < eps)
        a = kActions[rng.below(3)];
      else
        a = q.greedy(obs, s.position);

      const StepResult sr = step(env, s, a);
      if (sr.next.position != s.position) ++trades;
      cum += sr.reward;

      double bootstrap = 0.0;
      if (!sr.done) {
        const auto next_q =
            q.action_values(env.feature_rows[sr.next.t], sr.next.position);
        bootstrap = *std::max_element(next_q.begin(), next_q.end());
      }
      const double target = sr.reward + hp.gamma * bootstrap;

      if (hp.mode == QMode::tabular) {
        auto key = q.discretize(obs, s.position);
        auto& cell = q.table[key];
        double& value = cell[static_cast<std::size_t>(a)];
        value += hp.alpha * (target - value);
      } else {
        const auto cur = q.action_values(obs, s.position);
        const double err = target - cur[static_cast<std::size_t>(a)];
        auto& w = q.weights[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < dim; ++i)
          w[i] += hp.alpha * err * obs[i];
        w[dim] += hp.alpha * err * (s.position == Position::Long ? 1.0 : 0.0);
        w[dim + 1] += hp.alpha * err;
      }

      s = sr.next;
      done = sr.done;
    }
    log.cum_return.push_back(cum);
    log.trades.push_back(trades);
    log.epsilon.push_back(eps);
  }
  return {std::move(q), std::move(log)};
}

EvalResult evaluate(const MarketEnv& env, const QModel& q) {
  EvalResult res;
  AgentState s;
  bool done = false;
  while (!done) {
    const Action a = q.greedy(env.feature_rows[s.t], s.position);
    const StepResult sr = step(env, s, a);
    if (sr.next.position != s.position) ++res.trades;
    res.cum_return += sr.reward;
    s = sr.next;
    done = sr.done;
  }
  return res;
}

}  // namespace tweetmine

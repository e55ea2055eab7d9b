#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "tweetmine/graph.hpp"

namespace tweetmine {

namespace {

// t-step transition probabilities from each vertex on the row-normalized
// symmetrized adjacency. Row i of the result is P^t_{i.}.
std::vector<std::vector<double>> walk_probabilities(const UserGraph& g, int t) {
  const std::size_t n = g.vertex_count();
  const auto& adj = g.undirected_adjacency();
  const auto deg = g.undirected_degree();

  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  std::vector<double> cur(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cur.begin(), cur.end(), 0.0);
    cur[i] = 1.0;
    for (int step = 0; step < t; ++step) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (cur[j] == 0.0 || deg[j] == 0.0) continue;
        const double share = cur[j] / deg[j];
        for (const auto& [k, w] : adj[j]) next[k] += share * w;
      }
      cur.swap(next);
    }
    rows[i] = cur;
  }
  return rows;
}

struct Community {
  std::vector<double> prob;  // mean walk-probability vector of members
  int size = 0;
  std::set<int> neighbors;   // adjacent live communities
  bool alive = false;
};

}  // namespace

WalktrapResult walktrap(const UserGraph& g, int t) {
  if (t < 1) throw std::invalid_argument("walk length must be >= 1");
  const int n = static_cast<int>(g.vertex_count());
  if (n == 0) throw EmptyGraph("walktrap on empty graph");

  const auto deg = g.undirected_degree();
  const double nn = static_cast<double>(n);
  auto probs = walk_probabilities(g, t);

  std::vector<Community> comm(2 * n);  // leaves + every merged id
  for (int i = 0; i < n; ++i) {
    comm[i].prob = std::move(probs[i]);
    comm[i].size = 1;
    comm[i].alive = true;
    for (const auto& [j, w] : g.undirected_adjacency()[i])
      comm[i].neighbors.insert(j);
  }

  // Ward-style cost of merging two communities from their walk distance.
  auto delta_sigma = [&](const Community& a, const Community& b) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) {
      if (deg[k] == 0.0) continue;
      const double d = a.prob[k] - b.prob[k];
      r2 += d * d / deg[k];
    }
    const double sa = a.size, sb = b.size;
    return (sa * sb / (sa + sb)) * r2 / nn;
  };

  std::map<std::pair<int, int>, double> pair_cost;
  for (int i = 0; i < n; ++i)
    for (int j : comm[i].neighbors)
      if (i < j) pair_cost[{i, j}] = delta_sigma(comm[i], comm[j]);

  Dendrogram dendro;
  dendro.leaf_count = n;
  int next_id = n;

  while (!pair_cost.empty()) {
    auto best = pair_cost.begin();
    for (auto it = std::next(pair_cost.begin()); it != pair_cost.end(); ++it) {
      if (it->second < best->second) best = it;
      // equal costs fall through: map order already gives the smallest
      // (min id, max id) pair first
    }
    const auto [a, b] = best->first;
    const double cost = best->second;

    Community merged;
    merged.size = comm[a].size + comm[b].size;
    merged.prob.resize(n);
    const double wa = comm[a].size / static_cast<double>(merged.size);
    const double wb = comm[b].size / static_cast<double>(merged.size);
    for (int k = 0; k < n; ++k)
      merged.prob[k] = wa * comm[a].prob[k] + wb * comm[b].prob[k];
    for (int x : comm[a].neighbors)
      if (x != b) merged.neighbors.insert(x);
    for (int x : comm[b].neighbors)
      if (x != a) merged.neighbors.insert(x);
    merged.alive = true;

    const int id = next_id++;
    dendro.merges.push_back({a, b, id, cost});
    comm[a].alive = false;
    comm[b].alive = false;

    // retire all pairs touching a or b, rewire neighbor lists
    for (auto it = pair_cost.begin(); it != pair_cost.end();) {
      if (it->first.first == a || it->first.second == a ||
          it->first.first == b || it->first.second == b)
        it = pair_cost.erase(it);
      else
        ++it;
    }
    if (static_cast<std::size_t>(id) >= comm.size()) comm.resize(id + 1);
    for (int x : merged.neighbors) {
      comm[x].neighbors.erase(a);
      comm[x].neighbors.erase(b);
      comm[x].neighbors.insert(id);
    }
    comm[id] = std::move(merged);
    for (int x : comm[id].neighbors)
      pair_cost[{std::min(x, id), std::max(x, id)}] =
          delta_sigma(comm[id], comm[x]);
  }

  // Pick the dendrogram cut with maximum modularity (all-singletons included).
  WalktrapResult res;
  res.dendrogram = std::move(dendro);
  const bool has_edges = g.total_undirected_weight() > 0.0;
  std::size_t best_prefix = 0;
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= res.dendrogram.merges.size(); ++k) {
    Partition p = partition_at(res.dendrogram, k);
    const double q = has_edges ? modularity(g, p) : 0.0;
    if (q > best_q) {
      best_q = q;
      best_prefix = k;
    }
  }
  res.best = partition_at(res.dendrogram, best_prefix);
  res.best_modularity = best_q;
  return res;
}

}  // namespace tweetmine

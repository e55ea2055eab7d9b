#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tweetmine/corpus.hpp"

namespace tweetmine {

struct EmptyGraph : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EdgeKind { mention, retweet };

// Directed weighted interaction graph. Vertices are stored sorted, so every
// derived quantity is independent of the order interactions were seen in.
// No self-loops; weights are positive interaction counts.
class UserGraph {
 public:
  // Directed (from, to, weight) triples; parallel triples accumulate.
  static UserGraph from_edges(
      const std::vector<std::tuple<std::string, std::string, double>>& edges);

  std::size_t vertex_count() const { return vertices_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  int index_of(const std::string& handle) const;

  const std::map<std::pair<int, int>, double>& edges() const { return edges_; }

  // adjacency[u] = sorted (v, weight); directed out-edges.
  const std::vector<std::vector<std::pair<int, double>>>& out_adjacency() const {
    return out_adj_;
  }
  // Symmetrized view: weight(u,v) + weight(v,u).
  const std::vector<std::vector<std::pair<int, double>>>& undirected_adjacency()
      const {
    return undirected_adj_;
  }
  std::vector<double> weighted_out_degree() const;
  std::vector<double> undirected_degree() const;
  double total_undirected_weight() const;  // sum over unordered pairs

 private:
  UserGraph() = default;
  std::vector<std::string> vertices_;               // sorted, unique
  std::map<std::pair<int, int>, double> edges_;     // directed
  std::vector<std::vector<std::pair<int, double>>> out_adj_;
  std::vector<std::vector<std::pair<int, double>>> undirected_adj_;
};

// One directed author->target edge per mention and/or retweet, per selected
// kinds; self-interactions are dropped. Throws EmptyGraph when nothing is
// left.
UserGraph build_user_graph(const TweetCollection& c,
                           const std::set<EdgeKind>& edge_kinds);

struct PageRankResult {
  std::vector<double> scores;  // sums to 1
  int iterations = 0;
  bool converged = false;
};

// Power iteration with uniform teleport; dangling mass is redistributed
// uniformly. Stops when the L1 change drops below tol.
PageRankResult pagerank(const UserGraph& g, double damping = 0.85,
                        double tol = 1e-10, int max_iter = 1000);

struct HitsResult {
  std::vector<double> hub;        // L2 norm 1
  std::vector<double> authority;  // L2 norm 1
  int iterations = 0;
  bool converged = false;
};

HitsResult hits(const UserGraph& g, double tol = 1e-10, int max_iter = 1000);

// Unnormalized shortest-path betweenness on the unweighted undirected view,
// each unordered pair counted once.
std::vector<double> betweenness(const UserGraph& g);

struct Partition {
  std::vector<int> assignment;  // vertex index -> community id, 0-based
  int community_count = 0;
};

// Relabels so community ids are contiguous from 0 in first-seen vertex order.
Partition canonicalize(std::vector<int> raw_assignment);

// Q = sum_c (e_c/m - (d_c/2m)^2) on the undirected weighted view.
double modularity(const UserGraph& g, const Partition& p);

struct Merge {
  int a = 0;
  int b = 0;
  int merged = 0;  // new community id
  double delta_sigma = 0.0;
};

struct Dendrogram {
  std::vector<Merge> merges;  // leaves are 0..leaf_count-1
  int leaf_count = 0;
};

struct WalktrapResult {
  Dendrogram dendrogram;
  Partition best;          // dendrogram cut maximizing modularity
  double best_modularity = 0.0;
};

// Agglomerative community detection from t-step random-walk distances.
// Only communities sharing an edge may merge, so components never mix.
WalktrapResult walktrap(const UserGraph& g, int t = 4);

// Partition after applying the first `merges_applied` dendrogram merges.
Partition partition_at(const Dendrogram& d, std::size_t merges_applied);

// cut(S, rest) / min(vol(S), vol(rest)) on the undirected weighted view;
// 0 when the community has no boundary.
double conductance(const UserGraph& g, const Partition& p, int community);

struct Layout {
  std::vector<std::pair<double, double>> coords;  // per vertex, inside frame
  double width = 0.0;
  double height = 0.0;
};

// Force-directed layout: attraction d^2/k on edges, repulsion k^2/d between
// all pairs, k = sqrt(W*H/n), temperature cooling linearly from W/10.
// Bit-identical output for identical seeds.
Layout fr_layout(const UserGraph& g, double width, double height,
                 int iterations, std::uint64_t seed);

struct DotOptions {
  const Partition* communities = nullptr;     // adds community=<id>
  const Layout* layout = nullptr;             // adds pos="x,y"
  const std::vector<bool>* vertex_mask = nullptr;  // restrict to subgraph
};

void write_dot(const UserGraph& g, std::ostream& out, const DotOptions& opt = {});

}  // namespace tweetmine

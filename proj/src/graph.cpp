#include "tweetmine/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "tweetmine/util.hpp"

namespace tweetmine {

UserGraph UserGraph::from_edges(
    const std::vector<std::tuple<std::string, std::string, double>>& edges) {
  std::set<std::string> names;
  for (const auto& [u, v, w] : edges) {
    if (u == v || w <= 0) continue;
    names.insert(u);
    names.insert(v);
  }
  UserGraph g;
  g.vertices_.assign(names.begin(), names.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < g.vertices_.size(); ++i)
    index[g.vertices_[i]] = static_cast<int>(i);

  for (const auto& [u, v, w] : edges) {
    if (u == v || w <= 0) continue;
    g.edges_[{index[u], index[v]}] += w;
  }

  const int n = static_cast<int>(g.vertices_.size());
  g.out_adj_.assign(n, {});
  std::map<std::pair<int, int>, double> sym;
  for (const auto& [uv, w] : g.edges_) {
    g.out_adj_[uv.first].emplace_back(uv.second, w);
    auto key = std::minmax(uv.first, uv.second);
    sym[{key.first, key.second}] += w;
  }
  g.undirected_adj_.assign(n, {});
  for (const auto& [uv, w] : sym) {
    g.undirected_adj_[uv.first].emplace_back(uv.second, w);
    g.undirected_adj_[uv.second].emplace_back(uv.first, w);
  }
  for (auto& adj : g.undirected_adj_) std::sort(adj.begin(), adj.end());
  return g;
}

int UserGraph::index_of(const std::string& handle) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), handle);
  if (it == vertices_.end() || *it != handle) return -1;
  return static_cast<int>(it - vertices_.begin());
}

std::vector<double> UserGraph::weighted_out_degree() const {
  std::vector<double> deg(vertex_count(), 0.0);
  for (const auto& [uv, w] : edges_) deg[uv.first] += w;
  return deg;
}

std::vector<double> UserGraph::undirected_degree() const {
  std::vector<double> deg(vertex_count(), 0.0);
  for (std::size_t u = 0; u < undirected_adj_.size(); ++u)
    for (const auto& [v, w] : undirected_adj_[u]) deg[u] += w;
  return deg;
}

double UserGraph::total_undirected_weight() const {
  double m = 0.0;
  for (const auto& [uv, w] : edges_) m += w;
  return m;  // each directed weight contributes once to the symmetrized sum
}

UserGraph build_user_graph(const TweetCollection& c,
                           const std::set<EdgeKind>& edge_kinds) {
  if (edge_kinds.empty())
    throw std::invalid_argument("edge_kinds must be nonempty");
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (const Tweet& t : c.tweets()) {
    if (edge_kinds.count(EdgeKind::mention))
      for (const auto& m : t.mentions)
        if (m != t.author) edges.emplace_back(t.author, m, 1.0);
    if (edge_kinds.count(EdgeKind::retweet) && t.retweet_of &&
        *t.retweet_of != t.author)
      edges.emplace_back(t.author, *t.retweet_of, 1.0);
  }
  UserGraph g = UserGraph::from_edges(edges);
  if (g.vertex_count() == 0) throw EmptyGraph("no user interactions found");
  return g;
}

PageRankResult pagerank(const UserGraph& g, double damping, double tol,
                        int max_iter) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw EmptyGraph("pagerank on empty graph");
  if (!(damping > 0.0 && damping < 1.0))
    throw std::invalid_argument("damping must be in (0,1)");

  const auto outdeg = g.weighted_out_degree();
  const auto& adj = g.out_adjacency();

  PageRankResult res;
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), next(n);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u)
      if (outdeg[u] == 0.0) dangling += x[u];
    const double base =
        (1.0 - damping) / static_cast<double>(n) +
        damping * dangling / static_cast<double>(n);
    std::fill(next.begin(), next.end(), base);
    for (std::size_t u = 0; u < n; ++u) {
      if (outdeg[u] == 0.0) continue;
      const double share = damping * x[u] / outdeg[u];
      for (const auto& [v, w] : adj[u]) next[v] += share * w;
    }
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) l1 += std::abs(next[i] - x[i]);
    x.swap(next);
    if (l1 < tol) {
      res.converged = true;
      ++res.iterations;
      break;
    }
  }
  double sum = 0.0;
  for (double v : x) sum += v;
  for (double& v : x) v /= sum;
  res.scores = std::move(x);
  return res;
}

HitsResult hits(const UserGraph& g, double tol, int max_iter) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw EmptyGraph("hits on empty graph");
  const auto& adj = g.out_adjacency();

  HitsResult res;
  std::vector<double> hub(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> auth(n, 0.0);

  auto l2_normalize = [](std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s > 0.0)
      for (double& x : v) x /= s;
  };

  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    std::vector<double> new_auth(n, 0.0), new_hub(n, 0.0);
    for (std::size_t u = 0; u < n; ++u)
      for (const auto& [v, w] : adj[u]) new_auth[v] += w * hub[u];
    l2_normalize(new_auth);
    for (std::size_t u = 0; u < n; ++u)
      for (const auto& [v, w] : adj[u]) new_hub[u] += w * new_auth[v];
    l2_normalize(new_hub);

    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      delta += std::abs(new_hub[i] - hub[i]) + std::abs(new_auth[i] - auth[i]);
    hub.swap(new_hub);
    auth.swap(new_auth);
    if (delta < tol) {
      res.converged = true;
      ++res.iterations;
      break;
    }
  }
  res.hub = std::move(hub);
  res.authority = std::move(auth);
  return res;
}

std::vector<double> betweenness(const UserGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw EmptyGraph("betweenness on empty graph");
  const auto& adj = g.undirected_adjacency();

  // Brandes on the unweighted undirected view.
  std::vector<double> bc(n, 0.0);
  std::vector<int> dist(n), order;
  std::vector<double> sigma(n), delta(n);
  std::vector<std::vector<int>> pred(n);

  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : pred) p.clear();
    order.clear();

    std::deque<int> queue;
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(static_cast<int>(s));
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (const auto& [w, _] : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int w = *it;
      for (int v : pred[w])
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (static_cast<std::size_t>(w) != s) bc[w] += delta[w];
    }
  }
  for (double& v : bc) v /= 2.0;  // each unordered pair counted once
  return bc;
}

Partition canonicalize(std::vector<int> raw) {
  Partition p;
  std::map<int, int> relabel;
  p.assignment.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] =
        relabel.try_emplace(raw[i], static_cast<int>(relabel.size()));
    p.assignment[i] = it->second;
  }
  p.community_count = static_cast<int>(relabel.size());
  return p;
}

double modularity(const UserGraph& g, const Partition& p) {
  const std::size_t n = g.vertex_count();
  if (p.assignment.size() != n)
    throw std::invalid_argument("partition does not cover all vertices");
  const double m = g.total_undirected_weight();
  if (m <= 0.0) throw std::invalid_argument("modularity needs at least one edge");

  const int nc = p.community_count;
  std::vector<double> intra(nc, 0.0), deg(nc, 0.0);
  const auto& adj = g.undirected_adjacency();
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& [v, w] : adj[u]) {
      deg[p.assignment[u]] += w;
      if (static_cast<std::size_t>(v) > u &&
          p.assignment[u] == p.assignment[v])
        intra[p.assignment[u]] += w;
    }
  }
  double q = 0.0;
  for (int c = 0; c < nc; ++c) {
    const double frac = deg[c] / (2.0 * m);
    q += intra[c] / m - frac * frac;
  }
  return q;
}

Partition partition_at(const Dendrogram& d, std::size_t merges_applied) {
  if (merges_applied > d.merges.size())
    throw std::invalid_argument("merge prefix exceeds dendrogram size");
  std::vector<int> label(d.leaf_count);
  for (int i = 0; i < d.leaf_count; ++i) label[i] = i;
  for (std::size_t k = 0; k < merges_applied; ++k) {
    const Merge& mg = d.merges[k];
    for (int& l : label)
      if (l == mg.a || l == mg.b) l = mg.merged;
  }
  return canonicalize(std::move(label));
}

double conductance(const UserGraph& g, const Partition& p, int community) {
  const auto& adj = g.undirected_adjacency();
  double cut = 0.0, vol_in = 0.0, vol_out = 0.0;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    const bool in = p.assignment[u] == community;
    for (const auto& [v, w] : adj[u]) {
      if (in) {
        vol_in += w;
        if (p.assignment[v] != community) cut += w;  // each cut edge once
      } else {
        vol_out += w;
      }
    }
  }
  const double denom = std::min(vol_in, vol_out);
  if (denom <= 0.0) return 0.0;
  return cut / denom;
}

void write_dot(const UserGraph& g, std::ostream& out, const DotOptions& opt) {
  auto keep = [&](int v) {
    return !opt.vertex_mask || (*opt.vertex_mask)[v];
  };
  out << "digraph users {\n";
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (!keep(static_cast<int>(v))) continue;
    out << "  \"" << g.vertices()[v] << "\"";
    std::string attrs;
    if (opt.communities) {
      attrs += "community=" + std::to_string(opt.communities->assignment[v]);
    }
    if (opt.layout) {
      if (!attrs.empty()) attrs += ", ";
      attrs += "pos=\"" + format_double(opt.layout->coords[v].first) + "," +
               format_double(opt.layout->coords[v].second) + "\"";
    }
    if (!attrs.empty()) out << " [" << attrs << "]";
    out << ";\n";
  }
  for (const auto& [uv, w] : g.edges()) {
    if (!keep(uv.first) || !keep(uv.second)) continue;
    out << "  \"" << g.vertices()[uv.first] << "\" -> \""
        << g.vertices()[uv.second] << "\" [weight=" << format_double(w)
        << "];\n";
  }
  out << "}\n";
}

}  // namespace tweetmine

#include <algorithm>
#include <cmath>

#include "tweetmine/graph.hpp"
#include "tweetmine/rng.hpp"

namespace tweetmine {

Layout fr_layout(const UserGraph& g, double width, double height,
                 int iterations, std::uint64_t seed) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw EmptyGraph("layout on empty graph");
  if (width <= 0.0 || height <= 0.0)
    throw std::invalid_argument("frame dimensions must be positive");

  Layout layout;
  layout.width = width;
  layout.height = height;
  layout.coords.resize(n);

  RngStream rng = RngStream::derive(seed, "fr_layout");
  for (std::size_t v = 0; v < n; ++v)
    layout.coords[v] = {rng.uniform(0.0, width), rng.uniform(0.0, height)};
  if (n == 1 || iterations <= 0) return layout;

  const double k = std::sqrt(width * height / static_cast<double>(n));
  const auto& adj = g.undirected_adjacency();

  std::vector<std::pair<double, double>> disp(n);
  for (int iter = 0; iter < iterations; ++iter) {
    const double temp =
        (width / 10.0) *
        (1.0 - static_cast<double>(iter) / static_cast<double>(iterations));
    for (auto& d : disp) d = {0.0, 0.0};

    // repulsion between all pairs
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        double dx = layout.coords[u].first - layout.coords[v].first;
        double dy = layout.coords[u].second - layout.coords[v].second;
        double dist = std::sqrt(dx * dx + dy * dy);
        if (dist < 1e-9) {
          // coincident points: fixed deterministic nudge
          dx = 1e-6 * static_cast<double>(u + 1);
          dy = 1e-6 * static_cast<double>(v + 1);
          dist = std::sqrt(dx * dx + dy * dy);
        }
        const double force = k * k / dist;
        disp[u].first += dx / dist * force;
        disp[u].second += dy / dist * force;
        disp[v].first -= dx / dist * force;
        disp[v].second -= dy / dist * force;
      }
    }

    // attraction along edges (undirected view, each pair once)
    for (std::size_t u = 0; u < n; ++u) {
      for (const auto& [v, w] : adj[u]) {
        if (static_cast<std::size_t>(v) <= u) continue;
        double dx = layout.coords[u].first - layout.coords[v].first;
        double dy = layout.coords[u].second - layout.coords[v].second;
        double dist = std::sqrt(dx * dx + dy * dy);
        if (dist < 1e-9) continue;
        const double force = dist * dist / k;
        disp[u].first -= dx / dist * force;
        disp[u].second -= dy / dist * force;
        disp[v].first += dx / dist * force;
        disp[v].second += dy / dist * force;
      }
    }

    for (std::size_t v = 0; v < n; ++v) {
      const double len = std::sqrt(disp[v].first * disp[v].first +
                                   disp[v].second * disp[v].second);
      if (len > 0.0) {
        const double scale = std::min(len, temp) / len;
        layout.coords[v].first += disp[v].first * scale;
        layout.coords[v].second += disp[v].second * scale;
      }
      layout.coords[v].first = std::clamp(layout.coords[v].first, 0.0, width);
      layout.coords[v].second = std::clamp(layout.coords[v].second, 0.0, height);
    }
  }
  return layout;
}

}  // namespace tweetmine

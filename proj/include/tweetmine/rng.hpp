#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <string_view>

namespace tweetmine {

// Deterministic random streams. All stochastic stages derive their stream
// from one root seed plus a stage name, so a stage run in isolation sees
// the same draws as the same stage inside a full pipeline run.
//
// std::mt19937_64 output is fully specified by the standard; the transforms
// below avoid std::*_distribution, whose sequences are implementation
// defined, so draws are bit-identical across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : name) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  // Named substream: (root, "stage", index) -> independent stream.
  static RngStream derive(std::uint64_t root, std::string_view stage,
                          std::uint64_t index = 0) {
    std::uint64_t s = mix(root ^ hash_name(stage));
    s = mix(s ^ index);
    return RngStream(s);
  }

  std::uint64_t next() { return gen_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n); n > 0
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  // Standard normal via Box-Muller (second value discarded).
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tweetmine

// Generates the bundled synthetic corpus: a themed tweet stream with planted
// user communities and a keyword burst, plus a weekday price series whose
// next-day returns respond to the burst. Everything is deterministic in the
// seed, so the committed data files can be regenerated bit-identically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tweetmine/dates.hpp"
#include "tweetmine/rng.hpp"
#include "tweetmine/util.hpp"

using tweetmine::RngStream;

namespace {

struct User {
  std::string handle;
  int community;
  double activity;  // relative tweet rate
};

const std::vector<std::string> kAdjectives{
    "swift", "solar", "lunar", "turbo", "quiet", "rapid", "cosmic",
    "prime", "delta", "pixel", "nova",  "astro", "magna", "vivid"};
const std::vector<std::string> kNouns{
    "trader", "driver", "fan",   "skeptic", "watcher", "holder", "analyst",
    "pilot",  "rider",  "maker", "hawk",    "bull",    "bear",   "scout"};

const std::vector<std::string> kChatter{
    "tesla", "tsla", "elon", "musk", "stock", "battery", "energy", "model3"};
const std::vector<std::string> kIncident{"solar", "panel", "fire", "walmart",
                                         "roof"};
const std::vector<std::string> kFiller{
    "today", "news",   "just",   "really", "great",  "watch", "live",
    "big",   "report", "market", "price",  "charge", "range", "again"};

std::string pick(RngStream& rng, const std::vector<std::string>& v) {
  return v[rng.below(v.size())];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic corpus generator"};
  std::string out_dir = "data";
  std::uint64_t seed = 20190801;
  int days = 84;
  int users_n = 42;
  double tweets_per_day = 16.0;
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--days", days, "calendar days to cover");
  app.add_option("--users", users_n, "number of users");
  app.add_option("--rate", tweets_per_day, "mean tweets per day");
  CLI11_PARSE(app, argc, argv);

  RngStream rng = RngStream::derive(seed, "synthgen");
  const std::int64_t first_day = tweetmine::day_from_civil(2019, 8, 1);

  // users in three planted communities
  std::vector<User> users;
  std::vector<int> comm_sizes{users_n * 3 / 7, users_n * 2 / 7, 0};
  comm_sizes[2] = users_n - comm_sizes[0] - comm_sizes[1];
  std::set<std::string> taken;
  for (int comm = 0; comm < 3; ++comm) {
    for (int i = 0; i < comm_sizes[comm]; ++i) {
      std::string handle;
      do {
        handle = pick(rng, kAdjectives) + pick(rng, kNouns);
        if (rng.uniform() < 0.4) handle += std::to_string(rng.below(100));
      } while (!taken.insert(handle).second);
      users.push_back({handle, comm, 0.3 + rng.uniform() * 1.7});
    }
  }
  std::vector<double> cum_activity;
  double total_activity = 0.0;
  for (const auto& u : users) {
    total_activity += u.activity;
    cum_activity.push_back(total_activity);
  }
  auto pick_user = [&](RngStream& r) {
    const double x = r.uniform() * total_activity;
    for (std::size_t i = 0; i < cum_activity.size(); ++i)
      if (x <= cum_activity[i]) return static_cast<int>(i);
    return static_cast<int>(users.size()) - 1;
  };
  auto pick_peer = [&](RngStream& r, int author) {
    // mostly within the author's community
    for (int attempt = 0; attempt < 50; ++attempt) {
      const int peer = pick_user(r);
      if (peer == author) continue;
      const bool same = users[peer].community == users[author].community;
      if (same && r.uniform() < 0.9) return peer;
      if (!same && r.uniform() < 0.15) return peer;
    }
    return (author + 1) % static_cast<int>(users.size());
  };

  // incident window with a ramp: burst of co-occurring incident keywords
  const int incident_start = days * 2 / 5;
  const int incident_end = incident_start + days / 6;
  auto incident_weight = [&](int day) {
    if (day < incident_start || day > incident_end) return 0.04;
    const double peak_pos = 0.5 * (incident_start + incident_end);
    const double half = 0.5 * (incident_end - incident_start) + 1.0;
    return 0.04 + 0.85 * (1.0 - std::abs(day - peak_pos) / half);
  };

  std::vector<double> incident_count(days, 0.0);
  nlohmann::ordered_json line;
  std::ofstream tweets_out(out_dir + "/tweets.jsonl", std::ios::binary);
  if (!tweets_out) {
    std::cerr << "cannot write to " << out_dir << "\n";
    return 1;
  }

  long id = 0;
  for (int day = 0; day < days; ++day) {
    const std::uint64_t spread = static_cast<std::uint64_t>(
        std::max(2.0, 2.0 * (tweets_per_day - 6.0)));
    const int count = 6 + static_cast<int>(rng.below(spread));
    for (int k = 0; k < count; ++k) {
      const int author = pick_user(rng);
      const bool incident = rng.uniform() < incident_weight(day);
      if (incident) incident_count[day] += 1.0;

      std::vector<std::string> words;
      std::vector<std::string> hashtags;
      std::vector<std::string> mentions;
      std::optional<std::string> retweet_of;

      if (rng.uniform() < 0.22) {
        const int rt = pick_peer(rng, author);
        retweet_of = users[rt].handle;
        words.push_back("RT");
        words.push_back("@" + users[rt].handle + ":");
      }
      if (rng.uniform() < 0.45) {
        const int m = pick_peer(rng, author);
        mentions.push_back(users[m].handle);
        words.push_back("@" + users[m].handle);
      }

      if (incident) {
        // dense co-occurrence of the burst vocabulary
        const std::size_t take = 2 + rng.below(4);
        std::vector<std::string> pool = kIncident;
        for (std::size_t t = 0; t < take && !pool.empty(); ++t) {
          const std::size_t i = rng.below(pool.size());
          words.push_back(pool[i]);
          pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
        }
        words.push_back(pick(rng, kChatter));
      } else {
        words.push_back(pick(rng, kChatter));
        if (rng.uniform() < 0.6) words.push_back(pick(rng, kChatter));
        if (rng.uniform() < 0.25) words.push_back(pick(rng, kIncident));
      }
      words.push_back(pick(rng, kFiller));
      if (rng.uniform() < 0.5) words.push_back(pick(rng, kFiller));
      if (rng.uniform() < 0.3) {
        const std::string tag = incident ? "solarfire" : pick(rng, kChatter);
        hashtags.push_back(tag);
        words.push_back("#" + tag);
      }
      if (rng.uniform() < 0.25) words.push_back("$TSLA");
      if (rng.uniform() < 0.15) words.push_back("https://t.co/x" +
                                                std::to_string(rng.below(9999)));

      char idbuf[24];
      std::snprintf(idbuf, sizeof(idbuf), "t%06ld", ++id);
      line.clear();
      line["id"] = idbuf;
      line["timestamp"] =
          (first_day + day) * 86400 + static_cast<std::int64_t>(rng.below(86400));
      line["author"] = users[author].handle;
      line["text"] = tweetmine::join(words, " ");
      line["mentions"] = mentions;
      line["hashtags"] = hashtags;
      if (retweet_of)
        line["retweet_of"] = *retweet_of;
      else
        line["retweet_of"] = nullptr;
      tweets_out << line.dump() << '\n';
    }
  }
  tweets_out.close();

  // normalized burst intensity drives next-day returns
  double mean = 0.0, peak = 1.0;
  for (double v : incident_count) mean += v;
  mean /= days;
  for (double v : incident_count) peak = std::max(peak, v);

  std::ofstream prices_out(out_dir + "/prices.csv", std::ios::binary);
  prices_out << "date,close\n";
  double price = 48.0;
  double prev_intensity = 0.0;
  for (int day = 0; day < days; ++day) {
    const std::int64_t d = first_day + day;
    if (!tweetmine::is_weekend(d)) {
      const double noise = 0.015 * rng.normal();
      const double ret = 0.0006 + noise - 0.030 * prev_intensity;
      price *= 1.0 + ret;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", price);
      prices_out << tweetmine::day_to_iso(d) << ',' << buf << '\n';
    }
    prev_intensity = (incident_count[day] - mean) / peak;
    if (prev_intensity < 0.0) prev_intensity = 0.0;
  }
  prices_out.close();

  std::cerr << "wrote " << id << " tweets over " << days << " days and "
            << "prices to " << out_dir << "\n";
  return 0;
}

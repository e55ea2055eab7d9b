#include "tweetmine/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "tweetmine/dates.hpp"
#include "tweetmine/util.hpp"

namespace tweetmine {

int FeatureMatrix::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> FeatureMatrix::row(std::size_t r) const {
  std::vector<double> out(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) out[c] = columns[c][r];
  return out;
}

std::vector<DailySeries> keyword_daily_counts(const TweetCollection& c,
                                              const ThematicField& keywords,
                                              const TokenizerConfig& cfg) {
  if (c.empty()) throw std::invalid_argument("empty tweet collection");
  const auto [first_day, last_day] = c.date_range();
  const std::size_t n_days = static_cast<std::size_t>(last_day - first_day + 1);

  std::map<std::string, std::vector<double>> counts;
  for (const auto& kw : keywords.keywords)
    counts.emplace(kw, std::vector<double>(n_days, 0.0));

  for (const Tweet& t : c.tweets()) {
    const std::size_t di =
        static_cast<std::size_t>(day_from_timestamp(t.timestamp) - first_day);
    for (const auto& item : filter_thematic(tokenize(t, cfg), keywords))
      counts[item][di] += 1.0;
  }

  std::vector<DailySeries> out;
  out.reserve(counts.size());
  for (auto& [kw, values] : counts)
    out.push_back({kw, first_day, std::move(values)});
  return out;
}

DailySeries normalize_series(const DailySeries& s, NormalizeMethod method) {
  if (s.values.empty()) throw std::invalid_argument("empty series");
  DailySeries out{s.name, s.first_day, s.values};
  const double n = static_cast<double>(s.values.size());

  if (method == NormalizeMethod::zscore) {
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : s.values) var += (v - mean) * (v - mean);
    var /= n;
    const double sd = std::sqrt(var);
    for (double& v : out.values) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  } else {
    const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    const double span = *mx - *mn;
    for (double& v : out.values) v = span > 0.0 ? (v - *mn) / span : 0.0;
  }
  return out;
}

FeatureMatrix make_lag_matrix(const std::vector<DailySeries>& series,
                              const std::vector<int>& lags_in) {
  if (series.empty()) throw std::invalid_argument("no input series");
  std::set<int> lag_set(lags_in.begin(), lags_in.end());
  if (lag_set.empty()) throw std::invalid_argument("lag set must be nonempty");
  if (*lag_set.begin() < 0) throw std::invalid_argument("lags must be >= 0");

  const std::int64_t first_day = series.front().first_day;
  const std::size_t len = series.front().size();
  for (const auto& s : series)
    if (s.first_day != first_day || s.size() != len)
      throw std::invalid_argument("series must share the same day axis");

  const int max_lag = *lag_set.rbegin();
  if (static_cast<std::size_t>(max_lag) >= len)
    throw LagTooLarge("max lag " + std::to_string(max_lag) +
                      " >= series length " + std::to_string(len));

  std::vector<const DailySeries*> ordered;
  for (const auto& s : series) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const DailySeries* a, const DailySeries* b) {
              return a->name < b->name;
            });

  FeatureMatrix m;
  const std::size_t n_rows = len - static_cast<std::size_t>(max_lag);
  m.dates.resize(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i)
    m.dates[i] = first_day + max_lag + static_cast<std::int64_t>(i);
  for (const DailySeries* s : ordered) {
    for (int lag : lag_set) {
      std::vector<double> col(n_rows);
      for (std::size_t i = 0; i < n_rows; ++i)
        col[i] = s->values[i + static_cast<std::size_t>(max_lag - lag)];
      m.names.push_back(s->name + "_lag" + std::to_string(lag));
      m.columns.push_back(std::move(col));
    }
  }
  return m;
}

ReturnSeries price_returns(const DatedSeries& prices) {
  if (prices.size() < 2)
    throw std::invalid_argument("need at least two prices");
  for (double p : prices.values)
    if (!(p > 0.0)) throw NonpositivePrice("prices must be positive");

  ReturnSeries r;
  r.name = "return";
  r.dates.assign(prices.dates.begin() + 1, prices.dates.end());
  r.values.resize(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i)
    r.values[i - 1] = (prices.values[i] - prices.values[i - 1]) /
                      prices.values[i - 1];
  return r;
}

Aligned align(const FeatureMatrix& x, const ReturnSeries& y, int horizon) {
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  Aligned out;
  out.X.names = x.names;
  out.X.columns.resize(x.columns.size());
  out.y.name = y.name;

  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::int64_t target_day = x.dates[r] + horizon;
    auto it = std::lower_bound(y.dates.begin(), y.dates.end(), target_day);
    if (it == y.dates.end() || *it != target_day) continue;
    const std::size_t yi = static_cast<std::size_t>(it - y.dates.begin());
    out.X.dates.push_back(x.dates[r]);
    for (std::size_t c = 0; c < x.columns.size(); ++c)
      out.X.columns[c].push_back(x.columns[c][r]);
    out.y.dates.push_back(x.dates[r]);  // re-dated to the feature day
    out.y.values.push_back(y.values[yi]);
  }
  if (out.X.dates.empty())
    throw NoOverlap("no feature day has a return at the given horizon");
  return out;
}

DatedSeries read_price_csv(std::istream& in, const std::string& name) {
  DatedSeries s;
  s.name = name;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto t = trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;  // `date,close`
    }
    auto comma = t.find(',');
    if (comma == std::string_view::npos)
      throw std::invalid_argument("bad price row: " + std::string(t));
    const std::int64_t day = day_from_iso(trim(t.substr(0, comma)));
    char* end = nullptr;
    const std::string value_str{trim(t.substr(comma + 1))};
    const double price = std::strtod(value_str.c_str(), &end);
    if (end == value_str.c_str() || *end != '\0' || !std::isfinite(price))
      throw std::invalid_argument("bad price value: " + value_str);
    if (!s.dates.empty() && day <= s.dates.back())
      throw std::invalid_argument("price dates must be strictly increasing");
    s.dates.push_back(day);
    s.values.push_back(price);
  }
  if (s.dates.empty()) throw std::invalid_argument("empty price file");
  return s;
}

void write_matrix_csv(const FeatureMatrix& m, std::ostream& out) {
  out << "date";
  for (const auto& n : m.names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << day_to_iso(m.dates[r]);
    for (std::size_t c = 0; c < m.cols(); ++c)
      out << ',' << format_double(m.columns[c][r]);
    out << '\n';
  }
}

void write_series_csv(const std::vector<DailySeries>& series,
                      std::ostream& out) {
  if (series.empty()) return;
  out << "date";
  for (const auto& s : series) out << ',' << s.name;
  out << '\n';
  for (std::size_t i = 0; i < series.front().size(); ++i) {
    out << day_to_iso(series.front().day(i));
    for (const auto& s : series) out << ',' << format_double(s.values[i]);
    out << '\n';
  }
}

void write_dated_csv(const DatedSeries& s, std::ostream& out,
                     const std::string& value_header) {
  out << "date," << value_header << '\n';
  for (std::size_t i = 0; i < s.size(); ++i)
    out << day_to_iso(s.dates[i]) << ',' << format_double(s.values[i]) << '\n';
}

}  // namespace tweetmine

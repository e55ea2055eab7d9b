#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tweetmine/corpus.hpp"

namespace tweetmine {

struct LagTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonpositivePrice : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoOverlap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Contiguous calendar-day series (missing days are zero-filled at build
// time). Days are integers since 1970-01-01 UTC.
struct DailySeries {
  std::string name;
  std::int64_t first_day = 0;
  std::vector<double> values;

  std::int64_t day(std::size_t i) const {
    return first_day + static_cast<std::int64_t>(i);
  }
  std::size_t size() const { return values.size(); }
};

// Series on an explicit, strictly increasing but possibly gapped day axis
// (trading days, aligned returns).
struct DatedSeries {
  std::string name;
  std::vector<std::int64_t> dates;
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
};

using ReturnSeries = DatedSeries;

struct FeatureMatrix {
  std::vector<std::int64_t> dates;
  std::vector<std::string> names;              // column names
  std::vector<std::vector<double>> columns;    // one vector per name

  std::size_t rows() const { return dates.size(); }
  std::size_t cols() const { return names.size(); }
  int column_index(const std::string& name) const;
  std::vector<double> row(std::size_t r) const;
};

// One series per keyword spanning the collection's full date range; the
// value is the number of tweets that day whose token set contains the
// keyword (tweet-level, not occurrence-level). Sorted by name.
std::vector<DailySeries> keyword_daily_counts(const TweetCollection& c,
                                              const ThematicField& keywords,
                                              const TokenizerConfig& cfg);

enum class NormalizeMethod { zscore, minmax };

// zscore uses the population standard deviation; constant series map to
// all-zeros under both methods.
DailySeries normalize_series(const DailySeries& s, NormalizeMethod method);

// Columns `<name>_lag<k>`[t] = series[t-k]; the first max(lags) rows are
// dropped so every cell is populated. Lags are deduplicated and sorted.
FeatureMatrix make_lag_matrix(const std::vector<DailySeries>& series,
                              const std::vector<int>& lags);

// r_t = (p_t - p_{t-1}) / p_{t-1}, dated at day t.
ReturnSeries price_returns(const DatedSeries& prices);

struct Aligned {
  FeatureMatrix X;
  ReturnSeries y;
};

// Pairs features at day t with the return at day t+horizon; rows without a
// counterpart are dropped and y is re-dated to the feature days.
Aligned align(const FeatureMatrix& x, const ReturnSeries& y, int horizon);

// CSV input `date,close` with ISO-8601 dates.
DatedSeries read_price_csv(std::istream& in, const std::string& name = "close");

// CSV writers: first column `date` (ISO-8601), then one column per feature.
void write_matrix_csv(const FeatureMatrix& m, std::ostream& out);
void write_series_csv(const std::vector<DailySeries>& series, std::ostream& out);
void write_dated_csv(const DatedSeries& s, std::ostream& out,
                     const std::string& value_header);

}  // namespace tweetmine

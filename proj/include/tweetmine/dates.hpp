#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tweetmine {

// Calendar days are plain integers: days since 1970-01-01 (UTC).

inline std::int64_t day_from_timestamp(std::int64_t utc_seconds) {
  // floor division, robust to negative inputs
  std::int64_t d = utc_seconds / 86400;
  if (utc_seconds % 86400 < 0) --d;
  return d;
}

// Howard Hinnant's civil-from-days algorithm.
inline void civil_from_day(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<int>(yy + (m <= 2));
}

inline std::int64_t day_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline std::string day_to_iso(std::int64_t day) {
  int y;
  unsigned m, d;
  civil_from_day(day, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
  return buf;
}

// Parses "YYYY-MM-DD"; throws std::invalid_argument on anything else.
inline std::int64_t day_from_iso(std::string_view iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
      std::sscanf(std::string(iso).c_str(), "%d-%u-%u", &y, &m, &d) != 3 ||
      m < 1 || m > 12 || d < 1 || d > 31) {
    throw std::invalid_argument("bad ISO date: " + std::string(iso));
  }
  return day_from_civil(y, m, d);
}

// 0 = Monday ... 6 = Sunday thursday-anchored epoch
inline int weekday(std::int64_t day) {
  std::int64_t w = (day + 3) % 7;  // 1970-01-01 was a Thursday
  if (w < 0) w += 7;
  return static_cast<int>(w);
}

inline bool is_weekend(std::int64_t day) { return weekday(day) >= 5; }

}  // namespace tweetmine

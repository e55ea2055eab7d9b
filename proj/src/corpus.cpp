#include "tweetmine/corpus.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <set>

#include <json.hpp>

#include "tweetmine/dates.hpp"
#include "tweetmine/util.hpp"

namespace tweetmine {

TweetCollection::TweetCollection(std::vector<Tweet> tweets)
    : tweets_(std::move(tweets)) {
  std::sort(tweets_.begin(), tweets_.end(), [](const Tweet& a, const Tweet& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.id < b.id;
  });
  std::set<std::string_view> ids;
  for (const Tweet& t : tweets_) {
    if (!ids.insert(t.id).second)
      throw std::invalid_argument("duplicate tweet id: " + t.id);
  }
}

std::pair<std::int64_t, std::int64_t> TweetCollection::date_range() const {
  if (tweets_.empty())
    throw std::logic_error("date_range on empty collection");
  return {day_from_timestamp(tweets_.front().timestamp),
          day_from_timestamp(tweets_.back().timestamp)};
}

namespace {

// '@handle' or '#tag' prefixes are stripped; result must be nonempty,
// lowercase, whitespace-free.
std::optional<std::string> normalize_handle(std::string_view raw) {
  std::string_view s = trim(raw);
  if (!s.empty() && (s.front() == '@' || s.front() == '#')) s.remove_prefix(1);
  if (s.empty() || contains_whitespace(s)) return std::nullopt;
  return ascii_lower(s);
}

struct RecordError {};

std::string require_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw RecordError{};
  return it->get<std::string>();
}

Tweet tweet_from_fields(std::string id, std::string ts_repr, std::string author,
                        std::string text, const std::vector<std::string>& mentions,
                        const std::vector<std::string>& hashtags,
                        std::string retweet_of) {
  Tweet t;
  id = std::string(trim(id));
  if (id.empty()) throw RecordError{};
  t.id = std::move(id);

  errno = 0;
  char* end = nullptr;
  double ts = std::strtod(ts_repr.c_str(), &end);
  if (end == ts_repr.c_str() || *end != '\0' || errno != 0 ||
      !std::isfinite(ts) || ts < 0)
    throw RecordError{};
  t.timestamp = static_cast<std::int64_t>(std::floor(ts));

  auto a = normalize_handle(author);
  if (!a) throw RecordError{};
  t.author = *a;
  t.text = std::move(text);

  for (const auto& m : mentions)
    if (auto h = normalize_handle(m)) t.mentions.push_back(*h);
  for (const auto& g : hashtags)
    if (auto h = normalize_handle(g)) t.hashtags.push_back(*h);

  if (!trim(retweet_of).empty()) {
    auto r = normalize_handle(retweet_of);
    if (!r) throw RecordError{};
    t.retweet_of = *r;
  }
  return t;
}

Tweet tweet_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw RecordError{};

  std::string id;
  if (auto it = j.find("id"); it != j.end() && it->is_string())
    id = it->get<std::string>();
  else if (it != j.end() && it->is_number_integer())
    id = std::to_string(it->get<std::int64_t>());
  else
    throw RecordError{};

  auto ts_it = j.find("timestamp");
  if (ts_it == j.end() || !ts_it->is_number()) throw RecordError{};

  std::vector<std::string> mentions, hashtags;
  for (const char* key : {"mentions", "hashtags"}) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) continue;
    if (!it->is_array()) throw RecordError{};
    for (const auto& e : *it) {
      if (!e.is_string()) throw RecordError{};
      (key[0] == 'm' ? mentions : hashtags).push_back(e.get<std::string>());
    }
  }

  std::string retweet_of;
  if (auto it = j.find("retweet_of"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw RecordError{};
    retweet_of = it->get<std::string>();
  }

  char ts_buf[40];
  std::snprintf(ts_buf, sizeof(ts_buf), "%.17g", ts_it->get<double>());
  return tweet_from_fields(std::move(id), ts_buf,
                           require_string(j, "author"), require_string(j, "text"),
                           mentions, hashtags, std::move(retweet_of));
}

// RFC4180-ish reader: quoted fields may contain commas, doubled quotes and
// newlines. Returns one row per record.
std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_started || !field.empty()) {
          row.push_back(std::move(field));
          field.clear();
          rows.push_back(std::move(row));
          row.clear();
        }
        row_started = false;
        break;
      default:
        field += c;
        row_started = true;
        break;
    }
  }
  if (row_started || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split_list_field(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '|' || c == ';') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

ParseResult parse_jsonl(std::istream& in) {
  std::vector<Tweet> tweets;
  std::set<std::string> seen_ids;
  std::size_t skipped = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!is_valid_utf8(line))
      throw UnreadableInput("input is not valid UTF-8");
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      ++skipped;
      continue;
    }
    try {
      Tweet t = tweet_from_json(j);
      if (!seen_ids.insert(t.id).second) {
        ++skipped;
        continue;
      }
      tweets.push_back(std::move(t));
    } catch (const RecordError&) {
      ++skipped;
    }
  }
  if (tweets.empty()) throw EmptyCorpus("no valid tweet records in input");
  return {TweetCollection(std::move(tweets)), skipped};
}

ParseResult parse_csv(std::istream& in) {
  auto rows = read_csv(in);
  for (const auto& row : rows)
    for (const auto& f : row)
      if (!is_valid_utf8(f)) throw UnreadableInput("input is not valid UTF-8");
  if (rows.empty()) throw EmptyCorpus("no valid tweet records in input");

  const auto& header = rows.front();
  auto col = [&](std::string_view name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (trim(header[i]) == name) return static_cast<int>(i);
    return -1;
  };
  const int c_id = col("id"), c_ts = col("timestamp"), c_author = col("author"),
            c_text = col("text"), c_mentions = col("mentions"),
            c_hashtags = col("hashtags"), c_rt = col("retweet_of");
  if (c_id < 0 || c_ts < 0 || c_author < 0 || c_text < 0)
    throw UnreadableInput(
        "csv header must contain id, timestamp, author, text");

  std::vector<Tweet> tweets;
  std::set<std::string> seen_ids;
  std::size_t skipped = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto cell = [&](int c) -> std::string {
      return (c >= 0 && static_cast<std::size_t>(c) < row.size()) ? row[c] : "";
    };
    if (row.size() != header.size()) {
      ++skipped;
      continue;
    }
    try {
      Tweet t = tweet_from_fields(cell(c_id), cell(c_ts), cell(c_author),
                                  cell(c_text), split_list_field(cell(c_mentions)),
                                  split_list_field(cell(c_hashtags)), cell(c_rt));
      if (!seen_ids.insert(t.id).second) {
        ++skipped;
        continue;
      }
      tweets.push_back(std::move(t));
    } catch (const RecordError&) {
      ++skipped;
    }
  }
  if (tweets.empty()) throw EmptyCorpus("no valid tweet records in input");
  return {TweetCollection(std::move(tweets)), skipped};
}

}  // namespace

ParseResult parse_tweets(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::jsonl ? parse_jsonl(in) : parse_csv(in);
}

namespace {

bool is_token_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_url_word(std::string_view w) {
  auto lower = ascii_lower(w.substr(0, 8));
  return lower.rfind("http://", 0) == 0 || lower.rfind("https://", 0) == 0 ||
         lower.rfind("www.", 0) == 0;
}

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text,
                                       const TokenizerConfig& cfg) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' ||
                     text[i] == '\r'))
      ++i;
    std::size_t start = i;
    while (i < n && text[i] != ' ' && text[i] != '\t' && text[i] != '\n' &&
           text[i] != '\r')
      ++i;
    if (start == i) continue;
    std::string_view word = text.substr(start, i - start);
    if (cfg.strip_urls && is_url_word(word)) continue;

    std::size_t j = 0;
    while (j < word.size()) {
      if (!is_token_byte(static_cast<unsigned char>(word[j]))) {
        ++j;
        continue;
      }
      std::size_t run = j;
      while (run < word.size() &&
             is_token_byte(static_cast<unsigned char>(word[run])))
        ++run;
      const bool is_mention = j > 0 && word[j - 1] == '@';
      std::string tok = ascii_lower(word.substr(j, run - j));
      j = run;
      if (is_mention && cfg.strip_mentions_from_tokens) continue;
      if (static_cast<int>(tok.size()) < cfg.min_token_len) continue;
      if (cfg.stopwords.count(tok)) continue;
      tokens.push_back(std::move(tok));
    }
  }
  return tokens;
}

std::vector<std::string> tokenize(const Tweet& t, const TokenizerConfig& cfg) {
  return tokenize_text(t.text, cfg);
}

std::set<std::string> filter_thematic(const std::vector<std::string>& tokens,
                                      const ThematicField& field) {
  std::set<std::string> out;
  for (const auto& tok : tokens)
    if (field.keywords.count(tok)) out.insert(tok);
  return out;
}

void write_canonical_jsonl(const TweetCollection& c, std::ostream& out) {
  for (const Tweet& t : c.tweets()) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["timestamp"] = t.timestamp;
    j["author"] = t.author;
    j["text"] = t.text;
    j["mentions"] = t.mentions;
    j["hashtags"] = t.hashtags;
    if (t.retweet_of)
      j["retweet_of"] = *t.retweet_of;
    else
      j["retweet_of"] = nullptr;
    out << j.dump() << '\n';
  }
}

}  // namespace tweetmine

#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tweetmine {

// One normalized tweet record. Handles and tags are lowercase with no
// whitespace; hashtags carry no leading '#'.
struct Tweet {
  std::string id;
  std::int64_t timestamp = 0;  // UTC seconds since epoch, >= 0
  std::string author;
  std::string text;
  std::vector<std::string> mentions;
  std::vector<std::string> hashtags;
  std::optional<std::string> retweet_of;
};

// Immutable, timestamp-sorted corpus (ties broken by id). Ids are unique.
class TweetCollection {
 public:
  TweetCollection() = default;
  explicit TweetCollection(std::vector<Tweet> tweets);

  const std::vector<Tweet>& tweets() const { return tweets_; }
  std::size_t size() const { return tweets_.size(); }
  bool empty() const { return tweets_.empty(); }

  // Inclusive (first_day, last_day), calendar days since epoch in UTC.
  std::pair<std::int64_t, std::int64_t> date_range() const;

 private:
  std::vector<Tweet> tweets_;
};

struct ThematicField {
  std::set<std::string> keywords;  // lowercase terms, nonempty
};

struct TokenizerConfig {
  std::set<std::string> stopwords;
  int min_token_len = 1;
  bool strip_urls = true;
  bool strip_mentions_from_tokens = true;
};

enum class CorpusFormat { jsonl, csv };

struct UnreadableInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyCorpus : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseResult {
  TweetCollection collection;
  std::size_t skipped = 0;  // malformed or duplicate-id records
};

// Reads JSONL or CSV tweet records. Malformed records are skipped and
// counted; an undecodable stream throws UnreadableInput, an input with no
// valid record throws EmptyCorpus.
ParseResult parse_tweets(std::istream& in, CorpusFormat format);

// Lowercased alphanumeric runs of the tweet text. '#tag' survives as 'tag';
// '@user' runs are dropped when strip_mentions_from_tokens; whole URL words
// are dropped when strip_urls; then stopwords and short tokens are removed.
// Order and duplicates are preserved.
std::vector<std::string> tokenize(const Tweet& t, const TokenizerConfig& cfg);
std::vector<std::string> tokenize_text(std::string_view text,
                                       const TokenizerConfig& cfg);

// Deduplicated intersection of the tokens with the field's keywords.
std::set<std::string> filter_thematic(const std::vector<std::string>& tokens,
                                      const ThematicField& field);

// Canonical JSONL: UTF-8, one object per line, keys in the fixed order
// id,timestamp,author,text,mentions,hashtags,retweet_of (null when absent).
void write_canonical_jsonl(const TweetCollection& c, std::ostream& out);

}  // namespace tweetmine

#pragma once

// Archive stream parsing, trend list loading and the tweet-to-trend join.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "trendguard/core.hpp"

namespace trendguard {

struct Tweet {
  std::uint64_t id = 0;
  std::uint64_t user_id = 0;
  std::string text;
  Timestamp created_at;
  std::vector<std::string> hashtags;  // entity text, without '#'
  std::vector<std::uint64_t> mentions;
  std::uint32_t urls = 0;
  bool is_retweet = false;
  bool is_reply = false;
  std::optional<GeoPoint> geo;
  std::optional<std::string> lang;
  std::optional<std::string> source_app;

  bool operator==(const Tweet&) const = default;
};

struct Deletion {
  std::uint64_t tweet_id = 0;
  std::uint64_t user_id = 0;
  Timestamp time;

  bool operator==(const Deletion&) const = default;
};

using TweetEvent = std::variant<Tweet, Deletion>;

Timestamp event_time(const TweetEvent& e);

struct Skip {};
struct Malformed {
  std::string reason;
};
using LineResult = std::variant<TweetEvent, Skip, Malformed>;

// One archive line: a status object becomes a creation, a delete notice a
// deletion; blank lines and other control records (limit, scrub_geo, ...) are
// skipped. Never throws.
LineResult parse_stream_line(std::string_view line);

struct ParseStats {
  std::uint64_t lines_read = 0;
  std::uint64_t creations = 0;
  std::uint64_t deletions = 0;
  std::uint64_t malformed_skipped = 0;
  std::uint64_t other_skipped = 0;

  bool consistent() const {
    return lines_read == creations + deletions + malformed_skipped + other_skipped;
  }
  ParseStats& operator+=(const ParseStats& o);
  bool operator==(const ParseStats&) const = default;
};

enum class Compression { None, Gzip, Bzip2, Auto };

// Which events the visitor wants. Filtering happens before the JSON parse so
// a deletion-only pass skips status records cheaply (they still count as
// lines read and are tallied under other_skipped).
enum class EventFilter { All, CreationsOnly, DeletionsOnly };

using EventVisitor = std::function<void(TweetEvent&&)>;

// Streams events in file order. Auto sniffs the gzip/bzip2 magic bytes.
// Throws Errc::Io on read failure; malformed lines are counted, not fatal.
ParseStats for_each_event(std::istream& source, Compression compression,
                          const EventVisitor& visit,
                          EventFilter filter = EventFilter::All);
ParseStats for_each_event_in_file(const std::filesystem::path& path,
                                  const EventVisitor& visit,
                                  EventFilter filter = EventFilter::All,
                                  Compression compression = Compression::Auto);

struct StreamContents {
  std::vector<TweetEvent> events;
  ParseStats stats;
};
StreamContents read_stream(std::istream& source, Compression compression);

// Archive-layout JSON for one event; inverse of parse_stream_line for the
// fields this library models.
std::string serialize_event(const TweetEvent& e);

struct TrendEntry {
  int rank = 0;
  Keyword keyword;
  std::optional<std::int64_t> volume;
};

struct TrendEpoch {
  Timestamp captured_at;
  std::string location;
  std::vector<TrendEntry> entries;  // ranks 1..n, n <= 50
};

inline constexpr std::size_t kMaxTrendListSize = 50;

// CSV with header captured_at,location,rank,keyword,volume. Epochs come back
// sorted by (captured_at, location). Throws Errc::BadRank, Errc::BadTimestamp.
std::vector<TrendEpoch> load_trend_epochs(std::istream& source,
                                          const Locale& locale);
void write_trend_epochs(std::ostream& out, std::span<const TrendEpoch> epochs);

struct TrendDay {
  Date date;
  Keyword keyword;

  auto operator<=>(const TrendDay&) const = default;
  bool operator==(const TrendDay&) const = default;
};

// CSV with header date,keyword. Duplicate (date, keyword) pairs collapse.
std::vector<TrendDay> load_trend_days(std::istream& source, const Locale& locale);
void write_trend_days(std::ostream& out, std::span<const TrendDay> days);

// Hashtags match the exact folded hashtag token; n-grams match the folded,
// whitespace-collapsed phrase at word boundaries.
bool match_keyword(std::string_view text, const Keyword& keyword,
                   const Locale& locale);

struct TrendRef {
  Keyword keyword;
  std::optional<Date> date;
  std::optional<Timestamp> first_entry;

  // "#tag@2019-06-18" style identifier used in every output file.
  std::string label() const;
};

struct TrendInstance {
  TrendRef trend;
  std::vector<Tweet> tweets;                     // ordered by (created_at, id)
  std::map<std::uint64_t, Timestamp> deletions;  // tweet id -> deletion time
  std::size_t rejected_deletions = 0;            // deletion before creation

  std::optional<Timestamp> deletion_of(std::uint64_t tweet_id) const;
  bool operator==(const TrendInstance& o) const;
};

struct IngestOptions {
  Locale locale;
  UtcOffset tz;
  // Keep deletion notices with no matching creation in a side table.
  bool retain_unmatched = true;
};

// Joins tweets to many trend days in one streaming pass. A tweet belongs to a
// trend day D if its local date is D or D-1 and its text matches the keyword.
// Deletions attach by tweet id whenever they arrive; ones seen before their
// creation wait in the unmatched table and are reconciled by finish().
class TrendJoiner {
 public:
  TrendJoiner(std::vector<TrendDay> trends, IngestOptions options);

  void add(const TweetEvent& e);
  void add_creation(const Tweet& t);
  void add_deletion(const Deletion& d);

  // Instances in the order the trends were given.
  std::vector<TrendInstance> finish();

  const std::map<std::uint64_t, Timestamp>& unmatched_deletions() const {
    return unmatched_;
  }
  std::uint64_t unmatched_deletion_count() const { return unmatched_count_; }

 private:
  void attach(std::uint64_t id, Timestamp when);

  std::vector<TrendDay> trends_;
  IngestOptions options_;
  std::unordered_map<std::u32string, std::vector<std::size_t>> hashtag_index_;
  std::map<Date, std::vector<std::size_t>> ngram_index_;
  std::unordered_map<std::uint64_t, Tweet> pool_;
  std::vector<std::vector<std::uint64_t>> members_;
  std::unordered_map<std::uint64_t, Timestamp> deletions_;
  std::unordered_map<std::uint64_t, std::size_t> rejected_;
  std::map<std::uint64_t, Timestamp> unmatched_;
  std::vector<std::pair<std::uint64_t, Timestamp>> late_;
  std::uint64_t unmatched_count_ = 0;
};

TrendInstance build_trend_instance(const TrendDay& trend,
                                   std::span<const TweetEvent> events,
                                   const IngestOptions& options);

}  // namespace trendguard

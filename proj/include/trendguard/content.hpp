#pragma once

// Per-tweet content flags: generated word-salad text and single-engagement
// metadata.

#include <cstdint>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trendguard/core.hpp"
#include "trendguard/ingest.hpp"

namespace trendguard {

// Letters allowed in generated text.
class Alphabet {
 public:
  // ASCII letters plus the Turkish letters and circumflexed vowels.
  Alphabet();
  explicit Alphabet(std::u32string_view letters);

  bool contains(char32_t cp) const { return letters_.count(cp) > 0; }

 private:
  std::set<char32_t> letters_;
};

struct LexiconRules {
  Alphabet alphabet;
  std::size_t min_tokens = 2;
  std::size_t max_tokens = 9;
};

struct TweetFlags {
  bool is_lexicon = false;
  bool is_single_engagement = false;
  std::uint32_t token_count = 0;

  bool operator==(const TweetFlags&) const = default;
};

// Removes every occurrence of the keyword (as a hashtag for hashtag keywords,
// as a word-bounded phrase for n-grams) and all emoji, then collapses
// whitespace. Matching is case-folded with `locale`.
std::string strip_keyword_and_emoji(std::string_view text, const Keyword& keyword,
                                    const Locale& locale = Locale());
// Same, without a keyword.
std::string strip_emoji(std::string_view text);

std::size_t token_count(std::string_view stripped);

// Checks an already stripped text.
bool is_lexicon_text(std::string_view stripped, const LexiconRules& rules = {});

bool is_lexicon_tweet(std::string_view text, const Keyword& keyword,
                      const Locale& locale = Locale(),
                      const LexiconRules& rules = {});

bool is_single_engagement(const Tweet& tweet, const Keyword& keyword,
                          const Locale& locale = Locale());

TweetFlags classify_tweet(const Tweet& tweet, const Keyword& keyword,
                          const Locale& locale = Locale(),
                          const LexiconRules& rules = {});

// Tweets outside any trend have no keyword: only emoji are stripped and the
// single-engagement check allows no hashtag at all.
TweetFlags classify_untargeted(const Tweet& tweet, const LexiconRules& rules = {});

std::vector<TweetFlags> classify_instance(const TrendInstance& instance,
                                          const Locale& locale = Locale(),
                                          const LexiconRules& rules = {});

struct StatsColumn {
  std::uint64_t all = 0;
  std::uint64_t deleted = 0;
  std::uint64_t deleted_lexicon = 0;
  std::uint64_t lexicon = 0;

  double deleted_lexicon_over_lexicon() const;
  double deleted_lexicon_over_deleted() const;
  bool operator==(const StatsColumn&) const = default;
};

struct StatsTable {
  StatsColumn trend;
  StatsColumn other;

  // Six labelled rows, one column per class.
  void write_csv(std::ostream& out) const;
};

struct BackgroundTweet {
  Tweet tweet;
  bool deleted = false;
};

// Trend tweets are counted once per tweet id even when several trends share
// them; a tweet is lexicon if it is lexicon for any of its trends.
// Throws Errc::EmptyCorpus when both inputs are empty.
StatsTable lexicon_stats(std::span<const TrendInstance> instances,
                         std::span<const BackgroundTweet> background,
                         const Locale& locale = Locale(),
                         const LexiconRules& rules = {});

}  // namespace trendguard

#include "trendguard/content.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "trendguard/csv.hpp"
#include "trendguard/text.hpp"

namespace trendguard {

namespace {

constexpr char32_t kDefaultLetters[] =
    U"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    U"çğıöşüÇĞİÖŞÜâîûÂÎÛ";

bool is_keyword_hit(const std::u32string& folded, std::size_t pos,
                    const std::u32string& needle) {
  if (folded.compare(pos, needle.size(), needle) != 0) return false;
  const std::size_t end = pos + needle.size();
  if (text::is_word_char(needle.back()) && end < folded.size() &&
      text::is_word_char(folded[end]))
    return false;
  return true;
}

}  // namespace

Alphabet::Alphabet() : Alphabet(kDefaultLetters) {}

Alphabet::Alphabet(std::u32string_view letters)
    : letters_(letters.begin(), letters.end()) {}

std::string strip_keyword_and_emoji(std::string_view text, const Keyword& keyword,
                                    const Locale& locale) {
  const std::u32string cps = text::decode_utf8(text);
  const std::u32string folded = text::fold(cps, locale);
  const std::u32string needle = text::decode_utf8(keyword.normalized);
  const bool hashtag = keyword.kind == KeywordKind::Hashtag;

  std::u32string kept;
  kept.reserve(cps.size());
  const bool needs_boundary = !needle.empty() && text::is_word_char(needle.front());
  for (std::size_t i = 0; i < cps.size();) {
    const bool boundary_before = i == 0 || !text::is_word_char(folded[i - 1]);
    if (!needle.empty()) {
      if (hashtag && boundary_before && (cps[i] == U'#' || cps[i] == U'＃') &&
          is_keyword_hit(folded, i + 1, needle)) {
        i += 1 + needle.size();
        kept.push_back(U' ');
        continue;
      }
      if (!hashtag && (boundary_before || !needs_boundary) &&
          is_keyword_hit(folded, i, needle)) {
        i += needle.size();
        kept.push_back(U' ');
        continue;
      }
    }
    kept.push_back(text::is_emoji(cps[i]) ? U' ' : cps[i]);
    ++i;
  }
  return text::encode_utf8(text::collapse_spaces(kept));
}

std::string strip_emoji(std::string_view text) {
  std::u32string kept;
  for (char32_t cp : text::decode_utf8(text))
    kept.push_back(text::is_emoji(cp) ? U' ' : cp);
  return text::encode_utf8(text::collapse_spaces(kept));
}

std::size_t token_count(std::string_view stripped) {
  return text::split_spaces(text::decode_utf8(stripped)).size();
}

bool is_lexicon_text(std::string_view stripped, const LexiconRules& rules) {
  const std::u32string cps = text::collapse_spaces(text::decode_utf8(stripped));
  if (cps.empty()) return false;
  for (char32_t cp : cps) {
    if (cp == U' ' || cp == U'(' || cp == U')') continue;
    if (!text::is_letter(cp) || !rules.alphabet.contains(cp)) return false;
  }
  if (text::is_upper(cps.front())) return false;
  const std::size_t n = text::split_spaces(cps).size();
  return n >= rules.min_tokens && n <= rules.max_tokens;
}

bool is_lexicon_tweet(std::string_view text, const Keyword& keyword,
                      const Locale& locale, const LexiconRules& rules) {
  return is_lexicon_text(strip_keyword_and_emoji(text, keyword, locale), rules);
}

namespace {

bool no_engagement(const Tweet& t) {
  return !t.is_retweet && !t.is_reply && t.mentions.empty() && t.urls == 0;
}

std::vector<std::u32string> all_hashtags(const Tweet& t, const Locale& locale) {
  std::vector<std::u32string> tags;
  for (const auto& h : t.hashtags) {
    std::u32string cps = text::decode_utf8(h);
    while (!cps.empty() && (cps.front() == U'#' || cps.front() == U'＃'))
      cps.erase(cps.begin());
    tags.push_back(text::fold(cps, locale));
  }
  for (auto& h : text::hashtag_tokens(text::fold(text::decode_utf8(t.text), locale)))
    tags.push_back(std::move(h));
  return tags;
}

}  // namespace

bool is_single_engagement(const Tweet& tweet, const Keyword& keyword,
                          const Locale& locale) {
  if (!no_engagement(tweet)) return false;
  const std::u32string target = keyword.kind == KeywordKind::Hashtag
                                    ? text::decode_utf8(keyword.normalized)
                                    : std::u32string();
  for (const auto& tag : all_hashtags(tweet, locale))
    if (target.empty() || tag != target) return false;
  return true;
}

TweetFlags classify_tweet(const Tweet& tweet, const Keyword& keyword,
                          const Locale& locale, const LexiconRules& rules) {
  const std::string stripped = strip_keyword_and_emoji(tweet.text, keyword, locale);
  TweetFlags f;
  f.token_count = static_cast<std::uint32_t>(token_count(stripped));
  f.is_lexicon = is_lexicon_text(stripped, rules);
  f.is_single_engagement = is_single_engagement(tweet, keyword, locale);
  return f;
}

TweetFlags classify_untargeted(const Tweet& tweet, const LexiconRules& rules) {
  const std::string stripped = strip_emoji(tweet.text);
  TweetFlags f;
  f.token_count = static_cast<std::uint32_t>(token_count(stripped));
  f.is_lexicon = is_lexicon_text(stripped, rules);
  f.is_single_engagement =
      no_engagement(tweet) && all_hashtags(tweet, Locale()).empty();
  return f;
}

std::vector<TweetFlags> classify_instance(const TrendInstance& instance,
                                          const Locale& locale,
                                          const LexiconRules& rules) {
  std::vector<TweetFlags> flags;
  flags.reserve(instance.tweets.size());
  for (const auto& t : instance.tweets)
    flags.push_back(classify_tweet(t, instance.trend.keyword, locale, rules));
  return flags;
}

double StatsColumn::deleted_lexicon_over_lexicon() const {
  return lexicon ? static_cast<double>(deleted_lexicon) / lexicon : 0.0;
}

double StatsColumn::deleted_lexicon_over_deleted() const {
  return deleted ? static_cast<double>(deleted_lexicon) / deleted : 0.0;
}

namespace {

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", v * 100.0);
  return buf;
}

}  // namespace

void StatsTable::write_csv(std::ostream& out) const {
  csv::write_row(out, {"row", "trend_tweets", "other_tweets"});
  csv::write_row(out, {"all_tweets", std::to_string(trend.all),
                       std::to_string(other.all)});
  csv::write_row(out, {"deleted_tweets", std::to_string(trend.deleted),
                       std::to_string(other.deleted)});
  csv::write_row(out, {"deleted_lexicon_tweets", std::to_string(trend.deleted_lexicon),
                       std::to_string(other.deleted_lexicon)});
  csv::write_row(out, {"all_lexicon_tweets", std::to_string(trend.lexicon),
                       std::to_string(other.lexicon)});
  csv::write_row(out, {"deleted_lexicon_over_all_lexicon",
                       percent(trend.deleted_lexicon_over_lexicon()),
                       percent(other.deleted_lexicon_over_lexicon())});
  csv::write_row(out, {"deleted_lexicon_over_all_deleted",
                       percent(trend.deleted_lexicon_over_deleted()),
                       percent(other.deleted_lexicon_over_deleted())});
}

StatsTable lexicon_stats(std::span<const TrendInstance> instances,
                         std::span<const BackgroundTweet> background,
                         const Locale& locale, const LexiconRules& rules) {
  if (background.empty() &&
      std::all_of(instances.begin(), instances.end(),
                  [](const TrendInstance& i) { return i.tweets.empty(); }))
    throw Error(Errc::EmptyCorpus, "no tweets to count");

  struct Seen {
    bool deleted = false;
    bool lexicon = false;
  };
  std::map<std::uint64_t, Seen> trend_tweets;
  for (const auto& inst : instances) {
    for (const auto& t : inst.tweets) {
      auto& s = trend_tweets[t.id];
      s.deleted = s.deleted || inst.deletions.count(t.id) > 0;
      s.lexicon = s.lexicon ||
                  is_lexicon_tweet(t.text, inst.trend.keyword, locale, rules);
    }
  }

  StatsTable table;
  auto tally = [](StatsColumn& c, bool deleted, bool lexicon) {
    ++c.all;
    c.deleted += deleted;
    c.lexicon += lexicon;
    c.deleted_lexicon += deleted && lexicon;
  };
  for (const auto& [id, s] : trend_tweets) tally(table.trend, s.deleted, s.lexicon);
  for (const auto& b : background)
    tally(table.other, b.deleted, is_lexicon_text(strip_emoji(b.tweet.text), rules));
  return table;
}

}  // namespace trendguard

#pragma once

// Small builders shared by the unit tests.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trendguard/features.hpp"
#include "trendguard/ingest.hpp"

namespace tgtest {

using namespace trendguard;

// 2019-06-18T12:00:00Z, mid-afternoon on the 18th in UTC+3.
inline constexpr std::int64_t kNoon = 1560859200;

inline Tweet make_tweet(std::uint64_t id, std::uint64_t user, std::int64_t t,
                        std::string text, std::vector<std::string> tags = {}) {
  Tweet tw;
  tw.id = id;
  tw.user_id = user;
  tw.created_at = Timestamp(t);
  tw.text = std::move(text);
  tw.hashtags = std::move(tags);
  return tw;
}

inline AnnotatedTweet annotated(std::uint64_t id, std::uint64_t user, std::int64_t p,
                                std::optional<std::int64_t> d, bool set = true,
                                bool lexicon = true, bool retweet = false) {
  AnnotatedTweet a;
  a.id = id;
  a.user_id = user;
  a.created_at = Timestamp(p);
  if (d) a.deleted_at = Timestamp(*d);
  a.is_retweet = retweet;
  a.flags.is_single_engagement = set;
  a.flags.is_lexicon = lexicon;
  a.flags.token_count = lexicon ? 3 : 0;
  return a;
}

inline TrendInstance instance_of(const std::string& keyword, std::vector<Tweet> tweets,
                                 std::map<std::uint64_t, Timestamp> deletions = {}) {
  TrendInstance inst;
  inst.trend.keyword = normalize_keyword(keyword, Locale());
  inst.trend.date = Date::from_ymd(2019, 6, 18);
  inst.tweets = std::move(tweets);
  inst.deletions = std::move(deletions);
  return inst;
}

}  // namespace tgtest

#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "trendguard/metrics.hpp"

using namespace trendguard;
using namespace tgtest;

namespace {

Keyword kw(const char* s) { return normalize_keyword(s, Locale()); }

TrendEpoch epoch(std::int64_t t, std::vector<std::pair<const char*, int>> entries,
                 std::optional<std::int64_t> volume = {}) {
  TrendEpoch e;
  e.captured_at = Timestamp(t);
  e.location = "Turkey";
  for (auto [k, r] : entries) e.entries.push_back({r, kw(k), volume});
  return e;
}

}  // namespace

TEST(Lifecycle, ThirtyMinutesAtRankThree) {
  std::vector<TrendEpoch> ep;
  for (int m = 0; m <= 30; m += 5) ep.push_back(epoch(kNoon + m * 60, {{"#a", 3}}));
  ep.push_back(epoch(kNoon + 35 * 60, {{"#b", 1}}));
  auto l = lifecycle(kw("#a"), ep);
  EXPECT_EQ(l.lifetime(), Duration::minutes(35));
  EXPECT_EQ(l.initial_rank, 3);
  EXPECT_EQ(l.best_rank, 3);
  EXPECT_EQ(l.first_entry, Timestamp(kNoon));
}

TEST(Lifecycle, SingleEpochAndNever) {
  std::vector<TrendEpoch> ep{epoch(kNoon, {{"#a", 2}})};
  EXPECT_EQ(lifecycle(kw("#a"), ep).lifetime(), kDefaultEpochInterval);
  EXPECT_EQ(lifecycle(kw("#a"), ep, Duration{60}).lifetime(), Duration{60});
  try {
    lifecycle(kw("#z"), ep);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NeverTrended);
  }
}

TEST(Lifecycle, FirstExitIgnoresReentry) {
  std::vector<TrendEpoch> ep{epoch(kNoon, {{"#a", 5}}), epoch(kNoon + 300, {{"#a", 1}}),
                             epoch(kNoon + 600, {{"#b", 1}}), epoch(kNoon + 900, {{"#a", 1}})};
  auto l = lifecycle(kw("#a"), ep);
  EXPECT_EQ(l.lifetime(), Duration{600});
  EXPECT_EQ(l.best_rank, 1);
  auto all = all_lifecycles(ep);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].keyword, kw("#a"));
  EXPECT_EQ(all[1].first_entry, Timestamp(kNoon + 600));
  std::stringstream ss;
  write_lifecycles(ss, all);
  EXPECT_NE(ss.str().find("#a,2019-06-18T12:00:00Z"), std::string::npos) << ss.str();
}

TEST(Speed, MedianBeforeEntry) {
  TrendLifecycle life;
  life.keyword = kw("#a");
  life.first_entry = Timestamp(kNoon);
  auto inst = instance_of("#a", {make_tweet(1, 1, kNoon - 600, "x"),
                                 make_tweet(2, 2, kNoon - 1200, "x"),
                                 make_tweet(3, 3, kNoon - 1800, "x"),
                                 make_tweet(4, 4, kNoon + 60, "x")});
  EXPECT_EQ(trend_speed(inst, life), Duration::minutes(20));
  auto even = instance_of("#a", {make_tweet(1, 1, kNoon - 601, "x"),
                                 make_tweet(2, 2, kNoon - 1200, "x")});
  // median -900.5 floors to -901
  EXPECT_EQ(trend_speed(even, life), Duration{901});
  auto late = instance_of("#a", {make_tweet(1, 1, kNoon + 1, "x")});
  try {
    trend_speed(late, life);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoPriorTweets);
  }
}

TEST(Speed, PreEntryDeletionRatio) {
  TrendLifecycle life;
  life.first_entry = Timestamp(kNoon);
  auto inst = instance_of("#a",
                          {make_tweet(1, 1, kNoon - 100, "x"), make_tweet(2, 2, kNoon - 90, "x"),
                           make_tweet(3, 3, kNoon - 80, "x"), make_tweet(4, 4, kNoon - 70, "x"),
                           make_tweet(5, 5, kNoon + 10, "x")},
                          {{1, Timestamp(kNoon - 50)},
                           {2, Timestamp(kNoon)},
                           {3, Timestamp(kNoon + 1)},
                           {5, Timestamp(kNoon + 20)}});
  EXPECT_DOUBLE_EQ(pre_entry_deletion_ratio(inst, life), 0.5);
}

TEST(Prevalence, OneOfFive) {
  std::vector<TrendEpoch> ep{
      epoch(kNoon, {{"#a", 1}, {"#b", 2}, {"#c", 3}}),
      epoch(kNoon + 300, {{"#d", 1}, {"#e", 2}, {"#late", 11}})};
  std::vector<Verdict> v(2);
  v[0].trend = {kw("#c"), Date::from_ymd(2019, 6, 18), {}};
  v[0].attacked = true;
  v[1].trend = {kw("#late"), Date::from_ymd(2019, 6, 18), {}};
  v[1].attacked = true;  // outside the top 10
  auto days = prevalence(v, ep);
  ASSERT_EQ(days.size(), 1u);
  EXPECT_EQ(days.begin()->second.entrants, 5u);
  EXPECT_DOUBLE_EQ(mean_prevalence(days), 0.2);
  EXPECT_DOUBLE_EQ(mean_prevalence({}), 0.0);
  // 22:00 UTC is already the next local day
  auto other = prevalence(v, std::vector<TrendEpoch>{epoch(kNoon + 10 * 3600, {{"#c", 1}})});
  EXPECT_EQ(other.begin()->first, Date::from_ymd(2019, 6, 19));
  EXPECT_EQ(other.begin()->second.attacked, 0u);
}

TEST(Hours, LocalHistogram) {
  std::vector<TrendLifecycle> ls(3);
  ls[0].first_entry = Timestamp(kNoon);          // 15 local
  ls[1].first_entry = Timestamp(kNoon + 1800);   // 15 local
  ls[2].first_entry = Timestamp(kNoon + 10 * 3600);  // 01 local
  auto bins = entry_hour_histogram(ls);
  EXPECT_EQ(bins[15], 2u);
  EXPECT_EQ(bins[1], 1u);
  auto utc = entry_hour_histogram(ls, UtcOffset::hours(0));
  EXPECT_EQ(utc[12], 2u);
  std::uint64_t total = 0;
  for (auto b : bins) total += b;
  EXPECT_EQ(total, 3u);
}

TEST(Travel, IstanbulAnkaraRoundTrip) {
  const GeoPoint ist(41.0082, 28.9784), ank(39.9334, 32.8597);
  std::vector<GeoSample> s{{Timestamp(kNoon), ist},
                           {Timestamp(kNoon + 86400), ank},
                           {Timestamp(kNoon + 2 * 86400), ist},
                           {Timestamp(kNoon + 9 * 86400), ank}};  // outside the window
  const double km = user_travel_distance(s);
  EXPECT_NEAR(km, 2 * haversine_km(ist, ank), 1e-9);
  EXPECT_NEAR(km, 702, 5);
  // duplicates and input order do not matter
  auto dup = s;
  dup.push_back({Timestamp(kNoon + 86400), ank});
  std::reverse(dup.begin(), dup.end());
  EXPECT_NEAR(user_travel_distance(dup), km, 1e-9);
}

TEST(Travel, InsufficientPoints) {
  std::vector<GeoSample> one{{Timestamp(kNoon), GeoPoint(0, 0)}};
  try {
    user_travel_distance(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InsufficientPoints);
  }
  std::vector<GeoSample> far{{Timestamp(kNoon), GeoPoint(0, 0)},
                             {Timestamp(kNoon + 6 * 86400), GeoPoint(1, 1)}};
  EXPECT_THROW(user_travel_distance(far), Error);
  EXPECT_THROW(user_travel_distance({}), Error);
}

TEST(Volume, MediansByClass) {
  std::vector<TrendInstance> inst{
      instance_of("#a", {make_tweet(1, 1, kNoon, "x"), make_tweet(2, 2, kNoon, "x")},
                  {{1, Timestamp(kNoon + 5)}}),
      instance_of("#b", {make_tweet(3, 3, kNoon, "x"), make_tweet(4, 4, kNoon, "x"),
                         make_tweet(5, 5, kNoon, "x")}),
      instance_of("#c", {make_tweet(6, 6, kNoon, "x")})};
  std::vector<Verdict> v(3);
  v[0].attacked = true;
  std::vector<TrendEpoch> ep{epoch(kNoon, {{"#a", 1}}, 1000), epoch(kNoon + 300, {{"#a", 1}}, 4000),
                             epoch(kNoon, {{"#b", 2}}, 200)};
  auto rows = volume_report(inst, v, ep);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].label, "attacked");
  EXPECT_DOUBLE_EQ(*rows[0].median_undeleted_tweets, 1);
  EXPECT_DOUBLE_EQ(*rows[0].median_volume, 4000);
  EXPECT_EQ(rows[1].trends, 2u);
  EXPECT_DOUBLE_EQ(*rows[1].median_undeleted_tweets, 2);
  EXPECT_DOUBLE_EQ(*rows[1].median_volume, 200);  // #c has no volume
  EXPECT_THROW(volume_report(inst, std::vector<Verdict>(1), ep), Error);
  EXPECT_FALSE(median({}));
  EXPECT_DOUBLE_EQ(*median({4, 1, 3, 2}), 2.5);
}

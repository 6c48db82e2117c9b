#include <gtest/gtest.h>

#include <cmath>

#include "trendguard/core.hpp"

using namespace trendguard;

namespace {

// Chord length between unit vectors, then back to an arc.
double chord_oracle_km(double lat1, double lon1, double lat2, double lon2) {
  const double r = M_PI / 180.0;
  auto vec = [&](double lat, double lon) {
    return std::array<double, 3>{std::cos(lat * r) * std::cos(lon * r),
                                 std::cos(lat * r) * std::sin(lon * r), std::sin(lat * r)};
  };
  auto a = vec(lat1, lon1), b = vec(lat2, lon2);
  double c = 0;
  for (int i = 0; i < 3; ++i) c += (a[i] - b[i]) * (a[i] - b[i]);
  return 2 * 6371.0 * std::asin(std::min(1.0, std::sqrt(c) / 2));
}

}  // namespace

TEST(Haversine, IdenticalPointsAreZero) {
  GeoPoint p(41.01, 28.98);
  EXPECT_EQ(haversine_km(p, p), 0.0);
}

TEST(Haversine, HalfEquator) {
  EXPECT_NEAR(haversine_km(GeoPoint(0, 0), GeoPoint(0, 180)), 20015.1, 0.1);
  EXPECT_NEAR(haversine_km(GeoPoint(0, 0), GeoPoint(0, 180)), M_PI * 6371.0, 1e-9);
}

TEST(Haversine, IstanbulAnkara) {
  const double d = haversine_km(GeoPoint(41.01, 28.98), GeoPoint(39.93, 32.86));
  EXPECT_NEAR(d, 351, 5);
  EXPECT_NEAR(d, chord_oracle_km(41.01, 28.98, 39.93, 32.86), 1e-6);
}

TEST(Haversine, SymmetricAndMatchesOracle) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double la1 = rng.uniform01() * 180 - 90, lo1 = rng.uniform01() * 360 - 180;
    const double la2 = rng.uniform01() * 180 - 90, lo2 = rng.uniform01() * 360 - 180;
    GeoPoint a(la1, lo1), b(la2, lo2);
    EXPECT_EQ(haversine_km(a, b), haversine_km(b, a));
    EXPECT_EQ(haversine_km(a, a), 0.0);
    EXPECT_NEAR(haversine_km(a, b), chord_oracle_km(la1, lo1, la2, lo2), 1e-6);
  }
}

TEST(GeoPoint, BoundsEnforced) {
  EXPECT_THROW(GeoPoint(91, 0), Error);
  EXPECT_THROW(GeoPoint(0, -180.5), Error);
  EXPECT_NO_THROW(GeoPoint(-90, 180));
}

TEST(Keyword, HashtagAsciiFolding) {
  auto k = normalize_keyword("#TAG", Locale("tr"));
  EXPECT_EQ(k.normalized, "tag");
  EXPECT_EQ(k.kind, KeywordKind::Hashtag);
  EXPECT_EQ(k.raw, "#TAG");
  EXPECT_EQ(k.display(), "#tag");
}

TEST(Keyword, TurkishDottedCapital) {
  EXPECT_EQ(normalize_keyword("#İstanbul", Locale("tr")).normalized, "istanbul");
  EXPECT_EQ(normalize_keyword("IRMAK", Locale("tr")).normalized, "ırmak");
  EXPECT_EQ(normalize_keyword("IRMAK", Locale("en")).normalized, "irmak");
}

TEST(Keyword, Ngram) {
  auto k = normalize_keyword("YSK'dan CHP", Locale("tr"));
  EXPECT_EQ(k.normalized, "ysk'dan chp");
  EXPECT_EQ(k.kind, KeywordKind::Ngram);
  EXPECT_EQ(normalize_keyword("  a   b ", Locale()).normalized, "a b");
}

TEST(Keyword, EmptyThrows) {
  try {
    normalize_keyword("   ", Locale());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyKeyword);
  }
  EXPECT_THROW(normalize_keyword("#", Locale()), Error);
}

TEST(Keyword, Idempotent) {
  for (const char* raw : {"#TAG", "#İstanbul", "YSK'dan CHP", "ŞEKER  Bayramı", "#ÇĞÖÜ"}) {
    auto once = normalize_keyword(raw, Locale());
    auto twice = normalize_keyword(once.display(), Locale());
    EXPECT_EQ(once.normalized, twice.normalized) << raw;
    EXPECT_EQ(once.kind, twice.kind);
  }
}

TEST(Time, SubtractionIsWholeSeconds) {
  Timestamp a(100, 900), b(101, 100);
  EXPECT_EQ((b - a).seconds, 1);
  EXPECT_LT(a, b);
  EXPECT_EQ(Timestamp(5), Timestamp(5, 0));
  EXPECT_LT(Timestamp(5), Timestamp(5, 1));
}

TEST(Time, IsoRoundTrip) {
  auto t = parse_iso8601("2019-06-18T12:00:00Z");
  EXPECT_EQ(t.seconds(), 1560859200);
  EXPECT_EQ(format_iso8601(t), "2019-06-18T12:00:00Z");
  EXPECT_EQ(parse_iso8601("2019-06-18T15:00:00+03:00").seconds(), 1560859200);
  EXPECT_EQ(parse_iso8601("2019-06-18").seconds(), 1560816000);
  EXPECT_EQ(parse_iso8601("2019-06-18T12:00:00.250Z").subsecond_millis(), 250);
  EXPECT_THROW(parse_iso8601("2019-13-01T00:00:00Z"), Error);
  EXPECT_THROW(parse_iso8601("yesterday"), Error);
}

TEST(Time, TwitterLayout) {
  auto t = parse_twitter_time("Wed Oct 10 20:19:24 +0000 2018");
  EXPECT_EQ(format_iso8601(t), "2018-10-10T20:19:24Z");
  EXPECT_EQ(format_twitter_time(t), "Wed Oct 10 20:19:24 +0000 2018");
}

TEST(Time, LocalDays) {
  const UtcOffset tr;
  const Date d = Date::from_ymd(2019, 6, 18);
  EXPECT_EQ(d.iso(), "2019-06-18");
  EXPECT_EQ(Date::parse_iso("2019-06-18"), d);
  EXPECT_EQ(local_midnight(d, tr).seconds(), 1560816000 - 3 * 3600);
  EXPECT_EQ(local_date(Timestamp(1560816000 - 3 * 3600), tr), d);
  EXPECT_EQ(local_date(Timestamp(1560816000 - 3 * 3600 - 1), tr), d - 1);
  EXPECT_EQ(local_hour(Timestamp(1560859200), tr), 15);
  EXPECT_EQ(local_hour(Timestamp(1560859200), UtcOffset::hours(-5)), 7);
  EXPECT_THROW(Date::parse_iso("2019-02-30"), Error);
}

TEST(Rng, Deterministic) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform_int(-5, 5), b.uniform_int(-5, 5));
  Rng c(8);
  for (int i = 0; i < 1000; ++i) {
    const auto v = c.uniform_int(3, 9);
    EXPECT_GE(v, 3);
    EXPECT_LE(v, 9);
    const double u = c.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

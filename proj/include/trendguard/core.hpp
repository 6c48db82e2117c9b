#pragma once

// Shared value types: time, keywords, geo points, and the library error type.

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trendguard {

enum class Errc {
  EmptyKeyword,
  InvalidGeoPoint,
  Io,
  BadRank,
  BadTimestamp,
  BadDate,
  BadCsv,
  EmptyCorpus,
  NoCandidates,
  UnknownRule,
  BadFormula,
  BadParams,
  NeverTrended,
  NoPriorTweets,
  InsufficientPoints,
  InconsistentData,
  EmptyGraph,
  IncompleteAssignment,
  InvalidGraph,
  WordlistTooSmall,
  InfeasibleParams,
  BadConfig,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

struct Duration {
  std::int64_t seconds = 0;

  static constexpr Duration minutes(std::int64_t m) { return {m * 60}; }
  static constexpr Duration hours(std::int64_t h) { return {h * 3600}; }
  static constexpr Duration days(std::int64_t d) { return {d * 86400}; }

  constexpr auto operator<=>(const Duration&) const = default;
  constexpr Duration operator+(Duration o) const { return {seconds + o.seconds}; }
  constexpr Duration operator-(Duration o) const { return {seconds - o.seconds}; }
  constexpr Duration operator*(std::int64_t k) const { return {seconds * k}; }
};

// Instant in UTC. Ordering uses the millisecond part when present; a missing
// subsecond compares as zero. Subtraction works on whole seconds only.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  constexpr explicit Timestamp(std::int64_t seconds,
                               std::optional<std::int32_t> millis = std::nullopt)
      : seconds_(seconds), millis_(millis) {}

  static Timestamp from_millis(std::int64_t ms);

  constexpr std::int64_t seconds() const { return seconds_; }
  constexpr std::optional<std::int32_t> subsecond_millis() const { return millis_; }
  constexpr std::int64_t total_millis() const {
    return seconds_ * 1000 + millis_.value_or(0);
  }

  friend constexpr std::strong_ordering operator<=>(const Timestamp& a,
                                                    const Timestamp& b) {
    return a.total_millis() <=> b.total_millis();
  }
  friend constexpr bool operator==(const Timestamp& a, const Timestamp& b) {
    return a.total_millis() == b.total_millis();
  }

  constexpr Duration operator-(const Timestamp& o) const {
    return {seconds_ - o.seconds_};
  }
  constexpr Timestamp operator+(Duration d) const {
    return Timestamp(seconds_ + d.seconds, millis_);
  }
  constexpr Timestamp operator-(Duration d) const {
    return Timestamp(seconds_ - d.seconds, millis_);
  }

 private:
  std::int64_t seconds_ = 0;
  std::optional<std::int32_t> millis_;
};

// Civil calendar date, stored as days since 1970-01-01.
struct Date {
  std::int32_t days = 0;

  static Date from_ymd(int year, unsigned month, unsigned day);
  // Accepts YYYY-MM-DD; throws Errc::BadDate.
  static Date parse_iso(std::string_view text);
  std::string iso() const;

  constexpr auto operator<=>(const Date&) const = default;
  constexpr Date operator+(int n) const { return {days + n}; }
  constexpr Date operator-(int n) const { return {days - n}; }
};

// Fixed reporting offset from UTC. The default is Turkey time (UTC+3).
struct UtcOffset {
  std::int32_t seconds = 3 * 3600;

  static constexpr UtcOffset hours(int h) { return {h * 3600}; }
  constexpr auto operator<=>(const UtcOffset&) const = default;
};

Date local_date(Timestamp t, UtcOffset tz);
// UTC instant of local midnight at the start of `d`.
Timestamp local_midnight(Date d, UtcOffset tz);
int local_hour(Timestamp t, UtcOffset tz);

// ISO-8601: "2019-06-18T12:00:00Z", optional fraction, optional +hh:mm offset,
// or a bare date. Throws Errc::BadTimestamp.
Timestamp parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp t);

// Twitter's created_at layout: "Wed Oct 10 20:19:24 +0000 2018".
Timestamp parse_twitter_time(std::string_view text);
std::string format_twitter_time(Timestamp t);

class Locale {
 public:
  Locale() = default;
  explicit Locale(std::string id) : id_(std::move(id)) {}

  const std::string& id() const { return id_; }
  // Turkish and Azeri dotted/dotless i rules.
  bool turkic() const;

  bool operator==(const Locale&) const = default;

 private:
  std::string id_ = "tr";
};

enum class KeywordKind { Hashtag, Ngram };

struct Keyword {
  std::string raw;
  std::string normalized;
  KeywordKind kind = KeywordKind::Ngram;

  // "#" + normalized for hashtags, normalized otherwise.
  std::string display() const;

  bool operator==(const Keyword& o) const {
    return kind == o.kind && normalized == o.normalized;
  }
  auto operator<=>(const Keyword& o) const {
    if (auto c = kind <=> o.kind; c != 0) return c;
    return normalized <=> o.normalized;
  }
};

// Trims, case-folds with the locale, collapses inner whitespace and strips
// leading '#' characters (which make the keyword a hashtag).
// Throws Errc::EmptyKeyword when nothing is left.
Keyword normalize_keyword(std::string_view raw, const Locale& locale);

class GeoPoint {
 public:
  // Throws Errc::InvalidGeoPoint outside [-90,90] x [-180,180].
  GeoPoint(double lat, double lon);

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  bool operator==(const GeoPoint&) const = default;

 private:
  double lat_;
  double lon_;
};

inline constexpr double kEarthRadiusKm = 6371.0;

double haversine_km(const GeoPoint& a, const GeoPoint& b);

// Seeded generator with portable helpers; the standard distributions are
// implementation-defined so they are avoided where output must be stable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Uniform in [0, 1).
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trendguard

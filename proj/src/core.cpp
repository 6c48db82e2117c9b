#include "trendguard/core.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "trendguard/text.hpp"

namespace trendguard {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::EmptyKeyword: return "EmptyKeyword";
    case Errc::InvalidGeoPoint: return "InvalidGeoPoint";
    case Errc::Io: return "IoError";
    case Errc::BadRank: return "BadRank";
    case Errc::BadTimestamp: return "BadTimestamp";
    case Errc::BadDate: return "BadDate";
    case Errc::BadCsv: return "BadCsv";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::NoCandidates: return "NoCandidates";
    case Errc::UnknownRule: return "UnknownRule";
    case Errc::BadFormula: return "BadFormula";
    case Errc::BadParams: return "BadParams";
    case Errc::NeverTrended: return "NeverTrended";
    case Errc::NoPriorTweets: return "NoPriorTweets";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::InconsistentData: return "InconsistentData";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::IncompleteAssignment: return "IncompleteAssignment";
    case Errc::InvalidGraph: return "InvalidGraph";
    case Errc::WordlistTooSmall: return "WordlistTooSmall";
    case Errc::InfeasibleParams: return "InfeasibleParams";
    case Errc::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

namespace {

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Days since epoch for a proleptic Gregorian date (H. Hinnant's algorithm).
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t y;
  unsigned m;
  unsigned d;
};

constexpr Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

constexpr bool leap(std::int64_t y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

constexpr unsigned days_in_month(std::int64_t y, unsigned m) {
  constexpr std::array<unsigned, 12> dm{31, 28, 31, 30, 31, 30,
                                        31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : dm[m - 1];
}

bool parse_uint(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_date_part(std::string_view s, std::int64_t& y, unsigned& m,
                     unsigned& d) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  std::int64_t mm = 0;
  std::int64_t dd = 0;
  if (!parse_uint(s.substr(0, 4), y) || !parse_uint(s.substr(5, 2), mm) ||
      !parse_uint(s.substr(8, 2), dd))
    return false;
  if (mm < 1 || mm > 12) return false;
  if (dd < 1 || dd > days_in_month(y, static_cast<unsigned>(mm))) return false;
  m = static_cast<unsigned>(mm);
  d = static_cast<unsigned>(dd);
  return true;
}

constexpr std::array<std::string_view, 12> kMonths{
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
constexpr std::array<std::string_view, 7> kWeekdays{"Thu", "Fri", "Sat", "Sun",
                                                    "Mon", "Tue", "Wed"};

}  // namespace

Timestamp Timestamp::from_millis(std::int64_t ms) {
  const std::int64_t s = floor_div(ms, 1000);
  return Timestamp(s, static_cast<std::int32_t>(ms - s * 1000));
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
    throw Error(Errc::BadDate, "invalid calendar date");
  return {static_cast<std::int32_t>(days_from_civil(year, month, day))};
}

Date Date::parse_iso(std::string_view text) {
  std::int64_t y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (!parse_date_part(text, y, m, d))
    throw Error(Errc::BadDate, "bad date '" + std::string(text) + "'");
  return {static_cast<std::int32_t>(days_from_civil(y, m, d))};
}

std::string Date::iso() const {
  const Civil c = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u",
                static_cast<long long>(c.y), c.m, c.d);
  return buf;
}

Date local_date(Timestamp t, UtcOffset tz) {
  return {static_cast<std::int32_t>(floor_div(t.seconds() + tz.seconds, 86400))};
}

Timestamp local_midnight(Date d, UtcOffset tz) {
  return Timestamp(static_cast<std::int64_t>(d.days) * 86400 - tz.seconds);
}

int local_hour(Timestamp t, UtcOffset tz) {
  const std::int64_t s = t.seconds() + tz.seconds;
  return static_cast<int>((s - floor_div(s, 86400) * 86400) / 3600);
}

Timestamp parse_iso8601(std::string_view text) {
  auto fail = [&] {
    return Error(Errc::BadTimestamp, "bad timestamp '" + std::string(text) + "'");
  };
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r'))
    text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  std::int64_t y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  if (text.size() < 10 || !parse_date_part(text.substr(0, 10), y, mo, d))
    throw fail();
  std::int64_t secs = days_from_civil(y, mo, d) * 86400;
  if (text.size() == 10) return Timestamp(secs);
  if (text[10] != 'T' && text[10] != ' ') throw fail();
  std::string_view rest = text.substr(11);
  if (rest.size() < 8 || rest[2] != ':' || rest[5] != ':') throw fail();
  std::int64_t hh = 0;
  std::int64_t mi = 0;
  std::int64_t ss = 0;
  if (!parse_uint(rest.substr(0, 2), hh) || !parse_uint(rest.substr(3, 2), mi) ||
      !parse_uint(rest.substr(6, 2), ss) || hh > 23 || mi > 59 || ss > 60)
    throw fail();
  secs += hh * 3600 + mi * 60 + ss;
  rest.remove_prefix(8);
  std::optional<std::int32_t> millis;
  if (!rest.empty() && rest.front() == '.') {
    std::size_t n = 1;
    while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') ++n;
    if (n == 1) throw fail();
    std::string digits(rest.substr(1, n - 1));
    digits.resize(3, '0');
    millis = std::stoi(digits);
    rest.remove_prefix(n);
  }
  if (rest == "Z" || rest.empty()) return Timestamp(secs, millis);
  if ((rest.front() == '+' || rest.front() == '-') && rest.size() == 6 &&
      rest[3] == ':') {
    std::int64_t oh = 0;
    std::int64_t om = 0;
    if (!parse_uint(rest.substr(1, 2), oh) || !parse_uint(rest.substr(4, 2), om))
      throw fail();
    const std::int64_t off = oh * 3600 + om * 60;
    secs -= rest.front() == '+' ? off : -off;
    return Timestamp(secs, millis);
  }
  throw fail();
}

std::string format_iso8601(Timestamp t) {
  const std::int64_t day = floor_div(t.seconds(), 86400);
  const std::int64_t sod = t.seconds() - day * 86400;
  const Civil c = civil_from_days(day);
  char buf[64];
  if (t.subsecond_millis()) {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%03dZ",
                  static_cast<long long>(c.y), c.m, c.d,
                  static_cast<long long>(sod / 3600),
                  static_cast<long long>(sod / 60 % 60),
                  static_cast<long long>(sod % 60), *t.subsecond_millis());
  } else {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(c.y), c.m, c.d,
                  static_cast<long long>(sod / 3600),
                  static_cast<long long>(sod / 60 % 60),
                  static_cast<long long>(sod % 60));
  }
  return buf;
}

Timestamp parse_twitter_time(std::string_view text) {
  // "Wed Oct 10 20:19:24 +0000 2018"
  auto fail = [&] {
    return Error(Errc::BadTimestamp,
                 "bad created_at '" + std::string(text) + "'");
  };
  if (text.size() != 30 || text[3] != ' ' || text[7] != ' ' || text[10] != ' ' ||
      text[19] != ' ' || text[25] != ' ')
    throw fail();
  unsigned mo = 0;
  for (unsigned i = 0; i < 12; ++i)
    if (text.substr(4, 3) == kMonths[i]) mo = i + 1;
  std::int64_t d = 0;
  std::int64_t hh = 0;
  std::int64_t mi = 0;
  std::int64_t ss = 0;
  std::int64_t y = 0;
  std::int64_t oh = 0;
  std::int64_t om = 0;
  if (mo == 0 || !parse_uint(text.substr(8, 2), d) ||
      !parse_uint(text.substr(11, 2), hh) || !parse_uint(text.substr(14, 2), mi) ||
      !parse_uint(text.substr(17, 2), ss) || !parse_uint(text.substr(26, 4), y) ||
      (text[20] != '+' && text[20] != '-') || !parse_uint(text.substr(21, 2), oh) ||
      !parse_uint(text.substr(23, 2), om))
    throw fail();
  if (d < 1 || d > days_in_month(y, mo) || hh > 23 || mi > 59 || ss > 60)
    throw fail();
  std::int64_t secs = days_from_civil(y, mo, static_cast<unsigned>(d)) * 86400 +
                      hh * 3600 + mi * 60 + ss;
  const std::int64_t off = oh * 3600 + om * 60;
  secs -= text[20] == '+' ? off : -off;
  return Timestamp(secs);
}

std::string format_twitter_time(Timestamp t) {
  const std::int64_t day = floor_div(t.seconds(), 86400);
  const std::int64_t sod = t.seconds() - day * 86400;
  const Civil c = civil_from_days(day);
  const auto wd = static_cast<std::size_t>(((day % 7) + 7) % 7);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s %s %02u %02lld:%02lld:%02lld +0000 %04lld",
                kWeekdays[wd].data(), kMonths[c.m - 1].data(), c.d,
                static_cast<long long>(sod / 3600),
                static_cast<long long>(sod / 60 % 60),
                static_cast<long long>(sod % 60), static_cast<long long>(c.y));
  return buf;
}

bool Locale::turkic() const {
  return id_ == "tr" || id_ == "az" || id_.rfind("tr_", 0) == 0 ||
         id_.rfind("tr-", 0) == 0 || id_.rfind("az_", 0) == 0 ||
         id_.rfind("az-", 0) == 0;
}

std::string Keyword::display() const {
  return kind == KeywordKind::Hashtag ? "#" + normalized : normalized;
}

Keyword normalize_keyword(std::string_view raw, const Locale& locale) {
  std::u32string cps = text::trim(text::decode_utf8(raw));
  KeywordKind kind = KeywordKind::Ngram;
  std::size_t hashes = 0;
  while (hashes < cps.size() && (cps[hashes] == U'#' || cps[hashes] == U'＃'))
    ++hashes;
  if (hashes > 0) kind = KeywordKind::Hashtag;
  std::u32string body = text::collapse_spaces(
      text::fold(std::u32string_view(cps).substr(hashes), locale));
  if (body.empty())
    throw Error(Errc::EmptyKeyword, "keyword is empty after trimming");
  return Keyword{std::string(raw), text::encode_utf8(body), kind};
}

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
  if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0))
    throw Error(Errc::InvalidGeoPoint, "coordinates out of range");
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kRad = 3.14159265358979323846 / 180.0;
  const double p1 = a.lat() * kRad;
  const double p2 = b.lat() * kRad;
  const double dphi = (b.lat() - a.lat()) * kRad;
  const double dlambda = (b.lon() - a.lon()) * kRad;
  const double s1 = std::sin(dphi / 2);
  const double s2 = std::sin(dlambda / 2);
  // Symmetric in (a, b): both terms are even functions of the differences.
  double h = s1 * s1 + std::cos(p1) * std::cos(p2) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r = next();
  while (r >= limit) r = next();
  return lo + static_cast<std::int64_t>(r % span);
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace trendguard

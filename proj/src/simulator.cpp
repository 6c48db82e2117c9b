#include "trendguard/simulator.hpp"

#include <algorithm>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "trendguard/csv.hpp"
#include "trendguard/pipeline.hpp"
#include "trendguard/text.hpp"

namespace trendguard {

namespace {

constexpr std::uint64_t kFirstTweetId = 1141000000000000000ULL;
constexpr std::uint64_t kOrganicUserBase = 1000000000ULL;
constexpr std::uint64_t kBackgroundUserBase = 3000000000ULL;
constexpr std::uint64_t kBackgroundUsers = 1000000ULL;
constexpr std::uint64_t kBotUserBase = 5000000000ULL;

[[noreturn]] void bad_config(const std::string& why) {
  throw Error(Errc::BadConfig, why);
}

}  // namespace

void ScenarioConfig::validate() const {
  auto rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) bad_config(std::string(name) + " must be in [0,1]");
  };
  auto range = [](int lo, int hi, const char* name) {
    if (lo < 0 || hi < lo) bad_config(std::string(name) + " range is invalid");
  };
  if (n_days < 1) bad_config("n_days must be positive");
  if (organic_per_day < 0 || attacks_per_day < 0 || failed_attacks_per_day < 0)
    bad_config("per-day counts must be non-negative");
  if (kappa < 1) bad_config("kappa must be at least 1");
  range(bots_min, bots_max, "bots");
  range(failed_bots_min, failed_bots_max, "failed_bots");
  range(waves_min, waves_max, "waves");
  if (waves_min < 1) bad_config("waves_min must be at least 1");
  range(adopters_min, adopters_max, "adopters");
  range(organic_users_min, organic_users_max, "organic_users");
  if (bots_max > botnet_size || failed_bots_max > botnet_size)
    bad_config("botnet_size is smaller than the largest attack");
  if (botnets < 1) bad_config("botnets must be at least 1");
  if (interest_groups < 1 || interest_group_size < 1)
    bad_config("interest groups must be non-empty");
  if (wave_gap_min.seconds < 0 || wave_gap_max < wave_gap_min)
    bad_config("wave_gap range is invalid");
  if (organic_span_min.seconds < 1 || organic_span_max < organic_span_min)
    bad_config("organic_span range is invalid");
  if (attack_hour_min < 0 || attack_hour_max > 24 || attack_hour_max <= attack_hour_min)
    bad_config("attack hours are invalid");
  if (organic_hour_min < 0 || organic_hour_max > 24 ||
      organic_hour_max <= organic_hour_min)
    bad_config("organic hours are invalid");
  if (background_per_day < 0 || chatter_tags < 0 || chatter_per_hour < 0)
    bad_config("background volumes must be non-negative");
  rate(missed_deletion_rate, "missed_deletion_rate");
  rate(in_group_share, "in_group_share");
  rate(background_deletion_rate, "background_deletion_rate");
  rate(background_lexicon_rate, "background_lexicon_rate");
  rate(organic_lexicon_rate, "organic_lexicon_rate");
  rate(retweet_rate, "retweet_rate");
  rate(mention_rate, "mention_rate");
  rate(url_rate, "url_rate");
  rate(reply_rate, "reply_rate");
  rate(extra_hashtag_rate, "extra_hashtag_rate");
  rate(geo_rate, "geo_rate");
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) bad_config("sample_rate must be in (0,1]");
  if (oracle_window.seconds < 1 || oracle_latency.seconds < 0 ||
      epoch_interval.seconds < 1)
    bad_config("oracle timing is invalid");
  if (top_k < 1 || top_k > static_cast<int>(kMaxTrendListSize))
    bad_config("top_k must be in [1,50]");
  if (penalty < 0) bad_config("penalty must be non-negative");
}

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    bad_config("bad value '" + std::string(v) + "' for " + std::string(key));
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_config("bad boolean '" + std::string(v) + "' for " + std::string(key));
}

std::string_view trim_ascii(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

void set_scenario_value(ScenarioConfig& c, std::string_view key, std::string_view v) {
  auto i = [&](int& field) { field = parse_number<int>(key, v); };
  auto d = [&](double& field) { field = parse_number<double>(key, v); };
  auto s = [&](Duration& field) { field.seconds = parse_number<std::int64_t>(key, v); };

  if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "start_date") {
    try {
      c.start_date = Date::parse_iso(v);
    } catch (const Error& e) {
      bad_config(e.what());
    }
  } else if (key == "tz") c.tz = UtcOffset::hours(parse_number<int>(key, v));
  else if (key == "n_days") i(c.n_days);
  else if (key == "organic_per_day") i(c.organic_per_day);
  else if (key == "attacks_per_day") i(c.attacks_per_day);
  else if (key == "failed_attacks_per_day") i(c.failed_attacks_per_day);
  else if (key == "alpha_p") s(c.alpha_p);
  else if (key == "alpha_d") s(c.alpha_d);
  else if (key == "theta") s(c.theta);
  else if (key == "kappa") c.kappa = parse_number<std::size_t>(key, v);
  else if (key == "bots_min") i(c.bots_min);
  else if (key == "bots_max") i(c.bots_max);
  else if (key == "failed_bots_min") i(c.failed_bots_min);
  else if (key == "failed_bots_max") i(c.failed_bots_max);
  else if (key == "waves_min") i(c.waves_min);
  else if (key == "waves_max") i(c.waves_max);
  else if (key == "wave_gap_min") s(c.wave_gap_min);
  else if (key == "wave_gap_max") s(c.wave_gap_max);
  else if (key == "attack_hour_min") i(c.attack_hour_min);
  else if (key == "attack_hour_max") i(c.attack_hour_max);
  else if (key == "missed_deletion_rate") d(c.missed_deletion_rate);
  else if (key == "botnets") i(c.botnets);
  else if (key == "botnet_size") i(c.botnet_size);
  else if (key == "adopters_min") i(c.adopters_min);
  else if (key == "adopters_max") i(c.adopters_max);
  else if (key == "organic_users_min") i(c.organic_users_min);
  else if (key == "organic_users_max") i(c.organic_users_max);
  else if (key == "organic_span_min") s(c.organic_span_min);
  else if (key == "organic_span_max") s(c.organic_span_max);
  else if (key == "organic_hour_min") i(c.organic_hour_min);
  else if (key == "organic_hour_max") i(c.organic_hour_max);
  else if (key == "interest_groups") i(c.interest_groups);
  else if (key == "interest_group_size") i(c.interest_group_size);
  else if (key == "in_group_share") d(c.in_group_share);
  else if (key == "background_per_day") i(c.background_per_day);
  else if (key == "chatter_tags") i(c.chatter_tags);
  else if (key == "chatter_per_hour") i(c.chatter_per_hour);
  else if (key == "background_deletion_rate") d(c.background_deletion_rate);
  else if (key == "background_lexicon_rate") d(c.background_lexicon_rate);
  else if (key == "organic_lexicon_rate") d(c.organic_lexicon_rate);
  else if (key == "retweet_rate") d(c.retweet_rate);
  else if (key == "mention_rate") d(c.mention_rate);
  else if (key == "url_rate") d(c.url_rate);
  else if (key == "reply_rate") d(c.reply_rate);
  else if (key == "extra_hashtag_rate") d(c.extra_hashtag_rate);
  else if (key == "geo_rate") d(c.geo_rate);
  else if (key == "sample_rate") d(c.sample_rate);
  else if (key == "oracle_window") s(c.oracle_window);
  else if (key == "oracle_latency") s(c.oracle_latency);
  else if (key == "epoch_interval") s(c.epoch_interval);
  else if (key == "top_k") i(c.top_k);
  else if (key == "penalty") d(c.penalty);
  else if (key == "mitigation") c.mitigation = parse_bool(key, v);
  else bad_config("unknown scenario key '" + std::string(key) + "'");
}

ScenarioConfig load_scenario(std::istream& in) {
  ScenarioConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find_first_of("#;"); hash != std::string_view::npos)
      s = s.substr(0, hash);
    s = trim_ascii(s);
    if (s.empty() || s.front() == '[') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      bad_config("line " + std::to_string(lineno) + ": expected key = value");
    std::string_view key = trim_ascii(s.substr(0, eq));
    std::string_view value = trim_ascii(s.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    set_scenario_value(c, key, value);
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string());
  return load_scenario(f);
}

void write_scenario(std::ostream& out, const ScenarioConfig& c) {
  auto kv = [&](const char* k, const auto& v) { out << k << " = " << v << '\n'; };
  auto real = [&](const char* k, double v) { out << k << " = " << format_real(v) << '\n'; };
  kv("seed", c.seed);
  kv("start_date", c.start_date.iso());
  kv("tz", c.tz.seconds / 3600);
  kv("n_days", c.n_days);
  kv("organic_per_day", c.organic_per_day);
  kv("attacks_per_day", c.attacks_per_day);
  kv("failed_attacks_per_day", c.failed_attacks_per_day);
  kv("alpha_p", c.alpha_p.seconds);
  kv("alpha_d", c.alpha_d.seconds);
  kv("theta", c.theta.seconds);
  kv("kappa", c.kappa);
  kv("bots_min", c.bots_min);
  kv("bots_max", c.bots_max);
  kv("failed_bots_min", c.failed_bots_min);
  kv("failed_bots_max", c.failed_bots_max);
  kv("waves_min", c.waves_min);
  kv("waves_max", c.waves_max);
  kv("wave_gap_min", c.wave_gap_min.seconds);
  kv("wave_gap_max", c.wave_gap_max.seconds);
  kv("attack_hour_min", c.attack_hour_min);
  kv("attack_hour_max", c.attack_hour_max);
  real("missed_deletion_rate", c.missed_deletion_rate);
  kv("botnets", c.botnets);
  kv("botnet_size", c.botnet_size);
  kv("adopters_min", c.adopters_min);
  kv("adopters_max", c.adopters_max);
  kv("organic_users_min", c.organic_users_min);
  kv("organic_users_max", c.organic_users_max);
  kv("organic_span_min", c.organic_span_min.seconds);
  kv("organic_span_max", c.organic_span_max.seconds);
  kv("organic_hour_min", c.organic_hour_min);
  kv("organic_hour_max", c.organic_hour_max);
  kv("interest_groups", c.interest_groups);
  kv("interest_group_size", c.interest_group_size);
  real("in_group_share", c.in_group_share);
  kv("background_per_day", c.background_per_day);
  kv("chatter_tags", c.chatter_tags);
  kv("chatter_per_hour", c.chatter_per_hour);
  real("background_deletion_rate", c.background_deletion_rate);
  real("background_lexicon_rate", c.background_lexicon_rate);
  real("organic_lexicon_rate", c.organic_lexicon_rate);
  real("retweet_rate", c.retweet_rate);
  real("mention_rate", c.mention_rate);
  real("url_rate", c.url_rate);
  real("reply_rate", c.reply_rate);
  real("extra_hashtag_rate", c.extra_hashtag_rate);
  real("geo_rate", c.geo_rate);
  real("sample_rate", c.sample_rate);
  kv("oracle_window", c.oracle_window.seconds);
  kv("oracle_latency", c.oracle_latency.seconds);
  kv("epoch_interval", c.epoch_interval.seconds);
  kv("top_k", c.top_k);
  real("penalty", c.penalty);
  kv("mitigation", c.mitigation ? "true" : "false");
}

std::string gen_lexicon_text(std::span<const std::string> wordlist, Rng& rng) {
  if (wordlist.size() < 10)
    throw Error(Errc::WordlistTooSmall, "need at least 10 words");
  const auto n = rng.uniform_int(2, 9);
  std::string out;
  for (std::int64_t i = 0; i < n; ++i) {
    if (i) out.push_back(' ');
    out += wordlist[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(wordlist.size()) - 1))];
  }
  return out;
}

namespace {

const std::string& pick(std::span<const std::string> words, Rng& rng) {
  return words[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(words.size()) - 1))];
}

std::vector<std::string> ascii_words(std::span<const std::string> words) {
  std::vector<std::string> out;
  for (const auto& w : words)
    if (!w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
          return c >= 'a' && c <= 'z';
        }))
      out.push_back(w);
  return out;
}

std::string capitalize(std::string w) {
  if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
  return w;
}

Timestamp at(std::int64_t seconds, Rng& rng) {
  return Timestamp(seconds, static_cast<std::int32_t>(rng.uniform_int(0, 999)));
}

// Deletion no earlier than the creation, within the given second.
Timestamp deletion_at(std::int64_t seconds, const Timestamp& created, Rng& rng) {
  const std::int32_t lo =
      seconds == created.seconds() ? created.subsecond_millis().value_or(0) : 0;
  return Timestamp(seconds, static_cast<std::int32_t>(rng.uniform_int(lo, 999)));
}

void insert_token(std::string& text, const std::string& token, Rng& rng) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto sp = text.find(' ', pos);
    parts.push_back(text.substr(pos, sp == std::string::npos ? std::string::npos : sp - pos));
    if (sp == std::string::npos) break;
    pos = sp + 1;
  }
  const auto where = static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(parts.size())));
  parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(where), token);
  text.clear();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) text.push_back(' ');
    text += parts[i];
  }
}

// Ordinary prose: capitalised, punctuated, never lexicon-shaped.
std::string prose(std::span<const std::string> words,
                  std::span<const std::string> ascii, Rng& rng) {
  static const char* const stops[] = {".", "!", "?", "...", " :)"};
  std::string out = capitalize(pick(ascii, rng));
  const auto n = rng.uniform_int(2, 11);
  for (std::int64_t i = 0; i < n; ++i) {
    out.push_back(' ');
    out += pick(words, rng);
  }
  out += stops[rng.uniform_int(0, 4)];
  return out;
}

struct TextContext {
  std::span<const std::string> words;
  std::vector<std::string> ascii;
};

// Fills text and engagement for a non-attack tweet. `hashtag` may be empty.
void dress(Tweet& t, const std::string& hashtag, bool lexicon, const OrganicShape& shape,
           const TextContext& ctx, Rng& rng) {
  t.text = lexicon ? gen_lexicon_text(ctx.words, rng) : prose(ctx.words, ctx.ascii, rng);
  if (!hashtag.empty()) {
    insert_token(t.text, hashtag, rng);
    t.hashtags.push_back(hashtag.substr(1));
  }
  if (rng.bernoulli(shape.extra_hashtag_rate)) {
    const std::string extra = "#" + capitalize(pick(ctx.ascii, rng));
    t.text += " " + extra;
    t.hashtags.push_back(extra.substr(1));
  }
  if (rng.bernoulli(shape.mention_rate)) {
    const auto who = static_cast<std::uint64_t>(rng.uniform_int(1, 999999));
    t.text += " @u" + std::to_string(who);
    t.mentions.push_back(kBackgroundUserBase + who);
  }
  if (rng.bernoulli(shape.url_rate)) {
    t.text += " https://t.co/" + std::to_string(rng.uniform_int(100000, 999999));
    t.urls = 1;
  }
  if (rng.bernoulli(shape.reply_rate)) {
    t.is_reply = true;
    t.text = "@u" + std::to_string(rng.uniform_int(1, 999999)) + " " + t.text;
  }
  if (rng.bernoulli(shape.retweet_rate)) {
    t.is_retweet = true;
    t.text = "RT @u" + std::to_string(rng.uniform_int(1, 999999)) + ": " + t.text;
  }
  if (rng.bernoulli(shape.geo_rate)) {
    const double lat = 36.0 + rng.uniform01() * 6.0;
    const double lon = 26.0 + rng.uniform01() * 18.0;
    t.geo = GeoPoint(lat, lon);
  }
  static const char* const apps[] = {"Twitter for Android", "Twitter for iPhone",
                                     "Twitter Web App"};
  t.source_app = apps[rng.uniform_int(0, 2)];
  t.lang = "tr";
}

}  // namespace

std::vector<Post> gen_attack(const Keyword& keyword, const AttackShape& shape,
                             std::span<const std::uint64_t> bots, Timestamp t0, Rng& rng,
                             std::span<const std::string> wordlist) {
  if (bots.empty()) throw Error(Errc::InfeasibleParams, "an attack needs a bot");
  if (shape.alpha_p.seconds < 1 || shape.alpha_d.seconds < 1 || shape.theta.seconds < 1)
    throw Error(Errc::InfeasibleParams, "attack windows must be at least one second");
  const std::int64_t lo = std::max<std::int64_t>(0, shape.alpha_p.seconds - shape.alpha_d.seconds);
  const std::int64_t hi = shape.theta.seconds - 1;
  if (lo > hi)
    throw Error(Errc::InfeasibleParams,
                "theta is too short to delete every tweet inside one deletion window");

  const std::string tag = "#" + (keyword.raw.empty() ? keyword.normalized
                                                     : keyword.raw.substr(
                                                           keyword.raw.find_first_not_of("#")));
  const std::int64_t base = t0.seconds();
  const std::int64_t d0 = base + rng.uniform_int(lo, hi);
  std::vector<Post> posts;
  posts.reserve(bots.size());
  for (auto bot : bots) {
    Post p;
    p.tweet.user_id = bot;
    p.tweet.created_at = at(base + rng.uniform_int(0, shape.alpha_p.seconds - 1), rng);
    p.tweet.text = gen_lexicon_text(wordlist, rng);
    insert_token(p.tweet.text, tag, rng);
    p.tweet.hashtags.push_back(tag.substr(1));
    p.tweet.lang = "tr";
    p.tweet.source_app = "Twitter for Android";
    const std::int64_t c = p.tweet.created_at.seconds();
    const std::int64_t d_lo = std::max(d0, c);
    const std::int64_t d_hi = std::min(d0 + shape.alpha_d.seconds - 1, c + shape.theta.seconds - 1);
    const std::int64_t d = rng.uniform_int(d_lo, d_hi);
    const Timestamp del = deletion_at(d, p.tweet.created_at, rng);
    if (!rng.bernoulli(shape.missed_deletion_rate)) p.deleted_at = del;
    posts.push_back(std::move(p));
  }

  // The deleted part must be a valid attack on its own.
  std::optional<Timestamp> p_lo, p_hi, dl_lo, dl_hi;
  for (const auto& p : posts) {
    if (!p.deleted_at) continue;
    const auto& c = p.tweet.created_at;
    if (*p.deleted_at < c || !(*p.deleted_at - c < shape.theta))
      throw std::logic_error("generated lifetime out of range");
    if (!p_lo || c < *p_lo) p_lo = c;
    if (!p_hi || *p_hi < c) p_hi = c;
    if (!dl_lo || *p.deleted_at < *dl_lo) dl_lo = *p.deleted_at;
    if (!dl_hi || *dl_hi < *p.deleted_at) dl_hi = *p.deleted_at;
  }
  if (p_lo && (!(*p_hi - *p_lo < shape.alpha_p) || !(*dl_hi - *dl_lo < shape.alpha_d)))
    throw std::logic_error("generated attack windows out of range");
  return posts;
}

std::vector<Post> gen_organic_trend(const Keyword& keyword,
                                    std::span<const std::uint64_t> users,
                                    Timestamp start, Duration span,
                                    const OrganicShape& shape, Rng& rng,
                                    std::span<const std::string> wordlist) {
  if (span.seconds <= 0) throw Error(Errc::BadParams, "span must be positive");
  TextContext ctx{wordlist, ascii_words(wordlist)};
  if (ctx.ascii.empty()) throw Error(Errc::WordlistTooSmall, "no ASCII words");
  const std::string tag =
      keyword.kind == KeywordKind::Hashtag
          ? "#" + (keyword.raw.empty() ? keyword.normalized
                                       : keyword.raw.substr(keyword.raw.find_first_not_of("#")))
          : std::string();
  std::vector<Post> posts;
  posts.reserve(users.size());
  for (auto u : users) {
    Post p;
    p.tweet.user_id = u;
    p.tweet.created_at = at(start.seconds() + rng.uniform_int(0, span.seconds - 1), rng);
    dress(p.tweet, tag, rng.bernoulli(shape.lexicon_rate), shape, ctx, rng);
    if (tag.empty()) p.tweet.text += " " + keyword.raw;
    if (rng.bernoulli(shape.deletion_rate)) {
      const std::int64_t d = p.tweet.created_at.seconds() + rng.uniform_int(60, 3 * 86400);
      p.deleted_at = deletion_at(d, p.tweet.created_at, rng);
    }
    posts.push_back(std::move(p));
  }
  return posts;
}

std::vector<TweetEvent> assign_ids(std::vector<Post> posts, std::uint64_t first_id) {
  std::stable_sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
    return std::tie(a.tweet.created_at, a.tweet.user_id, a.tweet.text) <
           std::tie(b.tweet.created_at, b.tweet.user_id, b.tweet.text);
  });
  struct Keyed {
    Timestamp time;
    int kind;
    std::uint64_t id;
    TweetEvent event;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(posts.size() * 2);
  for (std::size_t i = 0; i < posts.size(); ++i) {
    Post& p = posts[i];
    p.tweet.id = first_id + i;
    const Timestamp created = p.tweet.created_at;
    if (p.deleted_at)
      keyed.push_back({*p.deleted_at, 1, p.tweet.id,
                       Deletion{p.tweet.id, p.tweet.user_id, *p.deleted_at}});
    const std::uint64_t id = p.tweet.id;
    keyed.push_back({created, 0, id, std::move(p.tweet)});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.time, a.kind, a.id) < std::tie(b.time, b.kind, b.id);
  });
  std::vector<TweetEvent> events;
  events.reserve(keyed.size());
  for (auto& k : keyed) events.push_back(std::move(k.event));
  return events;
}

std::vector<TweetEvent> sample_stream(std::span<const TweetEvent> events, double rate,
                                      Rng& rng) {
  if (!(rate > 0.0 && rate <= 1.0))
    throw Error(Errc::BadParams, "sample rate must be in (0,1]");
  if (rate >= 1.0) return {events.begin(), events.end()};
  std::unordered_map<std::uint64_t, bool> kept;
  std::vector<TweetEvent> out;
  for (const auto& e : events) {
    if (const auto* t = std::get_if<Tweet>(&e)) {
      const bool keep = rng.bernoulli(rate);
      kept[t->id] = keep;
      if (keep) out.push_back(e);
    } else {
      auto it = kept.find(std::get<Deletion>(e).tweet_id);
      if (it != kept.end() && it->second) out.push_back(e);
    }
  }
  return out;
}

std::vector<TrendEpoch> trend_oracle(std::span<const TweetEvent> events,
                                     const OracleConfig& config) {
  if (config.interval.seconds < 1 || config.window.seconds < 1 || config.top_k < 1)
    throw Error(Errc::BadParams, "bad oracle configuration");
  struct Use {
    Timestamp created;
    std::uint64_t user;
    std::uint64_t id;
  };
  std::unordered_map<std::uint64_t, Timestamp> deleted;
  for (const auto& e : events)
    if (const auto* d = std::get_if<Deletion>(&e)) {
      auto [it, inserted] = deleted.try_emplace(d->tweet_id, d->time);
      if (!inserted && d->time < it->second) it->second = d->time;
    }

  std::map<std::u32string, std::vector<Use>> uses;
  std::map<std::u32string, std::string> raw;
  for (const auto& e : events) {
    const auto* t = std::get_if<Tweet>(&e);
    if (!t) continue;
    auto tokens = text::hashtag_tokens(text::decode_utf8(t->text));
    std::vector<std::u32string> seen;
    for (const auto& tok : tokens) {
      std::u32string key = text::fold(tok, config.locale);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      raw.try_emplace(key, "#" + text::encode_utf8(tok));
      uses[key].push_back({t->created_at, t->user_id, t->id});
    }
  }

  const std::int64_t first = config.first_epoch.seconds();
  const std::int64_t step = config.interval.seconds;
  const std::int64_t n_epochs =
      config.last_epoch < config.first_epoch
          ? 0
          : (config.last_epoch.seconds() - first) / step + 1;
  struct Score {
    double score;
    std::int64_t volume;
    const std::u32string* key;
  };
  std::vector<std::vector<Score>> per_epoch(static_cast<std::size_t>(n_epochs));

  for (auto& [key, list] : uses) {
    std::sort(list.begin(), list.end(), [](const Use& a, const Use& b) {
      return std::tie(a.created, a.id) < std::tie(b.created, b.id);
    });
    // Epoch E counts creations in (E - latency - window, E - latency].
    const std::int64_t lag = config.latency.seconds;
    const std::int64_t w = config.window.seconds;
    auto epoch_index_at_or_after = [&](std::int64_t t) {
      if (t <= first) return std::int64_t{0};
      return (t - first + step - 1) / step;
    };
    const std::int64_t e_begin = epoch_index_at_or_after(list.front().created.seconds() + lag);
    const std::int64_t e_end = std::min(
        n_epochs, epoch_index_at_or_after(list.back().created.seconds() + lag + w) + 1);
    std::size_t lo = 0, hi = 0;
    std::unordered_map<std::uint64_t, std::uint32_t> users;
    for (std::int64_t ei = e_begin; ei < e_end; ++ei) {
      const std::int64_t e = first + ei * step;
      const Timestamp upper(e - lag, 999);
      while (hi < list.size() && !(upper < list[hi].created)) ++users[list[hi++].user];
      const Timestamp lower(e - lag - w, 999);
      while (lo < hi && !(lower < list[lo].created)) {
        auto it = users.find(list[lo++].user);
        if (--it->second == 0) users.erase(it);
      }
      if (lo == hi) continue;
      double score = static_cast<double>(users.size());
      if (config.mitigation) {
        const Timestamp now(e, 999);
        std::int64_t gone = 0;
        for (std::size_t k = lo; k < hi; ++k) {
          auto it = deleted.find(list[k].id);
          if (it != deleted.end() && !(now < it->second)) ++gone;
        }
        score -= config.penalty * static_cast<double>(gone);
      }
      if (score > 0)
        per_epoch[static_cast<std::size_t>(ei)].push_back(
            {score, static_cast<std::int64_t>(hi - lo), &key});
    }
  }

  std::vector<TrendEpoch> epochs;
  for (std::int64_t ei = 0; ei < n_epochs; ++ei) {
    auto& scores = per_epoch[static_cast<std::size_t>(ei)];
    if (scores.empty()) continue;
    std::sort(scores.begin(), scores.end(), [](const Score& a, const Score& b) {
      if (a.score != b.score) return a.score > b.score;
      return *a.key < *b.key;
    });
    TrendEpoch epoch;
    epoch.captured_at = Timestamp(first + ei * step);
    epoch.location = config.location;
    const std::size_t n = std::min<std::size_t>(scores.size(),
                                                static_cast<std::size_t>(config.top_k));
    for (std::size_t r = 0; r < n; ++r) {
      TrendEntry entry;
      entry.rank = static_cast<int>(r + 1);
      entry.keyword = normalize_keyword(raw.at(*scores[r].key), config.locale);
      entry.volume = scores[r].volume;
      epoch.entries.push_back(std::move(entry));
    }
    epochs.push_back(std::move(epoch));
  }
  return epochs;
}

std::set<Keyword> entered_keywords(std::span<const TrendEpoch> epochs) {
  std::set<Keyword> out;
  for (const auto& e : epochs)
    for (const auto& entry : e.entries) out.insert(entry.keyword);
  return out;
}

namespace {

class Generator {
 public:
  explicit Generator(const ScenarioConfig& c)
      : c_(c), rng_(c.seed), ctx_{default_wordlist(), ascii_words(default_wordlist())} {
    shape_.retweet_rate = c.retweet_rate;
    shape_.mention_rate = c.mention_rate;
    shape_.url_rate = c.url_rate;
    shape_.reply_rate = c.reply_rate;
    shape_.extra_hashtag_rate = c.extra_hashtag_rate;
    shape_.deletion_rate = c.background_deletion_rate;
    shape_.lexicon_rate = c.organic_lexicon_rate;
    shape_.geo_rate = c.geo_rate;
    attack_.alpha_p = c.alpha_p;
    attack_.alpha_d = c.alpha_d;
    attack_.theta = c.theta;
    attack_.missed_deletion_rate = c.missed_deletion_rate;
  }

  FullScenario run() {
    FullScenario out;
    std::vector<Keyword> chatter;
    for (int i = 0; i < c_.chatter_tags; ++i) chatter.push_back(new_hashtag(1));

    for (int day = 0; day < c_.n_days; ++day) {
      const Date date = c_.start_date + day;
      const std::int64_t midnight = local_midnight(date, c_.tz).seconds();
      for (int i = 0; i < c_.organic_per_day; ++i) organic(date, midnight, out);
      for (int i = 0; i < c_.attacks_per_day; ++i) attack(date, midnight, false, out);
      for (int i = 0; i < c_.failed_attacks_per_day; ++i) attack(date, midnight, true, out);
      for (const auto& kw : chatter) chatter_day(kw, midnight);
      background_day(midnight);
    }
    std::sort(out.truth.begin(), out.truth.end(), [](const TruthRow& a, const TruthRow& b) {
      return std::tie(a.date, a.keyword) < std::tie(b.date, b.keyword);
    });
    out.events = assign_ids(std::move(posts_), kFirstTweetId);
    return out;
  }

 private:
  Keyword new_hashtag(int words) {
    std::string raw = "#";
    for (int i = 0; i < words; ++i) raw += capitalize(pick(ctx_.ascii, rng_));
    raw += std::to_string(++serial_);
    return normalize_keyword(raw, Locale());
  }

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) { return rng_.uniform_int(lo, hi); }

  void organic(Date date, std::int64_t midnight, FullScenario& out) {
    const Keyword kw = new_hashtag(static_cast<int>(uniform(2, 3)));
    const std::int64_t start =
        midnight + uniform(c_.organic_hour_min * 3600LL, c_.organic_hour_max * 3600LL - 1);
    const Duration span{uniform(c_.organic_span_min.seconds, c_.organic_span_max.seconds)};
    const auto n = uniform(c_.organic_users_min, c_.organic_users_max);
    const auto users = organic_users(n);
    auto posts = gen_organic_trend(kw, users, Timestamp(start), span, shape_, rng_, ctx_.words);
    for (auto& p : posts) posts_.push_back(std::move(p));
    out.truth.push_back({date, kw, false, true, false});
  }

  void attack(Date date, std::int64_t midnight, bool failed, FullScenario& out) {
    const Keyword kw = new_hashtag(static_cast<int>(uniform(2, 3)));
    std::int64_t t =
        midnight + uniform(c_.attack_hour_min * 3600LL, c_.attack_hour_max * 3600LL - 1);
    const std::int64_t day_end = midnight + 86400;
    const auto waves = failed ? 1 : uniform(c_.waves_min, c_.waves_max);
    std::int64_t last_deletion = t;
    for (std::int64_t w = 0; w < waves; ++w) {
      if (w > 0 && t + c_.theta.seconds + c_.alpha_p.seconds >= day_end) break;
      const auto n = failed ? uniform(c_.failed_bots_min, c_.failed_bots_max)
                            : uniform(c_.bots_min, c_.bots_max);
      const auto bots = pick_bots(n);
      auto posts = gen_attack(kw, attack_, bots, Timestamp(t), rng_, ctx_.words);
      for (auto& p : posts) {
        out.bots.insert(p.tweet.user_id);
        if (p.deleted_at) last_deletion = std::max(last_deletion, p.deleted_at->seconds());
        posts_.push_back(std::move(p));
      }
      t += uniform(c_.wave_gap_min.seconds, c_.wave_gap_max.seconds);
    }
    if (!failed && c_.adopters_max > 0) {
      const auto n = uniform(c_.adopters_min, c_.adopters_max);
      if (n > 0) {
        auto posts = gen_organic_trend(kw, organic_users(n), Timestamp(last_deletion + 1),
                                       Duration::hours(2), shape_, rng_, ctx_.words);
        for (auto& p : posts) posts_.push_back(std::move(p));
      }
    }
    out.truth.push_back({date, kw, true, !failed, false});
  }

  void chatter_day(const Keyword& kw, std::int64_t midnight) {
    const std::string tag = kw.raw;
    for (int i = 0; i < c_.chatter_per_hour * 24; ++i) {
      Post p;
      p.tweet.user_id = background_user();
      p.tweet.created_at = at(midnight + uniform(0, 86399), rng_);
      dress(p.tweet, tag, rng_.bernoulli(c_.organic_lexicon_rate), shape_, ctx_, rng_);
      maybe_delete(p, c_.background_deletion_rate);
      posts_.push_back(std::move(p));
    }
  }

  void background_day(std::int64_t midnight) {
    for (int i = 0; i < c_.background_per_day; ++i) {
      Post p;
      p.tweet.user_id = background_user();
      p.tweet.created_at = at(midnight + uniform(0, 86399), rng_);
      const bool deleted = rng_.bernoulli(c_.background_deletion_rate);
      const bool lexicon = deleted ? rng_.bernoulli(c_.background_lexicon_rate)
                                   : rng_.bernoulli(c_.organic_lexicon_rate);
      std::string tag;
      if (rng_.bernoulli(0.1)) tag = new_hashtag(1).raw;
      dress(p.tweet, tag, lexicon, shape_, ctx_, rng_);
      if (deleted) {
        const std::int64_t d = p.tweet.created_at.seconds() + uniform(1, 7 * 86400);
        p.deleted_at = deletion_at(d, p.tweet.created_at, rng_);
      }
      posts_.push_back(std::move(p));
    }
  }

  void maybe_delete(Post& p, double rate) {
    if (!rng_.bernoulli(rate)) return;
    const std::int64_t d = p.tweet.created_at.seconds() + uniform(60, 3 * 86400);
    p.deleted_at = deletion_at(d, p.tweet.created_at, rng_);
  }

  std::uint64_t background_user() {
    return kBackgroundUserBase +
           static_cast<std::uint64_t>(uniform(0, static_cast<std::int64_t>(kBackgroundUsers) - 1));
  }

  std::vector<std::uint64_t> organic_users(std::int64_t n) {
    const std::int64_t group = uniform(0, c_.interest_groups - 1);
    const std::int64_t size = c_.interest_group_size;
    std::set<std::uint64_t> chosen;
    std::vector<std::uint64_t> out;
    while (static_cast<std::int64_t>(out.size()) < n) {
      const std::int64_t g = rng_.bernoulli(c_.in_group_share)
                                 ? group
                                 : uniform(0, c_.interest_groups - 1);
      const auto u = kOrganicUserBase + static_cast<std::uint64_t>(g * size + uniform(0, size - 1));
      if (chosen.insert(u).second) out.push_back(u);
      if (static_cast<std::int64_t>(chosen.size()) >= c_.interest_groups * size) break;
    }
    return out;
  }

  std::vector<std::uint64_t> pick_bots(std::int64_t n) {
    const std::int64_t net = uniform(0, c_.botnets - 1);
    std::vector<std::uint64_t> pool(static_cast<std::size_t>(c_.botnet_size));
    for (std::size_t i = 0; i < pool.size(); ++i)
      pool[i] = kBotUserBase + static_cast<std::uint64_t>(net * c_.botnet_size) + i;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto j = uniform(i, static_cast<std::int64_t>(pool.size()) - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(n));
    return pool;
  }

  const ScenarioConfig& c_;
  Rng rng_;
  TextContext ctx_;
  OrganicShape shape_;
  AttackShape attack_;
  std::vector<Post> posts_;
  std::uint64_t serial_ = 0;
};

}  // namespace

FullScenario generate_full(const ScenarioConfig& config) {
  config.validate();
  return Generator(config).run();
}

OracleConfig oracle_config(const ScenarioConfig& config, bool mitigation) {
  OracleConfig o;
  o.first_epoch = local_midnight(config.start_date, config.tz);
  o.last_epoch = local_midnight(config.start_date + config.n_days, config.tz) + Duration::hours(6);
  o.interval = config.epoch_interval;
  o.window = config.oracle_window;
  o.latency = config.oracle_latency;
  o.top_k = config.top_k;
  o.mitigation = mitigation;
  o.penalty = config.penalty;
  return o;
}

LabeledStream simulate(const ScenarioConfig& config) {
  FullScenario full = generate_full(config);
  LabeledStream s;
  const auto plain = trend_oracle(full.events, oracle_config(config, false));
  const auto entered = entered_keywords(plain);
  for (auto& row : full.truth) row.trended = entered.count(row.keyword) > 0;
  s.epochs = config.mitigation ? trend_oracle(full.events, oracle_config(config, true))
                               : plain;
  Rng sampler(config.seed ^ 0x9e3779b97f4a7c15ULL);
  s.events = sample_stream(full.events, config.sample_rate, sampler);
  for (const auto& e : s.events)
    if (const auto* t = std::get_if<Tweet>(&e))
      if (full.bots.count(t->user_id)) s.bots.insert(t->user_id);
  for (const auto& row : full.truth)
    if (row.listed) s.trend_days.push_back({row.date, row.keyword});
  s.truth = std::move(full.truth);
  return s;
}

void write_truth(std::ostream& out, std::span<const TruthRow> truth) {
  csv::write_row(out, {"date", "keyword", "attacked", "listed", "trended"});
  auto b = [](bool v) { return std::string(v ? "1" : "0"); };
  for (const auto& r : truth)
    csv::write_row(out, {r.date.iso(), r.keyword.raw, b(r.attacked), b(r.listed),
                         b(r.trended)});
}

std::vector<TruthRow> load_truth(std::istream& in, const Locale& locale) {
  csv::Reader reader(in);
  const auto c_date = reader.column("date");
  const auto c_kw = reader.column("keyword");
  const auto c_att = reader.column("attacked");
  const auto c_listed = reader.find_column("listed");
  const auto c_trended = reader.find_column("trended");
  std::vector<TruthRow> out;
  while (auto row = reader.next()) {
    auto cell = [&](std::size_t i) -> const std::string& {
      if (i >= row->size())
        throw Error(Errc::BadCsv, "short row at line " + std::to_string(reader.line()));
      return (*row)[i];
    };
    auto flag = [&](std::size_t i) {
      const auto& v = cell(i);
      if (v == "1" || v == "true") return true;
      if (v == "0" || v == "false") return false;
      throw Error(Errc::BadCsv, "bad flag '" + v + "'");
    };
    TruthRow r;
    r.date = Date::parse_iso(cell(c_date));
    r.keyword = normalize_keyword(cell(c_kw), locale);
    r.attacked = flag(c_att);
    r.listed = c_listed ? flag(*c_listed) : true;
    r.trended = c_trended ? flag(*c_trended) : false;
    out.push_back(std::move(r));
  }
  return out;
}

void write_labeled_stream(const std::filesystem::path& dir, const LabeledStream& s,
                          const ScenarioConfig& config, bool gzip) {
  namespace io = boost::iostreams;
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error(Errc::Io, "cannot write " + (dir / name).string());
    return f;
  };
  {
    std::ofstream raw = open(gzip ? "stream.jsonl.gz" : "stream.jsonl");
    io::filtering_ostream out;
    if (gzip) out.push(io::gzip_compressor(io::gzip_params(io::gzip::best_speed)));
    out.push(raw);
    for (const auto& e : s.events) out << serialize_event(e) << '\n';
    out.reset();
    if (!raw) throw Error(Errc::Io, "write failed for stream");
  }
  {
    auto f = open("trends.csv");
    write_trend_days(f, s.trend_days);
  }
  {
    auto f = open("epochs.csv");
    write_trend_epochs(f, s.epochs);
  }
  {
    auto f = open("truth.csv");
    write_truth(f, s.truth);
  }
  {
    auto f = open("bots.txt");
    write_astrobots(f, s.bots);
  }
  {
    auto f = open("scenario.conf");
    write_scenario(f, config);
  }
}

std::string EvalReport::json() const {
  nlohmann::ordered_json j;
  j["tp"] = tp;
  j["fp"] = fp;
  j["tn"] = tn;
  j["fn"] = fn;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  return j.dump();
}

EvalReport score_verdicts(std::span<const Verdict> verdicts,
                          std::span<const TruthRow> truth) {
  std::map<std::pair<Date, Keyword>, bool> predicted;
  for (const auto& v : verdicts)
    if (v.trend.date) predicted[{*v.trend.date, v.trend.keyword}] = v.attacked;
  EvalReport r;
  for (const auto& row : truth) {
    if (!row.listed) continue;
    auto it = predicted.find({row.date, row.keyword});
    const bool p = it != predicted.end() && it->second;
    if (p && row.attacked) ++r.tp;
    else if (p) ++r.fp;
    else if (row.attacked) ++r.fn;
    else ++r.tn;
  }
  auto ratio = [](std::uint64_t a, std::uint64_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.f1 = r.precision + r.recall > 0
             ? 2 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

EvalReport evaluate(const DetectorConfig& config, const LabeledStream& stream,
                    const IngestOptions& options) {
  JoinResult joined = join_events(stream.events, stream.trend_days, options);
  auto analyzed = analyze(std::move(joined.instances), config.resolve(), options.locale);
  std::vector<Verdict> verdicts;
  verdicts.reserve(analyzed.size());
  for (auto& a : analyzed) verdicts.push_back(std::move(a.verdict));
  return score_verdicts(verdicts, stream.truth);
}

}  // namespace trendguard

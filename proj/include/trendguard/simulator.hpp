#pragma once

// Synthetic labelled streams: organic trends, background chatter and
// post-and-delete attack waves, a toy trend list with an optional deletion
// penalty, and detector evaluation against the planted truth.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "trendguard/core.hpp"
#include "trendguard/detector.hpp"
#include "trendguard/ingest.hpp"

namespace trendguard {

// 500 lowercase words, Turkish and English.
const std::vector<std::string>& default_wordlist();

struct ScenarioConfig {
  std::uint64_t seed = 1;
  Date start_date = Date::from_ymd(2019, 6, 18);
  UtcOffset tz;
  int n_days = 10;

  int organic_per_day = 15;
  int attacks_per_day = 5;
  // Attacks on hashtags that are left out of the trend list.
  int failed_attacks_per_day = 0;

  // Shape of every generated attack wave.
  Duration alpha_p{60};
  Duration alpha_d{120};
  Duration theta{300};  // lifetimes stay strictly below
  std::size_t kappa = 4;

  int bots_min = 100;
  int bots_max = 600;
  int failed_bots_min = 10;
  int failed_bots_max = 40;
  int waves_min = 3;
  int waves_max = 6;
  Duration wave_gap_min{600};
  Duration wave_gap_max{2400};
  int attack_hour_min = 17;
  int attack_hour_max = 21;  // exclusive
  double missed_deletion_rate = 0.02;
  int botnets = 6;
  int botnet_size = 1500;
  // Organic reaction to an attacked trend; off by default because the
  // stream is generated before the trend list is known.
  int adopters_min = 0;
  int adopters_max = 0;

  int organic_users_min = 400;
  int organic_users_max = 3000;
  Duration organic_span_min{3600};
  Duration organic_span_max{10800};
  int organic_hour_min = 6;
  int organic_hour_max = 20;  // exclusive
  int interest_groups = 20;
  int interest_group_size = 5000;
  double in_group_share = 0.8;

  int background_per_day = 5000;
  int chatter_tags = 12;
  int chatter_per_hour = 30;
  double background_deletion_rate = 0.023;
  // Share of lexicon text among deleted background tweets.
  double background_lexicon_rate = 0.023;
  // Share of lexicon text among every other non-attack tweet.
  double organic_lexicon_rate = 0.01;

  double retweet_rate = 0.3;
  double mention_rate = 0.2;
  double url_rate = 0.15;
  double reply_rate = 0.1;
  double extra_hashtag_rate = 0.2;
  double geo_rate = 0.02;

  double sample_rate = 0.01;

  Duration oracle_window{3600};
  Duration oracle_latency{300};
  Duration epoch_interval{300};
  int top_k = 10;
  double penalty = 2.0;
  bool mitigation = false;

  // Throws Errc::BadConfig.
  void validate() const;
};

// Flat key = value lines; '#' and ';' start comments and [section] headers
// are ignored. Keys are the field names above (durations in seconds,
// start_date as YYYY-MM-DD, tz as whole hours). Throws Errc::BadConfig.
ScenarioConfig load_scenario(std::istream& in);
ScenarioConfig load_scenario_file(const std::filesystem::path& path);
void set_scenario_value(ScenarioConfig& c, std::string_view key, std::string_view value);
void write_scenario(std::ostream& out, const ScenarioConfig& c);

// A tweet as generated, before ids are assigned.
struct Post {
  Tweet tweet;
  std::optional<Timestamp> deleted_at;
};

// 2..9 words joined by single spaces. Throws Errc::WordlistTooSmall below
// ten words.
std::string gen_lexicon_text(std::span<const std::string> wordlist, Rng& rng);

struct AttackShape {
  Duration alpha_p{60};
  Duration alpha_d{120};
  Duration theta{300};
  double missed_deletion_rate = 0;
};

// One tweet per bot, created in [t0, t0 + alpha_p), each deleted strictly
// within theta of its creation and all deletions inside one alpha_d span.
// Missed deletions leave a tweet up. Throws Errc::InfeasibleParams.
std::vector<Post> gen_attack(const Keyword& keyword, const AttackShape& shape,
                             std::span<const std::uint64_t> bots, Timestamp t0,
                             Rng& rng,
                             std::span<const std::string> wordlist = default_wordlist());

struct OrganicShape {
  double retweet_rate = 0.3;
  double mention_rate = 0.2;
  double url_rate = 0.15;
  double reply_rate = 0.1;
  double extra_hashtag_rate = 0.2;
  double deletion_rate = 0.023;
  double lexicon_rate = 0.01;
  double geo_rate = 0.02;
};

// One tweet per user spread uniformly over [start, start + span).
std::vector<Post> gen_organic_trend(const Keyword& keyword,
                                    std::span<const std::uint64_t> users,
                                    Timestamp start, Duration span,
                                    const OrganicShape& shape, Rng& rng,
                                    std::span<const std::string> wordlist =
                                        default_wordlist());

// Ids in creation order from first_id; events ordered by (time, creation
// before deletion, id).
std::vector<TweetEvent> assign_ids(std::vector<Post> posts, std::uint64_t first_id);

// Keeps each creation with probability `rate` and a deletion only with its
// creation. Rate 1 returns the input unchanged.
std::vector<TweetEvent> sample_stream(std::span<const TweetEvent> events, double rate,
                                      Rng& rng);

struct OracleConfig {
  Timestamp first_epoch;
  Timestamp last_epoch;
  Duration interval{300};
  Duration window{3600};
  // Tweets are counted once they are this old, which lets fast deletions
  // land before the score is taken.
  Duration latency{300};
  int top_k = 10;
  bool mitigation = false;
  double penalty = 2.0;
  std::string location = "Turkey";
  Locale locale;
};

// Scores every hashtag at each epoch E by the distinct users among tweets
// created in (E - latency - window, E - latency]; with mitigation each of
// those tweets deleted by E costs `penalty`. The top_k positive scores form
// the epoch's list (ties by keyword); volume is the tweet count in the window.
std::vector<TrendEpoch> trend_oracle(std::span<const TweetEvent> events,
                                     const OracleConfig& config);

// Keywords that appear in any of the epochs.
std::set<Keyword> entered_keywords(std::span<const TrendEpoch> epochs);

struct TruthRow {
  Date date;
  Keyword keyword;
  bool attacked = false;
  bool listed = true;    // present in the trend-day file
  bool trended = false;  // reached the toy list without mitigation
};

struct FullScenario {
  std::vector<TweetEvent> events;  // full scale, time ordered
  std::vector<TruthRow> truth;     // trended not yet filled in
  std::set<std::uint64_t> bots;
};

FullScenario generate_full(const ScenarioConfig& config);

OracleConfig oracle_config(const ScenarioConfig& config, bool mitigation);

struct LabeledStream {
  std::vector<TweetEvent> events;  // sampled, time ordered
  std::vector<TruthRow> truth;
  std::set<std::uint64_t> bots;    // bots with a tweet in the sample
  std::vector<TrendDay> trend_days;
  std::vector<TrendEpoch> epochs;
};

LabeledStream simulate(const ScenarioConfig& config);

// stream.jsonl (or stream.jsonl.gz), trends.csv, epochs.csv, truth.csv,
// bots.txt and scenario.conf.
void write_labeled_stream(const std::filesystem::path& dir, const LabeledStream& s,
                          const ScenarioConfig& config, bool gzip = false);

std::vector<TruthRow> load_truth(std::istream& in, const Locale& locale = Locale());
void write_truth(std::ostream& out, std::span<const TruthRow> truth);

struct EvalReport {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  std::string json() const;
};

// Scores verdicts against the listed truth rows; unmatched verdicts are
// ignored and unmatched truth rows count as negatives.
EvalReport score_verdicts(std::span<const Verdict> verdicts,
                          std::span<const TruthRow> truth);

EvalReport evaluate(const DetectorConfig& config, const LabeledStream& stream,
                    const IngestOptions& options = {});

}  // namespace trendguard

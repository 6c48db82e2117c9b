#pragma once

// How fast, how high and how long trends stay on the list, plus the
// geotag and volume comparisons.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "trendguard/core.hpp"
#include "trendguard/detector.hpp"
#include "trendguard/ingest.hpp"

namespace trendguard {

inline constexpr Duration kDefaultEpochInterval{300};

struct TrendLifecycle {
  Keyword keyword;
  Timestamp first_entry;
  // First later epoch without the keyword; one interval after the last epoch
  // when the keyword never drops.
  Timestamp first_exit;
  int initial_rank = 0;
  int best_rank = 0;

  Duration lifetime() const { return first_exit - first_entry; }
};

// Epochs must be sorted by time. Throws Errc::NeverTrended.
TrendLifecycle lifecycle(const Keyword& keyword, std::span<const TrendEpoch> epochs,
                         Duration epoch_interval = kDefaultEpochInterval);

// One lifecycle per keyword that ever appears, sorted by (first_entry, keyword).
std::vector<TrendLifecycle> all_lifecycles(std::span<const TrendEpoch> epochs,
                                           Duration epoch_interval = kDefaultEpochInterval);

// Entry time minus the median creation time of tweets posted at or before
// entry. With an even count the median is the floor of the middle pair's mean.
// Throws Errc::NoPriorTweets, and Errc::InconsistentData on a negative result.
Duration trend_speed(const TrendInstance& instance, const TrendLifecycle& life);

// Of the tweets posted at or before entry, the share also deleted by then.
double pre_entry_deletion_ratio(const TrendInstance& instance,
                                const TrendLifecycle& life);

struct PrevalenceDay {
  std::uint64_t entrants = 0;
  std::uint64_t attacked = 0;
  double fraction() const {
    return entrants ? static_cast<double>(attacked) / static_cast<double>(entrants)
                    : 0.0;
  }
};

// Per local day: keywords seen in the top `k` during that day, and how many of
// them have an attacked verdict for the same day. Days without entrants are
// left out.
std::map<Date, PrevalenceDay> prevalence(std::span<const Verdict> verdicts,
                                         std::span<const TrendEpoch> epochs,
                                         int k = 10, UtcOffset tz = {});
// Unweighted mean of the daily fractions; 0 when there are no days.
double mean_prevalence(const std::map<Date, PrevalenceDay>& days);

std::array<std::uint64_t, 24> entry_hour_histogram(
    std::span<const TrendLifecycle> lifecycles, UtcOffset tz = {});

struct GeoSample {
  Timestamp time;
  GeoPoint point;
};

// Path length through the points inside [first, first + window], in time
// order. Throws Errc::InsufficientPoints when fewer than two qualify.
double user_travel_distance(std::span<const GeoSample> samples,
                            Duration window = Duration::days(5));

struct VolumeRow {
  std::string label;  // "attacked" or "other"
  std::uint64_t trends = 0;
  std::optional<double> median_undeleted_tweets;
  std::optional<double> median_volume;
};

// Volume of a trend is the largest reported value for its keyword in the
// epochs of its local day; trends without any reported volume are left out
// of that median. Rows appear only for classes with at least one trend.
std::vector<VolumeRow> volume_report(std::span<const TrendInstance> instances,
                                     std::span<const Verdict> verdicts,
                                     std::span<const TrendEpoch> epochs,
                                     UtcOffset tz = {});

// Midpoint median; nullopt for an empty input.
std::optional<double> median(std::vector<double> values);

void write_lifecycles(std::ostream& out, std::span<const TrendLifecycle> lifecycles);
void write_hour_histogram(std::ostream& out, const std::array<std::uint64_t, 24>& bins);
void write_prevalence(std::ostream& out, const std::map<Date, PrevalenceDay>& days);
void write_volume_report(std::ostream& out, std::span<const VolumeRow> rows);

}  // namespace trendguard

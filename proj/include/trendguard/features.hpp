#pragma once

// Per-trend counts, ratios, timing windows and burstiness.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "trendguard/content.hpp"
#include "trendguard/core.hpp"
#include "trendguard/ingest.hpp"

namespace trendguard {

// What the feature code needs from a tweet once its flags are known.
struct AnnotatedTweet {
  std::uint64_t id = 0;
  std::uint64_t user_id = 0;
  Timestamp created_at;
  std::optional<Timestamp> deleted_at;
  bool is_retweet = false;
  TweetFlags flags;

  bool deleted() const { return deleted_at.has_value(); }
  bool deleted_set() const { return deleted() && flags.is_single_engagement; }
  bool deleted_lexicon() const { return deleted() && flags.is_lexicon; }
};

// Pairs each tweet with its flags and deletion; sorted by (created_at, id).
std::vector<AnnotatedTweet> annotate(const TrendInstance& instance,
                                     std::span<const TweetFlags> flags);

void sort_by_creation(std::vector<AnnotatedTweet>& tweets);

struct FeatureVector {
  std::uint64_t n_tweets = 0;
  std::uint64_t n_deleted = 0;
  std::uint64_t n_nonretweet = 0;
  std::uint64_t n_deleted_nonretweet = 0;
  std::uint64_t n_set = 0;
  std::uint64_t n_deleted_set = 0;
  std::uint64_t n_lexicon = 0;
  std::uint64_t n_deleted_lexicon = 0;

  double deletion_ratio = 0;
  double nonretweet_deletion_ratio = 0;
  double set_deletion_ratio = 0;
  double lexicon_deletion_ratio = 0;

  std::uint64_t initial_deletions = 0;
  Duration creation_window;
  Duration deletion_window;
  std::optional<double> lifetime_median;  // seconds
  std::optional<double> lifetime_mean;    // seconds
  double entropy_create = 0;
  double entropy_delete = 0;

  bool operator==(const FeatureVector&) const = default;
};

FeatureVector compute_features(std::span<const AnnotatedTweet> tweets);
FeatureVector count_features(const TrendInstance& instance,
                             std::span<const TweetFlags> flags);

// Deleted single-engagement tweets at the head of the creation order.
std::uint64_t initial_deletions(std::span<const AnnotatedTweet> tweets);
std::uint64_t initial_deletions(const TrendInstance& instance,
                                std::span<const TweetFlags> flags);

// Shannon entropy in bits of per-minute counts; minutes are aligned to the
// Unix epoch.
double minute_entropy(std::span<const Timestamp> times);

struct LifetimeStats {
  std::vector<Duration> lifetimes;
  std::optional<double> median;
  std::optional<double> mean;
  std::uint64_t negative_excluded = 0;
};

LifetimeStats lifetime_stats(std::span<const AnnotatedTweet> tweets);
LifetimeStats lifetime_stats(const TrendInstance& instance);

struct AttackWindows {
  Duration creation_window;
  Duration deletion_window;
};

// Spans over deleted lexicon tweets, or deleted single-engagement tweets when
// there are no deleted lexicon tweets. Throws Errc::NoCandidates.
AttackWindows attack_windows(std::span<const AnnotatedTweet> tweets);
AttackWindows attack_windows(const TrendInstance& instance,
                             std::span<const TweetFlags> flags);

// Column order used by write_feature_row.
std::vector<std::string> feature_columns();
std::vector<std::string> feature_cells(const FeatureVector& f);
void write_feature_header(std::ostream& out);
void write_feature_row(std::ostream& out, const TrendRef& trend,
                       const FeatureVector& f);

// Shortest decimal form that round-trips.
std::string format_real(double v);

}  // namespace trendguard

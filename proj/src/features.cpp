#include "trendguard/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "trendguard/csv.hpp"

namespace trendguard {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

void sort_by_creation(std::vector<AnnotatedTweet>& tweets) {
  std::sort(tweets.begin(), tweets.end(),
            [](const AnnotatedTweet& a, const AnnotatedTweet& b) {
              return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
            });
}

std::vector<AnnotatedTweet> annotate(const TrendInstance& instance,
                                     std::span<const TweetFlags> flags) {
  if (flags.size() != instance.tweets.size())
    throw Error(Errc::InconsistentData, "flag count does not match tweet count");
  std::vector<AnnotatedTweet> out;
  out.reserve(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const Tweet& t = instance.tweets[i];
    out.push_back({t.id, t.user_id, t.created_at, instance.deletion_of(t.id),
                   t.is_retweet, flags[i]});
  }
  sort_by_creation(out);
  return out;
}

double minute_entropy(std::span<const Timestamp> times) {
  if (times.empty()) return 0.0;
  std::map<std::int64_t, std::uint64_t> bins;
  for (const auto& t : times) ++bins[floor_div(t.seconds(), 60)];
  const double n = static_cast<double>(times.size());
  double h = 0.0;
  for (const auto& [bin, count] : bins) {
    const double p = static_cast<double>(count) / n;
    h += p * std::log2(n / static_cast<double>(count));
  }
  return h;
}

std::uint64_t initial_deletions(std::span<const AnnotatedTweet> tweets) {
  std::vector<AnnotatedTweet> sorted(tweets.begin(), tweets.end());
  sort_by_creation(sorted);
  std::uint64_t n = 0;
  for (const auto& t : sorted) {
    if (!t.deleted_set()) break;
    ++n;
  }
  return n;
}

std::uint64_t initial_deletions(const TrendInstance& instance,
                                std::span<const TweetFlags> flags) {
  return initial_deletions(annotate(instance, flags));
}

LifetimeStats lifetime_stats(std::span<const AnnotatedTweet> tweets) {
  LifetimeStats s;
  for (const auto& t : tweets) {
    if (!t.deleted_at) continue;
    if (*t.deleted_at < t.created_at) {
      ++s.negative_excluded;
      continue;
    }
    s.lifetimes.push_back(*t.deleted_at - t.created_at);
  }
  if (s.lifetimes.empty()) return s;
  std::vector<std::int64_t> secs;
  secs.reserve(s.lifetimes.size());
  double sum = 0;
  for (const auto& d : s.lifetimes) {
    secs.push_back(d.seconds);
    sum += static_cast<double>(d.seconds);
  }
  std::sort(secs.begin(), secs.end());
  const std::size_t n = secs.size();
  s.median = n % 2 ? static_cast<double>(secs[n / 2])
                   : (static_cast<double>(secs[n / 2 - 1]) +
                      static_cast<double>(secs[n / 2])) / 2.0;
  s.mean = sum / static_cast<double>(n);
  return s;
}

LifetimeStats lifetime_stats(const TrendInstance& instance) {
  std::vector<AnnotatedTweet> tweets;
  for (const auto& t : instance.tweets)
    tweets.push_back({t.id, t.user_id, t.created_at, instance.deletion_of(t.id),
                      t.is_retweet, {}});
  return lifetime_stats(tweets);
}

namespace {

std::optional<AttackWindows> windows_of(std::span<const AnnotatedTweet> tweets) {
  bool any_lexicon = false;
  for (const auto& t : tweets) any_lexicon = any_lexicon || t.deleted_lexicon();
  std::optional<Timestamp> p_lo, p_hi, d_lo, d_hi;
  for (const auto& t : tweets) {
    if (any_lexicon ? !t.deleted_lexicon() : !t.deleted_set()) continue;
    if (!p_lo || t.created_at < *p_lo) p_lo = t.created_at;
    if (!p_hi || *p_hi < t.created_at) p_hi = t.created_at;
    if (!d_lo || *t.deleted_at < *d_lo) d_lo = *t.deleted_at;
    if (!d_hi || *d_hi < *t.deleted_at) d_hi = *t.deleted_at;
  }
  if (!p_lo) return std::nullopt;
  return AttackWindows{*p_hi - *p_lo, *d_hi - *d_lo};
}

}  // namespace

AttackWindows attack_windows(std::span<const AnnotatedTweet> tweets) {
  if (auto w = windows_of(tweets)) return *w;
  throw Error(Errc::NoCandidates, "no deleted lexicon or single-engagement tweets");
}

AttackWindows attack_windows(const TrendInstance& instance,
                             std::span<const TweetFlags> flags) {
  return attack_windows(annotate(instance, flags));
}

FeatureVector compute_features(std::span<const AnnotatedTweet> tweets) {
  FeatureVector f;
  std::vector<Timestamp> created, deleted;
  created.reserve(tweets.size());
  for (const auto& t : tweets) {
    ++f.n_tweets;
    created.push_back(t.created_at);
    const bool del = t.deleted();
    if (del) {
      ++f.n_deleted;
      deleted.push_back(*t.deleted_at);
    }
    if (!t.is_retweet) {
      ++f.n_nonretweet;
      f.n_deleted_nonretweet += del;
    }
    if (t.flags.is_single_engagement) {
      ++f.n_set;
      f.n_deleted_set += del;
    }
    if (t.flags.is_lexicon) {
      ++f.n_lexicon;
      f.n_deleted_lexicon += del;
    }
  }
  f.deletion_ratio = ratio(f.n_deleted, f.n_tweets);
  f.nonretweet_deletion_ratio = ratio(f.n_deleted_nonretweet, f.n_nonretweet);
  f.set_deletion_ratio = ratio(f.n_deleted_set, f.n_set);
  f.lexicon_deletion_ratio = ratio(f.n_deleted_lexicon, f.n_lexicon);
  f.initial_deletions = initial_deletions(tweets);
  if (auto w = windows_of(tweets)) {
    f.creation_window = w->creation_window;
    f.deletion_window = w->deletion_window;
  }
  const LifetimeStats life = lifetime_stats(tweets);
  f.lifetime_median = life.median;
  f.lifetime_mean = life.mean;
  f.entropy_create = minute_entropy(created);
  f.entropy_delete = minute_entropy(deleted);
  return f;
}

FeatureVector count_features(const TrendInstance& instance,
                             std::span<const TweetFlags> flags) {
  return compute_features(annotate(instance, flags));
}

std::string format_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

std::vector<std::string> feature_columns() {
  return {"n_tweets",
          "n_deleted",
          "n_nonretweet",
          "n_deleted_nonretweet",
          "n_set",
          "n_deleted_set",
          "n_lexicon",
          "n_deleted_lexicon",
          "deletion_ratio",
          "nonretweet_deletion_ratio",
          "set_deletion_ratio",
          "lexicon_deletion_ratio",
          "initial_deletions",
          "creation_window_s",
          "deletion_window_s",
          "lifetime_median_s",
          "lifetime_mean_s",
          "entropy_create",
          "entropy_delete"};
}

std::vector<std::string> feature_cells(const FeatureVector& f) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_real(*v) : std::string();
  };
  return {std::to_string(f.n_tweets),
          std::to_string(f.n_deleted),
          std::to_string(f.n_nonretweet),
          std::to_string(f.n_deleted_nonretweet),
          std::to_string(f.n_set),
          std::to_string(f.n_deleted_set),
          std::to_string(f.n_lexicon),
          std::to_string(f.n_deleted_lexicon),
          format_real(f.deletion_ratio),
          format_real(f.nonretweet_deletion_ratio),
          format_real(f.set_deletion_ratio),
          format_real(f.lexicon_deletion_ratio),
          std::to_string(f.initial_deletions),
          std::to_string(f.creation_window.seconds),
          std::to_string(f.deletion_window.seconds),
          opt(f.lifetime_median),
          opt(f.lifetime_mean),
          format_real(f.entropy_create),
          format_real(f.entropy_delete)};
}

void write_feature_header(std::ostream& out) {
  csv::Row row{"trend", "date", "keyword"};
  for (auto& c : feature_columns()) row.push_back(std::move(c));
  csv::write_row(out, row);
}

void write_feature_row(std::ostream& out, const TrendRef& trend,
                       const FeatureVector& f) {
  csv::Row row{trend.label(), trend.date ? trend.date->iso() : "",
               trend.keyword.display()};
  for (auto& c : feature_cells(f)) row.push_back(std::move(c));
  csv::write_row(out, row);
}

}  // namespace trendguard

#include "trendguard/metrics.hpp"

#include <algorithm>
#include <set>

#include "trendguard/csv.hpp"
#include "trendguard/features.hpp"

namespace trendguard {

namespace {

const TrendEntry* find_entry(const TrendEpoch& e, const Keyword& kw) {
  for (const auto& entry : e.entries)
    if (entry.keyword == kw) return &entry;
  return nullptr;
}

std::int64_t floor_half(std::int64_t sum) {
  return sum >= 0 ? sum / 2 : -((-sum + 1) / 2);
}

}  // namespace

TrendLifecycle lifecycle(const Keyword& keyword, std::span<const TrendEpoch> epochs,
                         Duration epoch_interval) {
  // Epochs from several locations can share a capture time; the keyword is
  // present at that time if any of them lists it.
  std::vector<std::pair<Timestamp, std::optional<int>>> ticks;
  for (const auto& e : epochs) {
    if (ticks.empty() || !(ticks.back().first == e.captured_at))
      ticks.emplace_back(e.captured_at, std::nullopt);
    if (const TrendEntry* entry = find_entry(e, keyword)) {
      auto& rank = ticks.back().second;
      rank = rank ? std::min(*rank, entry->rank) : entry->rank;
    }
  }
  std::size_t i = 0;
  while (i < ticks.size() && !ticks[i].second) ++i;
  if (i == ticks.size())
    throw Error(Errc::NeverTrended, keyword.display() + " never trended");
  TrendLifecycle life;
  life.keyword = keyword;
  life.first_entry = ticks[i].first;
  life.initial_rank = *ticks[i].second;
  life.best_rank = life.initial_rank;
  life.first_exit = ticks.back().first + epoch_interval;
  for (std::size_t j = i + 1; j < ticks.size(); ++j) {
    if (!ticks[j].second) {
      life.first_exit = ticks[j].first;
      break;
    }
    life.best_rank = std::min(life.best_rank, *ticks[j].second);
  }
  return life;
}

std::vector<TrendLifecycle> all_lifecycles(std::span<const TrendEpoch> epochs,
                                           Duration epoch_interval) {
  std::set<Keyword> keywords;
  for (const auto& e : epochs)
    for (const auto& entry : e.entries) keywords.insert(entry.keyword);
  std::vector<TrendLifecycle> out;
  for (const auto& kw : keywords) out.push_back(lifecycle(kw, epochs, epoch_interval));
  std::sort(out.begin(), out.end(), [](const TrendLifecycle& a, const TrendLifecycle& b) {
    return std::tie(a.first_entry, a.keyword) < std::tie(b.first_entry, b.keyword);
  });
  return out;
}

Duration trend_speed(const TrendInstance& instance, const TrendLifecycle& life) {
  std::vector<std::int64_t> times;
  for (const auto& t : instance.tweets)
    if (!(life.first_entry < t.created_at)) times.push_back(t.created_at.seconds());
  if (times.empty())
    throw Error(Errc::NoPriorTweets, "no tweets before " + life.keyword.display() +
                                         " entered the list");
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  const std::int64_t med =
      n % 2 ? times[n / 2] : floor_half(times[n / 2 - 1] + times[n / 2]);
  const Duration speed{life.first_entry.seconds() - med};
  if (speed.seconds < 0)
    throw Error(Errc::InconsistentData, "negative trend speed");
  return speed;
}

double pre_entry_deletion_ratio(const TrendInstance& instance,
                                const TrendLifecycle& life) {
  std::uint64_t before = 0, deleted = 0;
  for (const auto& t : instance.tweets) {
    if (life.first_entry < t.created_at) continue;
    ++before;
    if (auto d = instance.deletion_of(t.id); d && !(life.first_entry < *d)) ++deleted;
  }
  return before ? static_cast<double>(deleted) / static_cast<double>(before) : 0.0;
}

std::map<Date, PrevalenceDay> prevalence(std::span<const Verdict> verdicts,
                                         std::span<const TrendEpoch> epochs, int k,
                                         UtcOffset tz) {
  std::set<std::pair<Date, Keyword>> attacked;
  for (const auto& v : verdicts)
    if (v.attacked && v.trend.date) attacked.insert({*v.trend.date, v.trend.keyword});

  std::map<Date, std::set<Keyword>> entrants;
  for (const auto& e : epochs) {
    const Date day = local_date(e.captured_at, tz);
    for (const auto& entry : e.entries)
      if (entry.rank <= k) entrants[day].insert(entry.keyword);
  }
  std::map<Date, PrevalenceDay> out;
  for (const auto& [day, kws] : entrants) {
    if (kws.empty()) continue;
    PrevalenceDay p;
    p.entrants = kws.size();
    for (const auto& kw : kws) p.attacked += attacked.count({day, kw});
    out.emplace(day, p);
  }
  return out;
}

double mean_prevalence(const std::map<Date, PrevalenceDay>& days) {
  if (days.empty()) return 0.0;
  double sum = 0;
  for (const auto& [d, p] : days) sum += p.fraction();
  return sum / static_cast<double>(days.size());
}

std::array<std::uint64_t, 24> entry_hour_histogram(
    std::span<const TrendLifecycle> lifecycles, UtcOffset tz) {
  std::array<std::uint64_t, 24> bins{};
  for (const auto& l : lifecycles) ++bins[local_hour(l.first_entry, tz)];
  return bins;
}

double user_travel_distance(std::span<const GeoSample> samples, Duration window) {
  std::vector<GeoSample> sorted(samples.begin(), samples.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const GeoSample& a, const GeoSample& b) { return a.time < b.time; });
  if (sorted.empty())
    throw Error(Errc::InsufficientPoints, "no geotagged points");
  const Timestamp first = sorted.front().time;
  std::size_t n = 0;
  while (n < sorted.size() && sorted[n].time - first <= window) ++n;
  if (n < 2) throw Error(Errc::InsufficientPoints, "fewer than two points in window");
  double km = 0;
  for (std::size_t i = 1; i < n; ++i) km += haversine_km(sorted[i - 1].point, sorted[i].point);
  return km;
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<VolumeRow> volume_report(std::span<const TrendInstance> instances,
                                     std::span<const Verdict> verdicts,
                                     std::span<const TrendEpoch> epochs, UtcOffset tz) {
  if (instances.size() != verdicts.size())
    throw Error(Errc::InconsistentData, "instances and verdicts differ in size");
  std::map<std::pair<Date, Keyword>, std::int64_t> volumes;
  for (const auto& e : epochs) {
    const Date day = local_date(e.captured_at, tz);
    for (const auto& entry : e.entries) {
      if (!entry.volume) continue;
      auto [it, inserted] = volumes.try_emplace({day, entry.keyword}, *entry.volume);
      if (!inserted) it->second = std::max(it->second, *entry.volume);
    }
  }
  struct Acc {
    std::uint64_t trends = 0;
    std::vector<double> undeleted;
    std::vector<double> volume;
  };
  Acc acc[2];  // 0 attacked, 1 other
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    Acc& a = acc[verdicts[i].attacked ? 0 : 1];
    ++a.trends;
    std::uint64_t kept = 0;
    for (const auto& t : inst.tweets) kept += inst.deletions.count(t.id) == 0;
    a.undeleted.push_back(static_cast<double>(kept));
    if (inst.trend.date)
      if (auto it = volumes.find({*inst.trend.date, inst.trend.keyword});
          it != volumes.end())
        a.volume.push_back(static_cast<double>(it->second));
  }
  std::vector<VolumeRow> rows;
  const char* labels[2] = {"attacked", "other"};
  for (int c = 0; c < 2; ++c) {
    if (!acc[c].trends) continue;
    rows.push_back({labels[c], acc[c].trends, median(acc[c].undeleted),
                    median(acc[c].volume)});
  }
  return rows;
}

void write_lifecycles(std::ostream& out, std::span<const TrendLifecycle> lifecycles) {
  csv::write_row(out, {"keyword", "first_entry", "first_exit", "lifetime_s",
                       "initial_rank", "best_rank"});
  for (const auto& l : lifecycles)
    csv::write_row(out, {l.keyword.display(), format_iso8601(l.first_entry),
                         format_iso8601(l.first_exit),
                         std::to_string(l.lifetime().seconds),
                         std::to_string(l.initial_rank), std::to_string(l.best_rank)});
}

void write_hour_histogram(std::ostream& out, const std::array<std::uint64_t, 24>& bins) {
  csv::write_row(out, {"hour", "count"});
  for (int h = 0; h < 24; ++h)
    csv::write_row(out, {std::to_string(h), std::to_string(bins[h])});
}

void write_prevalence(std::ostream& out, const std::map<Date, PrevalenceDay>& days) {
  csv::write_row(out, {"date", "entrants", "attacked", "fraction"});
  for (const auto& [d, p] : days)
    csv::write_row(out, {d.iso(), std::to_string(p.entrants), std::to_string(p.attacked),
                         format_real(p.fraction())});
}

void write_volume_report(std::ostream& out, std::span<const VolumeRow> rows) {
  csv::write_row(out, {"class", "trends", "median_undeleted_tweets", "median_volume"});
  for (const auto& r : rows)
    csv::write_row(out, {r.label, std::to_string(r.trends),
                         r.median_undeleted_tweets ? format_real(*r.median_undeleted_tweets)
                                                   : "",
                         r.median_volume ? format_real(*r.median_volume) : ""});
}

}  // namespace trendguard

#include "trendguard/pipeline.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace trendguard {

void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

JoinResult join_events(std::span<const TweetEvent> events,
                       std::span<const TrendDay> trends, const IngestOptions& options) {
  TrendJoiner joiner({trends.begin(), trends.end()}, options);
  JoinResult r;
  for (const auto& e : events) {
    joiner.add(e);
    ++r.stats.lines_read;
    if (std::holds_alternative<Tweet>(e)) ++r.stats.creations;
    else ++r.stats.deletions;
  }
  r.instances = joiner.finish();
  r.unmatched_deletions = joiner.unmatched_deletion_count();
  return r;
}

JoinResult join_files(std::span<const std::filesystem::path> paths,
                      std::span<const TrendDay> trends, const IngestOptions& options) {
  IngestOptions opts = options;
  opts.retain_unmatched = false;
  TrendJoiner joiner({trends.begin(), trends.end()}, opts);
  JoinResult r;
  // Every creation in every file first; a deletion may sit in an earlier file
  // than its tweet.
  std::vector<ParseStats> first;
  for (const auto& p : paths)
    first.push_back(for_each_event_in_file(
        p, [&](TweetEvent&& e) { joiner.add_creation(std::get<Tweet>(e)); },
        EventFilter::CreationsOnly));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    ParseStats second = for_each_event_in_file(
        paths[i], [&](TweetEvent&& e) { joiner.add_deletion(std::get<Deletion>(e)); },
        EventFilter::DeletionsOnly);
    ParseStats merged;
    merged.lines_read = first[i].lines_read;
    merged.creations = first[i].creations;
    merged.deletions = second.deletions;
    merged.malformed_skipped = first[i].malformed_skipped + second.malformed_skipped;
    merged.other_skipped = merged.lines_read - merged.creations - merged.deletions -
                           merged.malformed_skipped;
    r.stats += merged;
  }
  r.instances = joiner.finish();
  r.unmatched_deletions = joiner.unmatched_deletion_count();
  return r;
}

std::vector<AnalyzedTrend> analyze(std::vector<TrendInstance> instances,
                                   const Formula& formula, const Locale& locale,
                                   unsigned jobs) {
  std::vector<AnalyzedTrend> out(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i)
    out[i].instance = std::move(instances[i]);
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    auto& a = out[i];
    a.flags = classify_instance(a.instance, locale);
    a.verdict = classify_trend(count_features(a.instance, a.flags), formula,
                               a.instance.trend);
  });
  return out;
}

}  // namespace trendguard

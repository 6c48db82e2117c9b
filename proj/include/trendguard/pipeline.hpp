#pragma once

// Glue between the stages: join, classify, featurize and judge trends, in
// parallel where the work is per trend.

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "trendguard/content.hpp"
#include "trendguard/detector.hpp"
#include "trendguard/features.hpp"
#include "trendguard/ingest.hpp"

namespace trendguard {

struct JoinResult {
  std::vector<TrendInstance> instances;
  ParseStats stats;
  std::uint64_t unmatched_deletions = 0;
};

JoinResult join_events(std::span<const TweetEvent> events,
                       std::span<const TrendDay> trends, const IngestOptions& options);

// Two passes over each file: creations first, then deletions, so only tweets
// of listed trends are ever held in memory. Stats sum both passes' creation
// and deletion counts once.
JoinResult join_files(std::span<const std::filesystem::path> paths,
                      std::span<const TrendDay> trends, const IngestOptions& options);

struct AnalyzedTrend {
  TrendInstance instance;
  std::vector<TweetFlags> flags;
  Verdict verdict;
};

// Order of the output matches the input whatever the job count.
std::vector<AnalyzedTrend> analyze(std::vector<TrendInstance> instances,
                                   const Formula& formula, const Locale& locale,
                                   unsigned jobs = 0);

// Runs fn(i) for i in [0, n) on up to `jobs` threads (0 means all cores).
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace trendguard

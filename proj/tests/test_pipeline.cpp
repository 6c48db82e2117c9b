#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "trendguard/pipeline.hpp"
#include "trendguard/simulator.hpp"

using namespace trendguard;

namespace {

LabeledStream scenario() {
  ScenarioConfig c;
  c.n_days = 2;
  c.organic_per_day = 5;
  c.attacks_per_day = 3;
  c.background_per_day = 400;
  c.bots_min = 30;
  c.bots_max = 60;
  c.organic_users_min = 100;
  c.organic_users_max = 150;
  c.botnet_size = 200;
  c.interest_group_size = 300;
  c.sample_rate = 1;
  return simulate(c);
}

}  // namespace

TEST(Pipeline, FilesMatchInMemoryJoin) {
  auto s = scenario();
  const auto dir = std::filesystem::temp_directory_path() /
                   ("tg_pipeline_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  std::filesystem::create_directories(dir);
  // split the stream over two files, deletions partly in the first one
  const auto half = s.events.size() / 2;
  {
    std::ofstream a(dir / "a.jsonl"), b(dir / "b.jsonl");
    for (std::size_t i = 0; i < s.events.size(); ++i)
      (i < half ? a : b) << serialize_event(s.events[i]) << "\n";
  }
  std::vector<std::filesystem::path> files{dir / "b.jsonl", dir / "a.jsonl"};
  auto from_files = join_files(files, s.trend_days, IngestOptions{});
  auto in_memory = join_events(s.events, s.trend_days, IngestOptions{});
  ASSERT_EQ(from_files.instances.size(), in_memory.instances.size());
  for (std::size_t i = 0; i < in_memory.instances.size(); ++i)
    EXPECT_TRUE(from_files.instances[i] == in_memory.instances[i]) << i;
  EXPECT_EQ(from_files.stats.creations, in_memory.stats.creations);
  EXPECT_EQ(from_files.stats.deletions, in_memory.stats.deletions);
  std::filesystem::remove_all(dir);
}

TEST(Pipeline, AnalyzeIndependentOfJobs) {
  auto s = scenario();
  auto joined = join_events(s.events, s.trend_days, IngestOptions{});
  const auto formula = DetectorConfig{}.resolve();
  auto one = analyze(joined.instances, formula, Locale(), 1);
  auto four = analyze(joined.instances, formula, Locale(), 4);
  ASSERT_EQ(one.size(), joined.instances.size());
  ASSERT_EQ(four.size(), one.size());
  std::size_t attacked = 0;
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_TRUE(one[i].instance == joined.instances[i]);
    EXPECT_EQ(verdict_json(one[i].verdict), verdict_json(four[i].verdict));
    attacked += one[i].verdict.attacked;
  }
  EXPECT_EQ(attacked, 6u);
}

TEST(Pipeline, ParallelForCoversAndRethrows) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "support.hpp"
#include "trendguard/content.hpp"
#include "trendguard/simulator.hpp"

using namespace trendguard;
using namespace tgtest;

namespace {

Keyword kw(const char* s) { return normalize_keyword(s, Locale()); }

std::vector<std::uint64_t> users(std::uint64_t base, std::size_t n) {
  std::vector<std::uint64_t> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = base + i;
  return u;
}

ScenarioConfig small() {
  ScenarioConfig c;
  c.n_days = 2;
  c.organic_per_day = 4;
  c.attacks_per_day = 2;
  c.background_per_day = 500;
  c.bots_min = 40;
  c.bots_max = 80;
  c.organic_users_min = 100;
  c.organic_users_max = 200;
  c.botnet_size = 200;
  c.interest_group_size = 300;
  c.sample_rate = 0.5;
  return c;
}

std::string dump(const std::vector<TweetEvent>& ev) {
  std::string s;
  for (const auto& e : ev) s += serialize_event(e) + "\n";
  return s;
}

}  // namespace

TEST(GenAttack, ShapeHolds) {
  Rng rng(1);
  AttackShape shape;
  auto bots = users(5000, 200);
  for (int round = 0; round < 50; ++round) {
    auto posts = gen_attack(kw("#Hedef"), shape, bots, Timestamp(kNoon), rng);
    ASSERT_EQ(posts.size(), bots.size());
    Timestamp dlo = *posts[0].deleted_at, dhi = dlo;
    std::set<std::uint64_t> seen;
    for (const auto& p : posts) {
      ASSERT_TRUE(p.deleted_at);
      EXPECT_TRUE(seen.insert(p.tweet.user_id).second);
      EXPECT_GE((p.tweet.created_at - Timestamp(kNoon)).seconds, 0);
      EXPECT_LT((p.tweet.created_at - Timestamp(kNoon)).seconds, shape.alpha_p.seconds);
      EXPECT_FALSE(*p.deleted_at < p.tweet.created_at);
      EXPECT_LT((*p.deleted_at - p.tweet.created_at).seconds, shape.theta.seconds);
      dlo = std::min(dlo, *p.deleted_at);
      dhi = std::max(dhi, *p.deleted_at);
      EXPECT_TRUE(is_single_engagement(p.tweet, kw("#Hedef")));
      EXPECT_TRUE(is_lexicon_tweet(p.tweet.text, kw("#Hedef"))) << p.tweet.text;
    }
    EXPECT_LT((dhi - dlo).seconds, shape.alpha_d.seconds);
  }
}

TEST(GenAttack, MissedDeletionsAndInfeasible) {
  Rng rng(2);
  AttackShape shape;
  shape.missed_deletion_rate = 0.5;
  auto posts = gen_attack(kw("#x"), shape, users(1, 400), Timestamp(kNoon), rng);
  std::size_t kept = 0;
  for (const auto& p : posts) kept += !p.deleted_at;
  EXPECT_GT(kept, 140u);
  EXPECT_LT(kept, 260u);
  AttackShape bad;
  bad.alpha_p = Duration{400};
  bad.alpha_d = Duration{10};
  bad.theta = Duration{300};
  try {
    gen_attack(kw("#x"), bad, users(1, 5), Timestamp(kNoon), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InfeasibleParams);
  }
  EXPECT_THROW(gen_attack(kw("#x"), AttackShape{}, {}, Timestamp(kNoon), rng), Error);
}

TEST(GenAttack, DetectorFindsIt) {
  Rng rng(3);
  auto posts = gen_attack(kw("#x"), AttackShape{}, users(1, 30), Timestamp(kNoon), rng);
  auto ev = assign_ids(posts, 1000);
  std::vector<AnnotatedTweet> at;
  std::map<std::uint64_t, Timestamp> del;
  for (const auto& e : ev)
    if (const auto* d = std::get_if<Deletion>(&e)) del[d->tweet_id] = d->time;
  for (const auto& e : ev)
    if (const auto* t = std::get_if<Tweet>(&e)) {
      AnnotatedTweet a;
      a.id = t->id;
      a.user_id = t->user_id;
      a.created_at = t->created_at;
      if (auto it = del.find(t->id); it != del.end()) a.deleted_at = it->second;
      a.flags = classify_tweet(*t, kw("#x"));
      at.push_back(a);
    }
  auto events = detect_attack_windows(at, AttackParams{});
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].tweet_ids.size(), 30u);
}

TEST(Organic, DeletionRate) {
  Rng rng(4);
  OrganicShape shape;
  auto posts = gen_organic_trend(kw("#x"), users(1, 10000), Timestamp(kNoon),
                                 Duration::hours(2), shape, rng);
  ASSERT_EQ(posts.size(), 10000u);
  std::size_t deleted = 0;
  for (const auto& p : posts) {
    deleted += p.deleted_at.has_value();
    EXPECT_LT((p.tweet.created_at - Timestamp(kNoon)).seconds, 7200);
    if (p.deleted_at) {
      EXPECT_GE((*p.deleted_at - p.tweet.created_at).seconds, 60);
    }
  }
  EXPECT_NEAR(static_cast<double>(deleted) / 10000.0, 0.023, 0.01);
}

TEST(Ids, OrderingAndCreationFirst) {
  Rng rng(5);
  auto posts = gen_attack(kw("#x"), AttackShape{}, users(1, 50), Timestamp(kNoon), rng);
  auto ev = assign_ids(posts, 7);
  EXPECT_EQ(ev.size(), 100u);
  std::map<std::uint64_t, Timestamp> created;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (i) {
      EXPECT_FALSE(event_time(ev[i]) < event_time(ev[i - 1]));
    }
    if (const auto* t = std::get_if<Tweet>(&ev[i])) {
      EXPECT_GE(t->id, 7u);
      created[t->id] = t->created_at;
    } else {
      EXPECT_TRUE(created.count(std::get<Deletion>(ev[i]).tweet_id));
    }
  }
}

TEST(Sampling, BinomialAndNoOrphans) {
  Rng rng(6);
  std::vector<Post> posts;
  for (std::uint64_t i = 0; i < 40000; ++i) {
    Post p;
    p.tweet = make_tweet(0, i, kNoon + static_cast<std::int64_t>(i % 3600), "x");
    if (i % 3 == 0) p.deleted_at = p.tweet.created_at + Duration{100};
    posts.push_back(p);
  }
  auto ev = assign_ids(posts, 1);
  auto s = sample_stream(ev, 0.01, rng);
  std::set<std::uint64_t> kept;
  std::size_t n = 0;
  for (const auto& e : s) {
    if (const auto* t = std::get_if<Tweet>(&e)) {
      kept.insert(t->id);
      ++n;
    } else {
      EXPECT_TRUE(kept.count(std::get<Deletion>(e).tweet_id));
    }
  }
  const double sigma = std::sqrt(40000 * 0.01 * 0.99);
  EXPECT_NEAR(static_cast<double>(n), 400.0, 3 * sigma);
  EXPECT_EQ(dump(sample_stream(ev, 1.0, rng)), dump(ev));
}

TEST(Oracle, MitigationRemovesFastDeleters) {
  Rng rng(7);
  std::vector<Post> posts = gen_attack(kw("#Saldiri"), AttackShape{}, users(5000, 100),
                                       Timestamp(kNoon), rng);
  OrganicShape organic;
  organic.deletion_rate = 0;
  for (auto& p : gen_organic_trend(kw("#Dogal"), users(1, 60), Timestamp(kNoon - 1800),
                                   Duration{1800}, organic, rng))
    posts.push_back(p);
  auto ev = assign_ids(posts, 1);
  OracleConfig oc;
  oc.first_epoch = Timestamp(kNoon - 3600);
  oc.last_epoch = Timestamp(kNoon + 3 * 3600);
  auto plain = entered_keywords(trend_oracle(ev, oc));
  EXPECT_TRUE(plain.count(kw("#saldiri")));
  EXPECT_TRUE(plain.count(kw("#dogal")));
  oc.mitigation = true;
  auto epochs = trend_oracle(ev, oc);
  auto mitigated = entered_keywords(epochs);
  EXPECT_FALSE(mitigated.count(kw("#saldiri")));
  EXPECT_TRUE(mitigated.count(kw("#dogal")));
  for (const auto& e : epochs) {
    EXPECT_LE(e.entries.size(), 10u);
    for (std::size_t i = 0; i < e.entries.size(); ++i)
      EXPECT_EQ(e.entries[i].rank, static_cast<int>(i + 1));
  }
}

TEST(Scenario, DeterministicAndWellFormed) {
  auto c = small();
  auto a = simulate(c);
  auto b = simulate(c);
  EXPECT_EQ(dump(a.events), dump(b.events));
  EXPECT_EQ(a.bots, b.bots);
  std::size_t attacked = 0, listed = 0;
  for (const auto& r : a.truth) {
    attacked += r.attacked;
    listed += r.listed;
  }
  EXPECT_EQ(attacked, 4u);
  EXPECT_EQ(listed, a.trend_days.size());
  EXPECT_FALSE(a.epochs.empty());
  c.seed = 2;
  EXPECT_NE(dump(simulate(c).events), dump(a.events));
}

TEST(Scenario, ConfigRoundTrip) {
  auto c = small();
  c.penalty = 3.5;
  c.mitigation = true;
  c.tz = UtcOffset::hours(-2);
  std::stringstream ss;
  write_scenario(ss, c);
  auto back = load_scenario(ss);
  std::stringstream again;
  write_scenario(again, back);
  EXPECT_EQ(ss.str(), again.str());
  EXPECT_EQ(back.tz, c.tz);
  std::stringstream with_comments("# hi\n[scenario]\nseed = \"9\" ; inline\nn_days=3\n");
  auto d = load_scenario(with_comments);
  EXPECT_EQ(d.seed, 9u);
  EXPECT_EQ(d.n_days, 3);
  for (const char* bad : {"bogus = 1\n", "n_days = -1\n", "sample_rate = 2\n", "seed\n",
                          "top_k = 51\n", "start_date = 2019-13-01\n"}) {
    std::stringstream s(bad);
    try {
      load_scenario(s);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::BadConfig) << bad;
    }
  }
}

TEST(Truth, RoundTrip) {
  auto s = simulate(small());
  std::stringstream ss;
  write_truth(ss, s.truth);
  auto back = load_truth(ss);
  ASSERT_EQ(back.size(), s.truth.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].keyword, s.truth[i].keyword);
    EXPECT_EQ(back[i].date, s.truth[i].date);
    EXPECT_EQ(back[i].attacked, s.truth[i].attacked);
    EXPECT_EQ(back[i].trended, s.truth[i].trended);
  }
}

TEST(Score, EdgeCases) {
  const Date day = Date::from_ymd(2019, 6, 18);
  std::vector<TruthRow> truth{{day, kw("#a"), true, true, true},
                              {day, kw("#b"), false, true, true},
                              {day, kw("#c"), true, true, true},
                              {day, kw("#d"), true, false, false}};
  std::vector<Verdict> v(3);
  v[0].trend = {kw("#a"), day, {}};
  v[0].attacked = true;
  v[1].trend = {kw("#b"), day, {}};
  v[1].attacked = true;
  v[2].trend = {kw("#zz"), day, {}};
  v[2].attacked = true;
  auto r = score_verdicts(v, truth);
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);  // #c never judged
  EXPECT_EQ(r.tn, 0u);
  EXPECT_EQ(r.total(), 3u);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  auto none = score_verdicts({}, {});
  EXPECT_DOUBLE_EQ(none.precision, 0);
  EXPECT_DOUBLE_EQ(none.f1, 0);
  EXPECT_NE(r.json().find("\"tp\":1"), std::string::npos) << r.json();
}

TEST(Evaluate, NeverAttackedDetectorHasNoRecall) {
  auto c = small();
  c.sample_rate = 1;
  auto s = simulate(c);
  DetectorConfig never;
  never.preset = Preset::Custom;
  never.formula = "r8>=1000000";
  auto r = evaluate(never, s);
  EXPECT_EQ(r.tp, 0u);
  EXPECT_DOUBLE_EQ(r.recall, 0);
  auto good = evaluate(DetectorConfig{}, s);
  EXPECT_EQ(good.tp, 4u);
  EXPECT_EQ(good.fp, 0u);
}

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "json.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "trendguard/content.hpp"
#include "trendguard/detector.hpp"

using namespace trendguard;
using namespace tgtest;

namespace {

FeatureVector lexicon_features(std::uint64_t deleted_lexicon, double ratio) {
  FeatureVector f;
  f.n_deleted_lexicon = deleted_lexicon;
  f.lexicon_deletion_ratio = ratio;
  return f;
}

}  // namespace

TEST(Formula, ParseAndFormat) {
  auto f = parse_formula("r8>=4 & r9>0.45 | r5");
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0][1].op, CmpOp::Gt);
  EXPECT_DOUBLE_EQ(f[1][0].threshold, default_threshold(5));
  EXPECT_EQ(parse_formula(format_formula(f)).size(), 2u);
  EXPECT_EQ(format_formula(parse_formula(format_formula(f))), format_formula(f));
  auto pinned = parse_formula("r5>=4!");
  EXPECT_TRUE(pinned[0][0].pinned);
}

TEST(Formula, Errors) {
  try {
    parse_formula("r10>=1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownRule);
  }
  for (const char* bad : {"", "r8>=", "r8 >= 4 &", "x8>=4", "r8<4", "r8>=4 | | r9"}) {
    EXPECT_THROW(parse_formula(bad), Error) << bad;
  }
  DetectorConfig c;
  c.preset = Preset::Custom;
  c.formula = "r0>=1";
  EXPECT_THROW(c.resolve(), Error);
  DetectorConfig t;
  t.thresholds[12] = 1;
  EXPECT_THROW(t.resolve(), Error);
}

TEST(Presets, Names) {
  for (auto p : {Preset::LexiconTree, Preset::LexiconTreeStrict, Preset::LexiconAgnosticTree,
                 Preset::RatioOnly, Preset::NonretweetTree, Preset::Custom})
    EXPECT_EQ(preset_from_name(preset_name(p)), p);
  EXPECT_THROW(preset_from_name("best"), Error);
  EXPECT_EQ(rule_feature_name(8), "n_deleted_lexicon");
}

TEST(Classify, LexiconTreeExamples) {
  DetectorConfig c;
  EXPECT_TRUE(classify_trend(lexicon_features(4, 0.9), c).attacked);
  EXPECT_FALSE(classify_trend(lexicon_features(3, 1.0), c).attacked);
  EXPECT_FALSE(classify_trend(lexicon_features(4, 0.45), c).attacked);  // strictly more
  EXPECT_TRUE(classify_trend(lexicon_features(4, 0.46), c).attacked);
  c.preset = Preset::LexiconTreeStrict;
  EXPECT_FALSE(classify_trend(lexicon_features(4, 0.6), c).attacked);
  EXPECT_TRUE(classify_trend(lexicon_features(4, 0.68), c).attacked);
}

TEST(Classify, AllZeroNeverAttacked) {
  for (auto p : {Preset::LexiconTree, Preset::LexiconTreeStrict, Preset::LexiconAgnosticTree,
                 Preset::RatioOnly, Preset::NonretweetTree}) {
    DetectorConfig c;
    c.preset = p;
    EXPECT_FALSE(classify_trend(FeatureVector{}, c).attacked) << preset_name(p);
  }
}

TEST(Classify, AgnosticAndRatioPresets) {
  DetectorConfig c;
  c.preset = Preset::LexiconAgnosticTree;
  FeatureVector f;
  f.n_deleted_set = 10;
  f.set_deletion_ratio = 0.5;
  EXPECT_TRUE(classify_trend(f, c).attacked);
  f.set_deletion_ratio = 0.1;
  EXPECT_FALSE(classify_trend(f, c).attacked);
  f.n_deleted_set = 4;
  f.initial_deletions = 4;
  EXPECT_TRUE(classify_trend(f, c).attacked);
  // the pinned branch keeps 4 when rule 5 is overridden
  c.thresholds[5] = 20;
  f.n_deleted_set = 5;
  f.set_deletion_ratio = 0.9;
  auto v = classify_trend(f, c);
  EXPECT_TRUE(v.attacked);

  DetectorConfig r;
  r.preset = Preset::RatioOnly;
  FeatureVector g;
  g.n_deleted = 17;
  g.deletion_ratio = 0.25;
  EXPECT_TRUE(classify_trend(g, r).attacked);
  g.n_deleted = 16;
  EXPECT_FALSE(classify_trend(g, r).attacked);
}

TEST(Classify, FiredRulesAndPurity) {
  DetectorConfig c;
  auto f = lexicon_features(5, 0.3);
  auto v = classify_trend(f, c);
  EXPECT_FALSE(v.attacked);
  ASSERT_EQ(v.fired_rules.size(), 1u);
  EXPECT_EQ(v.fired_rules[0].rule, 8);
  EXPECT_DOUBLE_EQ(v.fired_rules[0].observed, 5);
  auto again = classify_trend(f, c);
  EXPECT_EQ(again.fired_rules, v.fired_rules);
  EXPECT_EQ(again.attacked, v.attacked);
  DetectorConfig custom;
  custom.preset = Preset::Custom;
  custom.formula = "r8>=5";
  EXPECT_TRUE(classify_trend(f, custom).attacked);
}

TEST(Classify, MonotoneInDeletedLexicon) {
  Rng rng(2);
  DetectorConfig c;
  for (int i = 0; i < 2000; ++i) {
    const auto lex = static_cast<std::uint64_t>(rng.uniform_int(0, 20));
    const auto del = static_cast<std::uint64_t>(rng.uniform_int(0, static_cast<std::int64_t>(lex)));
    auto ratio = [](std::uint64_t a, std::uint64_t b) {
      return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
    };
    const bool before = classify_trend(lexicon_features(del, ratio(del, lex)), c).attacked;
    const bool after =
        classify_trend(lexicon_features(del + 1, ratio(del + 1, lex + 1)), c).attacked;
    if (before) {
      EXPECT_TRUE(after);
    }
  }
}

TEST(Windows, FiveBotsOneEvent) {
  std::vector<AnnotatedTweet> v;
  for (int i = 0; i < 5; ++i)
    v.push_back(annotated(i + 1, i + 1, kNoon + i * 12, kNoon + 100 + i * 20));
  AttackParams p;
  p.kappa = 4;
  auto ev = detect_attack_windows(v, p);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].tweet_ids.size(), 5u);
  EXPECT_EQ(ev[0].creation_window.seconds, 48);
  EXPECT_EQ(ev[0].deletion_window.seconds, 80);
  EXPECT_TRUE(satisfies_attack_conditions(ev[0], v, p));

  v[2].deleted_at.reset();
  ev = detect_attack_windows(v, p);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].tweet_ids, (std::vector<std::uint64_t>{1, 2, 4, 5}));
}

TEST(Windows, SameUserKeepsOnePerEvent) {
  std::vector<AnnotatedTweet> v;
  for (int i = 0; i < 4; ++i) v.push_back(annotated(i + 1, i + 1, kNoon + i, kNoon + 60));
  v.push_back(annotated(9, 1, kNoon + 5, kNoon + 61));
  AttackParams p;
  auto ev = detect_attack_windows(v, p);
  ASSERT_EQ(ev.size(), 2u);
  for (const auto& e : ev) {
    EXPECT_EQ(e.tweet_ids.size(), 4u);
    EXPECT_EQ(std::set<std::uint64_t>(e.users.begin(), e.users.end()).size(), 4u);
  }
}

TEST(Windows, NothingBelowKappa) {
  std::vector<AnnotatedTweet> v{annotated(1, 1, kNoon, kNoon + 5), annotated(2, 2, kNoon, kNoon + 5)};
  EXPECT_TRUE(detect_attack_windows(v, AttackParams{}).empty());
  AttackParams bad;
  bad.kappa = 0;
  EXPECT_THROW(detect_attack_windows(v, bad), Error);
}

TEST(Windows, MatchesExhaustiveOracle) {
  Rng rng(77);
  for (int round = 0; round < 1500; ++round) {
    const int n = static_cast<int>(rng.uniform_int(0, 12));
    auto v = random_instance(rng, n);
    auto p = random_params(rng);
    auto events = detect_attack_windows(v, p);
    std::set<std::vector<std::uint64_t>> got;
    for (const auto& e : events) {
      EXPECT_TRUE(satisfies_attack_conditions(e, v, p));
      EXPECT_TRUE(got.insert(e.tweet_ids).second) << "duplicate event";
    }
    ASSERT_EQ(got, subset_oracle(v, p)) << "round " << round;
  }
}

TEST(Windows, EventsSatisfyConditionsOnLargerInstances) {
  Rng rng(78);
  for (int round = 0; round < 200; ++round) {
    auto v = random_instance(rng, static_cast<int>(rng.uniform_int(13, 60)));
    auto p = random_params(rng);
    for (const auto& e : detect_attack_windows(v, p)) {
      ASSERT_TRUE(satisfies_attack_conditions(e, v, p));
      EXPECT_LE(e.creation_window, p.alpha_p);
      EXPECT_LE(e.deletion_window, p.alpha_d);
      EXPECT_LE(e.max_lifetime, p.theta);
      EXPECT_GE(e.tweet_ids.size(), p.kappa);
    }
  }
}

TEST(Astrobots, ThreeTrendFixture) {
  const UtcOffset tz;
  auto lex = [](std::uint64_t id, std::uint64_t user, std::int64_t t) {
    return make_tweet(id, user, t, "bir iki üç #t", {"t"});
  };
  // trend A attacked: users 1,2 delete same day; user 3 keeps; user 4 deletes next day
  auto a = instance_of("#t", {lex(1, 1, kNoon), lex(2, 2, kNoon + 5), lex(3, 3, kNoon + 6),
                              lex(4, 4, kNoon + 7)},
                       {{1, Timestamp(kNoon + 60)},
                        {2, Timestamp(kNoon + 70)},
                        {4, Timestamp(kNoon + 86400)}});
  // trend B attacked: user 2 again, user 5 with a non-lexicon deleted tweet
  auto b = instance_of("#t", {lex(11, 2, kNoon), make_tweet(12, 5, kNoon, "Selam! #t", {"t"}),
                              lex(13, 6, kNoon)},
                       {{11, Timestamp(kNoon + 30)},
                        {12, Timestamp(kNoon + 30)},
                        {13, Timestamp(kNoon + 40)}});
  // trend C not attacked
  auto c = instance_of("#t", {lex(21, 7, kNoon)}, {{21, Timestamp(kNoon + 9)}});
  std::vector<TrendInstance> inst{a, b, c};
  std::vector<std::vector<TweetFlags>> flags;
  for (const auto& i : inst) flags.push_back(classify_instance(i));
  std::vector<Verdict> verdicts(3);
  verdicts[0].attacked = true;
  verdicts[1].attacked = true;
  auto bots = label_astrobots(inst, verdicts, flags, tz);
  EXPECT_EQ(bots, (std::set<std::uint64_t>{1, 2, 6}));
  EXPECT_THROW(label_astrobots(inst, std::vector<Verdict>(2), flags, tz), Error);
}

TEST(Scan, UnsuccessfulAttacks) {
  const Date day = Date::from_ymd(2019, 6, 18);
  std::vector<TweetEvent> ev;
  std::uint64_t id = 1;
  // attacked hashtag #kayip never trends
  for (int i = 0; i < 6; ++i) {
    ev.push_back(make_tweet(id, 100 + i, kNoon + i, "bir iki #Kayip", {"Kayip"}));
    ev.push_back(Deletion{id, static_cast<std::uint64_t>(100 + i), Timestamp(kNoon + 60 + i)});
    ++id;
  }
  // attacked hashtag #sonra trends the next day
  for (int i = 0; i < 6; ++i) {
    ev.push_back(make_tweet(id, 200 + i, kNoon + i, "üç dört #Sonra", {"Sonra"}));
    ev.push_back(Deletion{id, static_cast<std::uint64_t>(200 + i), Timestamp(kNoon + 60 + i)});
    ++id;
  }
  // organic burst, nothing deleted
  for (int i = 0; i < 8; ++i)
    ev.push_back(make_tweet(id++, 300 + i, kNoon + i, "Maç başladı! #Gol", {"Gol"}));
  // too small
  ev.push_back(make_tweet(id++, 400, kNoon, "beş altı #Az", {"Az"}));
  std::sort(ev.begin(), ev.end(), [](const TweetEvent& a, const TweetEvent& b) {
    return event_time(a) < event_time(b);
  });
  std::vector<TrendDay> known{{day + 1, normalize_keyword("#sonra", Locale())}};
  auto verdicts = scan_candidates(ev, known, DetectorConfig{}, 4);
  ASSERT_EQ(verdicts.size(), 2u);
  std::map<std::string, bool> got;
  for (const auto& v : verdicts) got[v.trend.keyword.normalized] = v.attacked;
  EXPECT_TRUE(got.at("kayip"));
  EXPECT_FALSE(got.at("gol"));
  EXPECT_EQ(verdicts[0].trend.date, day);
}

TEST(Output, VerdictJson) {
  DetectorConfig c;
  TrendRef ref{normalize_keyword("#x", Locale()), Date::from_ymd(2019, 6, 18), {}};
  auto v = classify_trend(lexicon_features(4, 0.9), c, ref);
  auto j = nlohmann::json::parse(verdict_json(v));
  EXPECT_EQ(j["trend"], "#x@2019-06-18");
  EXPECT_EQ(j["attacked"], true);
  ASSERT_EQ(j["fired_rules"].size(), 2u);
  EXPECT_EQ(j["fired_rules"][0]["rule"], "r8");
  EXPECT_EQ(j["features"]["n_deleted_lexicon"], 4);
  std::stringstream ss;
  write_astrobots(ss, {3, 1});
  EXPECT_EQ(ss.str(), "1\n3\n");
}

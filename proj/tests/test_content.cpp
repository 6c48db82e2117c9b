#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "trendguard/content.hpp"
#include "trendguard/simulator.hpp"

using namespace trendguard;
using namespace tgtest;

namespace {

Keyword kw(const char* s) { return normalize_keyword(s, Locale()); }

std::vector<std::string> negatives() {
  std::ifstream f(std::string(TG_FIXTURES) + "/lexicon_negatives.txt");
  std::vector<std::string> out;
  for (std::string line; std::getline(f, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

TEST(Strip, KeywordAndEmoji) {
  EXPECT_EQ(strip_keyword_and_emoji("apple to cycle #DonaldTrump trigonometry",
                                    kw("#donaldtrump")),
            "apple to cycle trigonometry");
  EXPECT_EQ(strip_keyword_and_emoji("#tag", kw("#tag")), "");
  EXPECT_EQ(strip_keyword_and_emoji("ok 😀 ok", kw("#x")), "ok ok");
  EXPECT_EQ(strip_emoji("a 👍🏽 b"), "a b");
  // other hashtags and longer tokens stay
  EXPECT_EQ(strip_keyword_and_emoji("#tagging #tag x", kw("#tag")), "#tagging x");
  EXPECT_EQ(strip_keyword_and_emoji("önce ysk'dan chp sonra", kw("YSK'dan CHP")),
            "önce sonra");
}

TEST(Lexicon, DictionaryStyleExamples) {
  EXPECT_TRUE(is_lexicon_tweet("tenkidi kaynaştırabilme siperisaika", kw("#x")));
  EXPECT_TRUE(is_lexicon_tweet("apple (fruit) to cycle serendipity #DonaldTrump trigonometry",
                               kw("#donaldtrump")));
  EXPECT_FALSE(is_lexicon_tweet("Easy come easy go.", kw("#x")));
  EXPECT_FALSE(is_lexicon_tweet("kelime", kw("#x")));
  EXPECT_FALSE(is_lexicon_tweet("İstanbul güzel", kw("#x")));
  EXPECT_FALSE(is_lexicon_tweet("", kw("#x")));
}

TEST(Lexicon, TokenBand) {
  EXPECT_TRUE(is_lexicon_text("a b"));
  EXPECT_TRUE(is_lexicon_text("a b c d e f g h i"));
  EXPECT_FALSE(is_lexicon_text("a b c d e f g h i j"));
  EXPECT_EQ(token_count("apple (fruit) to"), 3u);
  EXPECT_EQ(token_count(""), 0u);
}

TEST(Lexicon, CustomAlphabetAndBand) {
  LexiconRules rules;
  rules.alphabet = Alphabet(U"ab");
  rules.min_tokens = 1;
  rules.max_tokens = 2;
  EXPECT_TRUE(is_lexicon_text("ab", rules));
  EXPECT_FALSE(is_lexicon_text("abc", rules));
  EXPECT_FALSE(is_lexicon_text("a b a", rules));
}

TEST(Lexicon, CuratedNegativesAllRejected) {
  auto neg = negatives();
  ASSERT_EQ(neg.size(), 50u);
  for (const auto& s : neg) EXPECT_FALSE(is_lexicon_tweet(s, kw("#gündem"))) << s;
}

TEST(Lexicon, GeneratedTextAlwaysAccepted) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto s = gen_lexicon_text(default_wordlist(), rng);
    EXPECT_TRUE(is_lexicon_tweet(s, kw("#x"))) << s;
    const auto n = token_count(s);
    EXPECT_GE(n, 2u);
    EXPECT_LE(n, 9u);
  }
}

TEST(Lexicon, InvariantUnderWhitespaceAndKeyword) {
  Rng rng(4);
  auto k = kw("#Hedef");
  for (int i = 0; i < 500; ++i) {
    std::string s = gen_lexicon_text(default_wordlist(), rng);
    if (i % 2) s[0] = 'X';  // some negatives too
    const bool base = is_lexicon_tweet(s, k);
    EXPECT_EQ(is_lexicon_tweet("  " + s + " \t", k), base);
    EXPECT_EQ(is_lexicon_tweet("#Hedef " + s, k), base);
    EXPECT_EQ(is_lexicon_tweet(s + " #HEDEF", k), base);
  }
}

TEST(SingleEngagement, Rules) {
  auto k = kw("#x");
  Tweet t = make_tweet(1, 1, kNoon, "bir iki #x", {"x"});
  EXPECT_TRUE(is_single_engagement(t, k));
  Tweet m = t;
  m.mentions = {5};
  EXPECT_FALSE(is_single_engagement(m, k));
  Tweet rt = t;
  rt.is_retweet = true;
  EXPECT_FALSE(is_single_engagement(rt, k));
  Tweet rp = t;
  rp.is_reply = true;
  EXPECT_FALSE(is_single_engagement(rp, k));
  Tweet u = t;
  u.urls = 1;
  EXPECT_FALSE(is_single_engagement(u, k));
  Tweet h = t;
  h.hashtags.push_back("y");
  EXPECT_FALSE(is_single_engagement(h, k));
  Tweet in_text = make_tweet(1, 1, kNoon, "bir #iki #x", {"x"});
  EXPECT_FALSE(is_single_engagement(in_text, k));
  // n-gram keyword: no hashtag at all
  auto ng = kw("bir iki");
  EXPECT_TRUE(is_single_engagement(make_tweet(2, 1, kNoon, "bir iki"), ng));
  EXPECT_FALSE(is_single_engagement(make_tweet(2, 1, kNoon, "bir iki #x", {"x"}), ng));
}

TEST(SingleEngagement, MonotoneUnderAddedEntities) {
  Rng rng(9);
  auto k = kw("#x");
  for (int i = 0; i < 300; ++i) {
    Tweet t = make_tweet(1, 1, kNoon, gen_lexicon_text(default_wordlist(), rng) + " #x", {"x"});
    ASSERT_TRUE(is_single_engagement(t, k));
    Tweet v = t;
    switch (rng.uniform_int(0, 2)) {
      case 0: v.mentions.push_back(3); break;
      case 1: v.urls += 1; break;
      default: v.hashtags.push_back("other"); break;
    }
    EXPECT_FALSE(is_single_engagement(v, k));
  }
}

TEST(Classify, InstanceAligned) {
  auto inst = instance_of("#x", {make_tweet(1, 1, kNoon, "bir iki #x", {"x"}),
                                 make_tweet(2, 2, kNoon, "Merhaba! #x", {"x"})});
  auto f = classify_instance(inst);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_TRUE(f[0].is_lexicon);
  EXPECT_EQ(f[0].token_count, 2u);
  EXPECT_FALSE(f[1].is_lexicon);
  EXPECT_TRUE(f[1].is_single_engagement);
  auto u = classify_untargeted(make_tweet(3, 3, kNoon, "bir iki"));
  EXPECT_TRUE(u.is_lexicon);
  EXPECT_TRUE(u.is_single_engagement);
}

TEST(Stats, AllLexiconAllDeleted) {
  std::vector<Tweet> tweets;
  std::map<std::uint64_t, Timestamp> del;
  for (std::uint64_t i = 1; i <= 5; ++i) {
    tweets.push_back(make_tweet(i, i, kNoon, "bir iki #x", {"x"}));
    del[i] = Timestamp(kNoon + 10);
  }
  auto table = lexicon_stats(std::vector<TrendInstance>{instance_of("#x", tweets, del)}, {});
  EXPECT_DOUBLE_EQ(table.trend.deleted_lexicon_over_deleted(), 1.0);
  EXPECT_DOUBLE_EQ(table.trend.deleted_lexicon_over_lexicon(), 1.0);
  EXPECT_EQ(table.other.all, 0u);
  EXPECT_DOUBLE_EQ(table.other.deleted_lexicon_over_deleted(), 0.0);
}

TEST(Stats, HandCountedFixture) {
  // 10 deleted trend tweets, 3 of them lexicon; plus 2 kept lexicon
  std::vector<Tweet> tweets;
  std::map<std::uint64_t, Timestamp> del;
  for (std::uint64_t i = 1; i <= 10; ++i) {
    tweets.push_back(make_tweet(i, i, kNoon, i <= 3 ? "bir iki #x" : "Bir cümle. #x", {"x"}));
    del[i] = Timestamp(kNoon + 5);
  }
  tweets.push_back(make_tweet(11, 11, kNoon, "üç dört #x", {"x"}));
  tweets.push_back(make_tweet(12, 12, kNoon, "beş altı #x", {"x"}));
  std::vector<BackgroundTweet> bg{{make_tweet(20, 20, kNoon, "Selam!"), true},
                                  {make_tweet(21, 21, kNoon, "yedi sekiz"), true},
                                  {make_tweet(22, 22, kNoon, "dokuz on"), false}};
  auto inst = instance_of("#x", tweets, del);
  // the same tweets listed twice count once
  auto table = lexicon_stats(std::vector<TrendInstance>{inst, inst}, bg);
  EXPECT_EQ(table.trend.all, 12u);
  EXPECT_EQ(table.trend.deleted, 10u);
  EXPECT_EQ(table.trend.deleted_lexicon, 3u);
  EXPECT_EQ(table.trend.lexicon, 5u);
  EXPECT_DOUBLE_EQ(table.trend.deleted_lexicon_over_deleted(), 0.3);
  EXPECT_DOUBLE_EQ(table.trend.deleted_lexicon_over_lexicon(), 0.6);
  EXPECT_EQ(table.other.all, 3u);
  EXPECT_EQ(table.other.deleted_lexicon, 1u);
  std::stringstream out;
  table.write_csv(out);
  EXPECT_NE(out.str().find("deleted_lexicon_over_all_deleted,30.0%,50.0%"), std::string::npos)
      << out.str();
}

TEST(Stats, EmptyCorpusThrows) {
  try {
    lexicon_stats({}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyCorpus);
  }
}

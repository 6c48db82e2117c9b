#include "trendguard/detector.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "json.hpp"
#include "trendguard/text.hpp"

namespace trendguard {

void AttackParams::validate() const {
  if (kappa < 1) throw Error(Errc::BadParams, "kappa must be at least 1");
  if (alpha_p.seconds < 0 || alpha_d.seconds < 0 || theta.seconds < 0)
    throw Error(Errc::BadParams, "windows must be non-negative");
}

namespace {

void check_rule(int rule) {
  if (rule < 1 || rule > kRuleCount)
    throw Error(Errc::UnknownRule, "unknown rule r" + std::to_string(rule));
}

}  // namespace

std::string rule_feature_name(int rule) {
  check_rule(rule);
  static const char* const names[] = {
      "n_deleted",         "deletion_ratio",         "n_deleted_nonretweet",
      "nonretweet_deletion_ratio", "n_deleted_set",  "set_deletion_ratio",
      "initial_deletions", "n_deleted_lexicon",      "lexicon_deletion_ratio"};
  return names[rule - 1];
}

double rule_value(int rule, const FeatureVector& f) {
  check_rule(rule);
  switch (rule) {
    case 1: return static_cast<double>(f.n_deleted);
    case 2: return f.deletion_ratio;
    case 3: return static_cast<double>(f.n_deleted_nonretweet);
    case 4: return f.nonretweet_deletion_ratio;
    case 5: return static_cast<double>(f.n_deleted_set);
    case 6: return f.set_deletion_ratio;
    case 7: return static_cast<double>(f.initial_deletions);
    case 8: return static_cast<double>(f.n_deleted_lexicon);
    default: return f.lexicon_deletion_ratio;
  }
}

double default_threshold(int rule) {
  check_rule(rule);
  static const double values[] = {17, 0.25, 12, 0.34, 10, 0.50, 4, 4, 0.68};
  return values[rule - 1];
}

namespace {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view s) : s_(s) {}

  Formula parse() {
    Formula f;
    f.push_back(clause());
    while (eat('|')) f.push_back(clause());
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  Clause clause() {
    Clause c;
    c.push_back(condition());
    while (eat('&')) c.push_back(condition());
    return c;
  }

  Condition condition() {
    skip();
    if (pos_ >= s_.size() || (s_[pos_] != 'r' && s_[pos_] != 'R'))
      fail("expected a rule like r8");
    ++pos_;
    int rule = 0;
    auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), rule);
    if (ec != std::errc()) fail("expected a rule number");
    pos_ = static_cast<std::size_t>(p - s_.data());
    check_rule(rule);
    Condition c{rule, CmpOp::Ge, default_threshold(rule), false};
    skip();
    if (pos_ < s_.size() && s_[pos_] == '>') {
      ++pos_;
      c.op = CmpOp::Gt;
      if (pos_ < s_.size() && s_[pos_] == '=') {
        ++pos_;
        c.op = CmpOp::Ge;
      }
      skip();
      double v = 0;
      auto [q, ec2] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec2 != std::errc() || !std::isfinite(v)) fail("expected a threshold");
      pos_ = static_cast<std::size_t>(q - s_.data());
      c.threshold = v;
      skip();
      if (pos_ < s_.size() && s_[pos_] == '!') {
        ++pos_;
        c.pinned = true;
      }
    }
    return c;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) {
    throw Error(Errc::BadFormula,
                "bad formula at offset " + std::to_string(pos_) + ": " + why);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

std::string format_formula(const Formula& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += " | ";
    for (std::size_t j = 0; j < f[i].size(); ++j) {
      const auto& c = f[i][j];
      if (j) out += " & ";
      out += "r" + std::to_string(c.rule) + (c.op == CmpOp::Ge ? ">=" : ">") +
             format_real(c.threshold) + (c.pinned ? "!" : "");
    }
  }
  return out;
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::LexiconTree: return "lexicon-tree";
    case Preset::LexiconTreeStrict: return "lexicon-tree-strict";
    case Preset::LexiconAgnosticTree: return "lexicon-agnostic-tree";
    case Preset::RatioOnly: return "ratio-only";
    case Preset::NonretweetTree: return "nonretweet-tree";
    case Preset::Custom: return "custom";
  }
  return "custom";
}

Preset preset_from_name(std::string_view name) {
  for (Preset p : {Preset::LexiconTree, Preset::LexiconTreeStrict,
                   Preset::LexiconAgnosticTree, Preset::RatioOnly,
                   Preset::NonretweetTree, Preset::Custom})
    if (preset_name(p) == name) return p;
  throw Error(Errc::BadParams, "unknown preset '" + std::string(name) + "'");
}

Formula preset_formula(Preset p) {
  switch (p) {
    case Preset::LexiconTree: return parse_formula("r8>=4 & r9>0.45");
    case Preset::LexiconTreeStrict: return parse_formula("r8>=4 & r9>=0.68");
    case Preset::LexiconAgnosticTree:
      return parse_formula("r5>=10 & r6>=0.5 | r5>=4! & r7>=4");
    case Preset::RatioOnly: return parse_formula("r1>=17 & r2>=0.25");
    case Preset::NonretweetTree: return parse_formula("r3>=12 & r4>=0.34");
    case Preset::Custom: break;
  }
  throw Error(Errc::BadFormula, "custom preset needs a formula");
}

Formula DetectorConfig::resolve() const {
  Formula f = preset == Preset::Custom ? parse_formula(formula) : preset_formula(preset);
  for (const auto& [rule, value] : thresholds) {
    check_rule(rule);
    for (auto& clause : f)
      for (auto& c : clause)
        if (c.rule == rule && !c.pinned) c.threshold = value;
  }
  return f;
}

namespace {

bool holds(const Condition& c, double observed) {
  return c.op == CmpOp::Ge ? observed >= c.threshold : observed > c.threshold;
}

}  // namespace

Verdict classify_trend(const FeatureVector& features, const Formula& formula,
                       const TrendRef& trend) {
  Verdict v;
  v.trend = trend;
  v.features = features;
  for (const auto& clause : formula) {
    bool all = !clause.empty();
    for (const auto& c : clause) {
      const double observed = rule_value(c.rule, features);
      if (holds(c, observed)) {
        FiredRule fr{c.rule, c.op, c.threshold, observed};
        if (std::find(v.fired_rules.begin(), v.fired_rules.end(), fr) ==
            v.fired_rules.end())
          v.fired_rules.push_back(fr);
      } else {
        all = false;
      }
    }
    v.attacked = v.attacked || all;
  }
  return v;
}

Verdict classify_trend(const FeatureVector& features, const DetectorConfig& config,
                       const TrendRef& trend) {
  return classify_trend(features, config.resolve(), trend);
}

namespace {

constexpr std::size_t kMaxSelections = 4096;

struct Candidate {
  std::uint64_t id;
  std::uint64_t user;
  Timestamp p;
  Timestamp d;
};

AttackEvent make_event(std::vector<const Candidate*> members) {
  AttackEvent e;
  Timestamp p_lo = members.front()->p, p_hi = p_lo;
  Timestamp d_lo = members.front()->d, d_hi = d_lo;
  Duration life{0};
  for (const Candidate* c : members) {
    e.tweet_ids.push_back(c->id);
    e.users.push_back(c->user);
    p_lo = std::min(p_lo, c->p);
    p_hi = std::max(p_hi, c->p);
    d_lo = std::min(d_lo, c->d);
    d_hi = std::max(d_hi, c->d);
    life = std::max(life, c->d - c->p);
  }
  std::sort(e.tweet_ids.begin(), e.tweet_ids.end());
  std::sort(e.users.begin(), e.users.end());
  e.start = p_lo;
  e.end = d_hi;
  e.creation_window = p_hi - p_lo;
  e.deletion_window = d_hi - d_lo;
  e.max_lifetime = life;
  return e;
}

bool in_window(Timestamp x, Timestamp lo, Duration width) {
  return !(x < lo) && (x - lo) <= width;
}

}  // namespace

std::vector<AttackEvent> detect_attack_windows(std::span<const AnnotatedTweet> tweets,
                                               const AttackParams& params) {
  params.validate();
  std::vector<Candidate> cands;
  for (const auto& t : tweets) {
    if (!t.deleted_set()) continue;
    if (params.require_lexicon && !t.flags.is_lexicon) continue;
    if (*t.deleted_at < t.created_at) continue;
    if (*t.deleted_at - t.created_at > params.theta) continue;
    cands.push_back({t.id, t.user_id, t.created_at, *t.deleted_at});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.p, a.id) < std::tie(b.p, b.id);
  });
  if (cands.size() < params.kappa) return {};

  // A maximal cluster is one tweet per user out of the box spanned by its
  // earliest creation and earliest deletion, so every box anchored on an
  // actual member creation and deletion is tried.
  std::set<std::vector<std::size_t>> found;
  std::vector<std::size_t> in_box;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (i > 0 && cands[i].p == cands[i - 1].p) continue;
    const Timestamp c0 = cands[i].p;
    std::vector<std::size_t> window;
    for (std::size_t k = i; k < cands.size() && in_window(cands[k].p, c0, params.alpha_p);
         ++k)
      window.push_back(k);
    if (window.size() < params.kappa) continue;

    std::vector<Timestamp> anchors;
    for (std::size_t k : window) anchors.push_back(cands[k].d);
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

    std::vector<std::size_t> previous;
    for (const Timestamp d0 : anchors) {
      in_box.clear();
      bool has_first_creation = false;
      for (std::size_t k : window) {
        if (!in_window(cands[k].d, d0, params.alpha_d)) continue;
        in_box.push_back(k);
        has_first_creation = has_first_creation || cands[k].p == c0;
      }
      if (!has_first_creation || in_box.size() < params.kappa) continue;
      if (in_box == previous) continue;
      previous = in_box;

      std::map<std::uint64_t, std::vector<std::size_t>> by_user;
      for (std::size_t k : in_box) by_user[cands[k].user].push_back(k);
      if (by_user.size() < params.kappa) continue;

      std::size_t combos = 1;
      for (const auto& [u, ks] : by_user) {
        combos *= ks.size();
        if (combos > kMaxSelections) break;
      }
      if (combos > kMaxSelections) {
        std::vector<std::size_t> pick;
        for (const auto& [u, ks] : by_user) pick.push_back(ks.front());
        std::sort(pick.begin(), pick.end());
        found.insert(std::move(pick));
        continue;
      }
      std::vector<std::size_t> digit(by_user.size(), 0);
      while (true) {
        std::vector<std::size_t> pick;
        std::size_t slot = 0;
        for (const auto& [u, ks] : by_user) pick.push_back(ks[digit[slot++]]);
        std::sort(pick.begin(), pick.end());
        found.insert(std::move(pick));
        std::size_t pos = 0;
        auto it = by_user.begin();
        while (pos < digit.size()) {
          if (++digit[pos] < it->second.size()) break;
          digit[pos] = 0;
          ++pos;
          ++it;
        }
        if (pos == digit.size()) break;
      }
    }
  }

  std::vector<std::vector<std::size_t>> sets(found.begin(), found.end());
  std::stable_sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
    return a.size() > b.size();
  });
  std::vector<std::vector<std::size_t>> maximal;
  for (auto& s : sets) {
    const bool covered = std::any_of(maximal.begin(), maximal.end(), [&](const auto& m) {
      return std::includes(m.begin(), m.end(), s.begin(), s.end());
    });
    if (!covered) maximal.push_back(std::move(s));
  }

  std::vector<AttackEvent> events;
  for (const auto& m : maximal) {
    std::vector<const Candidate*> members;
    for (std::size_t k : m) members.push_back(&cands[k]);
    events.push_back(make_event(std::move(members)));
  }
  std::sort(events.begin(), events.end(), [](const AttackEvent& a, const AttackEvent& b) {
    return std::tie(a.start, a.tweet_ids) < std::tie(b.start, b.tweet_ids);
  });
  return events;
}

std::vector<AttackEvent> detect_attack_windows(const TrendInstance& instance,
                                               std::span<const TweetFlags> flags,
                                               const AttackParams& params) {
  return detect_attack_windows(annotate(instance, flags), params);
}

bool satisfies_attack_conditions(const AttackEvent& e,
                                 std::span<const AnnotatedTweet> tweets,
                                 const AttackParams& params) {
  if (e.tweet_ids.size() < params.kappa) return false;
  std::map<std::uint64_t, const AnnotatedTweet*> by_id;
  for (const auto& t : tweets) by_id[t.id] = &t;
  std::set<std::uint64_t> users;
  std::optional<Timestamp> p_lo, p_hi, d_lo, d_hi;
  for (auto id : e.tweet_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) return false;
    const AnnotatedTweet& t = *it->second;
    if (!t.deleted_set()) return false;
    if (params.require_lexicon && !t.flags.is_lexicon) return false;
    if (*t.deleted_at < t.created_at || *t.deleted_at - t.created_at > params.theta)
      return false;
    if (!users.insert(t.user_id).second) return false;
    if (!p_lo || t.created_at < *p_lo) p_lo = t.created_at;
    if (!p_hi || *p_hi < t.created_at) p_hi = t.created_at;
    if (!d_lo || *t.deleted_at < *d_lo) d_lo = *t.deleted_at;
    if (!d_hi || *d_hi < *t.deleted_at) d_hi = *t.deleted_at;
  }
  return *p_hi - *p_lo <= params.alpha_p && *d_hi - *d_lo <= params.alpha_d;
}

std::set<std::uint64_t> label_astrobots(std::span<const TrendInstance> instances,
                                        std::span<const Verdict> verdicts,
                                        std::span<const std::vector<TweetFlags>> flags,
                                        UtcOffset tz) {
  if (verdicts.size() != instances.size() || flags.size() != instances.size())
    throw Error(Errc::InconsistentData, "instances, verdicts and flags differ in size");
  std::set<std::uint64_t> bots;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!verdicts[i].attacked) continue;
    const auto& inst = instances[i];
    for (std::size_t j = 0; j < inst.tweets.size(); ++j) {
      const Tweet& t = inst.tweets[j];
      if (!flags[i][j].is_lexicon) continue;
      auto del = inst.deletion_of(t.id);
      if (!del || *del < t.created_at) continue;
      if (local_date(*del, tz) == local_date(t.created_at, tz)) bots.insert(t.user_id);
    }
  }
  return bots;
}

CandidateScanner::CandidateScanner(std::span<const TrendDay> known_trends,
                                   DetectorConfig config, std::size_t kappa,
                                   IngestOptions options)
    : formula_(config.resolve()), kappa_(kappa), options_(std::move(options)) {
  for (const auto& t : known_trends)
    if (t.keyword.kind == KeywordKind::Hashtag)
      known_.insert({t.date, text::decode_utf8(t.keyword.normalized)});
}

void CandidateScanner::add(const TweetEvent& e) {
  if (const auto* t = std::get_if<Tweet>(&e)) add_creation(*t);
  else add_deletion(std::get<Deletion>(e));
}

void CandidateScanner::add_creation(const Tweet& t) {
  const std::u32string folded = text::fold(text::decode_utf8(t.text), options_.locale);
  auto tags = text::hashtag_tokens(folded);
  if (tags.empty()) return;
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  const Date day = local_date(t.created_at, options_.tz);
  for (auto& tag : tags) {
    if (known_.count({day, tag}) || known_.count({day + 1, tag})) continue;
    Keyword kw{"#" + text::encode_utf8(tag), text::encode_utf8(tag),
               KeywordKind::Hashtag};
    Record r{t.id, t.user_id, t.created_at, t.is_retweet,
             classify_tweet(t, kw, options_.locale)};
    keys_[Key{day, std::move(tag)}].push_back(r);
    ++tracked_ids_[t.id];
  }
}

void CandidateScanner::add_deletion(const Deletion& d) {
  if (!tracked_ids_.count(d.tweet_id)) return;
  auto [it, inserted] = deletions_.try_emplace(d.tweet_id, d.time);
  if (!inserted && d.time < it->second) it->second = d.time;
}

std::vector<Verdict> CandidateScanner::finish() {
  std::vector<Verdict> out;
  for (auto& [key, records] : keys_) {
    // The same tweet can repeat when a creation is seen twice.
    std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
      return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
    });
    records.erase(std::unique(records.begin(), records.end(),
                              [](const Record& a, const Record& b) { return a.id == b.id; }),
                  records.end());
    if (records.size() < kappa_) continue;
    std::vector<AnnotatedTweet> tweets;
    tweets.reserve(records.size());
    for (const auto& r : records) {
      std::optional<Timestamp> del;
      if (auto it = deletions_.find(r.id);
          it != deletions_.end() && !(it->second < r.created_at))
        del = it->second;
      tweets.push_back({r.id, r.user_id, r.created_at, del, r.is_retweet, r.flags});
    }
    const std::string tag = text::encode_utf8(key.tag);
    TrendRef ref{Keyword{"#" + tag, tag, KeywordKind::Hashtag}, key.date, std::nullopt};
    out.push_back(classify_trend(compute_features(tweets), formula_, ref));
  }
  return out;
}

std::vector<Verdict> scan_candidates(std::span<const TweetEvent> events,
                                     std::span<const TrendDay> known_trends,
                                     const DetectorConfig& config, std::size_t kappa,
                                     const IngestOptions& options) {
  CandidateScanner scanner(known_trends, config, kappa, options);
  for (const auto& e : events)
    if (const auto* t = std::get_if<Tweet>(&e)) scanner.add_creation(*t);
  for (const auto& e : events)
    if (const auto* d = std::get_if<Deletion>(&e)) scanner.add_deletion(*d);
  return scanner.finish();
}

namespace {

using ojson = nlohmann::ordered_json;

ojson features_json(const FeatureVector& f) {
  ojson j;
  j["n_tweets"] = f.n_tweets;
  j["n_deleted"] = f.n_deleted;
  j["n_nonretweet"] = f.n_nonretweet;
  j["n_deleted_nonretweet"] = f.n_deleted_nonretweet;
  j["n_set"] = f.n_set;
  j["n_deleted_set"] = f.n_deleted_set;
  j["n_lexicon"] = f.n_lexicon;
  j["n_deleted_lexicon"] = f.n_deleted_lexicon;
  j["deletion_ratio"] = f.deletion_ratio;
  j["nonretweet_deletion_ratio"] = f.nonretweet_deletion_ratio;
  j["set_deletion_ratio"] = f.set_deletion_ratio;
  j["lexicon_deletion_ratio"] = f.lexicon_deletion_ratio;
  j["initial_deletions"] = f.initial_deletions;
  j["creation_window_s"] = f.creation_window.seconds;
  j["deletion_window_s"] = f.deletion_window.seconds;
  j["lifetime_median_s"] = f.lifetime_median ? ojson(*f.lifetime_median) : ojson(nullptr);
  j["lifetime_mean_s"] = f.lifetime_mean ? ojson(*f.lifetime_mean) : ojson(nullptr);
  j["entropy_create"] = f.entropy_create;
  j["entropy_delete"] = f.entropy_delete;
  return j;
}

}  // namespace

std::string verdict_json(const Verdict& v) {
  ojson j;
  j["trend"] = v.trend.label();
  j["keyword"] = v.trend.keyword.display();
  j["date"] = v.trend.date ? ojson(v.trend.date->iso()) : ojson(nullptr);
  j["attacked"] = v.attacked;
  ojson rules = ojson::array();
  for (const auto& r : v.fired_rules) {
    ojson fr;
    fr["rule"] = "r" + std::to_string(r.rule);
    fr["feature"] = rule_feature_name(r.rule);
    fr["op"] = r.op == CmpOp::Ge ? ">=" : ">";
    fr["threshold"] = r.threshold;
    fr["observed"] = r.observed;
    rules.push_back(std::move(fr));
  }
  j["fired_rules"] = std::move(rules);
  j["features"] = features_json(v.features);
  return j.dump();
}

void write_verdicts(std::ostream& out, std::span<const Verdict> verdicts) {
  for (const auto& v : verdicts) out << verdict_json(v) << '\n';
}

std::string attack_event_json(const TrendRef& trend, const AttackEvent& e) {
  ojson j;
  j["trend"] = trend.label();
  j["start"] = format_iso8601(e.start);
  j["end"] = format_iso8601(e.end);
  j["size"] = e.tweet_ids.size();
  j["creation_window_s"] = e.creation_window.seconds;
  j["deletion_window_s"] = e.deletion_window.seconds;
  j["max_lifetime_s"] = e.max_lifetime.seconds;
  j["tweet_ids"] = e.tweet_ids;
  j["users"] = e.users;
  return j.dump();
}

void write_astrobots(std::ostream& out, const std::set<std::uint64_t>& users) {
  for (auto u : users) out << u << '\n';
}

}  // namespace trendguard

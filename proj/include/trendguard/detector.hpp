#pragma once

// Rule-based trend classification, attack cluster search, astrobot labelling
// and the scan for hashtags that never made it to the trend list.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "trendguard/content.hpp"
#include "trendguard/features.hpp"
#include "trendguard/ingest.hpp"

namespace trendguard {

struct AttackParams {
  std::size_t kappa = 4;
  Duration alpha_p{300};
  Duration alpha_d{300};
  Duration theta{600};
  // Restrict clusters to lexicon tweets on top of single engagement.
  bool require_lexicon = false;

  // Throws Errc::BadParams.
  void validate() const;
};

// Rules 1..9 compare one feature each:
//   1 n_deleted                 2 deletion_ratio
//   3 n_deleted_nonretweet      4 nonretweet_deletion_ratio
//   5 n_deleted_set             6 set_deletion_ratio
//   7 initial_deletions         8 n_deleted_lexicon
//   9 lexicon_deletion_ratio
inline constexpr int kRuleCount = 9;

std::string rule_feature_name(int rule);
// Throws Errc::UnknownRule.
double rule_value(int rule, const FeatureVector& f);
// Threshold each rule uses when a formula does not give one.
double default_threshold(int rule);

enum class CmpOp { Ge, Gt };

struct Condition {
  int rule = 0;
  CmpOp op = CmpOp::Ge;
  double threshold = 0;
  // Pinned thresholds ignore DetectorConfig::thresholds overrides.
  bool pinned = false;

  bool operator==(const Condition&) const = default;
};

// Disjunction of conjunctions.
using Clause = std::vector<Condition>;
using Formula = std::vector<Clause>;

// Grammar: clause ('|' clause)*, clause: cond ('&' cond)*,
// cond: 'r'N ('>=' | '>') number, or a bare 'r'N using the rule's default
// threshold with '>='. Throws Errc::BadFormula, Errc::UnknownRule.
Formula parse_formula(std::string_view text);
std::string format_formula(const Formula& f);

enum class Preset {
  LexiconTree,
  LexiconTreeStrict,
  LexiconAgnosticTree,
  RatioOnly,
  NonretweetTree,
  Custom,
};

std::string preset_name(Preset p);
// Throws Errc::BadParams for unknown names.
Preset preset_from_name(std::string_view name);
Formula preset_formula(Preset p);

struct DetectorConfig {
  Preset preset = Preset::LexiconTree;
  std::string formula;                // used by Preset::Custom
  std::map<int, double> thresholds;   // rule id -> replacement threshold

  // Throws Errc::UnknownRule, Errc::BadFormula.
  Formula resolve() const;
};

struct FiredRule {
  int rule = 0;
  CmpOp op = CmpOp::Ge;
  double threshold = 0;
  double observed = 0;

  bool operator==(const FiredRule&) const = default;
};

struct Verdict {
  TrendRef trend;
  bool attacked = false;
  std::vector<FiredRule> fired_rules;  // satisfied conditions, formula order
  FeatureVector features;
};

Verdict classify_trend(const FeatureVector& features, const DetectorConfig& config,
                       const TrendRef& trend = {});
Verdict classify_trend(const FeatureVector& features, const Formula& formula,
                       const TrendRef& trend = {});

struct AttackEvent {
  std::vector<std::uint64_t> tweet_ids;  // ascending
  std::vector<std::uint64_t> users;      // ascending
  Timestamp start;                       // first creation
  Timestamp end;                         // last deletion
  Duration creation_window;
  Duration deletion_window;
  Duration max_lifetime;

  bool operator==(const AttackEvent&) const = default;
};

// Every inclusion-maximal set of deleted single-engagement tweets (lexicon
// too when params.require_lexicon) that has at least kappa members, one tweet
// per user, creations within alpha_p, deletions within alpha_d and every
// lifetime within theta. Sorted by (start, tweet_ids).
std::vector<AttackEvent> detect_attack_windows(std::span<const AnnotatedTweet> tweets,
                                               const AttackParams& params);
std::vector<AttackEvent> detect_attack_windows(const TrendInstance& instance,
                                               std::span<const TweetFlags> flags,
                                               const AttackParams& params);

// Checks one event against the params; used by tests and the simulator.
bool satisfies_attack_conditions(const AttackEvent& e,
                                 std::span<const AnnotatedTweet> tweets,
                                 const AttackParams& params);

// Users with a deleted lexicon tweet, removed on the local day it was posted,
// in any attacked instance. verdicts and flags align with instances.
std::set<std::uint64_t> label_astrobots(std::span<const TrendInstance> instances,
                                        std::span<const Verdict> verdicts,
                                        std::span<const std::vector<TweetFlags>> flags,
                                        UtcOffset tz = {});

// Streams the whole corpus and classifies every (hashtag, local day) with at
// least kappa tweets whose hashtag is not trending that day or the next.
// Feed every creation before the deletions; deletions of untracked tweets
// are dropped.
class CandidateScanner {
 public:
  CandidateScanner(std::span<const TrendDay> known_trends, DetectorConfig config,
                   std::size_t kappa, IngestOptions options);

  void add_creation(const Tweet& t);
  void add_deletion(const Deletion& d);
  void add(const TweetEvent& e);

  // Sorted by (date, keyword).
  std::vector<Verdict> finish();

  std::size_t tracked_keys() const { return keys_.size(); }

 private:
  struct Record {
    std::uint64_t id;
    std::uint64_t user_id;
    Timestamp created_at;
    bool is_retweet;
    TweetFlags flags;
  };
  struct Key {
    Date date;
    std::u32string tag;
    bool operator<(const Key& o) const {
      return std::tie(date, tag) < std::tie(o.date, o.tag);
    }
  };

  std::set<std::pair<Date, std::u32string>> known_;
  Formula formula_;
  std::size_t kappa_;
  IngestOptions options_;
  std::map<Key, std::vector<Record>> keys_;
  std::unordered_map<std::uint64_t, Timestamp> deletions_;
  std::unordered_map<std::uint64_t, std::uint32_t> tracked_ids_;
};

std::vector<Verdict> scan_candidates(std::span<const TweetEvent> events,
                                     std::span<const TrendDay> known_trends,
                                     const DetectorConfig& config,
                                     std::size_t kappa,
                                     const IngestOptions& options = {});

// One JSON object per line.
std::string verdict_json(const Verdict& v);
void write_verdicts(std::ostream& out, std::span<const Verdict> verdicts);
std::string attack_event_json(const TrendRef& trend, const AttackEvent& e);
void write_astrobots(std::ostream& out, const std::set<std::uint64_t>& users);

}  // namespace trendguard

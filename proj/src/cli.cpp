#include "trendguard/cli.hpp"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "trendguard/content.hpp"
#include "trendguard/csv.hpp"
#include "trendguard/detector.hpp"
#include "trendguard/features.hpp"
#include "trendguard/graph.hpp"
#include "trendguard/ingest.hpp"
#include "trendguard/metrics.hpp"
#include "trendguard/pipeline.hpp"
#include "trendguard/simulator.hpp"

namespace trendguard::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Bad flag values found after CLI11 is done; reported like parse errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string tmp_suffix() { return ".tmp." + std::to_string(::getpid()); }

// Written next to the target and renamed over it on commit; removed otherwise.
class AtomicFile {
 public:
  explicit AtomicFile(fs::path target) : target_(std::move(target)) {
    tmp_ = target_;
    tmp_ += tmp_suffix();
    if (target_.has_parent_path()) fs::create_directories(target_.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(Errc::Io, "cannot write " + target_.string());
  }
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile() {
    if (committed_) return;
    out_.close();
    std::error_code ec;
    fs::remove(tmp_, ec);
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw Error(Errc::Io, "write failed for " + target_.string());
    out_.close();
    fs::rename(tmp_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

// Single-file output, or stdout with --stdout.
class Sink {
 public:
  Sink(const std::string& path, bool to_stdout) {
    if (!to_stdout) file_ = std::make_unique<AtomicFile>(path);
  }
  std::ostream& stream() { return file_ ? file_->stream() : std::cout; }
  void commit() {
    if (file_) file_->commit();
    else std::cout.flush();
  }

 private:
  std::unique_ptr<AtomicFile> file_;
};

// Files written into a directory; on failure the ones this run created go away.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
    created_ = !fs::exists(dir_);
    fs::create_directories(dir_);
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir() {
    if (done_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    if (created_) fs::remove(dir_, ec);  // only if empty
  }

  const fs::path& path() const { return dir_; }

  template <typename Fn>
  void write(const std::string& name, Fn&& fn) {
    AtomicFile f(dir_ / name);
    fn(f.stream());
    f.commit();
    written_.push_back(dir_ / name);
  }

  void adopt(const fs::path& from, const std::string& name) {
    fs::rename(from, dir_ / name);
    written_.push_back(dir_ / name);
  }

  void finish() { done_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool created_ = false;
  bool done_ = false;
};

struct CommonFlags {
  unsigned jobs = 0;
  std::string locale;
  std::string tz = "+3";
};

struct DetectorFlags {
  std::string preset = "lexicon-tree";
  std::string formula;
  std::vector<std::string> thresholds;
};

struct AttackFlags {
  std::size_t kappa = 4;
  std::int64_t alpha_p = 300;
  std::int64_t alpha_d = 300;
  std::int64_t theta = 600;
  bool require_lexicon = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--jobs,-j", f.jobs, "Worker threads (0 = all cores)");
  app->add_option("--locale", f.locale,
                  "Case folding locale (default $TRENDGUARD_LOCALE, else tr)");
  app->add_option("--tz-offset", f.tz, "Local time offset, e.g. +3 or -05:30")
      ->capture_default_str();
}

void add_detector(CLI::App* app, DetectorFlags& f) {
  app->add_option("--preset", f.preset,
                  "lexicon-tree, lexicon-tree-strict, lexicon-agnostic-tree, "
                  "ratio-only, nonretweet-tree or custom")
      ->capture_default_str();
  app->add_option("--formula", f.formula,
                  "Rule formula for the custom preset, e.g. \"r8>=4 & r9>0.45\"");
  app->add_option("--threshold", f.thresholds, "Override a rule threshold, e.g. r9=0.68")
      ->take_all();
}

void add_attack(CLI::App* app, AttackFlags& f) {
  app->add_option("--kappa", f.kappa, "Minimum tweets in an attack")->capture_default_str();
  app->add_option("--alpha-p", f.alpha_p, "Creation window, seconds")->capture_default_str();
  app->add_option("--alpha-d", f.alpha_d, "Deletion window, seconds")->capture_default_str();
  app->add_option("--theta", f.theta, "Lifetime bound, seconds")->capture_default_str();
  app->add_flag("--require-lexicon", f.require_lexicon,
                "Attack clusters use lexicon tweets only");
}

Locale resolve_locale(const CommonFlags& f) {
  if (!f.locale.empty()) return Locale(f.locale);
  if (const char* env = std::getenv("TRENDGUARD_LOCALE"); env && *env) return Locale(env);
  return Locale();
}

IngestOptions ingest_options(const CommonFlags& f) {
  IngestOptions o;
  o.locale = resolve_locale(f);
  try {
    o.tz.seconds = parse_tz_offset(f.tz);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return o;
}

DetectorConfig detector_config(const DetectorFlags& f) {
  DetectorConfig c;
  try {
    c.preset = preset_from_name(f.preset);
    c.formula = f.formula;
    if (c.preset == Preset::Custom && f.formula.empty())
      throw UsageError("--preset custom needs --formula");
    if (c.preset != Preset::Custom && !f.formula.empty())
      throw UsageError("--formula needs --preset custom");
    for (const auto& t : f.thresholds) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw UsageError("bad --threshold '" + t + "'");
      std::string rule = t.substr(0, eq);
      if (!rule.empty() && (rule[0] == 'r' || rule[0] == 'R')) rule.erase(0, 1);
      std::size_t used = 0;
      int id = 0;
      double value = 0;
      try {
        id = std::stoi(rule, &used);
        if (used != rule.size()) throw std::invalid_argument(rule);
        value = std::stod(t.substr(eq + 1), &used);
        if (used != t.size() - eq - 1) throw std::invalid_argument(t);
      } catch (const std::logic_error&) {
        throw UsageError("bad --threshold '" + t + "'");
      }
      c.thresholds[id] = value;
    }
    c.resolve();  // surface formula errors before any work
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

AttackParams attack_params(const AttackFlags& f) {
  AttackParams p;
  p.kappa = f.kappa;
  p.alpha_p = Duration{f.alpha_p};
  p.alpha_d = Duration{f.alpha_d};
  p.theta = Duration{f.theta};
  p.require_lexicon = f.require_lexicon;
  try {
    p.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return p;
}

std::vector<TrendDay> read_trend_days(const std::string& path, const Locale& locale) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return load_trend_days(in, locale);
}

std::vector<TrendEpoch> read_epochs(const std::string& path, const Locale& locale) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return load_trend_epochs(in, locale);
}

std::vector<fs::path> to_paths(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

void report_stats(const JoinResult& j) {
  ojson s;
  s["lines_read"] = j.stats.lines_read;
  s["creations"] = j.stats.creations;
  s["deletions"] = j.stats.deletions;
  s["malformed_skipped"] = j.stats.malformed_skipped;
  s["other_skipped"] = j.stats.other_skipped;
  s["instances"] = j.instances.size();
  s["unmatched_deletions"] = j.unmatched_deletions;
  std::cerr << s.dump() << '\n';
}

struct Analysis {
  JoinResult joined;
  std::vector<AnalyzedTrend> trends;
};

Analysis run_analysis(const std::vector<std::string>& streams, const std::string& trends,
                      const IngestOptions& options, const DetectorConfig& config,
                      unsigned jobs, bool quiet) {
  Analysis a;
  const auto days = read_trend_days(trends, options.locale);
  const auto paths = to_paths(streams);
  a.joined = join_files(paths, days, options);
  if (!quiet) report_stats(a.joined);
  a.trends = analyze(std::move(a.joined.instances), config.resolve(), options.locale, jobs);
  a.joined.instances.clear();
  return a;
}

std::vector<Verdict> verdicts_of(const std::vector<AnalyzedTrend>& trends) {
  std::vector<Verdict> out;
  out.reserve(trends.size());
  for (const auto& t : trends) out.push_back(t.verdict);
  return out;
}

// ---- subcommands ----

struct IngestCmd {
  CommonFlags common;
  std::string trends;
  std::vector<std::string> streams;
  std::string out;
  bool to_stdout = false;

  void run() {
    const auto options = ingest_options(common);
    const auto days = read_trend_days(trends, options.locale);
    JoinResult j = join_files(to_paths(streams), days, options);
    report_stats(j);
    struct Keyed {
      Timestamp time;
      int kind;
      std::uint64_t id;
      const TrendInstance* inst;
      std::size_t index;
    };
    std::vector<Keyed> keyed;
    std::set<std::uint64_t> seen;
    for (const auto& inst : j.instances)
      for (std::size_t i = 0; i < inst.tweets.size(); ++i) {
        const auto& t = inst.tweets[i];
        if (!seen.insert(t.id).second) continue;
        keyed.push_back({t.created_at, 0, t.id, &inst, i});
        if (auto d = inst.deletion_of(t.id)) keyed.push_back({*d, 1, t.id, &inst, i});
      }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
      return std::tie(a.time, a.kind, a.id) < std::tie(b.time, b.kind, b.id);
    });
    Sink sink(out, to_stdout);
    for (const auto& k : keyed) {
      const Tweet& t = k.inst->tweets[k.index];
      if (k.kind == 0) sink.stream() << serialize_event(t) << '\n';
      else sink.stream() << serialize_event(Deletion{t.id, t.user_id, k.time}) << '\n';
    }
    sink.commit();
  }
};

struct FeaturesCmd {
  CommonFlags common;
  std::string trends;
  std::vector<std::string> streams;
  std::string out;
  bool to_stdout = false;

  void run() {
    const auto options = ingest_options(common);
    Analysis a = run_analysis(streams, trends, options, DetectorConfig{}, common.jobs, false);
    Sink sink(out, to_stdout);
    write_feature_header(sink.stream());
    for (const auto& t : a.trends)
      write_feature_row(sink.stream(), t.instance.trend, t.verdict.features);
    sink.commit();
  }
};

struct DetectCmd {
  CommonFlags common;
  DetectorFlags detector;
  AttackFlags attack;
  std::string trends;
  std::vector<std::string> streams;
  std::string out;
  std::string astrobots;
  std::string events;
  bool to_stdout = false;

  void run() {
    const auto options = ingest_options(common);
    const auto config = detector_config(detector);
    const auto params = attack_params(attack);
    Analysis a = run_analysis(streams, trends, options, config, common.jobs, false);
    const auto verdicts = verdicts_of(a.trends);

    // Opened up front so a bad path fails before the output is written.
    std::unique_ptr<AtomicFile> bots_file, events_file;
    if (!astrobots.empty()) bots_file = std::make_unique<AtomicFile>(astrobots);
    if (!events.empty()) events_file = std::make_unique<AtomicFile>(events);

    Sink sink(out, to_stdout);
    write_verdicts(sink.stream(), verdicts);

    if (bots_file) {
      std::vector<TrendInstance> instances;
      std::vector<std::vector<TweetFlags>> flags;
      for (const auto& t : a.trends) {
        instances.push_back(t.instance);
        flags.push_back(t.flags);
      }
      write_astrobots(bots_file->stream(), label_astrobots(instances, verdicts, flags, options.tz));
    }
    if (events_file) {
      std::vector<std::string> lines(a.trends.size());
      parallel_for(a.trends.size(), common.jobs, [&](std::size_t i) {
        const auto& t = a.trends[i];
        for (const auto& e : detect_attack_windows(t.instance, t.flags, params))
          lines[i] += attack_event_json(t.instance.trend, e) + "\n";
      });
      for (const auto& l : lines) events_file->stream() << l;
    }
    sink.commit();
    if (bots_file) bots_file->commit();
    if (events_file) events_file->commit();
  }
};

struct ScanCmd {
  CommonFlags common;
  DetectorFlags detector;
  std::size_t kappa = 4;
  std::string trends;
  std::vector<std::string> streams;
  std::string out;
  bool attacked_only = false;
  bool to_stdout = false;

  void run() {
    const auto options = ingest_options(common);
    const auto config = detector_config(detector);
    if (kappa < 1) throw UsageError("--kappa must be at least 1");
    const auto days = read_trend_days(trends, options.locale);
    CandidateScanner scanner(days, config, kappa, options);
    for (const auto& p : streams)
      for_each_event_in_file(
          p, [&](TweetEvent&& e) { scanner.add_creation(std::get<Tweet>(e)); },
          EventFilter::CreationsOnly);
    for (const auto& p : streams)
      for_each_event_in_file(
          p, [&](TweetEvent&& e) { scanner.add_deletion(std::get<Deletion>(e)); },
          EventFilter::DeletionsOnly);
    auto verdicts = scanner.finish();
    if (attacked_only)
      std::erase_if(verdicts, [](const Verdict& v) { return !v.attacked; });
    Sink sink(out, to_stdout);
    write_verdicts(sink.stream(), verdicts);
    sink.commit();
  }
};

struct MetricsCmd {
  CommonFlags common;
  DetectorFlags detector;
  std::string epochs;
  std::string trends;
  std::vector<std::string> streams;
  std::string out;
  int top_k = 10;
  std::int64_t interval = 300;

  void run() {
    const auto options = ingest_options(common);
    const auto config = detector_config(detector);
    if (top_k < 1 || top_k > static_cast<int>(kMaxTrendListSize))
      throw UsageError("--top-k must be in [1,50]");
    if (interval < 1) throw UsageError("--epoch-interval must be positive");
    if (!streams.empty() && trends.empty()) throw UsageError("--stream needs --trends");
    const Duration step{interval};
    const auto list = read_epochs(epochs, options.locale);
    const auto lifecycles = all_lifecycles(list, step);

    std::optional<Analysis> a;
    if (!streams.empty())
      a = run_analysis(streams, trends, options, config, common.jobs, false);

    OutputDir dir(out);
    dir.write("lifecycles.csv", [&](std::ostream& o) { write_lifecycles(o, lifecycles); });
    dir.write("entry_hours.csv", [&](std::ostream& o) {
      write_hour_histogram(o, entry_hour_histogram(lifecycles, options.tz));
    });
    if (a) {
      const auto verdicts = verdicts_of(a->trends);
      std::vector<TrendInstance> instances;
      std::vector<std::vector<TweetFlags>> flags;
      for (const auto& t : a->trends) {
        instances.push_back(t.instance);
        flags.push_back(t.flags);
      }
      dir.write("prevalence.csv", [&](std::ostream& o) {
        write_prevalence(o, prevalence(verdicts, list, top_k, options.tz));
      });
      dir.write("volume.csv", [&](std::ostream& o) {
        write_volume_report(o, volume_report(instances, verdicts, list, options.tz));
      });
      dir.write("speed.csv", [&](std::ostream& o) { write_speed(o, a->trends, list, step, options); });
      const auto bots = label_astrobots(instances, verdicts, flags, options.tz);
      dir.write("travel.csv", [&](std::ostream& o) { write_travel(o, instances, bots); });
    }
    dir.finish();
  }

  // Entry on the trend's own local day.
  static void write_speed(std::ostream& o, const std::vector<AnalyzedTrend>& trends,
                          const std::vector<TrendEpoch>& list, Duration step,
                          const IngestOptions& options) {
    std::map<Date, std::vector<TrendEpoch>> by_day;
    for (const auto& e : list) by_day[local_date(e.captured_at, options.tz)].push_back(e);
    csv::write_row(o, {"trend", "attacked", "first_entry", "speed_seconds",
                       "pre_entry_deletion_ratio"});
    for (const auto& t : trends) {
      const auto& ref = t.instance.trend;
      if (!ref.date) continue;
      auto it = by_day.find(*ref.date);
      if (it == by_day.end()) continue;
      TrendLifecycle life;
      try {
        life = lifecycle(ref.keyword, it->second, step);
      } catch (const Error& e) {
        if (e.code() == Errc::NeverTrended) continue;
        throw;
      }
      std::string speed;
      try {
        speed = std::to_string(trend_speed(t.instance, life).seconds);
      } catch (const Error& e) {
        if (e.code() != Errc::NoPriorTweets) throw;
        continue;
      }
      csv::write_row(o, {ref.label(), t.verdict.attacked ? "1" : "0",
                         format_iso8601(life.first_entry), speed,
                         format_real(pre_entry_deletion_ratio(t.instance, life))});
    }
  }

  static void write_travel(std::ostream& o, const std::vector<TrendInstance>& instances,
                           const std::set<std::uint64_t>& bots) {
    std::map<std::uint64_t, std::map<std::uint64_t, GeoSample>> per_user;
    for (const auto& inst : instances)
      for (const auto& t : inst.tweets)
        if (t.geo) per_user[t.user_id].emplace(t.id, GeoSample{t.created_at, *t.geo});
    csv::write_row(o, {"user", "class", "points", "distance_km"});
    for (const auto& [user, samples] : per_user) {
      std::vector<GeoSample> v;
      for (const auto& [id, s] : samples) v.push_back(s);
      std::stable_sort(v.begin(), v.end(),
                       [](const GeoSample& a, const GeoSample& b) { return a.time < b.time; });
      double km = 0;
      try {
        km = user_travel_distance(v);
      } catch (const Error& e) {
        if (e.code() != Errc::InsufficientPoints) throw;
        continue;
      }
      csv::write_row(o, {std::to_string(user), bots.count(user) ? "astrobot" : "other",
                         std::to_string(v.size()), format_real(km)});
    }
  }
};

struct GraphCmd {
  CommonFlags common;
  DetectorFlags detector;
  std::string trends;
  std::vector<std::string> streams;
  std::string out;
  std::string which = "attack";
  std::size_t k = 0;
  bool filter_single = false;
  bool unweighted = false;
  std::uint64_t seed = 1;
  std::int64_t dormancy_days = 365;

  void run() {
    const auto options = ingest_options(common);
    const auto config = detector_config(detector);
    if (which != "attack" && which != "undeleted")
      throw UsageError("--partition must be attack or undeleted");
    Analysis a = run_analysis(streams, trends, options, config, common.jobs, false);
    std::vector<TrendInstance> instances;
    std::vector<std::vector<TweetFlags>> flags;
    for (auto& t : a.trends)
      if (t.verdict.attacked) {
        instances.push_back(std::move(t.instance));
        flags.push_back(std::move(t.flags));
      }
    Graph attack = build_graph(instances, flags, EdgePredicate::DeletedLexicon);
    Graph undeleted = build_graph(instances, flags, EdgePredicate::Undeleted);

    Graph g = which == "attack" ? attack : undeleted;
    if (filter_single) g = single_attack_filter(g);
    if (k > 0) g = k_core(g, k);
    Partition p;
    if (g.node_count() > 0) p = louvain(g, seed, !unweighted);
    const auto activity = user_activity(instances, flags);
    const auto summary = g.node_count() > 0
                             ? community_summary(g, p, activity, Duration::days(dormancy_days))
                             : std::vector<CommunitySummary>{};

    OutputDir dir(out);
    dir.write("edges_attack.csv", [&](std::ostream& o) { write_edges(o, attack); });
    dir.write("edges_undeleted.csv", [&](std::ostream& o) { write_edges(o, undeleted); });
    dir.write("partition.csv", [&](std::ostream& o) { write_partition(o, g, p); });
    dir.write("communities.csv",
              [&](std::ostream& o) { write_community_summary(o, summary); });
    dir.write("summary.json", [&](std::ostream& o) {
      ojson j;
      j["attacked_trends"] = instances.size();
      j["partitioned"] = which;
      j["nodes"] = g.node_count();
      j["edges"] = g.edge_count();
      j["communities"] = p.community_count();
      j["modularity"] = p.modularity;
      j["user_overlap"] = user_overlap(attack, undeleted);
      o << j.dump(2) << '\n';
    });
    dir.finish();
  }
};

struct SimulateCmd {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool gzip = false;

  void run() {
    ScenarioConfig c;
    try {
      if (!config.empty()) c = load_scenario_file(config);
      for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("bad --set '" + s + "'");
        set_scenario_value(c, s.substr(0, eq), s.substr(eq + 1));
      }
      if (seed) c.seed = *seed;
      c.validate();
    } catch (const Error& e) {
      if (e.code() == Errc::BadConfig) throw UsageError(e.what());
      throw;
    }
    const LabeledStream s = simulate(c);

    OutputDir dir(out);
    fs::path staging = fs::path(out).lexically_normal();
    if (staging.filename().empty()) staging = staging.parent_path();
    staging += tmp_suffix();
    struct Cleanup {
      fs::path p;
      ~Cleanup() {
        std::error_code ec;
        fs::remove_all(p, ec);
      }
    } cleanup{staging};
    write_labeled_stream(staging, s, c, gzip);
    for (const char* name : {gzip ? "stream.jsonl.gz" : "stream.jsonl", "trends.csv",
                             "epochs.csv", "truth.csv", "bots.txt", "scenario.conf"})
      dir.adopt(staging / name, name);
    dir.finish();
    std::cerr << "events " << s.events.size() << ", trend days " << s.trend_days.size()
              << ", bots " << s.bots.size() << '\n';
  }
};

struct EvaluateCmd {
  CommonFlags common;
  DetectorFlags detector;
  std::string sim;
  std::string out;

  void run(bool tz_given) {
    CommonFlags flags = common;
    const fs::path dir(sim);
    if (!tz_given && fs::exists(dir / "scenario.conf")) {
      const auto c = load_scenario_file(dir / "scenario.conf");
      flags.tz = std::to_string(c.tz.seconds / 3600);
      if (c.tz.seconds >= 0) flags.tz = "+" + flags.tz;
    }
    const auto options = ingest_options(flags);
    const auto config = detector_config(detector);
    fs::path stream = dir / "stream.jsonl";
    if (!fs::exists(stream)) stream = dir / "stream.jsonl.gz";
    if (!fs::exists(stream)) throw Error(Errc::Io, "no stream.jsonl[.gz] in " + sim);
    std::ifstream truth_in(dir / "truth.csv");
    if (!truth_in) throw Error(Errc::Io, "cannot open " + (dir / "truth.csv").string());
    const auto truth = load_truth(truth_in, options.locale);

    Analysis a = run_analysis({stream.string()}, (dir / "trends.csv").string(), options,
                              config, common.jobs, true);
    const auto report = score_verdicts(verdicts_of(a.trends), truth);
    if (!out.empty()) {
      AtomicFile f(out);
      f.stream() << report.json() << '\n';
      f.commit();
    }
    std::cout << report.json() << std::endl;
  }
};

}  // namespace

int parse_tz_offset(const std::string& text) {
  auto bad = [&]() -> int { throw Error(Errc::BadParams, "bad timezone offset '" + text + "'"); };
  std::string_view s = text;
  if (s.empty()) return bad();
  int sign = 1;
  if (s.front() == '+' || s.front() == '-') {
    sign = s.front() == '-' ? -1 : 1;
    s.remove_prefix(1);
  }
  auto digits = [&](std::string_view d) {
    if (d.empty() || d.size() > 2) bad();
    int v = 0;
    for (char ch : d) {
      if (ch < '0' || ch > '9') bad();
      v = v * 10 + (ch - '0');
    }
    return v;
  };
  int hours = 0, minutes = 0;
  if (auto colon = s.find(':'); colon != std::string_view::npos) {
    hours = digits(s.substr(0, colon));
    minutes = digits(s.substr(colon + 1));
  } else {
    hours = digits(s);
  }
  if (hours > 14 || minutes > 59) bad();
  return sign * (hours * 3600 + minutes * 60);
}

int run(int argc, char** argv) {
  CLI::App app{"trendguard: find post-and-delete trend manipulation in tweet archives"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  IngestCmd ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Join a stream to trend days, keep matched tweets");
  add_common(c_ingest, ingest.common);
  c_ingest->add_option("--trends", ingest.trends, "Trend days CSV (date,keyword)")
      ->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--stream", ingest.streams, "Archive files (.json, .gz, .bz2)")
      ->required()->check(CLI::ExistingFile);
  auto* o_ingest = c_ingest->add_option("--out", ingest.out, "Output JSON lines");
  c_ingest->add_flag("--stdout", ingest.to_stdout, "Write to stdout instead of --out");

  FeaturesCmd features;
  auto* c_features = app.add_subcommand("features", "Per-trend feature table");
  add_common(c_features, features.common);
  c_features->add_option("--trends", features.trends, "Trend days CSV")
      ->required()->check(CLI::ExistingFile);
  c_features->add_option("--stream", features.streams, "Archive files")
      ->required()->check(CLI::ExistingFile);
  auto* o_features = c_features->add_option("--out", features.out, "Output CSV");
  c_features->add_flag("--stdout", features.to_stdout, "Write to stdout instead of --out");

  DetectCmd detect;
  auto* c_detect = app.add_subcommand("detect", "Classify trend days as attacked or not");
  add_common(c_detect, detect.common);
  add_detector(c_detect, detect.detector);
  add_attack(c_detect, detect.attack);
  c_detect->add_option("--trends", detect.trends, "Trend days CSV")
      ->required()->check(CLI::ExistingFile);
  c_detect->add_option("--stream", detect.streams, "Archive files")
      ->required()->check(CLI::ExistingFile);
  auto* o_detect = c_detect->add_option("--out", detect.out, "Verdicts, JSON lines");
  c_detect->add_option("--astrobots", detect.astrobots, "Also write astrobot user ids here");
  c_detect->add_option("--events", detect.events, "Also write attack clusters (JSON lines)");
  c_detect->add_flag("--stdout", detect.to_stdout, "Write verdicts to stdout");

  ScanCmd scan;
  auto* c_scan = app.add_subcommand("scan", "Classify hashtag days that never trended");
  add_common(c_scan, scan.common);
  add_detector(c_scan, scan.detector);
  c_scan->add_option("--kappa", scan.kappa, "Minimum tweets per hashtag day")
      ->capture_default_str();
  c_scan->add_option("--trends", scan.trends, "Known trend days CSV")
      ->required()->check(CLI::ExistingFile);
  c_scan->add_option("--stream", scan.streams, "Archive files")
      ->required()->check(CLI::ExistingFile);
  auto* o_scan = c_scan->add_option("--out", scan.out, "Verdicts, JSON lines");
  c_scan->add_flag("--attacked-only", scan.attacked_only, "Keep positive verdicts only");
  c_scan->add_flag("--stdout", scan.to_stdout, "Write verdicts to stdout");

  MetricsCmd metrics;
  auto* c_metrics = app.add_subcommand("metrics", "Trend lifecycles, speed, prevalence, volume");
  add_common(c_metrics, metrics.common);
  add_detector(c_metrics, metrics.detector);
  c_metrics->add_option("--epochs", metrics.epochs, "Trend epochs CSV")
      ->required()->check(CLI::ExistingFile);
  c_metrics->add_option("--trends", metrics.trends, "Trend days CSV")
      ->check(CLI::ExistingFile);
  c_metrics->add_option("--stream", metrics.streams, "Archive files")
      ->check(CLI::ExistingFile);
  c_metrics->add_option("--out", metrics.out, "Output directory")->required();
  c_metrics->add_option("--top-k", metrics.top_k, "List depth for prevalence")
      ->capture_default_str();
  c_metrics->add_option("--epoch-interval", metrics.interval, "Seconds between epochs")
      ->capture_default_str();

  GraphCmd graph;
  auto* c_graph = app.add_subcommand("graph", "User-trend graphs of attacked trends");
  add_common(c_graph, graph.common);
  add_detector(c_graph, graph.detector);
  c_graph->add_option("--trends", graph.trends, "Trend days CSV")
      ->required()->check(CLI::ExistingFile);
  c_graph->add_option("--stream", graph.streams, "Archive files")
      ->required()->check(CLI::ExistingFile);
  c_graph->add_option("--out", graph.out, "Output directory")->required();
  c_graph->add_option("--partition", graph.which, "Graph to partition: attack or undeleted")
      ->capture_default_str();
  c_graph->add_option("--k-core", graph.k, "Keep the k-core first (0 = off)")
      ->capture_default_str();
  c_graph->add_flag("--filter-single", graph.filter_single,
                    "Drop users linked to a single trend");
  c_graph->add_flag("--unweighted", graph.unweighted, "Ignore edge weights");
  c_graph->add_option("--seed", graph.seed, "Louvain seed")->capture_default_str();
  c_graph->add_option("--dormancy-days", graph.dormancy_days, "Dormancy threshold")
      ->capture_default_str();

  SimulateCmd simulate_cmd;
  auto* c_sim = app.add_subcommand("simulate", "Write a labelled synthetic stream");
  c_sim->add_option("--config", simulate_cmd.config, "Scenario file (key = value)")
      ->check(CLI::ExistingFile);
  c_sim->add_option("--set", simulate_cmd.sets, "Override one scenario key, e.g. n_days=3");
  c_sim->add_option("--seed", simulate_cmd.seed, "Random seed");
  c_sim->add_option("--out", simulate_cmd.out, "Output directory")->required();
  c_sim->add_flag("--gzip", simulate_cmd.gzip, "Compress the stream");

  EvaluateCmd evaluate_cmd;
  auto* c_eval = app.add_subcommand("evaluate", "Score a detector on a simulated directory");
  add_common(c_eval, evaluate_cmd.common);
  add_detector(c_eval, evaluate_cmd.detector);
  c_eval->add_option("--sim", evaluate_cmd.sim, "Directory written by simulate")
      ->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--out", evaluate_cmd.out, "Also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto need_out = [](CLI::Option* out, bool to_stdout) {
    if (!to_stdout && out->count() == 0) throw UsageError("--out or --stdout is required");
    if (to_stdout && out->count() > 0) throw UsageError("--out and --stdout are exclusive");
  };

  try {
    try {
      if (c_ingest->parsed()) {
        need_out(o_ingest, ingest.to_stdout);
        ingest.run();
      } else if (c_features->parsed()) {
        need_out(o_features, features.to_stdout);
        features.run();
      } else if (c_detect->parsed()) {
        need_out(o_detect, detect.to_stdout);
        detect.run();
      } else if (c_scan->parsed()) {
        need_out(o_scan, scan.to_stdout);
        scan.run();
      } else if (c_metrics->parsed()) {
        metrics.run();
      } else if (c_graph->parsed()) {
        graph.run();
      } else if (c_sim->parsed()) {
        simulate_cmd.run();
      } else if (c_eval->parsed()) {
        evaluate_cmd.run(c_eval->get_option("--tz-offset")->count() > 0);
      }
    } catch (const UsageError& e) {
      std::cerr << "trendguard: " << e.what() << "\nRun with --help for usage.\n";
      return kExitUsage;
    }
  } catch (const Error& e) {
    std::cerr << "trendguard: error (" << errc_name(e.code()) << "): " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "trendguard: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace trendguard::cli

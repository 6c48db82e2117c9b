#include "trendguard/ingest.hpp"

#include <algorithm>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>
#include <charconv>
#include <fstream>
#include <set>

#include "json.hpp"
#include "trendguard/csv.hpp"
#include "trendguard/text.hpp"

namespace trendguard {

using nlohmann::json;

Timestamp event_time(const TweetEvent& e) {
  if (const auto* t = std::get_if<Tweet>(&e)) return t->created_at;
  return std::get<Deletion>(e).time;
}

ParseStats& ParseStats::operator+=(const ParseStats& o) {
  lines_read += o.lines_read;
  creations += o.creations;
  deletions += o.deletions;
  malformed_skipped += o.malformed_skipped;
  other_skipped += o.other_skipped;
  return *this;
}

namespace {

std::optional<std::uint64_t> as_u64(const json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0) return std::nullopt;
    return static_cast<std::uint64_t>(v);
  }
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size() && !s.empty()) return v;
  }
  return std::nullopt;
}

std::optional<std::int64_t> as_i64(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size() && !s.empty()) return v;
  }
  return std::nullopt;
}

// Prefers the string form of an id, which survives JSON number rounding.
std::optional<std::uint64_t> id_field(const json& obj, const char* name) {
  const std::string str_name = std::string(name) + "_str";
  if (auto it = obj.find(str_name); it != obj.end())
    if (auto v = as_u64(*it)) return v;
  if (auto it = obj.find(name); it != obj.end()) return as_u64(*it);
  return std::nullopt;
}

bool present(const json& obj, const char* name) {
  auto it = obj.find(name);
  return it != obj.end() && !it->is_null();
}

std::string strip_tags(const std::string& s) {
  std::string out;
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') in_tag = true;
    else if (c == '>') in_tag = false;
    else if (!in_tag) out.push_back(c);
  }
  return out;
}

LineResult parse_status(const json& j) {
  auto id = id_field(j, "id");
  if (!id) return Malformed{"status without id"};
  auto user_it = j.find("user");
  if (user_it == j.end() || !user_it->is_object())
    return Malformed{"status without user"};
  auto user = id_field(*user_it, "id");
  if (!user) return Malformed{"status without user id"};

  Tweet t;
  t.id = *id;
  t.user_id = *user;

  bool have_time = false;
  if (auto it = j.find("timestamp_ms"); it != j.end()) {
    if (auto ms = as_i64(*it)) {
      t.created_at = Timestamp::from_millis(*ms);
      have_time = true;
    }
  }
  if (!have_time) {
    auto it = j.find("created_at");
    if (it == j.end() || !it->is_string()) return Malformed{"status without time"};
    try {
      t.created_at = parse_twitter_time(it->get_ref<const std::string&>());
    } catch (const Error& e) {
      return Malformed{e.what()};
    }
  }

  const json* entities = nullptr;
  if (auto ext = j.find("extended_tweet"); ext != j.end() && ext->is_object()) {
    if (auto ft = ext->find("full_text"); ft != ext->end() && ft->is_string())
      t.text = ft->get<std::string>();
    if (auto en = ext->find("entities"); en != ext->end() && en->is_object())
      entities = &*en;
  }
  if (t.text.empty()) {
    if (auto ft = j.find("full_text"); ft != j.end() && ft->is_string())
      t.text = ft->get<std::string>();
    else if (auto tx = j.find("text"); tx != j.end() && tx->is_string())
      t.text = tx->get<std::string>();
  }
  if (!entities)
    if (auto en = j.find("entities"); en != j.end() && en->is_object())
      entities = &*en;

  if (entities) {
    if (auto h = entities->find("hashtags"); h != entities->end() && h->is_array())
      for (const auto& tag : *h)
        if (tag.is_object())
          if (auto tx = tag.find("text"); tx != tag.end() && tx->is_string())
            t.hashtags.push_back(tx->get<std::string>());
    if (auto m = entities->find("user_mentions");
        m != entities->end() && m->is_array())
      for (const auto& mention : *m)
        if (mention.is_object())
          t.mentions.push_back(id_field(mention, "id").value_or(0));
    if (auto u = entities->find("urls"); u != entities->end() && u->is_array())
      t.urls = static_cast<std::uint32_t>(u->size());
  }

  t.is_retweet = present(j, "retweeted_status");
  t.is_reply = present(j, "in_reply_to_status_id") ||
               present(j, "in_reply_to_status_id_str");

  auto read_point = [](const json& g, bool lon_first) -> std::optional<GeoPoint> {
    if (!g.is_object()) return std::nullopt;
    auto c = g.find("coordinates");
    if (c == g.end() || !c->is_array() || c->size() != 2 || !(*c)[0].is_number() ||
        !(*c)[1].is_number())
      return std::nullopt;
    const double a = (*c)[0].get<double>();
    const double b = (*c)[1].get<double>();
    try {
      return lon_first ? GeoPoint(b, a) : GeoPoint(a, b);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  if (auto c = j.find("coordinates"); c != j.end()) t.geo = read_point(*c, true);
  if (!t.geo)
    if (auto g = j.find("geo"); g != j.end()) t.geo = read_point(*g, false);

  if (auto l = j.find("lang"); l != j.end() && l->is_string())
    t.lang = l->get<std::string>();
  if (auto s = j.find("source"); s != j.end() && s->is_string())
    t.source_app = strip_tags(s->get<std::string>());

  return TweetEvent{std::move(t)};
}

LineResult parse_delete(const json& del) {
  if (!del.is_object()) return Malformed{"delete is not an object"};
  auto st = del.find("status");
  if (st == del.end() || !st->is_object()) return Malformed{"delete without status"};
  auto id = id_field(*st, "id");
  if (!id) return Malformed{"delete without id"};
  auto user = id_field(*st, "user_id");
  auto ts = del.find("timestamp_ms");
  if (ts == del.end()) return Malformed{"delete without timestamp_ms"};
  auto ms = as_i64(*ts);
  if (!ms) return Malformed{"bad timestamp_ms"};
  return TweetEvent{Deletion{*id, user.value_or(0), Timestamp::from_millis(*ms)}};
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

bool looks_like_delete(std::string_view line) {
  const auto p = line.find_first_not_of(" \t");
  if (p == std::string_view::npos || line[p] != '{') return false;
  const auto q = line.find_first_not_of(" \t", p + 1);
  return q != std::string_view::npos && line.substr(q, 8) == "\"delete\"";
}

}  // namespace

LineResult parse_stream_line(std::string_view line) {
  if (blank(line)) return Skip{};
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) return Malformed{"invalid JSON"};
  if (!j.is_object()) return Skip{};
  if (auto d = j.find("delete"); d != j.end()) return parse_delete(*d);
  if (j.contains("created_at") && (j.contains("text") || j.contains("full_text") ||
                                   j.contains("id") || j.contains("id_str")))
    return parse_status(j);
  return Skip{};
}

ParseStats for_each_event(std::istream& source, Compression compression,
                          const EventVisitor& visit, EventFilter filter) {
  namespace io = boost::iostreams;
  if (compression == Compression::Auto) {
    char magic[3] = {0, 0, 0};
    source.read(magic, 3);
    const auto got = source.gcount();
    source.clear();
    for (auto i = got; i > 0; --i) source.putback(magic[i - 1]);
    if (!source) throw Error(Errc::Io, "cannot rewind input stream");
    if (got >= 2 && static_cast<unsigned char>(magic[0]) == 0x1f &&
        static_cast<unsigned char>(magic[1]) == 0x8b)
      compression = Compression::Gzip;
    else if (got == 3 && magic[0] == 'B' && magic[1] == 'Z' && magic[2] == 'h')
      compression = Compression::Bzip2;
    else
      compression = Compression::None;
  }

  io::filtering_istream in;
  if (compression == Compression::Gzip) in.push(io::gzip_decompressor());
  if (compression == Compression::Bzip2) in.push(io::bzip2_decompressor());
  in.push(source);

  ParseStats stats;
  std::string line;
  try {
    while (std::getline(in, line)) {
      ++stats.lines_read;
      if (filter != EventFilter::All && !blank(line)) {
        const bool del = looks_like_delete(line);
        if ((filter == EventFilter::CreationsOnly && del) ||
            (filter == EventFilter::DeletionsOnly && !del)) {
          ++stats.other_skipped;
          continue;
        }
      }
      LineResult r = parse_stream_line(line);
      if (auto* ev = std::get_if<TweetEvent>(&r)) {
        const bool is_creation = std::holds_alternative<Tweet>(*ev);
        if ((filter == EventFilter::CreationsOnly && !is_creation) ||
            (filter == EventFilter::DeletionsOnly && is_creation)) {
          ++stats.other_skipped;
          continue;
        }
        if (is_creation) ++stats.creations;
        else ++stats.deletions;
        visit(std::move(*ev));
      } else if (std::holds_alternative<Malformed>(r)) {
        ++stats.malformed_skipped;
      } else {
        ++stats.other_skipped;
      }
    }
  } catch (const io::gzip_error& e) {
    throw Error(Errc::Io, std::string("gzip: ") + e.what());
  } catch (const io::bzip2_error& e) {
    throw Error(Errc::Io, std::string("bzip2: ") + e.what());
  } catch (const std::ios_base::failure& e) {
    throw Error(Errc::Io, e.what());
  }
  if (in.bad()) throw Error(Errc::Io, "read error");
  return stats;
}

ParseStats for_each_event_in_file(const std::filesystem::path& path,
                                  const EventVisitor& visit, EventFilter filter,
                                  Compression compression) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string());
  return for_each_event(f, compression, visit, filter);
}

StreamContents read_stream(std::istream& source, Compression compression) {
  StreamContents out;
  out.stats = for_each_event(source, compression, [&](TweetEvent&& e) {
    out.events.push_back(std::move(e));
  });
  return out;
}

std::string serialize_event(const TweetEvent& e) {
  using ojson = nlohmann::ordered_json;
  if (const auto* d = std::get_if<Deletion>(&e)) {
    ojson status;
    status["id"] = d->tweet_id;
    status["id_str"] = std::to_string(d->tweet_id);
    status["user_id"] = d->user_id;
    status["user_id_str"] = std::to_string(d->user_id);
    ojson del;
    del["status"] = std::move(status);
    del["timestamp_ms"] = std::to_string(d->time.total_millis());
    ojson root;
    root["delete"] = std::move(del);
    return root.dump();
  }
  const auto& t = std::get<Tweet>(e);
  ojson j;
  j["created_at"] = format_twitter_time(t.created_at);
  j["id"] = t.id;
  j["id_str"] = std::to_string(t.id);
  j["text"] = t.text;
  if (t.source_app)
    j["source"] = "<a href=\"http://twitter.com\" rel=\"nofollow\">" +
                  *t.source_app + "</a>";
  j["in_reply_to_status_id"] = t.is_reply ? ojson(1) : ojson(nullptr);
  ojson user;
  user["id"] = t.user_id;
  user["id_str"] = std::to_string(t.user_id);
  j["user"] = std::move(user);
  if (t.geo) {
    ojson geo;
    geo["type"] = "Point";
    geo["coordinates"] = {t.geo->lat(), t.geo->lon()};
    ojson coords;
    coords["type"] = "Point";
    coords["coordinates"] = {t.geo->lon(), t.geo->lat()};
    j["geo"] = std::move(geo);
    j["coordinates"] = std::move(coords);
  } else {
    j["geo"] = nullptr;
    j["coordinates"] = nullptr;
  }
  if (t.is_retweet) j["retweeted_status"] = ojson::object();
  ojson entities;
  entities["hashtags"] = ojson::array();
  for (const auto& h : t.hashtags) entities["hashtags"].push_back({{"text", h}});
  entities["urls"] = ojson::array();
  for (std::uint32_t i = 0; i < t.urls; ++i)
    entities["urls"].push_back({{"url", "https://t.co/x" + std::to_string(i)}});
  entities["user_mentions"] = ojson::array();
  for (auto m : t.mentions)
    entities["user_mentions"].push_back({{"id", m}, {"id_str", std::to_string(m)}});
  j["entities"] = std::move(entities);
  if (t.lang) j["lang"] = *t.lang;
  j["timestamp_ms"] = std::to_string(t.created_at.total_millis());
  return j.dump();
}

std::vector<TrendEpoch> load_trend_epochs(std::istream& source,
                                          const Locale& locale) {
  csv::Reader reader(source);
  const auto c_time = reader.column("captured_at");
  const auto c_loc = reader.column("location");
  const auto c_rank = reader.column("rank");
  const auto c_kw = reader.column("keyword");
  const auto c_vol = reader.column("volume");
  const std::size_t width = std::max({c_time, c_loc, c_rank, c_kw, c_vol}) + 1;

  std::map<std::pair<Timestamp, std::string>, std::vector<TrendEntry>> grouped;
  while (auto row = reader.next()) {
    if (row->size() < width)
      throw Error(Errc::BadCsv, "short row at line " + std::to_string(reader.line()));
    const Timestamp at = parse_iso8601((*row)[c_time]);
    TrendEntry entry;
    const std::string& rank = (*row)[c_rank];
    auto [p, ec] = std::from_chars(rank.data(), rank.data() + rank.size(), entry.rank);
    if (ec != std::errc() || p != rank.data() + rank.size())
      throw Error(Errc::BadRank, "bad rank '" + rank + "'");
    entry.keyword = normalize_keyword((*row)[c_kw], locale);
    const std::string& vol = (*row)[c_vol];
    if (!vol.empty()) {
      std::int64_t v = 0;
      auto [q, ec2] = std::from_chars(vol.data(), vol.data() + vol.size(), v);
      if (ec2 != std::errc() || q != vol.data() + vol.size())
        throw Error(Errc::BadCsv, "bad volume '" + vol + "'");
      entry.volume = v;
    }
    grouped[{at, (*row)[c_loc]}].push_back(std::move(entry));
  }

  std::vector<TrendEpoch> epochs;
  epochs.reserve(grouped.size());
  for (auto& [key, entries] : grouped) {
    std::sort(entries.begin(), entries.end(),
              [](const TrendEntry& a, const TrendEntry& b) { return a.rank < b.rank; });
    if (entries.size() > kMaxTrendListSize)
      throw Error(Errc::BadRank, "more than 50 entries in one epoch");
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].rank != static_cast<int>(i + 1))
        throw Error(Errc::BadRank, "ranks in epoch " + format_iso8601(key.first) +
                                       " are not 1..n");
    epochs.push_back(TrendEpoch{key.first, key.second, std::move(entries)});
  }
  return epochs;
}

void write_trend_epochs(std::ostream& out, std::span<const TrendEpoch> epochs) {
  csv::write_row(out, {"captured_at", "location", "rank", "keyword", "volume"});
  for (const auto& e : epochs)
    for (const auto& entry : e.entries)
      csv::write_row(out, {format_iso8601(e.captured_at), e.location,
                           std::to_string(entry.rank), entry.keyword.raw,
                           entry.volume ? std::to_string(*entry.volume) : ""});
}

std::vector<TrendDay> load_trend_days(std::istream& source, const Locale& locale) {
  csv::Reader reader(source);
  const auto c_date = reader.column("date");
  const auto c_kw = reader.column("keyword");
  std::vector<TrendDay> days;
  std::set<std::pair<Date, Keyword>> seen;
  while (auto row = reader.next()) {
    if (row->size() <= std::max(c_date, c_kw))
      throw Error(Errc::BadCsv, "short row at line " + std::to_string(reader.line()));
    TrendDay d{Date::parse_iso((*row)[c_date]), normalize_keyword((*row)[c_kw], locale)};
    if (seen.insert({d.date, d.keyword}).second) days.push_back(std::move(d));
  }
  return days;
}

void write_trend_days(std::ostream& out, std::span<const TrendDay> days) {
  csv::write_row(out, {"date", "keyword"});
  for (const auto& d : days)
    csv::write_row(out, {d.date.iso(), d.keyword.raw.empty() ? d.keyword.display()
                                                             : d.keyword.raw});
}

namespace {

bool match_folded(const std::u32string& folded, const Keyword& keyword,
                  const std::u32string& needle) {
  if (keyword.kind == KeywordKind::Hashtag) {
    for (const auto& tag : text::hashtag_tokens(folded))
      if (tag == needle) return true;
    return false;
  }
  const std::u32string hay = text::collapse_spaces(folded);
  if (needle.empty() || hay.size() < needle.size()) return false;
  const bool check_before = text::is_word_char(needle.front());
  const bool check_after = text::is_word_char(needle.back());
  for (std::size_t pos = hay.find(needle); pos != std::u32string::npos;
       pos = hay.find(needle, pos + 1)) {
    const std::size_t end = pos + needle.size();
    if (check_before && pos > 0 && text::is_word_char(hay[pos - 1])) continue;
    if (check_after && end < hay.size() && text::is_word_char(hay[end])) continue;
    return true;
  }
  return false;
}

}  // namespace

bool match_keyword(std::string_view text, const Keyword& keyword,
                   const Locale& locale) {
  const std::u32string folded = text::fold(text::decode_utf8(text), locale);
  return match_folded(folded, keyword, text::decode_utf8(keyword.normalized));
}

std::string TrendRef::label() const {
  std::string s = keyword.display();
  if (date) s += "@" + date->iso();
  else if (first_entry) s += "@" + format_iso8601(*first_entry);
  return s;
}

std::optional<Timestamp> TrendInstance::deletion_of(std::uint64_t tweet_id) const {
  if (auto it = deletions.find(tweet_id); it != deletions.end()) return it->second;
  return std::nullopt;
}

bool TrendInstance::operator==(const TrendInstance& o) const {
  return trend.label() == o.trend.label() && tweets == o.tweets &&
         deletions == o.deletions && rejected_deletions == o.rejected_deletions;
}

TrendJoiner::TrendJoiner(std::vector<TrendDay> trends, IngestOptions options)
    : trends_(std::move(trends)), options_(std::move(options)),
      members_(trends_.size()) {
  for (std::size_t i = 0; i < trends_.size(); ++i) {
    const auto& kw = trends_[i].keyword;
    if (kw.kind == KeywordKind::Hashtag)
      hashtag_index_[text::decode_utf8(kw.normalized)].push_back(i);
    else
      ngram_index_[trends_[i].date].push_back(i);
  }
}

void TrendJoiner::add(const TweetEvent& e) {
  if (const auto* t = std::get_if<Tweet>(&e)) add_creation(*t);
  else add_deletion(std::get<Deletion>(e));
}

namespace {

bool prefer(const Tweet& a, const Tweet& b) {
  return std::tie(a.created_at, a.text, a.user_id) <
         std::tie(b.created_at, b.text, b.user_id);
}

}  // namespace

void TrendJoiner::add_creation(const Tweet& t) {
  const Date day = local_date(t.created_at, options_.tz);
  std::vector<std::size_t> hits;
  const std::u32string folded =
      text::fold(text::decode_utf8(t.text), options_.locale);

  if (!hashtag_index_.empty()) {
    auto tags = text::hashtag_tokens(folded);
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    for (const auto& tag : tags) {
      auto it = hashtag_index_.find(tag);
      if (it == hashtag_index_.end()) continue;
      for (std::size_t i : it->second)
        if (trends_[i].date == day || trends_[i].date == day + 1) hits.push_back(i);
    }
  }
  for (const Date d : {day, day + 1}) {
    auto it = ngram_index_.find(d);
    if (it == ngram_index_.end()) continue;
    for (std::size_t i : it->second) {
      const auto& kw = trends_[i].keyword;
      if (match_folded(folded, kw, text::decode_utf8(kw.normalized)))
        hits.push_back(i);
    }
  }
  if (hits.empty()) return;

  auto [it, inserted] = pool_.try_emplace(t.id, t);
  if (!inserted) {
    if (prefer(t, it->second)) it->second = t;
  }
  for (std::size_t i : hits) {
    auto& m = members_[i];
    if (inserted || std::find(m.begin(), m.end(), t.id) == m.end()) m.push_back(t.id);
  }
}

void TrendJoiner::add_deletion(const Deletion& d) {
  if (options_.retain_unmatched) {
    auto [it, inserted] = unmatched_.try_emplace(d.tweet_id, d.time);
    if (!inserted) {
      // Keep every notice for the reconciliation in finish(): the earliest one
      // lives in unmatched_, the rest in late_.
      late_.emplace_back(d.tweet_id, d.time);
    }
    return;
  }
  if (pool_.count(d.tweet_id)) attach(d.tweet_id, d.time);
  else ++unmatched_count_;
}

void TrendJoiner::attach(std::uint64_t id, Timestamp when) {
  const Tweet& t = pool_.at(id);
  if (when < t.created_at) {
    ++rejected_[id];
    return;
  }
  auto [it, inserted] = deletions_.try_emplace(id, when);
  if (!inserted && when < it->second) it->second = when;
}

std::vector<TrendInstance> TrendJoiner::finish() {
  if (options_.retain_unmatched) {
    for (const auto& [id, when] : late_)
      if (pool_.count(id)) attach(id, when);
    late_.clear();
    for (auto it = unmatched_.begin(); it != unmatched_.end();) {
      if (pool_.count(it->first)) {
        attach(it->first, it->second);
        it = unmatched_.erase(it);
      } else {
        ++it;
      }
    }
    unmatched_count_ = unmatched_.size();
  }

  std::vector<TrendInstance> out;
  out.reserve(trends_.size());
  for (std::size_t i = 0; i < trends_.size(); ++i) {
    TrendInstance inst;
    inst.trend = TrendRef{trends_[i].keyword, trends_[i].date, std::nullopt};
    for (auto id : members_[i]) {
      inst.tweets.push_back(pool_.at(id));
      if (auto d = deletions_.find(id); d != deletions_.end())
        inst.deletions.emplace(id, d->second);
      if (auto r = rejected_.find(id); r != rejected_.end())
        inst.rejected_deletions += r->second;
    }
    std::sort(inst.tweets.begin(), inst.tweets.end(),
              [](const Tweet& a, const Tweet& b) {
                return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
              });
    out.push_back(std::move(inst));
  }
  return out;
}

TrendInstance build_trend_instance(const TrendDay& trend,
                                   std::span<const TweetEvent> events,
                                   const IngestOptions& options) {
  IngestOptions opts = options;
  opts.retain_unmatched = true;
  TrendJoiner joiner({trend}, opts);
  for (const auto& e : events) joiner.add(e);
  return std::move(joiner.finish().front());
}

}  // namespace trendguard

#include "trendguard/csv.hpp"

#include "trendguard/core.hpp"

namespace trendguard::csv {

Reader::Reader(std::istream& in) : in_(in) {
  auto h = read_record();
  if (!h) throw Error(Errc::BadCsv, "missing CSV header");
  header_ = std::move(*h);
  if (!header_.empty() && header_[0].rfind("\xEF\xBB\xBF", 0) == 0)
    header_[0].erase(0, 3);
}

std::optional<std::size_t> Reader::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  return std::nullopt;
}

std::size_t Reader::column(std::string_view name) const {
  if (auto i = find_column(name)) return *i;
  throw Error(Errc::BadCsv, "missing CSV column '" + std::string(name) + "'");
}

std::optional<Row> Reader::next() {
  while (true) {
    auto r = read_record();
    if (!r) return std::nullopt;
    if (r->size() == 1 && r->front().empty()) continue;
    return r;
  }
}

std::optional<Row> Reader::read_record() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_;
  Row row;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i >= line.size()) {
      if (quoted) {
        // Quoted field spanning lines.
        std::string more;
        if (!std::getline(in_, more))
          throw Error(Errc::BadCsv, "unterminated quoted field");
        ++line_;
        field.push_back('\n');
        line = std::move(more);
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c != '\r' || i + 1 != line.size()) {
      field.push_back(c);
    }
    ++i;
  }
  row.push_back(std::move(field));
  return row;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

}  // namespace trendguard::csv

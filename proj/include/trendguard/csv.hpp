#pragma once

// Minimal RFC 4180 reading and writing; enough for the trend and report files.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace trendguard::csv {

using Row = std::vector<std::string>;

class Reader {
 public:
  // Reads the header row immediately. Throws Errc::BadCsv when it is missing.
  explicit Reader(std::istream& in);

  const Row& header() const { return header_; }
  // Column index by name; throws Errc::BadCsv if absent.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  // Next non-empty record, or nullopt at end of input.
  std::optional<Row> next();
  std::size_t line() const { return line_; }

 private:
  std::optional<Row> read_record();

  std::istream& in_;
  Row header_;
  std::size_t line_ = 0;
};

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

}  // namespace trendguard::csv

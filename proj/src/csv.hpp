#pragma once
// Minimal CSV reading for the pre-extracted corpora: comma separated, no
// quoting, header row required. Lines starting with '#' are comments.
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "pga/units.hpp"

namespace pga::csv {

inline std::string trim(std::string s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  while (!s.empty() && !not_space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && !not_space(s[i])) ++i;
  return s.substr(i);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  out.push_back(trim(cell));
  return out;
}

struct Row {
  std::size_t line{0};  // 1-based, header is line 1
  std::vector<std::string> cells;
};

class Table {
 public:
  // Reads the header and the non-blank rows. `required` columns must all be
  // present; extra columns are ignored.
  Table(std::istream& in, const std::vector<std::string>& required) {
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++n;
      const std::string content = trim(line);
      if (content.empty() || content.front() == '#') continue;
      if (!have_header) {
        const auto names = split(line);
        for (std::size_t i = 0; i < names.size(); ++i) index_[names[i]] = i;
        for (const auto& r : required)
          if (!index_.count(r)) throw ParseError("line " + std::to_string(n) + ": missing column '" + r + "'");
        width_ = names.size();
        have_header = true;
        continue;
      }
      Row row{n, split(line)};
      if (row.cells.size() != width_)
        throw ParseError("line " + std::to_string(n) + ": expected " + std::to_string(width_) + " fields, got " +
                         std::to_string(row.cells.size()));
      rows_.push_back(std::move(row));
    }
    if (!have_header) throw ParseError("line 1: missing header");
  }

  const std::vector<Row>& rows() const noexcept { return rows_; }
  const std::string& cell(const Row& row, const std::string& column) const {
    return row.cells[index_.at(column)];
  }

 private:
  std::map<std::string, std::size_t> index_;
  std::size_t width_{0};
  std::vector<Row> rows_;
};

// Runs `parse` on one row, prefixing any failure with the row's line number.
template <class F>
auto with_line(const Row& row, F&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const std::exception& e) {
    throw ParseError("line " + std::to_string(row.line) + ": " + e.what());
  }
}

}  // namespace pga::csv

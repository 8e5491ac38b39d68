#include "parkcast/csv.hpp"

#include <cstdio>
#include <istream>

#include "parkcast/errors.hpp"

namespace parkcast {

void split_line(const std::string& line, char delimiter,
                std::vector<std::string>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
    out.back().pop_back();
}

CsvReader::CsvReader(std::istream& in, char delimiter)
    : in_(in), delimiter_(delimiter) {
  std::string line;
  if (!std::getline(in_, line))
    throw SchemaError("empty input: no header row");
  split_line(line, delimiter_, header_);
  for (std::size_t i = 0; i < header_.size(); ++i) index_[header_[i]] = i;
}

bool CsvReader::has_column(const std::string& name) const {
  return index_.count(name) != 0;
}

std::size_t CsvReader::column(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw SchemaError("missing mandatory column '" + name + "' in header");
  return it->second;
}

bool CsvReader::next_row(std::vector<std::string>& cells) {
  std::string line;
  while (std::getline(in_, line)) {
    if (line.empty() || line == "\r") continue;
    split_line(line, delimiter_, cells);
    cells.resize(header_.size());
    ++rows_read_;
    return true;
  }
  return false;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace parkcast

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace parkcast {

/// Minimal reader for comma-separated text with one header row.
/// Cells are plain (no quoting); empty cells read as empty strings.
class CsvReader {
 public:
  CsvReader(std::istream& in, char delimiter = ',');

  const std::vector<std::string>& header() const { return header_; }
  bool has_column(const std::string& name) const;

  /// Column index for a header name; SchemaError if absent.
  std::size_t column(const std::string& name) const;

  /// Reads the next data row into `cells`. Returns false at end of input.
  /// Rows shorter than the header are padded with empty cells.
  bool next_row(std::vector<std::string>& cells);

  std::size_t rows_read() const { return rows_read_; }

 private:
  std::istream& in_;
  char delimiter_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
  std::size_t rows_read_ = 0;
};

void split_line(const std::string& line, char delimiter,
                std::vector<std::string>& out);

std::string format_double(double v);

}  // namespace parkcast

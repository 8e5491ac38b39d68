#include "parkcast/series.hpp"

#include <istream>
#include <ostream>

#include "parkcast/csv.hpp"
#include "parkcast/errors.hpp"

namespace parkcast {

FeatureSetting feature_setting_from_int(int v) {
  if (v < 1 || v > 4)
    throw ConfigError("feature setting must be 1..4, got " + std::to_string(v));
  return static_cast<FeatureSetting>(v);
}

void write_columns(std::ostream& out, const TimeGrid& grid,
                   const std::vector<std::string>& names,
                   const std::vector<const std::vector<double>*>& columns,
                   const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "timestamp";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < grid.length; ++i) {
    out << format_timestamp(grid.instant(i));
    for (const auto* col : columns) out << ',' << format_double((*col)[i]);
    out << '\n';
  }
}

void write_frame_csv(std::ostream& out, const FeatureFrame& frame,
                     const std::string& comment) {
  std::vector<std::string> names;
  std::vector<const std::vector<double>*> cols;
  for (std::size_t i = 0; i < frame.lot_order.size(); ++i) {
    names.push_back("avail:" + frame.lot_order[i]);
    cols.push_back(&frame.lot_channels[i]);
  }
  for (int m = 0; m < kNumModes; ++m) {
    names.push_back(std::string("demand:") + kModeNames[m]);
    cols.push_back(&frame.demand_channels[m]);
  }
  write_columns(out, frame.grid, names, cols, comment);
}

FeatureFrame read_frame_csv(std::istream& in) {
  // Skip leading comment lines.
  std::string line;
  std::streampos pos = in.tellg();
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') break;
    pos = in.tellg();
  }
  in.seekg(pos);

  CsvReader reader(in);
  FeatureFrame frame;
  std::vector<std::size_t> lot_cols;
  std::array<std::size_t, kNumModes> demand_cols{};
  const auto& header = reader.header();
  if (header.empty() || header[0] != "timestamp")
    throw SchemaError("frame file must start with a timestamp column");
  for (std::size_t i = 1; i < header.size(); ++i) {
    const std::string& h = header[i];
    if (h.rfind("avail:", 0) == 0) {
      frame.lot_order.push_back(h.substr(6));
      lot_cols.push_back(i);
    } else if (h.rfind("demand:", 0) == 0) {
      auto mode = mode_from_name(h.substr(7));
      if (!mode) throw SchemaError("unknown demand channel '" + h + "'");
      demand_cols[static_cast<int>(*mode)] = i;
    } else {
      throw SchemaError("unexpected frame column '" + h + "'");
    }
  }
  frame.lot_channels.resize(frame.lot_order.size());

  std::vector<std::string> cells;
  std::vector<Timestamp> stamps;
  while (reader.next_row(cells)) {
    auto t = parse_timestamp(cells[0]);
    if (!t) throw DataError("bad timestamp in frame file: '" + cells[0] + "'");
    stamps.push_back(*t);
    for (std::size_t j = 0; j < lot_cols.size(); ++j)
      frame.lot_channels[j].push_back(std::stod(cells[lot_cols[j]]));
    for (int m = 0; m < kNumModes; ++m)
      frame.demand_channels[m].push_back(std::stod(cells[demand_cols[m]]));
  }
  if (stamps.empty()) throw DataError("frame file has no rows");
  frame.grid.start = stamps.front();
  frame.grid.length = stamps.size();
  frame.grid.step = stamps.size() > 1 ? stamps[1] - stamps[0] : 600;
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    if (stamps[i] - stamps[i - 1] != frame.grid.step)
      throw DataError("frame timestamps are not on a fixed grid");
  }
  return frame;
}

}  // namespace parkcast

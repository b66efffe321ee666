#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mecoff/error.hpp"
#include "mecoff/gev.hpp"

namespace mecoff {

/// One measurement of the channel and queue state.
struct TraceRow {
  double t_ms = 0;
  double queue_up_bits = 0;
  double queue_down_bits = 0;
  double rate_up_bps = 0;
  double rate_down_bps = 0;
  double power_up_mw = 0;
  double power_down_mw = 0;
};

inline constexpr const char* kTraceHeader =
    "t_ms,queue_up_bits,queue_down_bits,rate_up_bps,rate_down_bps,power_up_mw,power_down_mw";

inline std::vector<TraceRow> parse_trace_csv(std::istream& in, const std::string& origin = "trace") {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(origin + ": empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw ParseError(origin + ": unexpected header, want '" + std::string(kTraceHeader) + "'");

  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    double v[7];
    int count = 0;
    while (std::getline(ls, cell, ',')) {
      if (count == 7) break;
      try {
        std::size_t used = 0;
        v[count] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(origin + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      ++count;
    }
    if (count != 7 || ls.rdbuf()->in_avail() > 0) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 7 columns");
    }
    for (double x : v) {
      if (!std::isfinite(x) || x < 0) throw ParseError(origin + ":" + std::to_string(lineno) + ": values must be finite and >= 0");
    }
    if (v[3] <= 0 || v[4] <= 0) throw ParseError(origin + ":" + std::to_string(lineno) + ": rates must be positive");
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return rows;
}

inline std::vector<TraceRow> load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_trace_csv(in, path);
}

inline std::string trace_csv_text(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << kTraceHeader << '\n';
  for (const auto& r : rows) {
    os << r.t_ms << ',' << r.queue_up_bits << ',' << r.queue_down_bits << ',' << r.rate_up_bps << ','
       << r.rate_down_bps << ',' << r.power_up_mw << ',' << r.power_down_mw << '\n';
  }
  return os.str();
}

// Per-row realizations of the transfer-time and energy-per-bit quotients.
// `payload_bits` is the data size whose transfer the trace rows time.
inline SampleSet upload_time_samples(const std::vector<TraceRow>& rows, double payload_bits) {
  SampleSet s{{}, "s"};
  for (const auto& r : rows) s.values.push_back((r.queue_up_bits + payload_bits) / r.rate_up_bps);
  return s;
}

inline SampleSet download_time_samples(const std::vector<TraceRow>& rows, double payload_bits) {
  SampleSet s{{}, "s"};
  for (const auto& r : rows) s.values.push_back((r.queue_down_bits + payload_bits) / r.rate_down_bps);
  return s;
}

inline SampleSet upload_energy_per_bit_samples(const std::vector<TraceRow>& rows) {
  SampleSet s{{}, "mW*s/bit"};
  for (const auto& r : rows) s.values.push_back(r.power_up_mw / r.rate_up_bps);
  return s;
}

inline SampleSet download_energy_per_bit_samples(const std::vector<TraceRow>& rows) {
  SampleSet s{{}, "mW*s/bit"};
  for (const auto& r : rows) s.values.push_back(r.power_down_mw / r.rate_down_bps);
  return s;
}

}  // namespace mecoff

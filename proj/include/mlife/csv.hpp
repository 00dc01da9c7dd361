#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "mlife/disability.hpp"
#include "mlife/discrete.hpp"
#include "mlife/simulate.hpp"

namespace mlife {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace detail

// columns: time,state,value; boundary row first (descending time)
inline void write_reserve_table_csv(const ReserveTable& table, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  out << "time,state,value\n";
  for (std::size_t n = table.times.size(); n-- > 0;) {
    for (std::size_t i = 0; i < table.state_names.size(); ++i) {
      out << detail::fmt_double(table.times[n]) << ',' << table.state_names[i] << ','
          << detail::fmt_double(table.values[i][n]) << '\n';
    }
  }
}

inline void write_curve_csv(const std::string& path, const std::string& header,
                            std::span<const double> xs, std::span<const double> ys) {
  std::ofstream out = detail::open_out(path);
  out << header << '\n';
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << detail::fmt_double(xs[i]) << ',' << detail::fmt_double(ys[i]) << '\n';
}

// active curve, reserve-at-onset curve, and one file per requested slice;
// returns the file names written (relative to dir)
inline std::vector<std::string> write_disability_curves(const DisabilityCurves& curves,
                                                        const std::string& dir) {
  std::vector<std::string> names;
  names.push_back("active_reserve.csv");
  write_curve_csv(dir + "/active_reserve.csv", "time,value", curves.times, curves.active);
  names.push_back("disabled_onset_reserve.csv");
  write_curve_csv(dir + "/disabled_onset_reserve.csv", "onset_age,value", curves.times,
                  curves.onset_reserve);
  for (const DisabilitySlice& sl : curves.slices) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "disabled_slice_%g.csv", sl.onset);
    names.push_back(buf);
    std::span<const double> ts(curves.times.data() + sl.first_node,
                               curves.times.size() - sl.first_node);
    write_curve_csv(dir + "/" + buf, "time,value", ts, sl.values);
  }
  return names;
}

// per-path debug dump: one row per jump plus a row 0 carrying the PV
inline void write_paths_csv(const std::vector<PathSample>& paths, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  out << "path,jump_index,jump_time,from,to,path_pv\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const PathSample& ps = paths[p];
    out << p << ",0,," << to_string(ps.states[0]) << "," << to_string(ps.states[0]) << ","
        << detail::fmt_double(ps.pv) << '\n';
    for (std::size_t j = 0; j < ps.jump_times.size(); ++j) {
      out << p << ',' << j + 1 << ',' << detail::fmt_double(ps.jump_times[j]) << ','
          << to_string(ps.states[j]) << ',' << to_string(ps.states[j + 1]) << ",\n";
    }
  }
}

}  // namespace mlife

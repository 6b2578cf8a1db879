// Copyright 2026 The Absynth Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "absynth/search.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

namespace absynth {

inline const char *outcome_name(Outcome::Kind k) {
  switch (k) {
  case Outcome::Kind::Solution:
    return "solution";
  case Outcome::Kind::Unrealizable:
    return "unrealizable";
  case Outcome::Kind::Timeout:
    return "timeout";
  }
  return "error";
}

// One benchmark row. `detail` carries the rendered solution or an error
// message for human eyes; it is not a CSV column.
struct RunReport {
  std::string id;
  std::string outcome = "error";
  double time_s = 0.0;
  double analysis_s = 0.0;
  uint32_t size = 0; // solution size; meaningful only for solutions
  uint64_t dequeued = 0;
  uint64_t pruned = 0;
  int pool_max_n = 0;
  std::string detail;
};

inline RunReport make_report(std::string id, const Outcome &out) {
  RunReport r;
  r.id = std::move(id);
  r.outcome = outcome_name(out.kind);
  r.time_s = out.stats.total_seconds;
  r.analysis_s = out.stats.analysis_seconds;
  r.size = out.stats.solution_size;
  r.dequeued = out.stats.dequeued;
  r.pruned = out.stats.pruned;
  r.pool_max_n = out.stats.max_n;
  return r;
}

namespace detail {

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

} // namespace detail

inline std::string csv_header() {
  return "id,outcome,time_s,analysis_s,size,dequeued,pruned,pool_max_n\n";
}

inline std::string csv_row(const RunReport &r) {
  std::string line = r.id;
  line += ',';
  line += r.outcome;
  line += ',';
  line += detail::fixed6(r.time_s);
  line += ',';
  line += detail::fixed6(r.analysis_s);
  line += ',';
  if (r.outcome == "solution")
    line += std::to_string(r.size);
  line += ',';
  line += std::to_string(r.dequeued);
  line += ',';
  line += std::to_string(r.pruned);
  line += ',';
  line += std::to_string(r.pool_max_n);
  line += '\n';
  return line;
}

// Header, one row per report, and an aggregate footer in '#' comment lines
// (omitted for an empty run). Everything except the two timing columns and
// the timing footer is deterministic for fixed inputs and flags.
inline std::string render_csv(const std::vector<RunReport> &reports) {
  std::string out = csv_header();
  size_t solved = 0, unreal = 0, timeout = 0, error = 0;
  std::vector<double> times;
  for (const RunReport &r : reports) {
    out += csv_row(r);
    times.push_back(r.time_s);
    if (r.outcome == "solution")
      solved++;
    else if (r.outcome == "unrealizable")
      unreal++;
    else if (r.outcome == "timeout")
      timeout++;
    else
      error++;
  }
  if (reports.empty())
    return out;

  double mean = 0.0;
  for (double t : times)
    mean += t;
  mean /= (double)times.size();
  std::sort(times.begin(), times.end());
  double median = times.size() % 2 == 1
                      ? times[times.size() / 2]
                      : (times[times.size() / 2 - 1] + times[times.size() / 2]) / 2.0;

  out += "# problems=" + std::to_string(reports.size()) +
         " solution=" + std::to_string(solved) +
         " unrealizable=" + std::to_string(unreal) +
         " timeout=" + std::to_string(timeout) +
         " error=" + std::to_string(error) + "\n";
  out += "# time_mean_s=" + detail::fixed6(mean) +
         " time_median_s=" + detail::fixed6(median) + "\n";
  return out;
}

// Inverse of csv_row for collecting rows emitted by worker processes.
inline RunReport parse_csv_row(const std::string &line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == '\n')
      break;
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  if (fields.size() != 8)
    throw SynthError(SynthError::Code::IoError,
                     "malformed report row: " + line);
  RunReport r;
  r.id = fields[0];
  r.outcome = fields[1];
  r.time_s = std::stod(fields[2]);
  r.analysis_s = std::stod(fields[3]);
  r.size = fields[4].empty() ? 0 : (uint32_t)std::stoul(fields[4]);
  r.dequeued = std::stoull(fields[5]);
  r.pruned = std::stoull(fields[6]);
  r.pool_max_n = (int)std::stol(fields[7]);
  return r;
}

} // namespace absynth

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

#include "absynth/report.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

using namespace absynth;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

// Run the installed binary through the shell, capturing stdout (and stderr
// unless told otherwise) so tests can match on user-visible text.
RunResult run_cli(const std::string &args, bool merge_stderr = true) {
  std::string cmd = std::string(ABSYNTH_CLI_PATH) + " " + args;
  cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
  FILE *pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
    r.out.append(buf, got);
  int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

std::string golden(const std::string &name) {
  return std::string(ABSYNTH_BENCH_DIR) + "/golden/" + name;
}

// Blank out the wall-clock columns and drop the timing footer so two runs
// of the same suite can be compared byte for byte.
std::string mask_times(const std::string &csv) {
  std::istringstream in(csv);
  std::string line, out;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.rfind("# time_", 0) == 0)
      continue;
    if (!first && line.rfind("#", 0) != 0) {
      std::vector<std::string> fields;
      std::string cur;
      for (char c : line) {
        if (c == ',') {
          fields.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      fields.push_back(cur);
      REQUIRE(fields.size() == 8);
      fields[2] = "-";
      fields[3] = "-";
      line.clear();
      for (size_t i = 0; i < fields.size(); ++i) {
        if (i)
          line += ',';
        line += fields[i];
      }
    }
    out += line;
    out += '\n';
    first = false;
  }
  return out;
}

std::string write_temp(const std::string &name, const std::string &text) {
  std::string path = "/tmp/" + name;
  std::ofstream f(path, std::ios::binary);
  f << text;
  return path;
}

} // namespace

TEST_CASE("report rows round-trip through their CSV form") {
  RunReport r;
  r.id = "p1";
  r.outcome = "solution";
  r.time_s = 1.5;
  r.analysis_s = 0.25;
  r.size = 7;
  r.dequeued = 10;
  r.pruned = 3;
  r.pool_max_n = 2;
  CHECK(csv_row(r) == "p1,solution,1.500000,0.250000,7,10,3,2\n");

  RunReport back = parse_csv_row(csv_row(r));
  CHECK(back.id == r.id);
  CHECK(back.outcome == r.outcome);
  CHECK(back.time_s == r.time_s);
  CHECK(back.analysis_s == r.analysis_s);
  CHECK(back.size == r.size);
  CHECK(back.dequeued == r.dequeued);
  CHECK(back.pruned == r.pruned);
  CHECK(back.pool_max_n == r.pool_max_n);

  // non-solutions leave the size column empty
  r.outcome = "timeout";
  CHECK(csv_row(r) == "p1,timeout,1.500000,0.250000,,10,3,2\n");
  CHECK(parse_csv_row(csv_row(r)).size == 0);

  CHECK_THROWS_AS(parse_csv_row("too,few,fields"), SynthError);
}

TEST_CASE("the aggregate report carries outcome counts and time stats") {
  CHECK(csv_header() ==
        "id,outcome,time_s,analysis_s,size,dequeued,pruned,pool_max_n\n");
  CHECK(render_csv({}) == csv_header()); // no footer for an empty run

  auto mk = [](const char *id, const char *oc, double t) {
    RunReport r;
    r.id = id;
    r.outcome = oc;
    r.time_s = t;
    return r;
  };
  std::string csv = render_csv(
      {mk("a", "solution", 1.0), mk("b", "timeout", 4.0),
       mk("c", "unrealizable", 2.0)});
  CHECK(csv.find("# problems=3 solution=1 unrealizable=1 timeout=1 error=0\n") !=
        std::string::npos);
  // mean of {1,4,2} and median of the sorted {1,2,4}
  CHECK(csv.find("# time_mean_s=2.333333 time_median_s=2.000000\n") !=
        std::string::npos);

  std::string even = render_csv({mk("a", "error", 1.0), mk("b", "error", 2.0)});
  CHECK(even.find("time_median_s=1.500000") != std::string::npos);
}

TEST_CASE("solving a file prints the function and exits zero") {
  RunResult r = run_cli("solve " + golden("overview.sl") + " --max-height 1");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("(define-fun f ((x (_ BitVec 4))) (_ BitVec 4) ", 0) == 0);

  // the exit code distinguishes refuted problems and exhausted budgets
  RunResult u = run_cli("solve " + golden("x_only.sl"));
  CHECK(u.status == 10);
  CHECK(u.out == "absynth: unrealizable\n");

  RunResult t = run_cli("solve " + golden("overview.sl") +
                        " --max-height 1 --max-size 1");
  CHECK(t.status == 20);
  CHECK(t.out == "absynth: timeout\n");

  // with enough examples the classic rightmost-run mask surfaces verbatim
  RunResult m =
      run_cli("solve " + golden("overview_multi.sl") + " --max-height 1");
  CHECK(m.status == 0);
  for (const char *op : {"bvashr", "bvxor", "bvadd"})
    CHECK(m.out.find(op) != std::string::npos);
}

TEST_CASE("bad inputs and bad flags exit with code two") {
  std::string junk = write_temp("absynth_cli_junk.sl", "(synth-fun)) oops");
  RunResult r = run_cli("solve " + junk);
  CHECK(r.status == 2);
  CHECK(r.out.find("absynth:") != std::string::npos);

  CHECK(run_cli("solve /no/such/file.sl").status == 2);
  CHECK(run_cli("solve").status == 2);             // missing argument
  CHECK(run_cli("").status == 2);                  // missing subcommand
  CHECK(run_cli("solve x.sl --pruning bogus").status == 2);
  CHECK(run_cli("solve x.sl --mode sideways").status == 2);
  CHECK(run_cli("bench /no/such/dir").status == 2);
}

TEST_CASE("run statistics are exported as JSON") {
  std::string path = "/tmp/absynth_cli_stats.json";
  std::remove(path.c_str());
  RunResult r = run_cli("solve " + golden("overview.sl") +
                        " --max-height 1 --stats-json " + path);
  REQUIRE(r.status == 0);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string j = ss.str();
  for (const char *key :
       {"\"id\"", "\"outcome\"", "\"solution\"", "\"size\"", "\"sketches\"",
        "\"dequeued\"", "\"tested_complete\"", "\"pruned\"", "\"expanded\"",
        "\"enqueued\"", "\"analysis_s\"", "\"time_s\"", "\"pool_sizes\"",
        "\"pool_max_n\"", "\"resource_limited\"", "\"cover_terms\"",
        "\"tree_depth\""})
    CHECK(j.find(key) != std::string::npos);
  CHECK(j.find("\"outcome\": \"solution\"") != std::string::npos);
  CHECK(j.find("\"pool_max_n\": 3") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("tracing dumps the per-pass analysis maps") {
  RunResult r = run_cli("solve " + golden("overview.sl") +
                        " --max-height 1 --trace", /*merge_stderr=*/false);
  REQUIRE(r.status == 0);
  CHECK(r.out.find("; analysis of ") != std::string::npos);
  CHECK(r.out.find(";   example 1") != std::string::npos);
  CHECK(r.out.find(";     pass 0: e=") != std::string::npos);
  // the solution still lands on stdout after the trace
  CHECK(r.out.find("(define-fun f ") != std::string::npos);
}

TEST_CASE("other search modes are reachable from the command line") {
  RunResult td = run_cli("solve " + golden("overview.sl") + " --mode topdown");
  CHECK(td.status == 0);
  CHECK(td.out.rfind("(define-fun f ", 0) == 0);

  RunResult fwd =
      run_cli("solve " + golden("x_only.sl") + " --pruning forward");
  CHECK(fwd.status == 10);
  RunResult off = run_cli("solve " + golden("x_only.sl") + " --pruning off");
  CHECK(off.status == 10);

  RunResult dnc = run_cli("solve " + std::string(ABSYNTH_BENCH_DIR) +
                          "/max.sl --dnc --timeout 120");
  CHECK(dnc.status == 0);
  CHECK(dnc.out.find("(ite ") != std::string::npos);
}

TEST_CASE("benchmark reports are stable across runs and worker counts") {
  std::string args = "bench " + std::string(ABSYNTH_BENCH_DIR) +
                     "/golden --max-height 1 --timeout 60";
  RunResult a = run_cli(args, /*merge_stderr=*/false);
  RunResult b = run_cli(args, /*merge_stderr=*/false);
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(mask_times(a.out) == mask_times(b.out));

  // rows follow the sorted file names, one per benchmark
  std::string masked = mask_times(a.out);
  CHECK(masked.find("notx,solution,-,-,2,") != std::string::npos);
  CHECK(masked.find("overview,solution,-,-,5,") != std::string::npos);
  CHECK(masked.find("overview_multi,solution,-,-,7,") != std::string::npos);
  CHECK(masked.find("x_only,unrealizable,-,-,,") != std::string::npos);
  CHECK(masked.find("# problems=4 solution=3 unrealizable=1 timeout=0 "
                    "error=0\n") != std::string::npos);
  CHECK(masked.find(std::string(csv_header())) == 0);

  // worker processes must reproduce the in-process report
  RunResult par = run_cli(args + " --jobs 2", /*merge_stderr=*/false);
  REQUIRE(par.status == 0);
  CHECK(mask_times(par.out) == mask_times(a.out));

  // --csv redirects the report into a file, leaving stdout empty
  std::string path = "/tmp/absynth_cli_bench.csv";
  std::remove(path.c_str());
  RunResult filed = run_cli(args + " --csv " + path, /*merge_stderr=*/false);
  REQUIRE(filed.status == 0);
  CHECK(filed.out.empty());
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(mask_times(ss.str()) == mask_times(a.out));
  std::remove(path.c_str());
}

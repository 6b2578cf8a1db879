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

#include "absynth/dnc.hpp"
#include "absynth/report.hpp"
#include "absynth/search.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string file;
  std::string dir;
  int max_height = 2;
  uint64_t max_size = 0;
  double timeout = 600.0;
  std::string mode = "bidir";
  std::string pruning = "full";
  bool dnc = false;
  std::string stats_json;
  bool trace = false;
  bool csv_row = false; // internal: emit one CSV row on stdout
  int jobs = 1;
  std::string csv_path;
};

absynth::SearchConfig make_config(const Options &opt) {
  absynth::SearchConfig cfg;
  cfg.max_height = opt.max_height;
  cfg.max_size = opt.max_size;
  cfg.timeout_seconds = opt.timeout;
  cfg.mode = opt.mode == "topdown" ? absynth::SearchMode::TopDown
                                   : absynth::SearchMode::Bidirectional;
  if (opt.pruning == "forward")
    cfg.pruning = absynth::PruningMode::ForwardOnly;
  else if (opt.pruning == "off")
    cfg.pruning = absynth::PruningMode::Off;
  else
    cfg.pruning = absynth::PruningMode::Full;
  return cfg;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw absynth::SynthError(absynth::SynthError::Code::IoError,
                              "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string problem_id(const std::string &path) {
  fs::path p(path);
  return p.stem().string();
}

void dump_trace(const absynth::TermPtr &t,
                const absynth::AnalysisResult &res) {
  std::string header;
  absynth::to_sexpr(t, header);
  std::cout << "; analysis of " << header << "\n";
  for (size_t j = 0; j < res.trace.size(); ++j) {
    std::cout << ";   example " << j + 1 << "\n";
    for (size_t pass = 0; pass < res.trace[j].size(); ++pass) {
      std::cout << ";     pass " << pass << ":";
      const absynth::AnalysisMap &map = res.trace[j][pass];
      for (size_t i = 0; i < map.size(); ++i)
        std::cout << " " << res.positions[i].str() << "=" << map[i].str();
      std::cout << "\n";
    }
  }
}

json stats_to_json(const absynth::SearchStats &s) {
  json j;
  j["sketches"] = s.sketches;
  j["dequeued"] = s.dequeued;
  j["tested_complete"] = s.tested_complete;
  j["pruned"] = s.pruned;
  j["expanded"] = s.expanded;
  j["enqueued"] = s.enqueued;
  j["analysis_s"] = s.analysis_seconds;
  j["time_s"] = s.total_seconds;
  j["pool_sizes"] = s.pool_sizes;
  j["pool_max_n"] = s.max_n;
  j["resource_limited"] = s.resource_limited;
  j["cover_terms"] = s.cover_terms;
  j["tree_depth"] = s.tree_depth;
  return j;
}

// Solve one benchmark in-process, mapping any SynthError to an "error" row
// instead of unwinding, so a bench run always yields one row per file.
absynth::RunReport run_one(const std::string &path,
                           const absynth::SearchConfig &cfg, bool dnc) {
  absynth::RunReport r;
  r.id = problem_id(path);
  try {
    absynth::SynthProblem pb = absynth::parse_problem(read_file(path));
    absynth::Outcome out =
        dnc ? absynth::solve_with_dnc(pb, cfg) : absynth::solve(pb, cfg);
    r = absynth::make_report(r.id, out);
    if (out.kind == absynth::Outcome::Kind::Solution)
      r.detail = absynth::render_solution(pb, out.solution);
  } catch (const absynth::SynthError &e) {
    r.outcome = "error";
    r.detail = e.what();
  }
  return r;
}

int cmd_solve(const Options &opt) {
  absynth::SearchConfig cfg = make_config(opt);
  if (opt.trace)
    cfg.on_analysis = dump_trace;

  absynth::SynthProblem pb;
  try {
    pb = absynth::parse_problem(read_file(opt.file));
  } catch (const absynth::SynthError &e) {
    std::cerr << "absynth: " << opt.file << ": " << e.what() << "\n";
    if (opt.csv_row) {
      absynth::RunReport r;
      r.id = problem_id(opt.file);
      r.outcome = "error";
      std::cout << absynth::csv_row(r);
    }
    return 2;
  }

  absynth::Outcome out;
  try {
    out = opt.dnc ? absynth::solve_with_dnc(pb, cfg) : absynth::solve(pb, cfg);
  } catch (const absynth::SynthError &e) {
    std::cerr << "absynth: " << e.what() << "\n";
    if (opt.csv_row) {
      absynth::RunReport r;
      r.id = problem_id(opt.file);
      r.outcome = "error";
      std::cout << absynth::csv_row(r);
    }
    return 2;
  }

  if (!opt.stats_json.empty()) {
    json j = stats_to_json(out.stats);
    j["id"] = problem_id(opt.file);
    j["outcome"] = absynth::outcome_name(out.kind);
    if (out.kind == absynth::Outcome::Kind::Solution) {
      j["solution"] = absynth::render_solution(pb, out.solution);
      j["size"] = out.stats.solution_size;
    } else {
      j["solution"] = nullptr;
      j["size"] = nullptr;
    }
    std::ofstream js(opt.stats_json);
    if (!js) {
      std::cerr << "absynth: cannot write " << opt.stats_json << "\n";
      return 2;
    }
    js << j.dump(2) << "\n";
  }

  if (opt.csv_row) {
    absynth::RunReport r = absynth::make_report(problem_id(opt.file), out);
    std::cout << absynth::csv_row(r);
  } else if (out.kind == absynth::Outcome::Kind::Solution) {
    std::cout << absynth::render_solution(pb, out.solution) << "\n";
  } else {
    std::cerr << "absynth: " << absynth::outcome_name(out.kind);
    if (out.stats.resource_limited)
      std::cerr << " (resource limit)";
    std::cerr << "\n";
  }

  switch (out.kind) {
  case absynth::Outcome::Kind::Solution:
    return 0;
  case absynth::Outcome::Kind::Unrealizable:
    return 10;
  case absynth::Outcome::Kind::Timeout:
    return 20;
  }
  return 2;
}

// Run the files in waves of `jobs` child processes, each emitting its CSV
// row into a private temp file. Row order follows the sorted file list, so
// the aggregate report is independent of completion order.
std::vector<absynth::RunReport>
run_parallel(const std::vector<std::string> &files, const Options &opt,
             const std::string &self) {
  std::vector<absynth::RunReport> reports(files.size());
  char tmpl[] = "/tmp/absynth-bench-XXXXXX";
  if (!mkdtemp(tmpl))
    throw absynth::SynthError(absynth::SynthError::Code::IoError,
                              "cannot create temp directory");
  std::string tmpdir = tmpl;

  size_t next = 0;
  while (next < files.size()) {
    size_t wave_end = std::min(files.size(), next + (size_t)opt.jobs);
    std::vector<pid_t> pids;
    for (size_t i = next; i < wave_end; ++i) {
      std::string outfile = tmpdir + "/" + std::to_string(i) + ".row";
      std::vector<std::string> args = {
          self,
          "solve",
          files[i],
          "--csv-row",
          "--timeout",
          std::to_string(opt.timeout),
          "--max-height",
          std::to_string(opt.max_height),
          "--mode",
          opt.mode,
          "--pruning",
          opt.pruning,
      };
      if (opt.max_size)
        args.insert(args.end(), {"--max-size", std::to_string(opt.max_size)});
      if (opt.dnc)
        args.push_back("--dnc");

      pid_t pid = fork();
      if (pid < 0)
        throw absynth::SynthError(absynth::SynthError::Code::IoError,
                                  "fork failed");
      if (pid == 0) {
        int fd = open(outfile.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd < 0)
          _exit(127);
        dup2(fd, 1);
        close(fd);
        std::vector<char *> argv;
        for (std::string &a : args)
          argv.push_back(a.data());
        argv.push_back(nullptr);
        execv(self.c_str(), argv.data());
        _exit(127);
      }
      pids.push_back(pid);
    }
    for (pid_t pid : pids) {
      int status = 0;
      waitpid(pid, &status, 0);
    }
    for (size_t i = next; i < wave_end; ++i) {
      std::string outfile = tmpdir + "/" + std::to_string(i) + ".row";
      absynth::RunReport r;
      r.id = problem_id(files[i]);
      try {
        std::string row = read_file(outfile);
        r = absynth::parse_csv_row(row);
      } catch (const absynth::SynthError &) {
        r.outcome = "error";
        r.detail = "worker produced no report";
      }
      reports[i] = r;
      std::remove(outfile.c_str());
    }
    next = wave_end;
  }
  std::error_code ec;
  fs::remove_all(tmpdir, ec);
  return reports;
}

int cmd_bench(const Options &opt, const std::string &self) {
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto &entry : fs::directory_iterator(opt.dir, ec)) {
    if (entry.path().extension() == ".sl")
      files.push_back(entry.path().string());
  }
  if (ec) {
    std::cerr << "absynth: cannot read directory " << opt.dir << "\n";
    return 2;
  }
  std::sort(files.begin(), files.end());

  std::vector<absynth::RunReport> reports;
  if (opt.jobs > 1) {
    reports = run_parallel(files, opt, self);
  } else {
    absynth::SearchConfig cfg = make_config(opt);
    for (const std::string &f : files)
      reports.push_back(run_one(f, cfg, opt.dnc));
  }

  std::string csv = absynth::render_csv(reports);
  if (opt.csv_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(opt.csv_path, std::ios::binary);
    if (!out) {
      std::cerr << "absynth: cannot write " << opt.csv_path << "\n";
      return 2;
    }
    out << csv;
  }
  for (const absynth::RunReport &r : reports)
    if (r.outcome != "solution" && !r.detail.empty())
      std::cerr << r.id << ": " << r.detail << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  Options opt;
  CLI::App app{"absynth: example-based bitvector program synthesis"};
  app.require_subcommand(1);

  auto add_search_flags = [&](CLI::App *cmd) {
    cmd->add_option("--max-height", opt.max_height,
                    "sketch height bound (bidirectional mode)")
        ->check(CLI::Range(0, 8));
    cmd->add_option("--max-size", opt.max_size,
                    "stop once the component size bound exceeds N");
    cmd->add_option("--timeout", opt.timeout, "wall-clock budget in seconds");
    cmd->add_option("--mode", opt.mode, "search strategy")
        ->check(CLI::IsMember({"bidir", "topdown"}));
    cmd->add_option("--pruning", opt.pruning, "abstract-interpretation level")
        ->check(CLI::IsMember({"full", "forward", "off"}));
    cmd->add_flag("--dnc", opt.dnc,
                  "divide-and-conquer synthesis of conditionals");
  };

  CLI::App *solve = app.add_subcommand("solve", "solve one benchmark file");
  solve->add_option("file", opt.file, "SyGuS problem file")->required();
  add_search_flags(solve);
  solve->add_option("--stats-json", opt.stats_json,
                    "write run statistics to this JSON file");
  solve->add_flag("--trace", opt.trace,
                  "dump per-pass analysis maps for every analyzed sketch");
  solve->add_flag("--csv-row", opt.csv_row, "emit a single CSV row on stdout")
      ->group(""); // internal, used by bench workers

  CLI::App *bench =
      app.add_subcommand("bench", "run every .sl file in a directory");
  bench->add_option("dir", opt.dir, "benchmark directory")->required();
  add_search_flags(bench);
  bench->add_option("--jobs", opt.jobs, "worker processes")
      ->check(CLI::Range(1, 64));
  bench->add_option("--csv", opt.csv_path, "write the CSV report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  std::string self = "/proc/self/exe";
  std::error_code ec;
  fs::path resolved = fs::read_symlink("/proc/self/exe", ec);
  self = ec ? std::string(argv[0]) : resolved.string();

  try {
    if (app.got_subcommand(solve))
      return cmd_solve(opt);
    return cmd_bench(opt, self);
  } catch (const absynth::SynthError &e) {
    std::cerr << "absynth: " << e.what() << "\n";
    return 2;
  }
}

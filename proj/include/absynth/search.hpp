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

#include "absynth/analyzer.hpp"
#include "absynth/enumerator.hpp"
#include "absynth/sygus.hpp"
#include "absynth/term.hpp"
#include "absynth/types.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

namespace absynth {

enum class SearchMode { Bidirectional, TopDown };

// Full runs the iterated forward-backward analysis and filters candidate
// components through hole preconditions. ForwardOnly keeps just the initial
// forward pass met with the output at the root, so holes stay unconstrained.
// Off disables the abstract interpreter entirely.
enum class PruningMode { Full, ForwardOnly, Off };

// The worklist normally orders partial terms by size with FIFO tie-breaks.
// Plain FIFO exists to demonstrate that found solutions do not depend on
// the tie-breaking policy, only the order of discovery does.
enum class QueuePolicy { SizeThenFifo, Fifo };

struct SearchConfig {
  int max_height = 2;        // sketch height bound (bidirectional mode)
  uint64_t max_size = 0;     // cap on the component size bound n; 0 = none
  double timeout_seconds = 600.0;
  SearchMode mode = SearchMode::Bidirectional;
  PruningMode pruning = PruningMode::Full;
  QueuePolicy queue_policy = QueuePolicy::SizeThenFifo;
  // Preconditions whose concretization is no larger than this are expanded
  // into explicit value sets, both for hole selection and for index-based
  // component lookup.
  uint64_t concretize_limit = 64;
  // Hard ceiling on live worklist entries plus generated sketches; crossing
  // it aborts the run with a Timeout outcome flagged as resource-limited.
  uint64_t max_live_queue = 5000000;
  // When set, every full analysis of a dequeued partial term is traced and
  // handed here before pruning is decided. Used for diagnostic dumps.
  std::function<void(const TermPtr &, const AnalysisResult &)> on_analysis;
};

struct SearchStats {
  uint64_t sketches = 0;        // sketch set size (summed per level in top-down)
  uint64_t dequeued = 0;
  uint64_t tested_complete = 0; // complete candidates checked against examples
  uint64_t pruned = 0;          // partial terms refuted by the analysis
  uint64_t expanded = 0;        // partial terms whose hole was filled
  uint64_t enqueued = 0;
  double analysis_seconds = 0.0;
  double total_seconds = 0.0;
  std::vector<size_t> pool_sizes; // component pool total after each growth step
  int max_n = 0;                  // largest component size bound reached
  uint32_t solution_size = 0;
  bool resource_limited = false;  // stopped by the queue/sketch ceiling
  // Divide-and-conquer only: branch terms found and depth of the learned
  // decision tree (0 when no tree was needed).
  uint32_t cover_terms = 0;
  uint32_t tree_depth = 0;
};

struct Outcome {
  enum class Kind { Solution, Unrealizable, Timeout };
  Kind kind = Kind::Timeout;
  TermPtr solution; // set iff kind == Solution
  SearchStats stats;
};

namespace detail {

struct TermPtrHash {
  size_t operator()(const TermPtr &t) const { return t->hash; }
};
struct TermPtrEq {
  bool operator()(const TermPtr &a, const TermPtr &b) const {
    return term_eq(a, b);
  }
};

// Sketches stratified by exact height, one stratum per (nonterminal, h).
// A sketch is a partial derivation: the root comes from a production, and
// every child is either a hole labelled with its nonterminal or a smaller
// sketch. Building by exact height keeps strata disjoint, so terms are
// never regenerated when a deeper level is requested.
class SketchLevels {
public:
  explicit SketchLevels(const Grammar &g, uint64_t budget = UINT64_MAX,
                        bool *budget_flag = nullptr)
      : g_(&g), budget_(budget), budget_flag_(budget_flag) {
    for (int nt = 0; nt < g.nt_count(); ++nt)
      holes_.push_back(Term::hole(nt, g.nt_sorts[nt]));
  }

  const std::vector<TermPtr> &level(int nt, int h, const Deadline &deadline) {
    build_to(h, deadline);
    return memo_[h][nt];
  }

  uint64_t produced() const { return produced_; }

private:
  using Dedup = std::unordered_set<TermPtr, TermPtrHash, TermPtrEq>;

  void insert(std::vector<std::vector<TermPtr>> &layer,
              std::vector<Dedup> &dedup, int nt, const TermPtr &t) {
    if (!dedup[nt].insert(t).second)
      return;
    if (++produced_ > budget_) {
      if (budget_flag_)
        *budget_flag_ = true;
      throw TimeoutReached{};
    }
    layer[nt].push_back(t);
  }

  void build_to(int target, const Deadline &deadline) {
    while ((int)memo_.size() <= target) {
      check_deadline(deadline);
      int h = (int)memo_.size();
      std::vector<std::vector<TermPtr>> layer(g_->nt_count());
      std::vector<Dedup> dedup(g_->nt_count());

      if (h == 0) {
        for (const Production &p : g_->productions)
          if (p.leaf)
            insert(layer, dedup, p.lhs, p.leaf);
        memo_.push_back(std::move(layer));
        continue;
      }

      uint64_t steps = 0;
      for (const Production &p : g_->productions) {
        if (p.leaf)
          continue;
        int k = (int)p.rhs.size();

        // Child options that keep the parent's height below h: a hole, or
        // any stratum up to h-2. Holes have height zero, so at h == 1 every
        // child combination already lands exactly at height 1 and no
        // stratum split is needed.
        std::vector<std::vector<TermPtr>> low(k);
        for (int i = 0; i < k; ++i) {
          low[i].push_back(holes_[p.rhs[i]]);
          for (int hh = 0; hh <= h - 2; ++hh)
            for (const TermPtr &t : memo_[hh][p.rhs[i]])
              low[i].push_back(t);
        }

        auto odometer = [&](const std::vector<const std::vector<TermPtr> *>
                                &opts) {
          for (const auto *o : opts)
            if (o->empty())
              return;
          std::vector<size_t> pick(k, 0);
          for (;;) {
            if ((++steps & 0xfff) == 0)
              check_deadline(deadline);
            std::vector<TermPtr> children;
            children.reserve(k);
            for (int i = 0; i < k; ++i)
              children.push_back((*opts[i])[pick[i]]);
            insert(layer, dedup, p.lhs, Term::app(p.op, std::move(children)));
            int i = k - 1;
            for (; i >= 0; --i) {
              if (++pick[i] < opts[i]->size())
                break;
              pick[i] = 0;
            }
            if (i < 0)
              break;
          }
        };

        if (h == 1) {
          std::vector<std::vector<TermPtr>> both(k);
          std::vector<const std::vector<TermPtr> *> opts(k);
          for (int i = 0; i < k; ++i) {
            both[i] = low[i];
            for (const TermPtr &t : memo_[0][p.rhs[i]])
              both[i].push_back(t);
            opts[i] = &both[i];
          }
          odometer(opts);
          continue;
        }

        // For h >= 2 some child must sit exactly at height h-1. Classify
        // each combination by the first such child: earlier children stay
        // low, later ones may be either.
        std::vector<std::vector<TermPtr>> both(k);
        for (int i = 0; i < k; ++i) {
          both[i] = low[i];
          for (const TermPtr &t : memo_[h - 1][p.rhs[i]])
            both[i].push_back(t);
        }
        for (int j = 0; j < k; ++j) {
          const std::vector<TermPtr> &exact = memo_[h - 1][p.rhs[j]];
          if (exact.empty())
            continue;
          std::vector<const std::vector<TermPtr> *> opts(k);
          for (int i = 0; i < j; ++i)
            opts[i] = &low[i];
          opts[j] = &exact;
          for (int i = j + 1; i < k; ++i)
            opts[i] = &both[i];
          odometer(opts);
        }
      }
      memo_.push_back(std::move(layer));
    }
  }

  const Grammar *g_;
  uint64_t budget_;
  bool *budget_flag_;
  uint64_t produced_ = 0;
  std::vector<TermPtr> holes_;
  std::vector<std::vector<std::vector<TermPtr>>> memo_; // [h][nt]
};

} // namespace detail

// All sketches of height at most d rooted at a start production, i.e. the
// initial worklist of the bidirectional search.
inline std::vector<TermPtr> sketch_gen(const Grammar &g, int d,
                                       const Deadline &deadline = {},
                                       uint64_t budget = UINT64_MAX,
                                       bool *budget_flag = nullptr) {
  detail::SketchLevels levels(g, budget, budget_flag);
  std::vector<TermPtr> out;
  for (int h = 0; h <= d; ++h)
    for (const TermPtr &t : levels.level(g.start, h, deadline))
      out.push_back(t);
  return out;
}

namespace detail {

// Index into `hs` of the hole to fill next: the one whose precondition
// tuple concretizes to the fewest value vectors, preferring the earliest
// (leftmost-outermost) hole on ties or when nothing concretizes.
inline size_t pick_hole_index(
    const std::vector<std::pair<Position, int>> &hs,
    const AnalysisResult &analysis, uint64_t limit) {
  size_t best = 0;
  uint64_t best_metric = UINT64_MAX;
  bool have_finite = false;
  for (size_t i = 0; i < hs.size(); ++i) {
    const AbsTuple &tuple = analysis.at(hs[i].first);
    uint64_t product = 1;
    bool finite = true;
    for (const AbsValue &v : tuple) {
      auto s = concretize_if_small(v, limit);
      if (!s) {
        finite = false;
        break;
      }
      uint64_t sz = (uint64_t)s->size();
      if (sz == 0) {
        product = 0;
      } else if (product > UINT64_MAX / sz) {
        product = UINT64_MAX;
      } else {
        product *= sz;
      }
    }
    if (finite && (!have_finite || product < best_metric)) {
      have_finite = true;
      best_metric = product;
      best = i;
    }
  }
  return best;
}

} // namespace detail

// The hole of an incomplete term whose precondition admits the fewest
// concrete completions, falling back to the leftmost-outermost hole.
inline Position pick_hole(const TermPtr &t, const AnalysisResult &analysis,
                          uint64_t limit = 64) {
  auto hs = holes(t);
  if (hs.empty())
    throw SynthError(SynthError::Code::NoHoles,
                     "cannot pick a hole in a complete term");
  return hs[detail::pick_hole_index(hs, analysis, limit)].first;
}

namespace detail {

// Forward-only feasibility: run the initial forward pass and meet the root
// with the expected output. No backward information, so hole preconditions
// stay trivial.
inline bool forward_infeasible(const TermPtr &t,
                               const std::vector<std::string> &args,
                               const std::vector<Example> &examples) {
  FlatTerm ft = FlatTerm::build(t);
  AnalysisMap map(ft.nodes.size());
  for (const Example &ex : examples) {
    for (AbsValue &v : map)
      v = AbsValue{};
    forward_sweep(ft, 0, map, args, ex, false);
    if (reduce(map[0].meet(AbsValue::from_concrete(ex.output))).is_bottom())
      return true;
  }
  return false;
}

struct QueueEntry {
  TermPtr term;
  uint64_t seq = 0;
  bool original = false; // part of the initial sketch set
};

struct QueueOrder {
  QueuePolicy policy = QueuePolicy::SizeThenFifo;
  // std::priority_queue is a max-heap; report "worse" as "greater".
  bool operator()(const QueueEntry &a, const QueueEntry &b) const {
    if (policy == QueuePolicy::SizeThenFifo && a.term->size != b.term->size)
      return a.term->size > b.term->size;
    return a.seq > b.seq;
  }
};

struct IterationResult {
  TermPtr solution;
  uint64_t originals_incomplete = 0;
  uint64_t originals_pruned = 0;
};

// Drain one worklist pass over the sketch set with the current component
// pool. Stops early on the first complete candidate consistent with all
// examples.
inline IterationResult run_iteration(const std::vector<TermPtr> &sketches,
                                     const std::vector<std::string> &args,
                                     const std::vector<Example> &examples,
                                     const ComponentPool &pool,
                                     const SearchConfig &cfg,
                                     SearchStats &stats,
                                     const Deadline &deadline) {
  using Clock = std::chrono::steady_clock;
  IterationResult res;

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue(
      QueueOrder{cfg.queue_policy});
  std::unordered_set<TermPtr, TermPtrHash, TermPtrEq> seen;
  uint64_t seq = 0;

  auto push = [&](TermPtr t, bool original) {
    if (!seen.insert(t).second)
      return;
    if ((uint64_t)queue.size() >= cfg.max_live_queue) {
      stats.resource_limited = true;
      throw TimeoutReached{};
    }
    queue.push(QueueEntry{std::move(t), seq++, original});
    stats.enqueued++;
  };

  for (const TermPtr &s : sketches) {
    if (!s->complete())
      res.originals_incomplete++;
    push(s, true);
  }

  while (!queue.empty()) {
    check_deadline(deadline);
    QueueEntry e = queue.top();
    queue.pop();
    stats.dequeued++;
    const TermPtr &t = e.term;

    if (t->complete()) {
      stats.tested_complete++;
      if (satisfies(t, args, examples)) {
        res.solution = t;
        return res;
      }
      continue;
    }

    bool infeasible = false;
    std::optional<AnalysisResult> analysis;
    if (cfg.pruning != PruningMode::Off) {
      auto a0 = Clock::now();
      if (cfg.pruning == PruningMode::Full) {
        analysis = analyze(t, args, examples, (bool)cfg.on_analysis);
        infeasible = analysis->has_bottom;
      } else {
        infeasible = forward_infeasible(t, args, examples);
      }
      stats.analysis_seconds +=
          std::chrono::duration<double>(Clock::now() - a0).count();
      if (analysis && cfg.on_analysis)
        cfg.on_analysis(t, *analysis);
    }
    if (infeasible) {
      stats.pruned++;
      if (e.original)
        res.originals_pruned++;
      continue;
    }
    stats.expanded++;

    auto hs = holes(t);
    size_t idx = analysis
                     ? pick_hole_index(hs, *analysis, cfg.concretize_limit)
                     : 0;
    const Position &pos = hs[idx].first;
    int nt = hs[idx].second;

    if (analysis) {
      const AbsTuple &pre = analysis->at(pos);
      for (int id :
           components_satisfying(pool, nt, pre, cfg.concretize_limit))
        push(replace(t, pos, pool.comps[nt][id].term), false);
    } else {
      for (const Component &c : pool.comps[nt])
        push(replace(t, pos, c.term), false);
    }
  }
  return res;
}

} // namespace detail

// Enumerative synthesis over the problem's grammar. Sketches bound the
// top-down shape; a bottom-up component pool supplies hole fillings, grown
// one size at a time. Every candidate that survives analysis-based pruning
// is checked concretely, so a Solution outcome is always exact on the
// given examples.
//
// Unrealizable is reported in two situations: every incomplete sketch was
// refuted by the analysis within a single pass (no completion of any shape
// can work), or the grammar's language is finite and was exhausted. In
// top-down mode the sketch set itself grows by height, with components
// fixed at single leaves; --max-height is ignored there and the height
// keeps growing until refutation or timeout.
inline Outcome solve(const SynthProblem &problem, const SearchConfig &cfg) {
  using Clock = std::chrono::steady_clock;
  auto t0 = Clock::now();

  SearchStats stats;
  Deadline deadline;
  if (cfg.timeout_seconds > 0)
    deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(cfg.timeout_seconds));

  Grammar g = problem.grammar;
  g.index();
  g.validate();

  auto finish = [&](Outcome::Kind k, TermPtr sol) {
    stats.total_seconds =
        std::chrono::duration<double>(Clock::now() - t0).count();
    Outcome o;
    o.kind = k;
    o.solution = std::move(sol);
    o.stats = std::move(stats);
    return o;
  };

  auto accept = [&](const TermPtr &sol) {
    // The candidate already passed the example check; re-verify anyway so
    // a bug upstream can never surface as a wrong "solution".
    if (!satisfies(sol, problem.arg_names, problem.examples))
      throw SynthError(SynthError::Code::Internal,
                       "candidate failed concrete re-check");
    stats.solution_size = sol->size;
    return finish(Outcome::Kind::Solution, sol);
  };

  try {
    ComponentPool pool;
    pool.reset(g.nt_count());

    if (cfg.mode == SearchMode::TopDown) {
      grow(pool, g, problem.arg_names, problem.examples, 1, deadline);
      stats.pool_sizes.push_back(pool.total());
      stats.max_n = 1;
      detail::SketchLevels levels(g, cfg.max_live_queue,
                                  &stats.resource_limited);
      for (int h = 0;; ++h) {
        check_deadline(deadline);
        const std::vector<TermPtr> &batch = levels.level(g.start, h, deadline);
        stats.sketches += batch.size();
        detail::IterationResult it =
            detail::run_iteration(batch, problem.arg_names, problem.examples,
                                  pool, cfg, stats, deadline);
        if (it.solution)
          return accept(it.solution);
        // Any sketch of height > h refines an incomplete height-h sketch,
        // so if none exist, or all were refuted, nothing deeper can work.
        // Height 0 is exempt: that level holds only complete leaves, so
        // "no incomplete sketches" is vacuous there, not a refutation.
        if (h >= 1 && (it.originals_incomplete == 0 ||
                       it.originals_pruned == it.originals_incomplete))
          return finish(Outcome::Kind::Unrealizable, nullptr);
      }
    }

    std::vector<TermPtr> sketches =
        sketch_gen(g, cfg.max_height, deadline, cfg.max_live_queue,
                   &stats.resource_limited);
    stats.sketches = sketches.size();

    bool finite = g.finite_language();
    uint64_t language_bound = 0;
    if (finite)
      language_bound = g.max_term_size().value_or(0);

    for (int n = 1;; ++n) {
      if (cfg.max_size && (uint64_t)n > cfg.max_size)
        throw TimeoutReached{}; // size budget exhausted, result unknown
      check_deadline(deadline);
      grow(pool, g, problem.arg_names, problem.examples, n, deadline);
      stats.pool_sizes.push_back(pool.total());
      stats.max_n = n;

      detail::IterationResult it =
          detail::run_iteration(sketches, problem.arg_names, problem.examples,
                                pool, cfg, stats, deadline);
      if (it.solution)
        return accept(it.solution);
      if (it.originals_incomplete > 0 &&
          it.originals_pruned == it.originals_incomplete &&
          it.originals_incomplete == (uint64_t)sketches.size())
        return finish(Outcome::Kind::Unrealizable, nullptr);
      if (finite && (uint64_t)n >= language_bound)
        return finish(Outcome::Kind::Unrealizable, nullptr);
    }
  } catch (const TimeoutReached &) {
    return finish(Outcome::Kind::Timeout, nullptr);
  }
}

} // namespace absynth

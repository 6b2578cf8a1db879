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

#include <cmath>
#include <memory>
#include <set>
#include <vector>

namespace absynth {
namespace detail {

inline void merge_stats(SearchStats &into, const SearchStats &from) {
  into.sketches += from.sketches;
  into.dequeued += from.dequeued;
  into.tested_complete += from.tested_complete;
  into.pruned += from.pruned;
  into.expanded += from.expanded;
  into.enqueued += from.enqueued;
  into.analysis_seconds += from.analysis_seconds;
  into.max_n = std::max(into.max_n, from.max_n);
  if (into.pool_sizes.size() < from.pool_sizes.size())
    into.pool_sizes.resize(from.pool_sizes.size(), 0);
  for (size_t i = 0; i < from.pool_sizes.size(); ++i)
    into.pool_sizes[i] = std::max(into.pool_sizes[i], from.pool_sizes[i]);
  into.resource_limited = into.resource_limited || from.resource_limited;
}

// A grammar predicate evaluated on every example.
struct Predicate {
  TermPtr term;
  std::vector<bool> truth;
};

struct DecisionTree {
  TermPtr leaf; // set on leaves
  const Predicate *pred = nullptr;
  std::unique_ptr<DecisionTree> if_true, if_false;
};

inline double entropy(const std::vector<int> &labels,
                      const std::vector<size_t> &members) {
  std::vector<size_t> count;
  for (size_t j : members) {
    if ((size_t)labels[j] >= count.size())
      count.resize(labels[j] + 1, 0);
    count[labels[j]]++;
  }
  double h = 0.0;
  for (size_t c : count) {
    if (c == 0)
      continue;
    double p = (double)c / (double)members.size();
    h -= p * std::log2(p);
  }
  return h;
}

// Classic top-down induction: split on the predicate with the highest
// information gain among those that send at least one example each way,
// preferring the earliest predicate on ties. Returns null when some node
// cannot be split, meaning the current predicate pool is too weak.
inline std::unique_ptr<DecisionTree>
learn_tree(const std::vector<size_t> &members, const std::vector<int> &labels,
           const std::vector<TermPtr> &terms,
           const std::vector<Predicate> &preds) {
  bool pure = true;
  for (size_t j : members)
    pure = pure && labels[j] == labels[members[0]];
  if (pure) {
    auto leaf = std::make_unique<DecisionTree>();
    leaf->leaf = terms[labels[members[0]]];
    return leaf;
  }

  double base = entropy(labels, members);
  const Predicate *best = nullptr;
  double best_gain = 0.0;
  std::vector<size_t> yes, no, best_yes, best_no;
  for (const Predicate &p : preds) {
    yes.clear();
    no.clear();
    for (size_t j : members)
      (p.truth[j] ? yes : no).push_back(j);
    if (yes.empty() || no.empty())
      continue;
    double gain = base - ((double)yes.size() * entropy(labels, yes) +
                          (double)no.size() * entropy(labels, no)) /
                             (double)members.size();
    if (!best || gain > best_gain + 1e-12) {
      best = &p;
      best_gain = gain;
      best_yes = yes;
      best_no = no;
    }
  }
  if (!best)
    return nullptr;

  auto lhs = learn_tree(best_yes, labels, terms, preds);
  if (!lhs)
    return nullptr;
  auto rhs = learn_tree(best_no, labels, terms, preds);
  if (!rhs)
    return nullptr;
  auto node = std::make_unique<DecisionTree>();
  node->pred = best;
  node->if_true = std::move(lhs);
  node->if_false = std::move(rhs);
  return node;
}

inline TermPtr fold_tree(const DecisionTree &t) {
  if (t.leaf)
    return t.leaf;
  return Term::app(OpKind::Ite,
                   {t.pred->term, fold_tree(*t.if_true), fold_tree(*t.if_false)});
}

inline uint32_t tree_depth(const DecisionTree &t) {
  if (t.leaf)
    return 0;
  return 1 + std::max(tree_depth(*t.if_true), tree_depth(*t.if_false));
}

} // namespace detail

// Divide-and-conquer synthesis: find branch-free terms that each cover some
// examples, then learn a decision tree of grammar predicates that routes
// every example to a term covering it, and fold the tree into nested ite
// applications. Predicates are drawn from the condition nonterminals of the
// grammar's ite rules; branch terms are synthesized against the grammar
// with those rules removed, one uncovered example at a time, reusing any
// earlier term that already handles an example.
inline Outcome solve_with_dnc(const SynthProblem &problem,
                              const SearchConfig &cfg) {
  using Clock = std::chrono::steady_clock;
  auto t0 = Clock::now();

  Grammar g = problem.grammar;
  g.index();
  g.validate();

  // Without branching rules there is nothing to divide on.
  if (!g.has_ite())
    return solve(problem, cfg);

  SearchStats stats;
  Deadline deadline;
  if (cfg.timeout_seconds > 0)
    deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(cfg.timeout_seconds));

  auto finish = [&](Outcome::Kind k, TermPtr sol) {
    stats.total_seconds =
        std::chrono::duration<double>(Clock::now() - t0).count();
    Outcome o;
    o.kind = k;
    o.solution = std::move(sol);
    o.stats = std::move(stats);
    return o;
  };

  auto remaining_seconds = [&]() {
    if (!deadline)
      return 0.0;
    return std::chrono::duration<double>(*deadline - Clock::now()).count();
  };

  const auto &examples = problem.examples;
  const size_t m = examples.size();

  try {
    // Phase one: cover every example with some branch-free term. A term
    // synthesized for one example frequently covers several, so evaluate
    // each new term on all of them before solving for the next.
    Grammar branch_grammar = g.without_ite();
    std::vector<TermPtr> terms;
    std::vector<std::vector<bool>> covers; // [term][example]
    std::vector<int> labels(m, -1);        // first covering term

    for (size_t j = 0; j < m; ++j) {
      if (labels[j] >= 0)
        continue;
      SynthProblem sub = problem;
      sub.grammar = branch_grammar;
      sub.examples = {examples[j]};
      SearchConfig sub_cfg = cfg;
      if (deadline) {
        sub_cfg.timeout_seconds = remaining_seconds();
        if (sub_cfg.timeout_seconds <= 0)
          throw TimeoutReached{};
      }
      Outcome sub_out = solve(sub, sub_cfg);
      detail::merge_stats(stats, sub_out.stats);
      if (sub_out.kind == Outcome::Kind::Timeout) {
        if (sub_out.stats.resource_limited)
          stats.resource_limited = true;
        return finish(Outcome::Kind::Timeout, nullptr);
      }
      // If one example admits no branch-free term, no conditional term can
      // satisfy it either: on a single input an ite collapses to one of
      // its branches.
      if (sub_out.kind == Outcome::Kind::Unrealizable)
        return finish(Outcome::Kind::Unrealizable, nullptr);

      int id = (int)terms.size();
      terms.push_back(sub_out.solution);
      std::vector<bool> cov(m, false);
      for (size_t i = 0; i < m; ++i) {
        Valuation env;
        for (size_t a = 0; a < problem.arg_names.size(); ++a)
          env.emplace_back(problem.arg_names[a], examples[i].inputs[a]);
        cov[i] = eval(sub_out.solution, env) == examples[i].output;
        if (cov[i] && labels[i] < 0)
          labels[i] = id;
      }
      covers.push_back(std::move(cov));
    }

    stats.cover_terms = (uint32_t)terms.size();

    for (size_t t = 0; t < terms.size(); ++t) {
      bool all = true;
      for (size_t i = 0; i < m && all; ++i)
        all = covers[t][i];
      if (all) {
        stats.solution_size = terms[t]->size;
        return finish(Outcome::Kind::Solution, terms[t]);
      }
    }

    // Phase two: grow the component pool of the full grammar and collect
    // predicate candidates from the condition nonterminals until a
    // decision tree separates the labels.
    std::set<int> pred_nts;
    for (const Production &p : g.productions)
      if (!p.leaf && p.op == OpKind::Ite)
        pred_nts.insert(p.rhs[0]);

    bool finite = g.finite_language();
    uint64_t language_bound = 0;
    if (finite)
      language_bound = g.max_term_size().value_or(0);

    std::vector<size_t> all_members(m);
    for (size_t i = 0; i < m; ++i)
      all_members[i] = i;

    ComponentPool pool;
    pool.reset(g.nt_count());
    for (int n = 1;; ++n) {
      if (cfg.max_size && (uint64_t)n > cfg.max_size)
        throw TimeoutReached{};
      check_deadline(deadline);
      grow(pool, g, problem.arg_names, examples, n, deadline);
      stats.pool_sizes.resize(
          std::max(stats.pool_sizes.size(), (size_t)n), 0);
      stats.pool_sizes[n - 1] = std::max(stats.pool_sizes[n - 1], pool.total());
      stats.max_n = std::max(stats.max_n, n);
      if (pool.total() > cfg.max_live_queue) {
        stats.resource_limited = true;
        throw TimeoutReached{};
      }

      std::vector<detail::Predicate> preds;
      std::set<std::vector<bool>> seen_truth;
      for (int nt : pred_nts) {
        for (const Component &c : pool.comps[nt]) {
          detail::Predicate p;
          p.term = c.term;
          p.truth.reserve(m);
          bool constant = true;
          for (size_t i = 0; i < m; ++i) {
            p.truth.push_back(c.outputs[i].bits != 0);
            constant = constant && p.truth[i] == p.truth[0];
          }
          if (constant || !seen_truth.insert(p.truth).second)
            continue;
          preds.push_back(std::move(p));
        }
      }

      auto tree = detail::learn_tree(all_members, labels, terms, preds);
      if (tree) {
        TermPtr sol = detail::fold_tree(*tree);
        if (!satisfies(sol, problem.arg_names, examples))
          throw SynthError(SynthError::Code::Internal,
                           "decision tree failed concrete re-check");
        stats.solution_size = sol->size;
        stats.tree_depth = detail::tree_depth(*tree);
        return finish(Outcome::Kind::Solution, sol);
      }

      if (finite && (uint64_t)n >= language_bound)
        throw SynthError(SynthError::Code::NoSeparatingPredicate,
                         "predicate language exhausted without separating "
                         "the examples");
    }
  } catch (const TimeoutReached &) {
    return finish(Outcome::Kind::Timeout, nullptr);
  }
}

} // namespace absynth

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

#include "absynth/product.hpp"
#include "absynth/term.hpp"
#include "absynth/types.hpp"

#include <string>
#include <vector>

namespace absynth {

// Preorder node table of a term; analysis maps are plain vectors indexed
// by node id, which keeps the fixpoint loop allocation-free.
struct FlatTerm {
  struct Node {
    const Term *term;
    Position pos;
    std::vector<int> children;
  };
  std::vector<Node> nodes;

  static FlatTerm build(const TermPtr &t) {
    FlatTerm ft;
    build_rec(ft, t, Position{});
    return ft;
  }

  int find(const Position &p) const {
    for (size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].pos == p)
        return (int)i;
    return -1;
  }

private:
  static int build_rec(FlatTerm &ft, const TermPtr &t, Position pos) {
    int id = (int)ft.nodes.size();
    ft.nodes.push_back({t.get(), pos, {}});
    for (uint32_t i = 0; i < t->children.size(); ++i) {
      int c = build_rec(ft, t->children[i], pos.child(i + 1));
      ft.nodes[id].children.push_back(c);
    }
    return id;
  }
};

using AnalysisMap = std::vector<AbsValue>; // indexed by FlatTerm node id

struct AnalysisResult {
  std::vector<Position> positions;  // preorder, aligned with node ids
  std::vector<AbsTuple> values;     // per node: one AbsValue per example
  bool has_bottom = false;
  // per example: the map after each pass (X0, X1, ...); filled only when
  // tracing is requested
  std::vector<std::vector<AnalysisMap>> trace;

  const AbsTuple &at(const Position &p) const {
    for (size_t i = 0; i < positions.size(); ++i)
      if (positions[i] == p)
        return values[i];
    throw SynthError(SynthError::Code::InvalidPosition,
                     "no analysis value at position " + p.str());
  }
};

namespace detail {

inline AbsValue init_value(const Term *t, const std::vector<std::string> &args,
                           const Example &ex) {
  switch (t->kind) {
  case Term::Kind::Const:
    return AbsValue::from_concrete(t->value);
  case Term::Kind::Hole:
    return AbsValue::top(t->sort);
  case Term::Kind::Var:
    for (size_t i = 0; i < args.size(); ++i)
      if (args[i] == t->name)
        return AbsValue::from_concrete(ex.inputs[i]);
    throw SynthError(SynthError::Code::UnboundVariable,
                     "unbound variable " + t->name);
  case Term::Kind::App:
    return AbsValue::bottom(t->sort);
  }
  throw SynthError(SynthError::Code::Internal, "unknown term kind");
}

// One post-order forward sweep. The first sweep installs the transfer
// results directly; later sweeps meet them into the running map, keeping
// the chain decreasing.
inline void forward_sweep(const FlatTerm &ft, int id, AnalysisMap &map,
                          const std::vector<std::string> &args,
                          const Example &ex, bool meet_into) {
  const FlatTerm::Node &n = ft.nodes[id];
  for (int c : n.children)
    forward_sweep(ft, c, map, args, ex, meet_into);
  AbsValue v;
  if (n.term->kind == Term::Kind::App) {
    std::vector<AbsValue> cv;
    cv.reserve(n.children.size());
    for (int c : n.children)
      cv.push_back(map[c]);
    v = forward_abs(n.term->op, cv);
  } else {
    v = init_value(n.term, args, ex);
  }
  map[id] = meet_into ? reduce(map[id].meet(v)) : v;
}

// One pre-order backward sweep; the root has already been met with the
// output abstraction by the caller.
inline void backward_sweep(const FlatTerm &ft, int id, AnalysisMap &map) {
  const FlatTerm::Node &n = ft.nodes[id];
  if (n.term->kind != Term::Kind::App)
    return;
  for (size_t i = 0; i < n.children.size(); ++i) {
    std::vector<AbsValue> cv;
    cv.reserve(n.children.size());
    for (int c : n.children)
      cv.push_back(map[c]);
    map[n.children[i]] = backward_abs(n.term->op, i, map[id], cv);
  }
  for (int c : n.children)
    backward_sweep(ft, c, map);
}

inline AnalysisMap analyze_one(const FlatTerm &ft,
                               const std::vector<std::string> &args,
                               const Example &ex,
                               std::vector<AnalysisMap> *trace) {
  AnalysisMap map(ft.nodes.size());
  forward_sweep(ft, 0, map, args, ex, false);
  if (trace)
    trace->push_back(map);

  uint32_t w = 1;
  for (const FlatTerm::Node &n : ft.nodes)
    if (!n.term->sort.is_bool)
      w = std::max(w, n.term->sort.width);
  const size_t cap = 2 * (size_t)w * ft.nodes.size() + 4;

  const AbsValue out = AbsValue::from_concrete(ex.output);
  size_t passes = 0;
  for (;;) {
    AnalysisMap before = map;

    map[0] = reduce(map[0].meet(out));
    backward_sweep(ft, 0, map);
    if (trace)
      trace->push_back(map);
    if (++passes > cap)
      throw SynthError(SynthError::Code::Internal,
                       "analysis alternation cap exceeded");

    forward_sweep(ft, 0, map, args, ex, true);
    if (trace)
      trace->push_back(map);
    if (++passes > cap)
      throw SynthError(SynthError::Code::Internal,
                       "analysis alternation cap exceeded");

    if (map == before)
      return map;
  }
}

} // namespace detail

// Iterated forward-backward analysis of a (possibly partial) term against
// every example. The returned per-position tuples are the necessary
// preconditions: any completion whose subterm outputs fall outside them
// cannot satisfy the examples.
inline AnalysisResult analyze(const TermPtr &t,
                              const std::vector<std::string> &args,
                              const std::vector<Example> &examples,
                              bool want_trace = false) {
  FlatTerm ft = FlatTerm::build(t);
  AnalysisResult res;
  res.positions.reserve(ft.nodes.size());
  for (const FlatTerm::Node &n : ft.nodes)
    res.positions.push_back(n.pos);
  res.values.assign(ft.nodes.size(), {});
  if (want_trace)
    res.trace.resize(examples.size());

  for (size_t j = 0; j < examples.size(); ++j) {
    AnalysisMap map = detail::analyze_one(
        ft, args, examples[j], want_trace ? &res.trace[j] : nullptr);
    for (size_t i = 0; i < map.size(); ++i) {
      if (map[i].is_bottom())
        res.has_bottom = true;
      res.values[i].push_back(std::move(map[i]));
    }
  }
  return res;
}

} // namespace absynth

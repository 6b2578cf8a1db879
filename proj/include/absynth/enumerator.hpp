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

#include "absynth/eval.hpp"
#include "absynth/product.hpp"
#include "absynth/term.hpp"
#include "absynth/types.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace absynth {

// A complete grammar-derivable term together with its outputs on the m
// example inputs. Components are the raw material holes get filled with.
struct Component {
  TermPtr term;
  std::vector<Value> outputs;
  uint32_t size;
};

namespace detail {

struct OutputKeyHash {
  size_t operator()(const std::vector<uint64_t> &v) const {
    size_t h = v.size();
    for (uint64_t x : v)
      h = hash_mix(h, x);
    return h;
  }
};

inline std::vector<uint64_t> output_key(const std::vector<Value> &outputs) {
  std::vector<uint64_t> key;
  key.reserve(outputs.size());
  for (const Value &v : outputs)
    key.push_back(v.bits);
  return key;
}

} // namespace detail

// Per-nonterminal component sets, grown one size layer at a time, with two
// views: size strata (for composition) and an output-vector index (for
// precondition lookups). Two components with identical outputs under the
// same nonterminal are observationally equivalent; only the first survives.
struct ComponentPool {
  using Index =
      std::unordered_map<std::vector<uint64_t>, int, detail::OutputKeyHash>;

  std::vector<std::vector<Component>> comps; // [nt] in insertion order
  std::vector<std::vector<std::vector<int>>> by_size; // [nt][size] -> ids
  std::vector<Index> index;                           // [nt] outputs -> id
  int n = 0;

  void reset(int nt_count) {
    comps.assign(nt_count, {});
    by_size.assign(nt_count, {});
    index.assign(nt_count, {});
    n = 0;
  }

  size_t total() const {
    size_t s = 0;
    for (const auto &c : comps)
      s += c.size();
    return s;
  }

  bool insert(int nt, Component c) {
    auto key = detail::output_key(c.outputs);
    auto [it, fresh] = index[nt].try_emplace(std::move(key), 0);
    if (!fresh)
      return false;
    int id = (int)comps[nt].size();
    it->second = id;
    while (by_size[nt].size() <= c.size)
      by_size[nt].push_back({});
    by_size[nt][c.size].push_back(id);
    comps[nt].push_back(std::move(c));
    return true;
  }
};

namespace detail {

// All ways to write `total` as an ordered sum of `parts` positive terms.
inline void compositions(int total, int parts, std::vector<int> &cur,
                         std::vector<std::vector<int>> &out) {
  if (parts == 1) {
    if (total >= 1) {
      cur.push_back(total);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  for (int first = 1; first <= total - (parts - 1); ++first) {
    cur.push_back(first);
    compositions(total - first, parts - 1, cur, out);
    cur.pop_back();
  }
}

inline void compose_production(ComponentPool &pool, const Production &p,
                               int n, size_t m, const Deadline &deadline) {
  int k = (int)p.rhs.size();
  std::vector<std::vector<int>> sizings;
  std::vector<int> cur;
  compositions(n - 1, k, cur, sizings);
  std::vector<Value> argv(k, Value{});
  uint64_t steps = 0;
  for (const std::vector<int> &sizes : sizings) {
    // check the strata exist before iterating
    bool viable = true;
    for (int i = 0; i < k && viable; ++i)
      viable = sizes[i] < (int)pool.by_size[p.rhs[i]].size() &&
               !pool.by_size[p.rhs[i]][sizes[i]].empty();
    if (!viable)
      continue;

    std::vector<int> pick(k, 0);
    for (;;) {
      if ((++steps & 0xfff) == 0)
        check_deadline(deadline);
      std::vector<TermPtr> children;
      children.reserve(k);
      for (int i = 0; i < k; ++i)
        children.push_back(
            pool.comps[p.rhs[i]][pool.by_size[p.rhs[i]][sizes[i]][pick[i]]]
                .term);
      Component c;
      c.term = Term::app(p.op, std::move(children));
      c.size = (uint32_t)n;
      c.outputs.reserve(m);
      for (size_t j = 0; j < m; ++j) {
        for (int i = 0; i < k; ++i)
          argv[i] = pool.comps[p.rhs[i]]
                        [pool.by_size[p.rhs[i]][sizes[i]][pick[i]]]
                            .outputs[j];
        c.outputs.push_back(eval_op(p.op, argv));
      }
      pool.insert(p.lhs, std::move(c));

      int i = k - 1;
      for (; i >= 0; --i) {
        if (++pick[i] < (int)pool.by_size[p.rhs[i]][sizes[i]].size())
          break;
        pick[i] = 0;
      }
      if (i < 0)
        break;
    }
  }
}

} // namespace detail

// Grow the pool from bound n-1 to n. The size-1 layer consists of the
// grammar's variables and literal constants; composite layers combine
// smaller components through each application production, computing
// outputs pointwise from the children's outputs.
inline void grow(ComponentPool &pool, const Grammar &g,
                 const std::vector<std::string> &args,
                 const std::vector<Example> &examples, int n,
                 const Deadline &deadline = {}) {
  if (pool.comps.empty())
    pool.reset(g.nt_count());
  if (n == 1) {
    for (const Production &p : g.productions) {
      if (!p.leaf)
        continue;
      Component c;
      c.term = p.leaf;
      c.size = 1;
      c.outputs = eval_outputs(p.leaf, args, examples);
      pool.insert(p.lhs, std::move(c));
    }
  } else {
    for (const Production &p : g.productions)
      if (!p.leaf)
        detail::compose_production(pool, p, n, examples.size(), deadline);
  }
  pool.n = n;
}

// Component ids under `nt` whose abstracted output vectors fit inside the
// precondition tuple. When every tuple entry has a small concretization
// and the cross product stays under `limit`, candidate vectors are
// enumerated and looked up in the index; otherwise the pool is scanned.
// Both paths return the same ids, ascending.
inline std::vector<int> components_satisfying(const ComponentPool &pool,
                                              int nt,
                                              const AbsTuple &precondition,
                                              uint64_t limit) {
  std::vector<int> out;

  std::vector<std::vector<uint64_t>> sets;
  bool indexable = true;
  uint64_t product = 1;
  for (const AbsValue &a : precondition) {
    auto s = concretize_if_small(a, limit);
    if (!s) {
      indexable = false;
      break;
    }
    product = product * (uint64_t)s->size();
    if (s->empty() || product > limit) {
      if (s->empty())
        return out; // some example admits no value at all
      indexable = false;
      break;
    }
    sets.push_back(std::move(*s));
  }

  if (indexable) {
    std::vector<size_t> pick(sets.size(), 0);
    std::vector<uint64_t> key(sets.size());
    for (;;) {
      for (size_t j = 0; j < sets.size(); ++j)
        key[j] = sets[j][pick[j]];
      auto it = pool.index[nt].find(key);
      if (it != pool.index[nt].end())
        out.push_back(it->second);
      size_t j = sets.size();
      for (; j-- > 0;) {
        if (++pick[j] < sets[j].size())
          break;
        pick[j] = 0;
      }
      if (j == (size_t)-1)
        break;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  for (int id = 0; id < (int)pool.comps[nt].size(); ++id) {
    const Component &c = pool.comps[nt][id];
    bool ok = true;
    for (size_t j = 0; j < precondition.size() && ok; ++j)
      ok = precondition[j].contains(c.outputs[j]);
    if (ok)
      out.push_back(id);
  }
  return out;
}

} // namespace absynth

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

#include "absynth/types.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace absynth {

enum class OpKind : uint8_t {
  // bitvector arithmetic and logic
  BvNot,
  BvNeg,
  BvAnd,
  BvOr,
  BvXor,
  BvAdd,
  BvSub,
  BvMul,
  BvUdiv,
  BvSdiv,
  BvUrem,
  BvSrem,
  BvShl,
  BvLshr,
  BvAshr,
  // bitvector predicates
  BvUle,
  BvUlt,
  BvSle,
  BvSlt,
  Eq,
  // booleans
  And,
  Or,
  Xor,
  Not,
  // conditional (Bool, T, T) -> T
  Ite,
};

struct OpInfo {
  OpKind kind;
  const char *name;
  int arity;
};

inline const std::vector<OpInfo> &op_table() {
  static const std::vector<OpInfo> table = {
      {OpKind::BvNot, "bvnot", 1},   {OpKind::BvNeg, "bvneg", 1},
      {OpKind::BvAnd, "bvand", 2},   {OpKind::BvOr, "bvor", 2},
      {OpKind::BvXor, "bvxor", 2},   {OpKind::BvAdd, "bvadd", 2},
      {OpKind::BvSub, "bvsub", 2},   {OpKind::BvMul, "bvmul", 2},
      {OpKind::BvUdiv, "bvudiv", 2}, {OpKind::BvSdiv, "bvsdiv", 2},
      {OpKind::BvUrem, "bvurem", 2}, {OpKind::BvSrem, "bvsrem", 2},
      {OpKind::BvShl, "bvshl", 2},   {OpKind::BvLshr, "bvlshr", 2},
      {OpKind::BvAshr, "bvashr", 2}, {OpKind::BvUle, "bvule", 2},
      {OpKind::BvUlt, "bvult", 2},   {OpKind::BvSle, "bvsle", 2},
      {OpKind::BvSlt, "bvslt", 2},   {OpKind::Eq, "=", 2},
      {OpKind::And, "and", 2},       {OpKind::Or, "or", 2},
      {OpKind::Xor, "xor", 2},       {OpKind::Not, "not", 1},
      {OpKind::Ite, "ite", 3},
  };
  return table;
}

inline const OpInfo &op_info(OpKind k) { return op_table()[(size_t)k]; }
inline const char *op_name(OpKind k) { return op_info(k).name; }
inline int op_arity(OpKind k) { return op_info(k).arity; }

inline std::optional<OpKind> op_from_name(std::string_view name) {
  for (const OpInfo &info : op_table())
    if (name == info.name)
      return info.kind;
  return std::nullopt;
}

// True for the operators whose result sort is Bool.
inline bool op_returns_bool(OpKind k) {
  switch (k) {
  case OpKind::BvUle:
  case OpKind::BvUlt:
  case OpKind::BvSle:
  case OpKind::BvSlt:
  case OpKind::Eq:
  case OpKind::And:
  case OpKind::Or:
  case OpKind::Xor:
  case OpKind::Not:
    return true;
  default:
    return false;
  }
}

class Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable term tree. Size, height, hole count, and a structural hash are
// computed once at construction; sharing subtrees is safe and encouraged.
class Term {
public:
  enum class Kind : uint8_t { Var, Const, App, Hole };

  Kind kind;
  Sort sort;
  OpKind op = OpKind::BvNot; // App only
  std::string name;          // Var only
  Value value;               // Const only
  int nt = -1;               // Hole only: grammar nonterminal id
  std::vector<TermPtr> children;

  uint32_t size = 1;     // node count
  uint32_t height = 0;   // edges on the longest root-to-leaf path
  uint32_t num_holes = 0;
  size_t hash = 0;

  bool complete() const { return num_holes == 0; }

  static TermPtr var(std::string name, Sort sort) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Var;
    t->sort = sort;
    t->name = std::move(name);
    t->hash = hash_mix(hash_mix(1, std::hash<std::string>{}(t->name)),
                       sort_key(sort));
    return t;
  }

  static TermPtr constant(Value v) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Const;
    t->sort = v.sort;
    t->value = v;
    t->hash = hash_mix(hash_mix(2, v.bits), sort_key(v.sort));
    return t;
  }

  static TermPtr hole(int nt, Sort sort) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Hole;
    t->sort = sort;
    t->nt = nt;
    t->num_holes = 1;
    t->hash = hash_mix(hash_mix(3, (size_t)nt), sort_key(sort));
    return t;
  }

  static TermPtr app(OpKind op, std::vector<TermPtr> children) {
    const OpInfo &info = op_info(op);
    if ((int)children.size() != info.arity)
      throw SynthError(SynthError::Code::SortMismatch,
                       std::string(info.name) + " expects " +
                           std::to_string(info.arity) + " operands");
    auto t = std::make_shared<Term>();
    t->kind = Kind::App;
    t->op = op;
    t->sort = derive_sort(op, children);
    t->children = std::move(children);
    size_t h = hash_mix(4, (size_t)op);
    for (const TermPtr &c : t->children) {
      t->size += c->size;
      t->height = std::max(t->height, c->height + 1);
      t->num_holes += c->num_holes;
      h = hash_mix(h, c->hash);
    }
    t->hash = h;
    return t;
  }

private:
  static size_t sort_key(Sort s) {
    return s.is_bool ? ~0ull : (size_t)s.width;
  }

  static Sort derive_sort(OpKind op, const std::vector<TermPtr> &ch) {
    auto require_bv = [&](const TermPtr &c) {
      if (c->sort.is_bool)
        throw SynthError(SynthError::Code::SortMismatch,
                         std::string(op_name(op)) + ": bitvector operand expected");
    };
    auto require_bool = [&](const TermPtr &c) {
      if (!c->sort.is_bool)
        throw SynthError(SynthError::Code::SortMismatch,
                         std::string(op_name(op)) + ": Bool operand expected");
    };
    auto require_same = [&](const TermPtr &a, const TermPtr &b) {
      if (!(a->sort == b->sort))
        throw SynthError(SynthError::Code::WidthMismatch,
                         std::string(op_name(op)) + ": operand sorts differ");
    };
    switch (op) {
    case OpKind::And:
    case OpKind::Or:
    case OpKind::Xor:
      require_bool(ch[0]);
      require_bool(ch[1]);
      return Sort::bool_sort();
    case OpKind::Not:
      require_bool(ch[0]);
      return Sort::bool_sort();
    case OpKind::BvUle:
    case OpKind::BvUlt:
    case OpKind::BvSle:
    case OpKind::BvSlt:
      require_bv(ch[0]);
      require_same(ch[0], ch[1]);
      return Sort::bool_sort();
    case OpKind::Eq:
      require_same(ch[0], ch[1]);
      return Sort::bool_sort();
    case OpKind::Ite:
      require_bool(ch[0]);
      require_same(ch[1], ch[2]);
      return ch[1]->sort;
    case OpKind::BvNot:
    case OpKind::BvNeg:
      require_bv(ch[0]);
      return ch[0]->sort;
    default:
      require_bv(ch[0]);
      require_same(ch[0], ch[1]);
      return ch[0]->sort;
    }
  }
};

inline bool term_eq(const TermPtr &a, const TermPtr &b) {
  if (a.get() == b.get())
    return true;
  if (a->hash != b->hash || a->kind != b->kind || !(a->sort == b->sort))
    return false;
  switch (a->kind) {
  case Term::Kind::Var:
    return a->name == b->name;
  case Term::Kind::Const:
    return a->value == b->value;
  case Term::Kind::Hole:
    return a->nt == b->nt;
  case Term::Kind::App:
    if (a->op != b->op || a->children.size() != b->children.size())
      return false;
    for (size_t i = 0; i < a->children.size(); ++i)
      if (!term_eq(a->children[i], b->children[i]))
        return false;
    return true;
  }
  return false;
}

// A path from the root; entry k selects the k-th child, 1-based. The empty
// path is the root itself and renders as "e".
struct Position {
  std::vector<uint32_t> path;

  bool operator==(const Position &o) const = default;
  bool operator<(const Position &o) const { return path < o.path; }

  Position child(uint32_t i) const {
    Position p = *this;
    p.path.push_back(i);
    return p;
  }

  std::string str() const {
    if (path.empty())
      return "e";
    std::string s;
    for (size_t i = 0; i < path.size(); ++i) {
      if (i && path[i - 1] > 9)
        s += '.';
      s += std::to_string(path[i]);
    }
    return s;
  }
};

inline void collect_positions(const TermPtr &t, Position here,
                              std::vector<Position> &out) {
  out.push_back(here);
  for (uint32_t i = 0; i < t->children.size(); ++i)
    collect_positions(t->children[i], here.child(i + 1), out);
}

// All positions of a term in preorder.
inline std::vector<Position> positions(const TermPtr &t) {
  std::vector<Position> out;
  collect_positions(t, Position{}, out);
  return out;
}

inline const TermPtr &subterm(const TermPtr &t, const Position &pos) {
  const TermPtr *cur = &t;
  for (uint32_t step : pos.path) {
    if (step < 1 || step > (*cur)->children.size())
      throw SynthError(SynthError::Code::InvalidPosition,
                       "no subterm at position " + pos.str());
    cur = &(*cur)->children[step - 1];
  }
  return *cur;
}

// Functional replacement: shares every subtree off the path.
inline TermPtr replace(const TermPtr &t, const Position &pos,
                       const TermPtr &sub, size_t depth = 0) {
  if (depth == pos.path.size())
    return sub;
  uint32_t step = pos.path[depth];
  if (step < 1 || step > t->children.size())
    throw SynthError(SynthError::Code::InvalidPosition,
                     "no subterm at position " + pos.str());
  std::vector<TermPtr> ch = t->children;
  ch[step - 1] = replace(ch[step - 1], pos, sub, depth + 1);
  return Term::app(t->op, std::move(ch));
}

// Hole positions in preorder, each with the hole's nonterminal id.
inline void collect_holes(const TermPtr &t, Position here,
                          std::vector<std::pair<Position, int>> &out) {
  if (t->kind == Term::Kind::Hole) {
    out.emplace_back(here, t->nt);
    return;
  }
  if (t->num_holes == 0)
    return;
  for (uint32_t i = 0; i < t->children.size(); ++i)
    collect_holes(t->children[i], here.child(i + 1), out);
}

inline std::vector<std::pair<Position, int>> holes(const TermPtr &t) {
  std::vector<std::pair<Position, int>> out;
  collect_holes(t, Position{}, out);
  return out;
}

inline void to_sexpr(const TermPtr &t, std::string &out,
                     const std::vector<std::string> *nt_names = nullptr) {
  switch (t->kind) {
  case Term::Kind::Var:
    out += t->name;
    return;
  case Term::Kind::Const:
    out += t->value.str();
    return;
  case Term::Kind::Hole:
    out += "??";
    if (nt_names && t->nt >= 0 && t->nt < (int)nt_names->size())
      out += (*nt_names)[t->nt];
    else
      out += std::to_string(t->nt);
    return;
  case Term::Kind::App:
    out += '(';
    out += op_name(t->op);
    for (const TermPtr &c : t->children) {
      out += ' ';
      to_sexpr(c, out, nt_names);
    }
    out += ')';
    return;
  }
}

inline std::string to_sexpr(const TermPtr &t,
                            const std::vector<std::string> *nt_names = nullptr) {
  std::string out;
  to_sexpr(t, out, nt_names);
  return out;
}

// One grammar rule. Leaf rules carry a prototype term (a variable reference
// or a literal); application rules carry the operator and the nonterminals
// its operands are drawn from.
struct Production {
  int lhs = 0;
  TermPtr leaf;         // null for application rules
  OpKind op = OpKind::BvNot;
  std::vector<int> rhs; // empty for leaf rules
};

struct Grammar {
  std::vector<std::string> nt_names;
  std::vector<Sort> nt_sorts;
  int start = 0;
  std::vector<Production> productions;
  std::vector<std::vector<size_t>> by_nt; // production indices per lhs

  int nt_count() const { return (int)nt_names.size(); }

  int find_nt(std::string_view name) const {
    for (int i = 0; i < nt_count(); ++i)
      if (nt_names[i] == name)
        return i;
    return -1;
  }

  void index() {
    by_nt.assign(nt_names.size(), {});
    for (size_t i = 0; i < productions.size(); ++i)
      by_nt[productions[i].lhs].push_back(i);
  }

  void validate() const {
    if (nt_names.empty() || start < 0 || start >= nt_count())
      throw SynthError(SynthError::Code::Internal, "malformed grammar");
    for (const Production &p : productions) {
      if (p.lhs < 0 || p.lhs >= nt_count())
        throw SynthError(SynthError::Code::Internal, "production lhs out of range");
      if (p.leaf) {
        if (!(p.leaf->sort == nt_sorts[p.lhs]))
          throw SynthError(SynthError::Code::SortMismatch,
                           "leaf sort disagrees with nonterminal " +
                               nt_names[p.lhs]);
        continue;
      }
      if ((int)p.rhs.size() != op_arity(p.op))
        throw SynthError(SynthError::Code::SortMismatch,
                         std::string(op_name(p.op)) + ": operand count mismatch");
      for (int r : p.rhs)
        if (r < 0 || r >= nt_count())
          throw SynthError(SynthError::Code::Internal,
                           "production rhs out of range");
      // Build a throwaway application from hole prototypes; Term::app does
      // the sort checking.
      std::vector<TermPtr> ch;
      for (int r : p.rhs)
        ch.push_back(Term::hole(r, nt_sorts[r]));
      TermPtr probe = Term::app(p.op, std::move(ch));
      if (!(probe->sort == nt_sorts[p.lhs]))
        throw SynthError(SynthError::Code::SortMismatch,
                         "result sort disagrees with nonterminal " +
                             nt_names[p.lhs]);
    }
  }

  // Nonterminals reachable from the start symbol.
  std::vector<bool> reachable() const {
    std::vector<bool> seen(nt_names.size(), false);
    std::vector<int> work{start};
    seen[start] = true;
    while (!work.empty()) {
      int nt = work.back();
      work.pop_back();
      for (size_t pi : by_nt[nt])
        for (int r : productions[pi].rhs)
          if (!seen[r]) {
            seen[r] = true;
            work.push_back(r);
          }
    }
    return seen;
  }

  // True when the reachable part of the grammar has no cycles, i.e. the
  // language is a finite set of terms.
  bool finite_language() const {
    std::vector<bool> reach = reachable();
    std::vector<int> state(nt_names.size(), 0); // 0 new, 1 open, 2 done
    bool cyclic = false;
    auto dfs = [&](auto &&self, int nt) -> void {
      if (cyclic || state[nt] == 2)
        return;
      if (state[nt] == 1) {
        cyclic = true;
        return;
      }
      state[nt] = 1;
      for (size_t pi : by_nt[nt])
        for (int r : productions[pi].rhs)
          self(self, r);
      state[nt] = 2;
    };
    for (int nt = 0; nt < nt_count(); ++nt)
      if (reach[nt])
        dfs(dfs, nt);
    return !cyclic;
  }

  // Largest size of any derivable term, when the language is finite.
  std::optional<uint64_t> max_term_size() const {
    if (!finite_language())
      return std::nullopt;
    std::vector<uint64_t> memo(nt_names.size(), 0);
    std::vector<bool> done(nt_names.size(), false);
    auto dfs = [&](auto &&self, int nt) -> uint64_t {
      if (done[nt])
        return memo[nt];
      uint64_t best = 0;
      for (size_t pi : by_nt[nt]) {
        const Production &p = productions[pi];
        uint64_t sz = 1;
        for (int r : p.rhs)
          sz += self(self, r);
        best = std::max(best, sz);
      }
      done[nt] = true;
      memo[nt] = best;
      return best;
    };
    return dfs(dfs, start);
  }

  bool has_ite() const {
    for (const Production &p : productions)
      if (!p.leaf && p.op == OpKind::Ite)
        return true;
    return false;
  }

  // Copy of the grammar with every ite rule removed. Used to synthesize
  // straight-line branch bodies separately from the branching structure.
  Grammar without_ite() const {
    Grammar g;
    g.nt_names = nt_names;
    g.nt_sorts = nt_sorts;
    g.start = start;
    for (const Production &p : productions)
      if (p.leaf || p.op != OpKind::Ite)
        g.productions.push_back(p);
    g.index();
    return g;
  }
};

} // namespace absynth

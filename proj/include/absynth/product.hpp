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

#include "absynth/bitwise.hpp"
#include "absynth/interval.hpp"
#include "absynth/term.hpp"
#include "absynth/types.hpp"

#include <bit>
#include <optional>
#include <span>
#include <vector>

namespace absynth {

// Three-valued Boolean abstraction (the one-bit corner of the bitwise
// lattice).
struct AbstractBool {
  bool may_false = true;
  bool may_true = true;

  static AbstractBool top() { return {true, true}; }
  static AbstractBool bottom() { return {false, false}; }
  static AbstractBool from_concrete(bool b) { return {!b, b}; }

  bool operator==(const AbstractBool &o) const = default;

  bool is_bottom() const { return !may_false && !may_true; }
  bool is_true() const { return may_true && !may_false; }
  bool is_false() const { return may_false && !may_true; }
  bool is_singleton() const { return may_false != may_true; }
  bool contains(bool b) const { return b ? may_true : may_false; }

  AbstractBool join(const AbstractBool &o) const {
    return {may_false || o.may_false, may_true || o.may_true};
  }
  AbstractBool meet(const AbstractBool &o) const {
    return {may_false && o.may_false, may_true && o.may_true};
  }
  bool leq(const AbstractBool &o) const {
    return (!may_false || o.may_false) && (!may_true || o.may_true);
  }

  char render() const {
    return is_bottom() ? 'B' : is_true() ? '1' : is_false() ? '0' : 'T';
  }
};

// --- projections between the three bitvector components ---

inline UInterval project_bits_to_uint(const BitwiseValue &b) {
  if (b.any_bottom())
    return UInterval::bottom(b.width);
  // smallest member sets only the forced ones, largest sets all possible
  return UInterval::make(b.forced1(), b.may1, b.width);
}

inline SInterval project_bits_to_sint(const BitwiseValue &b) {
  if (b.any_bottom())
    return SInterval::bottom(b.width);
  uint64_t msb = sign_bit(b.width);
  uint64_t free_msb = b.free_bits() & msb;
  // most negative: free sign bit taken as 1, other free bits as 0
  uint64_t lo = b.forced1() | free_msb;
  uint64_t hi = (b.may1 & ~free_msb);
  return SInterval{b.width, false, lo, hi};
}

inline BitwiseValue prefix_to_bits(uint64_t lo, uint64_t hi, uint32_t w) {
  uint64_t diff = lo ^ hi;
  if (diff == 0)
    return BitwiseValue::from_concrete(lo, w);
  // bits above the highest differing position are shared by every value
  // between the bounds
  uint64_t varying = bv_mask((uint32_t)std::bit_width(diff));
  uint64_t m = bv_mask(w);
  return {w, ((~lo & m) & ~varying) | varying, (lo & ~varying) | varying};
}

inline BitwiseValue project_uint_to_bits(const UInterval &u) {
  if (u.empty)
    return BitwiseValue::bottom(u.width);
  return prefix_to_bits(u.lo, u.hi, u.width);
}

inline BitwiseValue project_sint_to_bits(const SInterval &s) {
  if (s.empty)
    return BitwiseValue::bottom(s.width);
  // the prefix argument only works within a single sign region
  if (((s.lo ^ s.hi) & sign_bit(s.width)) != 0)
    return BitwiseValue::top(s.width);
  return prefix_to_bits(s.lo, s.hi, s.width);
}

inline SInterval project_uint_to_sint(const UInterval &u) {
  if (u.empty)
    return SInterval::bottom(u.width);
  if (((u.lo ^ u.hi) & sign_bit(u.width)) != 0)
    return SInterval::top(u.width);
  return SInterval{u.width, false, u.lo, u.hi};
}

inline UInterval project_sint_to_uint(const SInterval &s) {
  if (s.empty)
    return UInterval::bottom(s.width);
  if (((s.lo ^ s.hi) & sign_bit(s.width)) != 0)
    return UInterval::top(s.width);
  return UInterval{s.width, false, s.lo, s.hi};
}

// Reduced-product element. Bitvector values carry all three components,
// kept mutually consistent by reduce(); Boolean values carry a single
// abstract bit.
struct AbsValue {
  Sort sort;
  BitwiseValue bits;
  SInterval si;
  UInterval ui;
  AbstractBool ab;

  static AbsValue top(Sort s) {
    AbsValue v;
    v.sort = s;
    if (s.is_bool) {
      v.ab = AbstractBool::top();
    } else {
      v.bits = BitwiseValue::top(s.width);
      v.si = SInterval::top(s.width);
      v.ui = UInterval::top(s.width);
      v.ab = AbstractBool::bottom(); // unused for bitvectors
    }
    return v;
  }

  static AbsValue bottom(Sort s) {
    AbsValue v;
    v.sort = s;
    if (s.is_bool) {
      v.ab = AbstractBool::bottom();
    } else {
      v.bits = BitwiseValue::bottom(s.width);
      v.si = SInterval::bottom(s.width);
      v.ui = UInterval::bottom(s.width);
      v.ab = AbstractBool::bottom();
    }
    return v;
  }

  static AbsValue bv(BitwiseValue b, SInterval s, UInterval u) {
    AbsValue v;
    v.sort = Sort::bv(b.width);
    v.bits = b;
    v.si = s;
    v.ui = u;
    v.ab = AbstractBool::bottom();
    return v;
  }

  static AbsValue from_concrete(const Value &c) {
    AbsValue v;
    v.sort = c.sort;
    if (c.sort.is_bool) {
      v.ab = AbstractBool::from_concrete(c.bits != 0);
    } else {
      v.bits = BitwiseValue::from_concrete(c.bits, c.sort.width);
      v.si = SInterval::from_concrete(c.bits, c.sort.width);
      v.ui = UInterval::from_concrete(c.bits, c.sort.width);
      v.ab = AbstractBool::bottom();
    }
    return v;
  }

  bool operator==(const AbsValue &o) const = default;

  bool is_bottom() const {
    if (sort.is_bool)
      return ab.is_bottom();
    return bits.any_bottom() || si.empty || ui.empty;
  }

  bool is_singleton() const {
    if (sort.is_bool)
      return ab.is_singleton();
    return bits.is_singleton();
  }

  bool contains(const Value &c) const {
    if (sort.is_bool)
      return ab.contains(c.bits != 0);
    return bits.contains(c.bits) && si.contains(c.bits) &&
           ui.contains(c.bits);
  }

  AbsValue meet(const AbsValue &o) const {
    AbsValue v = *this;
    if (sort.is_bool) {
      v.ab = ab.meet(o.ab);
    } else {
      v.bits = bits.meet(o.bits);
      v.si = si.meet(o.si);
      v.ui = ui.meet(o.ui);
    }
    return v;
  }

  AbsValue join(const AbsValue &o) const {
    AbsValue v = *this;
    if (sort.is_bool) {
      v.ab = ab.join(o.ab);
    } else {
      v.bits = bits.join(o.bits);
      v.si = si.join(o.si);
      v.ui = ui.join(o.ui);
    }
    return v;
  }

  bool leq(const AbsValue &o) const {
    if (sort.is_bool)
      return ab.leq(o.ab);
    if (is_bottom())
      return true;
    return bits.leq(o.bits) && si.leq(o.si) && ui.leq(o.ui);
  }

  std::string str() const {
    if (sort.is_bool)
      return std::string(1, ab.render());
    return "<" + bits.str() + ", " + si.str() + ", " + ui.str() + ">";
  }
};

// The reduction operator: recompute all six projections, meet them in, and
// repeat until nothing changes. Any bottom component collapses the whole
// value to the canonical bottom.
inline AbsValue reduce(AbsValue v) {
  if (v.sort.is_bool)
    return v.ab.is_bottom() ? AbsValue::bottom(v.sort) : v;
  for (int round = 0; round < 200; ++round) {
    if (v.bits.any_bottom() || v.si.empty || v.ui.empty)
      return AbsValue::bottom(v.sort);
    BitwiseValue b = v.bits.meet(project_uint_to_bits(v.ui))
                         .meet(project_sint_to_bits(v.si));
    UInterval u = v.ui.meet(project_bits_to_uint(v.bits))
                      .meet(project_sint_to_uint(v.si));
    SInterval s = v.si.meet(project_bits_to_sint(v.bits))
                      .meet(project_uint_to_sint(v.ui));
    if (b == v.bits && u == v.ui && s == v.si)
      return v;
    v.bits = b;
    v.ui = u;
    v.si = s;
  }
  throw SynthError(SynthError::Code::Internal,
                   "product reduction failed to converge");
}

using AbsTuple = std::vector<AbsValue>;

namespace detail {

inline AbstractBool bool_and(AbstractBool a, AbstractBool b) {
  return {a.may_false || b.may_false, a.may_true && b.may_true};
}
inline AbstractBool bool_or(AbstractBool a, AbstractBool b) {
  return {a.may_false && b.may_false, a.may_true || b.may_true};
}
inline AbstractBool bool_xor(AbstractBool a, AbstractBool b) {
  return {(a.may_false && b.may_false) || (a.may_true && b.may_true),
          (a.may_false && b.may_true) || (a.may_true && b.may_false)};
}
inline AbstractBool bool_not(AbstractBool a) {
  return {a.may_true, a.may_false};
}

inline AbstractBool compare_abs(OpKind op, const AbsValue &a,
                                const AbsValue &b) {
  switch (op) {
  case OpKind::BvUle:
    if (a.ui.hi <= b.ui.lo)
      return AbstractBool::from_concrete(true);
    if (a.ui.lo > b.ui.hi)
      return AbstractBool::from_concrete(false);
    return AbstractBool::top();
  case OpKind::BvUlt:
    if (a.ui.hi < b.ui.lo)
      return AbstractBool::from_concrete(true);
    if (a.ui.lo >= b.ui.hi)
      return AbstractBool::from_concrete(false);
    return AbstractBool::top();
  case OpKind::BvSle:
    if (a.si.shi() <= b.si.slo())
      return AbstractBool::from_concrete(true);
    if (a.si.slo() > b.si.shi())
      return AbstractBool::from_concrete(false);
    return AbstractBool::top();
  default: // BvSlt
    if (a.si.shi() < b.si.slo())
      return AbstractBool::from_concrete(true);
    if (a.si.slo() >= b.si.shi())
      return AbstractBool::from_concrete(false);
    return AbstractBool::top();
  }
}

inline AbstractBool equal_abs(const AbsValue &a, const AbsValue &b) {
  if (a.sort.is_bool) {
    if (a.ab.is_singleton() && b.ab.is_singleton())
      return AbstractBool::from_concrete(a.ab.is_true() == b.ab.is_true());
    if (a.ab.meet(b.ab).is_bottom())
      return AbstractBool::from_concrete(false);
    return AbstractBool::top();
  }
  if (a.is_singleton() && b.is_singleton())
    return AbstractBool::from_concrete(a.bits.singleton_value() ==
                                       b.bits.singleton_value());
  if (reduce(a.meet(b)).is_bottom())
    return AbstractBool::from_concrete(false);
  return AbstractBool::top();
}

} // namespace detail

// Forward transfer at the product level: componentwise transfers followed
// by reduction; comparisons and Boolean connectives work on the abstract
// bit; ite joins the branches the condition admits.
inline AbsValue forward_abs(OpKind op, std::span<const AbsValue> args) {
  using namespace detail;
  for (const AbsValue &a : args)
    if (a.is_bottom()) {
      Sort s = op == OpKind::Ite           ? args[1].sort
               : op_returns_bool(op)       ? Sort::bool_sort()
                                           : args[0].sort;
      return AbsValue::bottom(s);
    }

  switch (op) {
  case OpKind::And:
  case OpKind::Or:
  case OpKind::Xor:
  case OpKind::Not: {
    AbsValue v = AbsValue::top(Sort::bool_sort());
    v.ab = op == OpKind::And   ? bool_and(args[0].ab, args[1].ab)
           : op == OpKind::Or  ? bool_or(args[0].ab, args[1].ab)
           : op == OpKind::Xor ? bool_xor(args[0].ab, args[1].ab)
                               : bool_not(args[0].ab);
    return v;
  }
  case OpKind::BvUle:
  case OpKind::BvUlt:
  case OpKind::BvSle:
  case OpKind::BvSlt: {
    AbsValue v = AbsValue::top(Sort::bool_sort());
    v.ab = compare_abs(op, args[0], args[1]);
    return v;
  }
  case OpKind::Eq: {
    AbsValue v = AbsValue::top(Sort::bool_sort());
    v.ab = equal_abs(args[0], args[1]);
    return v;
  }
  case OpKind::Ite:
    if (args[0].ab.is_true())
      return args[1];
    if (args[0].ab.is_false())
      return args[2];
    return reduce(args[1].join(args[2]));
  default: {
    std::vector<BitwiseValue> bs;
    std::vector<SInterval> ss;
    std::vector<UInterval> us;
    bs.reserve(args.size());
    ss.reserve(args.size());
    us.reserve(args.size());
    for (const AbsValue &a : args) {
      bs.push_back(a.bits);
      ss.push_back(a.si);
      us.push_back(a.ui);
    }
    AbsValue v;
    v.sort = args[0].sort;
    v.bits = forward_bits(op, bs);
    v.si = forward_sint(op, ss);
    v.ui = forward_uint(op, us);
    v.ab = AbstractBool::bottom();
    return reduce(v);
  }
  }
}

// Backward transfer: the refined abstraction for operand idx, already met
// with the operand's current value and reduced.
inline AbsValue backward_abs(OpKind op, size_t idx, const AbsValue &result,
                             std::span<const AbsValue> args) {
  using namespace detail;
  const AbsValue &cur = args[idx];
  if (result.is_bottom())
    return AbsValue::bottom(cur.sort);

  switch (op) {
  case OpKind::And:
  case OpKind::Or:
  case OpKind::Xor:
  case OpKind::Not: {
    AbstractBool r = result.ab;
    AbstractBool c;
    if (op == OpKind::Not) {
      c = bool_not(r);
    } else if (op == OpKind::Xor) {
      c = bool_xor(r, args[1 - idx].ab);
    } else if (op == OpKind::And) {
      AbstractBool other = args[1 - idx].ab;
      c = AbstractBool::top();
      if (r.is_true())
        c = AbstractBool::from_concrete(true);
      else if (r.is_false() && other.is_true())
        c = AbstractBool::from_concrete(false);
    } else { // Or
      AbstractBool other = args[1 - idx].ab;
      c = AbstractBool::top();
      if (r.is_false())
        c = AbstractBool::from_concrete(false);
      else if (r.is_true() && other.is_false())
        c = AbstractBool::from_concrete(true);
    }
    AbsValue v = cur;
    v.ab = cur.ab.meet(c);
    return v.ab.is_bottom() ? AbsValue::bottom(cur.sort) : v;
  }
  case OpKind::BvUle:
  case OpKind::BvUlt:
  case OpKind::BvSle:
  case OpKind::BvSlt:
  case OpKind::Eq:
    return cur; // no refinement
  case OpKind::Ite: {
    if (idx == 0) {
      bool then_ok = !reduce(result.meet(args[1])).is_bottom();
      bool else_ok = !reduce(result.meet(args[2])).is_bottom();
      AbstractBool c = AbstractBool::top();
      if (!then_ok && !else_ok)
        c = AbstractBool::bottom();
      else if (!else_ok)
        c = AbstractBool::from_concrete(true);
      else if (!then_ok)
        c = AbstractBool::from_concrete(false);
      AbsValue v = cur;
      v.ab = cur.ab.meet(c);
      return v.ab.is_bottom() ? AbsValue::bottom(cur.sort) : v;
    }
    // a branch is pinned to the result only when the condition surely
    // selects it
    bool selected = (idx == 1 && args[0].ab.is_true()) ||
                    (idx == 2 && args[0].ab.is_false());
    if (selected)
      return reduce(cur.meet(result));
    return cur;
  }
  default: {
    std::vector<BitwiseValue> bs;
    std::vector<SInterval> ss;
    std::vector<UInterval> us;
    bs.reserve(args.size());
    ss.reserve(args.size());
    us.reserve(args.size());
    for (const AbsValue &a : args) {
      bs.push_back(a.bits);
      ss.push_back(a.si);
      us.push_back(a.ui);
    }
    AbsValue v = cur;
    v.bits = cur.bits.meet(backward_bits(op, idx, result.bits, bs));
    v.si = cur.si.meet(backward_sint(op, idx, result.si, ss));
    v.ui = cur.ui.meet(backward_uint(op, idx, result.ui, us));
    return reduce(v);
  }
  }
}

// gamma(v) as an explicit sorted value list when its size is at most
// `limit`; std::nullopt otherwise. The size decision is made from cheap
// bounds before any enumeration.
inline std::optional<std::vector<uint64_t>>
concretize_if_small(const AbsValue &v, uint64_t limit) {
  if (v.sort.is_bool) {
    std::vector<uint64_t> out;
    if (v.ab.may_false)
      out.push_back(0);
    if (v.ab.may_true)
      out.push_back(1);
    if ((uint64_t)out.size() > limit)
      return std::nullopt;
    return out;
  }
  if (v.is_bottom())
    return std::vector<uint64_t>{};

  int free = v.bits.count_free();
  uint128 bound = free >= 64 ? (uint128)1 << 64 : (uint128)1 << free;
  bound = std::min(bound, v.ui.count());
  bound = std::min(bound, v.si.count());
  if (bound > (uint128)limit)
    return std::nullopt;

  std::vector<uint64_t> out;
  if (((uint128)1 << std::min(free, 64)) == bound) {
    // spread the free bits
    std::vector<uint32_t> positions;
    uint64_t fb = v.bits.free_bits();
    for (uint32_t i = 0; i < v.sort.width; ++i)
      if ((fb >> i) & 1)
        positions.push_back(i);
    uint64_t base = v.bits.forced1();
    for (uint64_t a = 0; a < (1ull << positions.size()); ++a) {
      uint64_t val = base;
      for (size_t j = 0; j < positions.size(); ++j)
        if ((a >> j) & 1)
          val |= 1ull << positions[j];
      if (v.ui.contains(val) && v.si.contains(val))
        out.push_back(val);
    }
    std::sort(out.begin(), out.end());
  } else if (v.ui.count() == bound) {
    for (uint64_t x = v.ui.lo;; ++x) {
      if (v.bits.contains(x) && v.si.contains(x))
        out.push_back(x);
      if (x == v.ui.hi)
        break;
    }
  } else {
    uint64_t m = bv_mask(v.sort.width);
    for (int64_t x = v.si.slo();; ++x) {
      uint64_t pat = (uint64_t)x & m;
      if (v.bits.contains(pat) && v.ui.contains(pat))
        out.push_back(pat);
      if (x == v.si.shi())
        break;
    }
    std::sort(out.begin(), out.end());
  }
  return out;
}

} // namespace absynth

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

#include "absynth/term.hpp"
#include "absynth/types.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>

namespace absynth {

using int128 = __int128;
using uint128 = unsigned __int128;

// Unsigned interval over width-w patterns. Bounds are stored as patterns;
// the order is plain unsigned comparison. Empty is the canonical bottom.
struct UInterval {
  uint32_t width = 0;
  bool empty = true;
  uint64_t lo = 0, hi = 0;

  static UInterval top(uint32_t w) { return {w, false, 0, bv_mask(w)}; }
  static UInterval bottom(uint32_t w) { return {w, true, 0, 0}; }
  static UInterval make(uint64_t l, uint64_t h, uint32_t w) {
    return l <= h ? UInterval{w, false, l, h} : bottom(w);
  }
  static UInterval from_concrete(uint64_t v, uint32_t w) {
    v &= bv_mask(w);
    return {w, false, v, v};
  }

  // Identity if the unbounded-integer range fits [0, 2^w - 1], full range
  // otherwise.
  static UInterval wrap(int128 l, int128 h, uint32_t w) {
    if (l > h)
      return bottom(w);
    if (l >= 0 && h <= (int128)bv_mask(w))
      return {w, false, (uint64_t)l, (uint64_t)h};
    return top(w);
  }

  bool operator==(const UInterval &o) const = default;

  bool is_bottom() const { return empty; }
  bool is_singleton() const { return !empty && lo == hi; }
  bool contains(uint64_t v) const { return !empty && lo <= v && v <= hi; }
  uint128 count() const { return empty ? 0 : (uint128)(hi - lo) + 1; }

  UInterval join(const UInterval &o) const {
    if (empty)
      return o;
    if (o.empty)
      return *this;
    return {width, false, std::min(lo, o.lo), std::max(hi, o.hi)};
  }
  UInterval meet(const UInterval &o) const {
    if (empty || o.empty)
      return bottom(width);
    return make(std::max(lo, o.lo), std::min(hi, o.hi), width);
  }
  bool leq(const UInterval &o) const {
    if (empty)
      return true;
    return !o.empty && o.lo <= lo && hi <= o.hi;
  }

  std::string str() const {
    if (empty)
      return "[]";
    char buf[48];
    snprintf(buf, sizeof buf, "[0x%llx,0x%llx]", (unsigned long long)lo,
             (unsigned long long)hi);
    return buf;
  }
};

// Signed interval: bounds are still patterns, but ordered by their two's
// complement reading.
struct SInterval {
  uint32_t width = 0;
  bool empty = true;
  uint64_t lo = 0, hi = 0;

  int64_t slo() const { return to_signed(lo, width); }
  int64_t shi() const { return to_signed(hi, width); }

  static SInterval top(uint32_t w) {
    return {w, false, sign_bit(w), sign_bit(w) - 1};
  }
  static SInterval bottom(uint32_t w) { return {w, true, 0, 0}; }
  static SInterval make(int64_t l, int64_t h, uint32_t w) {
    if (l > h)
      return bottom(w);
    return {w, false, (uint64_t)l & bv_mask(w), (uint64_t)h & bv_mask(w)};
  }
  static SInterval from_concrete(uint64_t v, uint32_t w) {
    v &= bv_mask(w);
    return {w, false, v, v};
  }

  static SInterval wrap(int128 l, int128 h, uint32_t w) {
    if (l > h)
      return bottom(w);
    if (l >= (int128)smin_of(w) && h <= (int128)smax_of(w))
      return make((int64_t)l, (int64_t)h, w);
    return top(w);
  }

  bool operator==(const SInterval &o) const = default;

  bool is_bottom() const { return empty; }
  bool is_singleton() const { return !empty && lo == hi; }
  bool contains(uint64_t v) const {
    if (empty)
      return false;
    int64_t s = to_signed(v & bv_mask(width), width);
    return slo() <= s && s <= shi();
  }
  uint128 count() const {
    return empty ? 0 : (uint128)((int128)shi() - slo()) + 1;
  }

  SInterval join(const SInterval &o) const {
    if (empty)
      return o;
    if (o.empty)
      return *this;
    return make(std::min(slo(), o.slo()), std::max(shi(), o.shi()), width);
  }
  SInterval meet(const SInterval &o) const {
    if (empty || o.empty)
      return bottom(width);
    return make(std::max(slo(), o.slo()), std::min(shi(), o.shi()), width);
  }
  bool leq(const SInterval &o) const {
    if (empty)
      return true;
    return !o.empty && o.slo() <= slo() && shi() <= o.shi();
  }

  std::string str() const {
    if (empty)
      return "[]";
    char buf[48];
    snprintf(buf, sizeof buf, "[0x%llx,0x%llx]", (unsigned long long)lo,
             (unsigned long long)hi);
    return buf;
  }
};

namespace detail {

inline UInterval udiv_u(const UInterval &a, const UInterval &b) {
  uint32_t w = a.width;
  UInterval acc = UInterval::bottom(w);
  if (b.contains(0)) // SMT-LIB: division by zero yields all ones
    acc = acc.join(UInterval::from_concrete(bv_mask(w), w));
  uint64_t bl = std::max<uint64_t>(b.lo, 1);
  if (bl <= b.hi)
    acc = acc.join(UInterval::make(a.lo / b.hi, a.hi / bl, w));
  return acc;
}

inline UInterval urem_u(const UInterval &a, const UInterval &b) {
  uint32_t w = a.width;
  UInterval acc = UInterval::bottom(w);
  if (b.contains(0)) // SMT-LIB: remainder by zero is the dividend
    acc = acc.join(a);
  if (b.hi >= 1)
    acc = acc.join(UInterval::make(0, std::min(a.hi, b.hi - 1), w));
  return acc;
}

inline UInterval neg_u(const UInterval &a) {
  uint32_t w = a.width;
  uint64_t m = bv_mask(w);
  // negation crosses the wraparound exactly when 0 is an endpoint of a
  // non-singleton-zero interval
  if (a.lo == 0 && a.hi != 0)
    return UInterval::top(w);
  return UInterval::make((0 - a.hi) & m, (0 - a.lo) & m, w);
}

inline SInterval neg_s(const SInterval &a) {
  uint32_t w = a.width;
  if (a.contains(sign_bit(w))) // -SMin overflows
    return SInterval::top(w);
  return SInterval::make(-a.shi(), -a.slo(), w);
}

// Signed division via the four sign combinations, each expressed through
// non-negative magnitude division. The a/0 cases follow SMT-LIB.
inline SInterval sdiv_s(const SInterval &a, const SInterval &b) {
  uint32_t w = a.width;
  SInterval acc = SInterval::bottom(w);
  SInterval a_neg = a.meet(SInterval::make(smin_of(w), -1, w));
  SInterval a_pos = a.meet(SInterval::make(0, smax_of(w), w));
  SInterval b_neg = b.meet(SInterval::make(smin_of(w), -1, w));
  SInterval b_pos = b.meet(SInterval::make(1, smax_of(w), w));

  if (b.contains(0)) {
    if (!a_pos.empty)
      acc = acc.join(SInterval::make(-1, -1, w));
    if (!a_neg.empty)
      acc = acc.join(SInterval::make(1, 1, w));
  }
  auto mag = [](int64_t v) { return (int128)v < 0 ? -(int128)v : (int128)v; };
  if (!a_pos.empty && !b_pos.empty)
    acc = acc.join(SInterval::wrap(a_pos.slo() / b_pos.shi(),
                                   a_pos.shi() / b_pos.slo(), w));
  if (!a_pos.empty && !b_neg.empty)
    acc = acc.join(SInterval::wrap(-(mag(a_pos.shi()) / mag(b_neg.shi())),
                                   -(mag(a_pos.slo()) / mag(b_neg.slo())), w));
  if (!a_neg.empty && !b_pos.empty)
    acc = acc.join(SInterval::wrap(-(mag(a_neg.slo()) / b_pos.slo()),
                                   -(mag(a_neg.shi()) / b_pos.shi()), w));
  if (!a_neg.empty && !b_neg.empty)
    acc = acc.join(SInterval::wrap(mag(a_neg.shi()) / mag(b_neg.slo()),
                                   mag(a_neg.slo()) / mag(b_neg.shi()), w));
  return acc;
}

inline UInterval shift_u(OpKind op, const UInterval &a, const UInterval &b) {
  uint32_t w = a.width;
  if (!b.is_singleton())
    return UInterval::top(w);
  uint64_t k = b.lo;
  uint64_t m = bv_mask(w);
  switch (op) {
  case OpKind::BvShl:
    if (k >= w)
      return UInterval::from_concrete(0, w);
    return UInterval::wrap((uint128)a.lo << k, (uint128)a.hi << k, w);
  case OpKind::BvLshr:
    if (k >= w)
      return UInterval::from_concrete(0, w);
    return UInterval::make(a.lo >> k, a.hi >> k, w);
  default: { // BvAshr: monotone only within one sign region
    uint64_t msb = sign_bit(w);
    if (a.hi < msb) {
      if (k >= w)
        return UInterval::from_concrete(0, w);
      return UInterval::make(a.lo >> k, a.hi >> k, w);
    }
    if (a.lo >= msb) {
      if (k >= w)
        return UInterval::from_concrete(m, w);
      uint64_t fill = m & ~(m >> k);
      return UInterval::make((a.lo >> k) | fill, (a.hi >> k) | fill, w);
    }
    return UInterval::top(w);
  }
  }
}

inline SInterval shift_s(OpKind op, const SInterval &a, const SInterval &b) {
  uint32_t w = a.width;
  if (!b.is_singleton())
    return SInterval::top(w);
  // the amount is a pattern; read it unsigned
  uint64_t k = b.lo;
  switch (op) {
  case OpKind::BvShl:
    if (k >= w)
      return SInterval::from_concrete(0, w);
    return SInterval::wrap((int128)a.slo() << k, (int128)a.shi() << k, w);
  case OpKind::BvLshr:
    if (k == 0)
      return a;
    if (k >= w)
      return SInterval::from_concrete(0, w);
    if (a.slo() >= 0)
      return SInterval::make(a.slo() >> k, a.shi() >> k, w);
    return SInterval::top(w);
  default: // BvAshr is monotone in the signed order
    if (k >= w)
      return SInterval::make(a.slo() < 0 ? -1 : 0, a.shi() < 0 ? -1 : 0, w);
    return SInterval::make(a.slo() >> k, a.shi() >> k, w);
  }
}

} // namespace detail

inline UInterval forward_uint(OpKind op, std::span<const UInterval> args) {
  using namespace detail;
  const uint32_t w = args[0].width;
  for (const UInterval &a : args)
    if (a.empty)
      return UInterval::bottom(w);
  const UInterval &a = args[0];
  switch (op) {
  case OpKind::BvAdd:
    return UInterval::wrap((int128)a.lo + args[1].lo, (int128)a.hi + args[1].hi,
                           w);
  case OpKind::BvSub:
    return UInterval::wrap((int128)a.lo - args[1].hi, (int128)a.hi - args[1].lo,
                           w);
  case OpKind::BvMul: {
    uint128 l = (uint128)a.lo * args[1].lo;
    uint128 h = (uint128)a.hi * args[1].hi;
    if (h > (uint128)bv_mask(w))
      return UInterval::top(w);
    return UInterval::make((uint64_t)l, (uint64_t)h, w);
  }
  case OpKind::BvNeg:
    return neg_u(a);
  case OpKind::BvUdiv:
    return udiv_u(a, args[1]);
  case OpKind::BvUrem:
    return urem_u(a, args[1]);
  case OpKind::BvShl:
  case OpKind::BvLshr:
  case OpKind::BvAshr:
    return shift_u(op, a, args[1]);
  case OpKind::BvNot:
  case OpKind::BvAnd:
  case OpKind::BvOr:
  case OpKind::BvXor:
  case OpKind::BvSdiv:
  case OpKind::BvSrem:
    return UInterval::top(w);
  default:
    throw SynthError(SynthError::Code::Internal,
                     "forward_uint: not a bitvector operator");
  }
}

inline SInterval forward_sint(OpKind op, std::span<const SInterval> args) {
  using namespace detail;
  const uint32_t w = args[0].width;
  for (const SInterval &a : args)
    if (a.empty)
      return SInterval::bottom(w);
  const SInterval &a = args[0];
  switch (op) {
  case OpKind::BvAdd:
    return SInterval::wrap((int128)a.slo() + args[1].slo(),
                           (int128)a.shi() + args[1].shi(), w);
  case OpKind::BvSub:
    return SInterval::wrap((int128)a.slo() - args[1].shi(),
                           (int128)a.shi() - args[1].slo(), w);
  case OpKind::BvMul: {
    int128 p1 = (int128)a.slo() * args[1].slo();
    int128 p2 = (int128)a.slo() * args[1].shi();
    int128 p3 = (int128)a.shi() * args[1].slo();
    int128 p4 = (int128)a.shi() * args[1].shi();
    int128 l = std::min(std::min(p1, p2), std::min(p3, p4));
    int128 h = std::max(std::max(p1, p2), std::max(p3, p4));
    return SInterval::wrap(l, h, w);
  }
  case OpKind::BvNeg:
    return neg_s(a);
  case OpKind::BvSdiv:
    return sdiv_s(a, args[1]);
  case OpKind::BvShl:
  case OpKind::BvLshr:
  case OpKind::BvAshr:
    return shift_s(op, a, args[1]);
  case OpKind::BvNot:
  case OpKind::BvAnd:
  case OpKind::BvOr:
  case OpKind::BvXor:
  case OpKind::BvUdiv:
  case OpKind::BvUrem:
  case OpKind::BvSrem:
    return SInterval::top(w);
  default:
    throw SynthError(SynthError::Code::Internal,
                     "forward_sint: not a bitvector operator");
  }
}

// Backward transfers return a constraint on operand idx; the caller meets
// it with the operand's current value.
inline UInterval backward_uint(OpKind op, size_t idx, const UInterval &result,
                               std::span<const UInterval> args) {
  const uint32_t w = result.width;
  if (result.empty)
    return UInterval::bottom(w);
  switch (op) {
  case OpKind::BvUrem:
    // a remainder with its most significant bit set equals the dividend
    if (idx == 0 && result.lo >= sign_bit(w))
      return result;
    return UInterval::top(w);
  case OpKind::BvAdd: {
    const UInterval &other = args[1 - idx];
    if (other.empty)
      return UInterval::top(w);
    int128 l = (int128)result.lo - other.hi;
    int128 h = (int128)result.hi - other.lo;
    // exact only when neither endpoint difference wraps
    if (l >= 0 && h <= (int128)bv_mask(w))
      return UInterval::make((uint64_t)l, (uint64_t)h, w);
    return UInterval::top(w);
  }
  case OpKind::BvSub: {
    if (args[1 - idx].empty)
      return UInterval::top(w);
    int128 l, h;
    if (idx == 0) { // a = result + b
      l = (int128)result.lo + args[1].lo;
      h = (int128)result.hi + args[1].hi;
    } else { // b = a - result
      l = (int128)args[0].lo - result.hi;
      h = (int128)args[0].hi - result.lo;
    }
    if (l >= 0 && h <= (int128)bv_mask(w))
      return UInterval::make((uint64_t)l, (uint64_t)h, w);
    return UInterval::top(w);
  }
  default:
    return UInterval::top(w);
  }
}

inline SInterval backward_sint(OpKind op, size_t idx, const SInterval &result,
                               std::span<const SInterval> args) {
  const uint32_t w = result.width;
  if (result.empty)
    return SInterval::bottom(w);
  switch (op) {
  case OpKind::BvAdd: {
    const SInterval &other = args[1 - idx];
    if (other.empty)
      return SInterval::top(w);
    int128 l = (int128)result.slo() - other.shi();
    int128 h = (int128)result.shi() - other.slo();
    if (l >= (int128)smin_of(w) && h <= (int128)smax_of(w))
      return SInterval::make((int64_t)l, (int64_t)h, w);
    return SInterval::top(w);
  }
  case OpKind::BvSub: {
    if (args[1 - idx].empty)
      return SInterval::top(w);
    int128 l, h;
    if (idx == 0) {
      l = (int128)result.slo() + args[1].slo();
      h = (int128)result.shi() + args[1].shi();
    } else {
      l = (int128)args[0].slo() - result.shi();
      h = (int128)args[0].shi() - result.slo();
    }
    if (l >= (int128)smin_of(w) && h <= (int128)smax_of(w))
      return SInterval::make((int64_t)l, (int64_t)h, w);
    return SInterval::top(w);
  }
  default:
    return SInterval::top(w);
  }
}

} // namespace absynth

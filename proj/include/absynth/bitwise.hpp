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

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace absynth {

// Per-bit abstraction of a width-w bitvector. Bit i may be 0 iff bit i of
// may0 is set, and may be 1 iff bit i of may1 is set. A bit admitting both
// is unknown (T), one admitting neither is contradictory (B). Meets are
// performed bitwise and can leave scattered B bits; callers normalize such
// values to the canonical all-B bottom before using them further.
struct BitwiseValue {
  uint32_t width = 0;
  uint64_t may0 = 0;
  uint64_t may1 = 0;

  uint64_t mask() const { return bv_mask(width); }

  static BitwiseValue top(uint32_t w) {
    return {w, bv_mask(w), bv_mask(w)};
  }
  static BitwiseValue bottom(uint32_t w) { return {w, 0, 0}; }
  static BitwiseValue from_concrete(uint64_t v, uint32_t w) {
    v &= bv_mask(w);
    return {w, ~v & bv_mask(w), v};
  }

  // Parse an MSB-first string over {'0','1','T','B'}; handy in tests and
  // trace output.
  static BitwiseValue from_string(std::string_view s) {
    BitwiseValue b{(uint32_t)s.size(), 0, 0};
    for (char c : s) {
      b.may0 <<= 1;
      b.may1 <<= 1;
      switch (c) {
      case '0':
        b.may0 |= 1;
        break;
      case '1':
        b.may1 |= 1;
        break;
      case 'T':
        b.may0 |= 1;
        b.may1 |= 1;
        break;
      case 'B':
        break;
      default:
        throw SynthError(SynthError::Code::ParseError,
                         "bad bit character in bitwise literal");
      }
    }
    return b;
  }

  bool operator==(const BitwiseValue &o) const = default;

  uint64_t forced0() const { return may0 & ~may1; }
  uint64_t forced1() const { return may1 & ~may0; }
  uint64_t free_bits() const { return may0 & may1; }

  bool any_bottom() const { return (~may0 & ~may1 & mask()) != 0; }
  bool is_bottom() const { return any_bottom(); }

  BitwiseValue normalized() const {
    return any_bottom() ? bottom(width) : *this;
  }

  bool is_singleton() const {
    return !any_bottom() && free_bits() == 0;
  }
  uint64_t singleton_value() const { return forced1(); }

  bool contains(uint64_t v) const {
    v &= mask();
    // every 1 bit of v must be admitted as 1, every 0 bit as 0
    return (v & ~may1) == 0 && (~v & mask() & ~may0) == 0;
  }

  int count_free() const { return std::popcount(free_bits()); }

  // Trailing zeros guaranteed: every concrete member is divisible by 2^k.
  uint32_t tz_guaranteed() const {
    uint32_t n = (uint32_t)std::countr_one(forced0());
    return n > width ? width : n;
  }
  // Trailing zeros possible: some prefix of low bits can all be 0.
  uint32_t tz_possible() const {
    uint32_t n = (uint32_t)std::countr_one(may0);
    return n > width ? width : n;
  }

  BitwiseValue join(const BitwiseValue &o) const {
    return {width, may0 | o.may0, may1 | o.may1};
  }
  BitwiseValue meet(const BitwiseValue &o) const {
    return {width, may0 & o.may0, may1 & o.may1};
  }
  bool leq(const BitwiseValue &o) const {
    return (may0 & ~o.may0) == 0 && (may1 & ~o.may1) == 0;
  }

  std::string str() const {
    std::string s;
    s.reserve(width);
    for (uint32_t i = width; i-- > 0;) {
      bool z = (may0 >> i) & 1, o = (may1 >> i) & 1;
      s += z ? (o ? 'T' : '0') : (o ? '1' : 'B');
    }
    return s;
  }
};

namespace detail {

// Abstract ripple-carry addition: walk the bits with a three-valued carry,
// enumerating the admissible (a, b, carry) combinations at each position.
inline BitwiseValue bits_add(const BitwiseValue &a, const BitwiseValue &b) {
  BitwiseValue r{a.width, 0, 0};
  bool c0 = true, c1 = false;
  for (uint32_t i = 0; i < a.width; ++i) {
    bool av[2] = {bool((a.may0 >> i) & 1), bool((a.may1 >> i) & 1)};
    bool bv[2] = {bool((b.may0 >> i) & 1), bool((b.may1 >> i) & 1)};
    bool cv[2] = {c0, c1};
    bool s[2] = {false, false}, n[2] = {false, false};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int c = 0; c < 2; ++c) {
          if (!av[x] || !bv[y] || !cv[c])
            continue;
          s[x ^ y ^ c] = true;
          n[x + y + c >= 2] = true;
        }
    if (s[0])
      r.may0 |= 1ull << i;
    if (s[1])
      r.may1 |= 1ull << i;
    c0 = n[0];
    c1 = n[1];
  }
  return r;
}

inline BitwiseValue bits_not(const BitwiseValue &a) {
  return {a.width, a.may1, a.may0};
}

inline BitwiseValue bits_neg(const BitwiseValue &a) {
  return bits_add(bits_not(a), BitwiseValue::from_concrete(1, a.width));
}

inline BitwiseValue bits_xor(const BitwiseValue &a, const BitwiseValue &b) {
  return {a.width, (a.may0 & b.may0) | (a.may1 & b.may1),
          (a.may0 & b.may1) | (a.may1 & b.may0)};
}

// The amount operand of a shift, read as an unsigned range.
struct AmountRange {
  uint64_t lo, hi;
};
inline AmountRange amount_range(const BitwiseValue &b) {
  return {b.forced1(), b.may1};
}

// Product over-approximation from guaranteed low zero bits of the factors:
// the result is divisible by 2^(n+m).
inline BitwiseValue bits_mul(const BitwiseValue &a, const BitwiseValue &b) {
  uint32_t l = a.tz_guaranteed() + b.tz_guaranteed();
  if (l > a.width)
    l = a.width;
  uint64_t low = l >= 64 ? ~0ull : ((1ull << l) - 1);
  return {a.width, a.mask(), a.mask() & ~low};
}

inline BitwiseValue bits_shl_by(const BitwiseValue &a, uint32_t k) {
  uint64_t m = a.mask();
  uint64_t low = k >= 64 ? m : ((1ull << k) - 1);
  return {a.width, ((a.may0 << k) | low) & m, (a.may1 << k) & m};
}

inline BitwiseValue bits_lshr_by(const BitwiseValue &a, uint32_t k) {
  uint64_t m = a.mask();
  uint64_t highfill = k == 0 ? 0 : m & ~(m >> k);
  return {a.width, (a.may0 >> k) | highfill, a.may1 >> k};
}

inline BitwiseValue bits_ashr_by(const BitwiseValue &a, uint32_t k) {
  uint64_t m = a.mask();
  uint64_t msb = sign_bit(a.width);
  bool s0 = (a.may0 & msb) != 0, s1 = (a.may1 & msb) != 0;
  if (k == 0)
    return a;
  uint64_t fill = m & ~(m >> k);
  return {a.width, (a.may0 >> k) | (s0 ? fill : 0),
          (a.may1 >> k) | (s1 ? fill : 0)};
}

// Result of shifting by an amount at or above the width.
inline BitwiseValue bits_shift_saturated(OpKind op, const BitwiseValue &a) {
  if (op == OpKind::BvAshr) {
    uint64_t msb = sign_bit(a.width), m = a.mask();
    bool s0 = (a.may0 & msb) != 0, s1 = (a.may1 & msb) != 0;
    return {a.width, s0 ? m : 0, s1 ? m : 0};
  }
  return BitwiseValue::from_concrete(0, a.width);
}

inline BitwiseValue bits_shift(OpKind op, const BitwiseValue &a,
                               const BitwiseValue &amt) {
  auto [lo, hi] = amount_range(amt);
  BitwiseValue r = BitwiseValue::bottom(a.width);
  uint64_t in_range = hi < a.width ? hi : a.width - 1;
  for (uint64_t k = lo; k <= in_range; ++k) {
    switch (op) {
    case OpKind::BvShl:
      r = r.join(bits_shl_by(a, (uint32_t)k));
      break;
    case OpKind::BvLshr:
      r = r.join(bits_lshr_by(a, (uint32_t)k));
      break;
    default:
      r = r.join(bits_ashr_by(a, (uint32_t)k));
      break;
    }
  }
  if (hi >= a.width)
    r = r.join(bits_shift_saturated(op, a));
  return r;
}

// Multiplicative inverse of an odd number modulo 2^64, by Newton iteration.
inline uint64_t modinv_pow2(uint64_t a) {
  uint64_t x = a; // correct modulo 2^3
  for (int i = 0; i < 5; ++i)
    x *= 2 - a * x; // doubles the number of correct low bits
  return x;
}

} // namespace detail

// Forward transfer over bitvector operators. Division and remainder fall
// back to top; Bool-valued operators are not handled here.
inline BitwiseValue forward_bits(OpKind op,
                                 std::span<const BitwiseValue> args) {
  using namespace detail;
  switch (op) {
  case OpKind::BvNot:
    return bits_not(args[0]);
  case OpKind::BvNeg:
    return bits_neg(args[0]);
  case OpKind::BvAnd:
    return {args[0].width, args[0].may0 | args[1].may0,
            args[0].may1 & args[1].may1};
  case OpKind::BvOr:
    return {args[0].width, args[0].may0 & args[1].may0,
            args[0].may1 | args[1].may1};
  case OpKind::BvXor:
    return bits_xor(args[0], args[1]);
  case OpKind::BvAdd:
    return bits_add(args[0], args[1]);
  case OpKind::BvSub:
    return bits_add(args[0], bits_neg(args[1]));
  case OpKind::BvMul:
    return bits_mul(args[0], args[1]);
  case OpKind::BvShl:
  case OpKind::BvLshr:
  case OpKind::BvAshr:
    return bits_shift(op, args[0], args[1]);
  case OpKind::BvUdiv:
  case OpKind::BvSdiv:
  case OpKind::BvUrem:
  case OpKind::BvSrem:
    return BitwiseValue::top(args[0].width);
  default:
    throw SynthError(SynthError::Code::Internal,
                     "forward_bits: not a bitvector operator");
  }
}

namespace detail {

// Solve x * mult = prod modulo 2^w for x, both mult and prod concrete.
// mult = 2^t * odd is invertible away from its low zero bits: x is pinned
// modulo 2^(w - t) and free above.
inline BitwiseValue infer_mul_operand(uint64_t mult, uint64_t prod,
                                      uint32_t w) {
  uint64_t m = bv_mask(w);
  mult &= m;
  prod &= m;
  if (mult == 0)
    return prod == 0 ? BitwiseValue::top(w) : BitwiseValue::bottom(w);
  uint32_t t = (uint32_t)std::countr_zero(mult);
  if (t > 0 && (prod & ((1ull << t) - 1)) != 0)
    return BitwiseValue::bottom(w); // prod not divisible by 2^t
  uint64_t inv = modinv_pow2(mult >> t);
  uint32_t low_bits = w - t;
  uint64_t low_mask = bv_mask(low_bits);
  uint64_t x_low = ((prod >> t) * inv) & low_mask;
  BitwiseValue r = BitwiseValue::from_concrete(x_low, w);
  uint64_t high = m & ~low_mask;
  r.may0 |= high;
  r.may1 |= high;
  return r;
}

// Invert a left shift by exactly k: feasible only if the low k bits of the
// result admit zero.
inline BitwiseValue unshift_shl(const BitwiseValue &r, uint32_t k) {
  uint64_t m = r.mask();
  uint64_t topfill = k == 0 ? 0 : m & ~(m >> k);
  return {r.width, (r.may0 >> k) | topfill, (r.may1 >> k) | topfill};
}

inline BitwiseValue unshift_lshr(const BitwiseValue &r, uint32_t k) {
  uint64_t m = r.mask();
  uint64_t low = k >= 64 ? m : ((1ull << k) - 1);
  return {r.width, ((r.may0 << k) | low) & m, ((r.may1 << k) | low) & m};
}

// Invert an arithmetic right shift by exactly k. The top k + 1 bits of the
// result are all copies of the operand's sign bit; their meet decides
// which signs are feasible.
inline BitwiseValue unshift_ashr(const BitwiseValue &r, uint32_t k,
                                 bool *feasible) {
  uint32_t w = r.width;
  uint64_t m = r.mask();
  bool s0 = true, s1 = true;
  for (uint32_t i = w - 1 - k; i < w; ++i) {
    s0 = s0 && ((r.may0 >> i) & 1);
    s1 = s1 && ((r.may1 >> i) & 1);
  }
  if (!s0 && !s1) {
    *feasible = false;
    return BitwiseValue::bottom(w);
  }
  *feasible = true;
  uint64_t low = k >= 64 ? m : ((1ull << k) - 1);
  uint64_t msb = sign_bit(w);
  BitwiseValue x{w, ((r.may0 << k) | low) & m, ((r.may1 << k) | low) & m};
  if (!s0)
    x.may0 &= ~msb;
  if (!s1)
    x.may1 &= ~msb;
  return x;
}

inline BitwiseValue backward_shift_operand(OpKind op, const BitwiseValue &r,
                                           const BitwiseValue &amt) {
  uint32_t w = r.width;
  auto [lo, hi] = amount_range(amt);
  BitwiseValue acc = BitwiseValue::bottom(w);

  uint64_t kmax = hi < w ? hi : w - 1;
  if (op == OpKind::BvShl) {
    // shifting in zeros: the low k bits of the result must admit 0
    uint64_t cap = r.tz_possible();
    if (kmax > cap)
      kmax = cap;
    for (uint64_t k = lo; k <= kmax; ++k)
      acc = acc.join(unshift_shl(r, (uint32_t)k));
  } else if (op == OpKind::BvLshr) {
    uint32_t lz = (uint32_t)std::countl_one(r.may0 << (64 - w));
    if (kmax > lz)
      kmax = lz;
    for (uint64_t k = lo; k <= kmax; ++k)
      acc = acc.join(unshift_lshr(r, (uint32_t)k));
  } else {
    for (uint64_t k = lo; k <= kmax; ++k) {
      bool ok = false;
      BitwiseValue x = unshift_ashr(r, (uint32_t)k, &ok);
      if (ok)
        acc = acc.join(x);
    }
  }

  if (hi >= w) {
    // saturated shift: the whole result collapses
    if (op == OpKind::BvAshr) {
      bool s0 = r.contains(0);
      bool s1 = r.contains(r.mask());
      if (s0 || s1) {
        uint64_t msb = sign_bit(w), rest = r.mask() & ~msb;
        acc = acc.join({w, rest | (s0 ? msb : 0), rest | (s1 ? msb : 0)});
      }
    } else if (r.contains(0)) {
      acc = acc.join(BitwiseValue::top(w));
    }
  }
  return acc;
}

} // namespace detail

// Backward transfer: given the operator, the (already refined) result
// abstraction, and the current operand abstractions, return a constraint
// on operand `idx`. The caller meets the constraint with the operand's
// current value. Operators with no useful inversion return top.
inline BitwiseValue backward_bits(OpKind op, size_t idx,
                                  const BitwiseValue &result,
                                  std::span<const BitwiseValue> args) {
  using namespace detail;
  const uint32_t w = result.width;
  const uint64_t m = result.mask();
  switch (op) {
  case OpKind::BvNot:
    return bits_not(result);
  case OpKind::BvAnd: {
    const BitwiseValue &other = args[1 - idx];
    // a 1 in the result forces a 1; a 0 where the other operand is forced
    // 1 forces a 0
    return {w, m & ~result.forced1(),
            m & ~(result.forced0() & other.forced1())};
  }
  case OpKind::BvOr: {
    const BitwiseValue &other = args[1 - idx];
    return {w, m & ~(result.forced1() & other.forced0()),
            m & ~result.forced0()};
  }
  case OpKind::BvXor:
    return bits_xor(result, args[1 - idx]);
  case OpKind::BvShl:
  case OpKind::BvLshr:
  case OpKind::BvAshr:
    if (idx == 0)
      return backward_shift_operand(op, result, args[1]);
    return BitwiseValue::top(w);
  case OpKind::BvMul: {
    const BitwiseValue &other = args[1 - idx];
    if (other.is_singleton() && result.is_singleton())
      return infer_mul_operand(other.singleton_value(),
                               result.singleton_value(), w);
    uint32_t need = result.tz_guaranteed();
    uint32_t have = other.tz_possible();
    uint32_t l = need > have ? need - have : 0;
    uint64_t low = l >= 64 ? ~0ull : ((1ull << l) - 1);
    return {w, m, m & ~low};
  }
  default:
    return BitwiseValue::top(w);
  }
}

} // namespace absynth

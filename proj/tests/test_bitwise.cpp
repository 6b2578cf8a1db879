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

#include "absynth/bitwise.hpp"

#include "absynth/eval.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

using namespace absynth;

namespace {

BitwiseValue bits(const char *s) { return BitwiseValue::from_string(s); }

// Enumerate the concretization of a width-4 value the slow way.
std::vector<uint64_t> members(const BitwiseValue &b) {
  std::vector<uint64_t> out;
  for (uint64_t v = 0; v < (1ull << b.width); ++v)
    if (b.contains(v))
      out.push_back(v);
  return out;
}

BitwiseValue random_bits(std::mt19937 &rng, uint32_t w) {
  std::uniform_int_distribution<uint64_t> d(0, bv_mask(w));
  return {w, d(rng), d(rng)};
}

} // namespace

TEST_CASE("string form round-trips exactly") {
  CHECK(bits("10T0").str() == "10T0");
  CHECK(bits("BBBB").str() == "BBBB");
  CHECK(bits("T").str() == "T");
  // every width-4 (may0, may1) pair survives a str/from_string cycle
  for (uint64_t z = 0; z < 16; ++z)
    for (uint64_t o = 0; o < 16; ++o) {
      BitwiseValue b{4, z, o};
      CHECK(BitwiseValue::from_string(b.str()) == b);
    }
  CHECK_THROWS_AS(BitwiseValue::from_string("10x0"), SynthError);
}

TEST_CASE("constructors and predicates") {
  auto t = BitwiseValue::top(4);
  CHECK(t.str() == "TTTT");
  CHECK(BitwiseValue::bottom(4).str() == "BBBB");
  CHECK(BitwiseValue::from_concrete(0xB, 4).str() == "1011");
  CHECK(BitwiseValue::from_concrete(0xFFFF, 4).str() == "1111"); // truncates

  auto v = bits("10T1");
  CHECK(v.forced1() == 0b1001);
  CHECK(v.forced0() == 0b0100);
  CHECK(v.free_bits() == 0b0010);
  CHECK(!v.is_singleton());
  CHECK(bits("1011").is_singleton());
  CHECK(bits("1011").singleton_value() == 0xB);
  CHECK(bits("10B1").any_bottom());
  CHECK(bits("10B1").normalized() == BitwiseValue::bottom(4));
  CHECK(v.contains(0b1001));
  CHECK(v.contains(0b1011));
  CHECK(!v.contains(0b1101));

  CHECK(bits("T100").tz_guaranteed() == 2);
  CHECK(bits("T100").tz_possible() == 2);
  CHECK(bits("T1T0").tz_guaranteed() == 1);
  CHECK(bits("T1T0").tz_possible() == 2); // the free bit may be 0
  CHECK(bits("0000").tz_guaranteed() == 4);
}

TEST_CASE("lattice operations agree with the concretization") {
  // meet is exact intersection and join covers the union, for all pairs
  for (uint64_t z1 = 0; z1 < 16; ++z1)
    for (uint64_t o1 = 0; o1 < 16; ++o1)
      for (uint64_t z2 = 0; z2 < 16; ++z2)
        for (uint64_t o2 = 0; o2 < 16; ++o2) {
          BitwiseValue a{4, z1, o1}, b{4, z2, o2};
          auto ga = members(a), gb = members(b);
          auto gm = members(a.meet(b));
          std::vector<uint64_t> inter;
          for (auto v : ga)
            if (b.contains(v))
              inter.push_back(v);
          REQUIRE(gm == inter);
          auto gj = a.join(b);
          for (auto v : ga)
            REQUIRE(gj.contains(v));
          for (auto v : gb)
            REQUIRE(gj.contains(v));
          if (a.leq(b))
            for (auto v : ga)
              REQUIRE(b.contains(v));
        }
}

TEST_CASE("forward transfer goldens") {
  auto fwd2 = [](OpKind op, const char *a, const char *b) {
    BitwiseValue args[2] = {bits(a), bits(b)};
    return forward_bits(op, args).str();
  };
  auto fwd1 = [](OpKind op, const char *a) {
    BitwiseValue args[1] = {bits(a)};
    return forward_bits(op, args).str();
  };

  CHECK(fwd2(OpKind::BvAnd, "1T10", "00TT") == "00T0");
  CHECK(fwd2(OpKind::BvOr, "1T10", "00TT") == "1T1T");
  CHECK(fwd2(OpKind::BvXor, "1T10", "0011") == "1T01");
  CHECK(fwd1(OpKind::BvNot, "10T1") == "01T0");

  // ripple add tracks the carry abstractly: {0100, 0110} + 2 = {0110, 1000}
  CHECK(fwd2(OpKind::BvAdd, "01T0", "0010") == "TTT0");
  CHECK(fwd2(OpKind::BvAdd, "0001", "0001") == "0010"); // exact on singletons
  CHECK(fwd2(OpKind::BvSub, "0000", "0001") == "1111");
  CHECK(fwd1(OpKind::BvNeg, "0001") == "1111");

  // multiplication only tracks guaranteed trailing zeros
  CHECK(fwd2(OpKind::BvMul, "TT10", "T100") == "T000");
  CHECK(fwd2(OpKind::BvMul, "TTT1", "TTT1") == "TTTT");

  // shifts join over the amount range read off the operand's bits
  CHECK(fwd2(OpKind::BvAshr, "011T", "0001") == "0011");
  CHECK(fwd2(OpKind::BvLshr, "1000", "00T0") == "TTT0"); // amounts 0..2
  CHECK(fwd2(OpKind::BvShl, "0001", "0010") == "0100");
  // amount can only be >= 4: saturation
  CHECK(fwd2(OpKind::BvLshr, "1T10", "01TT") == "0000");
  CHECK(fwd2(OpKind::BvAshr, "1010", "0100") == "1111"); // sign fill

  // division operators fall back to no information
  CHECK(fwd2(OpKind::BvUdiv, "0001", "0001") == "TTTT");
}

TEST_CASE("backward transfer goldens") {
  auto bwd = [](OpKind op, size_t idx, const char *r, const char *a,
                const char *b) {
    BitwiseValue args[2] = {bits(a), bits(b)};
    return backward_bits(op, idx, bits(r), args).str();
  };

  // the worked refinement: result 0011 under lshr by one pins 011T
  CHECK(bwd(OpKind::BvLshr, 0, "0011", "TTTT", "0001") == "011T");
  // shifting left cannot produce a forced 1 in the vacated low bits
  CHECK(bwd(OpKind::BvShl, 0, "0011", "TTTT", "0001") == "BBBB");
  CHECK(bwd(OpKind::BvShl, 0, "0010", "TTTT", "0001") == "T001");
  // for ashr by 2 the top three result bits are all the operand's sign
  CHECK(bwd(OpKind::BvAshr, 0, "1110", "TTTT", "0010") == "10TT");
  CHECK(bwd(OpKind::BvAshr, 0, "1100", "TTTT", "0010") == "BBBB");

  CHECK(bwd(OpKind::BvNot, 0, "10T1", "TTTT", "TTTT") == "01T0");
  CHECK(bwd(OpKind::BvXor, 0, "0011", "TTTT", "1011") == "1000");
  CHECK(bwd(OpKind::BvAnd, 0, "1T00", "TTTT", "TT1T") == "1T0T");
  // a forced-1 result bit where the other operand is forced 0 pins a 1
  CHECK(bwd(OpKind::BvOr, 0, "1T00", "TTTT", "0T0T") == "1T00");
  // amount operand of a shift is never refined
  CHECK(bwd(OpKind::BvLshr, 1, "0011", "TTTT", "TTTT") == "TTTT");
  // comparisons and division refine nothing
  CHECK(bwd(OpKind::BvUdiv, 0, "0011", "TTTT", "TTTT") == "TTTT");
}

TEST_CASE("multiplication inversion solves modular equations") {
  using detail::infer_mul_operand;
  // 2x = 4 (mod 16): x is 2 mod 8, top bit free
  CHECK(infer_mul_operand(2, 4, 4).str() == "T010");
  // 4x = 2 (mod 16): unsolvable, 2 is not divisible by 4
  CHECK(infer_mul_operand(4, 2, 4).any_bottom());
  // odd multiplier: unique solution 11 * 9 = 99 = 3 (mod 16)
  CHECK(infer_mul_operand(11, 3, 4).str() == "1001");
  // degenerate multiplier
  CHECK(infer_mul_operand(0, 0, 4) == BitwiseValue::top(4));
  CHECK(infer_mul_operand(0, 5, 4).any_bottom());

  // exhaustive: the inferred set is exactly the brute-force solution set
  for (uint64_t mult = 0; mult < 16; ++mult)
    for (uint64_t prod = 0; prod < 16; ++prod) {
      BitwiseValue got = infer_mul_operand(mult, prod, 4);
      for (uint64_t x = 0; x < 16; ++x) {
        bool solves = ((x * mult) & 0xF) == prod;
        REQUIRE(got.contains(x) == solves);
      }
    }
}

TEST_CASE("Newton inverse is correct for every odd word") {
  for (uint64_t a = 1; a < 256; a += 2)
    CHECK(((a * detail::modinv_pow2(a)) & 0xFF) == 1);
  uint64_t big = 0xDEADBEEF12345679ull;
  CHECK(big * detail::modinv_pow2(big) == 1);
}

TEST_CASE("sampled soundness of the forward transfer") {
  std::mt19937 rng(2026);
  const OpKind binops[] = {OpKind::BvAnd,  OpKind::BvOr,  OpKind::BvXor,
                           OpKind::BvAdd,  OpKind::BvSub, OpKind::BvMul,
                           OpKind::BvShl,  OpKind::BvLshr, OpKind::BvAshr,
                           OpKind::BvUdiv, OpKind::BvUrem};
  for (OpKind op : binops) {
    for (int trial = 0; trial < 400; ++trial) {
      BitwiseValue a = random_bits(rng, 4), b = random_bits(rng, 4);
      BitwiseValue args[2] = {a, b};
      BitwiseValue r = forward_bits(op, args);
      for (uint64_t ca : members(a))
        for (uint64_t cb : members(b)) {
          Value cargs[2] = {Value::bv(ca, 4), Value::bv(cb, 4)};
          uint64_t out = eval_op(op, cargs).bits;
          REQUIRE(r.contains(out));
        }
    }
  }
  for (OpKind op : {OpKind::BvNot, OpKind::BvNeg}) {
    for (int trial = 0; trial < 400; ++trial) {
      BitwiseValue a = random_bits(rng, 4);
      BitwiseValue args[1] = {a};
      BitwiseValue r = forward_bits(op, args);
      for (uint64_t ca : members(a)) {
        Value cargs[1] = {Value::bv(ca, 4)};
        REQUIRE(r.contains(eval_op(op, cargs).bits));
      }
    }
  }
}

TEST_CASE("sampled soundness of the backward transfer") {
  // whenever concrete arguments produce a result inside `result`, the
  // refined operand abstraction must still contain that argument
  std::mt19937 rng(4051);
  const OpKind binops[] = {OpKind::BvAnd, OpKind::BvOr,   OpKind::BvXor,
                           OpKind::BvMul, OpKind::BvShl,  OpKind::BvLshr,
                           OpKind::BvAshr};
  for (OpKind op : binops) {
    for (int trial = 0; trial < 300; ++trial) {
      BitwiseValue a = random_bits(rng, 4), b = random_bits(rng, 4);
      BitwiseValue result = random_bits(rng, 4);
      BitwiseValue args[2] = {a, b};
      for (size_t idx = 0; idx < 2; ++idx) {
        BitwiseValue refined = backward_bits(op, idx, result, args);
        for (uint64_t ca : members(a))
          for (uint64_t cb : members(b)) {
            Value cargs[2] = {Value::bv(ca, 4), Value::bv(cb, 4)};
            if (!result.contains(eval_op(op, cargs).bits))
              continue;
            REQUIRE(refined.contains(idx == 0 ? ca : cb));
          }
      }
    }
  }
}

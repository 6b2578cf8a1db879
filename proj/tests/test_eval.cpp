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

#include "absynth/eval.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace absynth;

namespace {

Value b4(uint64_t v) { return Value::bv(v, 4); }

uint64_t op2(OpKind op, uint64_t a, uint64_t b) {
  Value args[2] = {b4(a), b4(b)};
  return eval_op(op, args).bits;
}

} // namespace

TEST_CASE("division and remainder are totalized the SMT-LIB way") {
  // x udiv 0 = all ones, x urem 0 = x
  CHECK(op2(OpKind::BvUdiv, 5, 0) == 0xF);
  CHECK(op2(OpKind::BvUdiv, 0, 0) == 0xF);
  CHECK(op2(OpKind::BvUrem, 5, 0) == 5);

  // x sdiv 0 = 1 if x < 0 else -1; x srem 0 = x
  CHECK(op2(OpKind::BvSdiv, 0xB, 0) == 1);    // 1011 is -5
  CHECK(op2(OpKind::BvSdiv, 3, 0) == 0xF);    // -1
  CHECK(op2(OpKind::BvSrem, 0xB, 0) == 0xB);

  // signed overflow case: SMin / -1 wraps, SMin rem -1 is 0
  CHECK(op2(OpKind::BvSdiv, 0x8, 0xF) == 0x8);
  CHECK(op2(OpKind::BvSrem, 0x8, 0xF) == 0);

  // truncating division keeps the C sign convention
  CHECK(op2(OpKind::BvSdiv, 0x9, 2) == 0xD);  // -7 / 2 = -3
  CHECK(op2(OpKind::BvSrem, 0x9, 2) == 0xF);  // -7 rem 2 = -1
}

TEST_CASE("shift amounts at or beyond the width saturate") {
  CHECK(op2(OpKind::BvShl, 0xB, 4) == 0);
  CHECK(op2(OpKind::BvShl, 0xB, 15) == 0);
  CHECK(op2(OpKind::BvLshr, 0xB, 4) == 0);
  CHECK(op2(OpKind::BvAshr, 0xB, 4) == 0xF); // sign fill
  CHECK(op2(OpKind::BvAshr, 0x7, 4) == 0);
  CHECK(op2(OpKind::BvAshr, 0xB, 1) == 0xD); // 1011 >>a 1 = 1101
  CHECK(op2(OpKind::BvLshr, 0xB, 1) == 0x5);
  CHECK(op2(OpKind::BvShl, 0xB, 1) == 0x6);
}

TEST_CASE("arithmetic wraps modulo 2^w") {
  CHECK(op2(OpKind::BvAdd, 0xF, 1) == 0);
  CHECK(op2(OpKind::BvSub, 0, 1) == 0xF);
  CHECK(op2(OpKind::BvMul, 0xB, 0x9) == 0x3); // 99 mod 16
  Value v = b4(1);
  CHECK(eval_op(OpKind::BvNeg, {&v, 1}).bits == 0xF);
  CHECK(eval_op(OpKind::BvNot, {&v, 1}).bits == 0xE);
}

TEST_CASE("comparisons split unsigned from signed order") {
  Value args[2] = {b4(0xB), b4(3)};
  CHECK(eval_op(OpKind::BvUlt, args).as_bool() == false); // 11 < 3 unsigned
  CHECK(eval_op(OpKind::BvSlt, args).as_bool() == true);  // -5 < 3 signed
  CHECK(eval_op(OpKind::BvUle, args).as_bool() == false);
  CHECK(eval_op(OpKind::BvSle, args).as_bool() == true);
  Value same[2] = {b4(7), b4(7)};
  CHECK(eval_op(OpKind::Eq, same).as_bool());
}

TEST_CASE("boolean connectives and ite") {
  Value t = Value::boolean(true), f = Value::boolean(false);
  {
    Value args[2] = {t, f};
    CHECK_FALSE(eval_op(OpKind::And, args).as_bool());
    CHECK(eval_op(OpKind::Or, args).as_bool());
    CHECK(eval_op(OpKind::Xor, args).as_bool());
  }
  CHECK(eval_op(OpKind::Not, {&f, 1}).as_bool());
  {
    Value args[3] = {t, b4(0xA), b4(0x5)};
    CHECK(eval_op(OpKind::Ite, args).bits == 0xA);
    args[0] = f;
    CHECK(eval_op(OpKind::Ite, args).bits == 0x5);
  }
}

TEST_CASE("term evaluation matches the worked example") {
  Sort bv4s = Sort::bv(4);
  auto x = Term::var("x", bv4s);
  auto one = Term::constant(b4(1));
  auto body = Term::app(
      OpKind::BvAshr,
      {Term::app(OpKind::BvXor, {Term::app(OpKind::BvAdd, {x, one}), x}), one});

  Valuation env{{"x", b4(0xB)}};
  CHECK(eval(body, env).bits == 0x3);

  // and over a full example list
  std::vector<Example> exs{{{b4(0xB)}, b4(0x3)}, {{b4(0x5)}, b4(0x1)}};
  auto outs = eval_outputs(body, {"x"}, exs);
  REQUIRE(outs.size() == 2);
  CHECK(outs[0].bits == 0x3);
  CHECK(outs[1].bits == 0x1);
  CHECK(satisfies(body, {"x"}, exs));

  exs[1].output = b4(0xF);
  CHECK_FALSE(satisfies(body, {"x"}, exs));
}

TEST_CASE("evaluation errors are typed") {
  auto h = Term::hole(0, Sort::bv(4));
  Valuation env;
  try {
    eval(h, env);
    FAIL("expected a throw");
  } catch (const SynthError &e) {
    CHECK(e.code() == SynthError::Code::IncompleteTerm);
  }
  auto y = Term::var("y", Sort::bv(4));
  try {
    eval(y, env);
    FAIL("expected a throw");
  } catch (const SynthError &e) {
    CHECK(e.code() == SynthError::Code::UnboundVariable);
  }
}

TEST_CASE("eval_op agrees with a reference model on every 4-bit pair") {
  // Independent reference semantics, written directly from the SMT-LIB
  // definitions, checked against eval_op exhaustively at w=4.
  auto sgn = [](uint64_t v) { return (int64_t)(v & 8 ? v | ~0xFull : v); };
  struct Ref {
    OpKind op;
    uint64_t (*f)(uint64_t, uint64_t);
  };
  const Ref refs[] = {
      {OpKind::BvAnd, [](uint64_t a, uint64_t b) { return a & b; }},
      {OpKind::BvOr, [](uint64_t a, uint64_t b) { return a | b; }},
      {OpKind::BvXor, [](uint64_t a, uint64_t b) { return a ^ b; }},
      {OpKind::BvAdd, [](uint64_t a, uint64_t b) { return (a + b) & 0xF; }},
      {OpKind::BvSub, [](uint64_t a, uint64_t b) { return (a - b) & 0xF; }},
      {OpKind::BvMul, [](uint64_t a, uint64_t b) { return (a * b) & 0xF; }},
      {OpKind::BvUdiv,
       [](uint64_t a, uint64_t b) -> uint64_t { return b ? a / b : 0xF; }},
      {OpKind::BvUrem, [](uint64_t a, uint64_t b) { return b ? a % b : a; }},
      {OpKind::BvShl,
       [](uint64_t a, uint64_t b) -> uint64_t {
         return b >= 4 ? 0 : (a << b) & 0xF;
       }},
      {OpKind::BvLshr,
       [](uint64_t a, uint64_t b) -> uint64_t {
         return b >= 4 ? 0 : a >> b;
       }},
  };
  for (const Ref &r : refs)
    for (uint64_t a = 0; a < 16; ++a)
      for (uint64_t b = 0; b < 16; ++b)
        REQUIRE(op2(r.op, a, b) == r.f(a, b));

  // the signed ones, against arithmetic on sign-extended values
  for (uint64_t a = 0; a < 16; ++a)
    for (uint64_t b = 0; b < 16; ++b) {
      int64_t sa = sgn(a), sb = sgn(b);
      uint64_t want_div = sb == 0 ? (sa < 0 ? 1 : 0xF)
                                  : (uint64_t)(sa / sb) & 0xF;
      uint64_t want_rem = sb == 0 ? a : (uint64_t)(sa % sb) & 0xF;
      REQUIRE(op2(OpKind::BvSdiv, a, b) == want_div);
      REQUIRE(op2(OpKind::BvSrem, a, b) == want_rem);
      uint64_t want_ashr =
          b >= 4 ? (sa < 0 ? 0xF : 0) : ((uint64_t)(sa >> b)) & 0xF;
      REQUIRE(op2(OpKind::BvAshr, a, b) == want_ashr);
    }
}

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

#include <span>

namespace absynth {

// Concrete operator semantics, following SMT-LIB FixedSizeBitVectors plus
// the usual total definitions for division by zero:
//   bvudiv(x, 0) = all ones      bvurem(x, 0) = x
//   bvsdiv(x, 0) = x <s 0 ? 1 : -1   bvsrem(x, 0) = x
// Shift amounts are unsigned; amounts >= width saturate (to zero for bvshl
// and bvlshr, to a sign fill for bvashr).
inline Value eval_op(OpKind op, std::span<const Value> args) {
  auto bv = [&](uint64_t v) { return Value::bv(v, args[0].sort.width); };
  const uint32_t w = args[0].sort.is_bool ? 0 : args[0].sort.width;
  const uint64_t m = bv_mask(w);

  switch (op) {
  case OpKind::BvNot:
    return bv(~args[0].bits);
  case OpKind::BvNeg:
    return bv(~args[0].bits + 1);
  case OpKind::BvAnd:
    return bv(args[0].bits & args[1].bits);
  case OpKind::BvOr:
    return bv(args[0].bits | args[1].bits);
  case OpKind::BvXor:
    return bv(args[0].bits ^ args[1].bits);
  case OpKind::BvAdd:
    return bv(args[0].bits + args[1].bits);
  case OpKind::BvSub:
    return bv(args[0].bits - args[1].bits);
  case OpKind::BvMul:
    return bv(args[0].bits * args[1].bits);
  case OpKind::BvUdiv:
    return bv(args[1].bits == 0 ? m : args[0].bits / args[1].bits);
  case OpKind::BvUrem:
    return bv(args[1].bits == 0 ? args[0].bits : args[0].bits % args[1].bits);
  case OpKind::BvSdiv: {
    int64_t a = args[0].as_signed(), b = args[1].as_signed();
    if (b == 0)
      return bv(a < 0 ? 1 : (uint64_t)-1);
    // Hardware-style truncating division; the lone overflow case
    // SMin / -1 wraps back to SMin.
    if (a == smin_of(w) && b == -1)
      return bv((uint64_t)a);
    return bv((uint64_t)(a / b));
  }
  case OpKind::BvSrem: {
    int64_t a = args[0].as_signed(), b = args[1].as_signed();
    if (b == 0)
      return bv((uint64_t)a);
    if (a == smin_of(w) && b == -1)
      return bv(0);
    return bv((uint64_t)(a % b));
  }
  case OpKind::BvShl:
    return bv(args[1].bits >= w ? 0 : args[0].bits << args[1].bits);
  case OpKind::BvLshr:
    return bv(args[1].bits >= w ? 0 : args[0].bits >> args[1].bits);
  case OpKind::BvAshr: {
    uint64_t sign = args[0].bits & sign_bit(w);
    if (args[1].bits >= w)
      return bv(sign ? m : 0);
    uint64_t k = args[1].bits;
    uint64_t shifted = args[0].bits >> k;
    if (sign && k > 0)
      shifted |= m & ~(m >> k);
    return bv(shifted);
  }
  case OpKind::BvUle:
    return Value::boolean(args[0].bits <= args[1].bits);
  case OpKind::BvUlt:
    return Value::boolean(args[0].bits < args[1].bits);
  case OpKind::BvSle:
    return Value::boolean(args[0].as_signed() <= args[1].as_signed());
  case OpKind::BvSlt:
    return Value::boolean(args[0].as_signed() < args[1].as_signed());
  case OpKind::Eq:
    return Value::boolean(args[0] == args[1]);
  case OpKind::And:
    return Value::boolean(args[0].bits && args[1].bits);
  case OpKind::Or:
    return Value::boolean(args[0].bits || args[1].bits);
  case OpKind::Xor:
    return Value::boolean((args[0].bits != 0) != (args[1].bits != 0));
  case OpKind::Not:
    return Value::boolean(args[0].bits == 0);
  case OpKind::Ite:
    return args[0].bits ? args[1] : args[2];
  }
  throw SynthError(SynthError::Code::Internal, "unknown operator");
}

inline Value eval(const TermPtr &t, const Valuation &env) {
  switch (t->kind) {
  case Term::Kind::Const:
    return t->value;
  case Term::Kind::Var:
    for (const auto &[name, v] : env)
      if (name == t->name)
        return v;
    throw SynthError(SynthError::Code::UnboundVariable,
                     "unbound variable " + t->name);
  case Term::Kind::Hole:
    throw SynthError(SynthError::Code::IncompleteTerm,
                     "cannot evaluate a term with holes");
  case Term::Kind::App: {
    std::vector<Value> args;
    args.reserve(t->children.size());
    for (const TermPtr &c : t->children)
      args.push_back(eval(c, env));
    return eval_op(t->op, args);
  }
  }
  throw SynthError(SynthError::Code::Internal, "unknown term kind");
}

// Evaluate a complete term on each example's inputs.
inline std::vector<Value> eval_outputs(const TermPtr &t,
                                       const std::vector<std::string> &args,
                                       const std::vector<Example> &examples) {
  std::vector<Value> out;
  out.reserve(examples.size());
  Valuation env;
  for (const Example &ex : examples) {
    env.clear();
    for (size_t i = 0; i < args.size(); ++i)
      env.emplace_back(args[i], ex.inputs[i]);
    out.push_back(eval(t, env));
  }
  return out;
}

inline bool satisfies(const TermPtr &t, const std::vector<std::string> &args,
                      const std::vector<Example> &examples) {
  Valuation env;
  for (const Example &ex : examples) {
    env.clear();
    for (size_t i = 0; i < args.size(); ++i)
      env.emplace_back(args[i], ex.inputs[i]);
    if (!(eval(t, env) == ex.output))
      return false;
  }
  return true;
}

} // namespace absynth

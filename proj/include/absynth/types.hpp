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

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace absynth {

// Cooperative timeout: long-running loops test the deadline and unwind
// with this sentinel, which the search driver converts into a Timeout
// outcome.
struct TimeoutReached {};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

inline void check_deadline(const Deadline &d) {
  if (d && std::chrono::steady_clock::now() > *d)
    throw TimeoutReached{};
}

class SynthError : public std::runtime_error {
public:
  enum class Code {
    ParseError,
    UnsupportedFeature,
    NonPbeConstraint,
    InvalidPosition,
    WidthMismatch,
    SortMismatch,
    UnboundVariable,
    HoleInTerm,
    NoHoles,
    NonSingletonInput,
    NoSeparatingPredicate,
    IncompleteTerm,
    IoError,
    Internal,
  };

  SynthError(Code code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  Code code() const { return code_; }

private:
  Code code_;
};

// Either Bool or a fixed-width bitvector. Widths above 64 are rejected at
// the frontend; everything below assumes a value fits one machine word.
struct Sort {
  bool is_bool = false;
  uint32_t width = 0; // meaningful iff !is_bool

  static Sort bool_sort() { return Sort{true, 0}; }
  static Sort bv(uint32_t w) { return Sort{false, w}; }

  bool operator==(const Sort &o) const = default;

  std::string str() const {
    if (is_bool)
      return "Bool";
    return "(_ BitVec " + std::to_string(width) + ")";
  }
};

inline uint64_t bv_mask(uint32_t w) {
  return w >= 64 ? ~0ull : ((1ull << w) - 1);
}

inline uint64_t sign_bit(uint32_t w) { return 1ull << (w - 1); }

inline int64_t to_signed(uint64_t v, uint32_t w) {
  if (v & sign_bit(w))
    return (int64_t)(v | ~bv_mask(w));
  return (int64_t)v;
}

// Smallest/largest signed values of width w, as signed integers.
inline int64_t smin_of(uint32_t w) { return -(int64_t)sign_bit(w); }
inline int64_t smax_of(uint32_t w) { return (int64_t)(sign_bit(w) - 1); }

// Two's complement representation: the width-w pattern of x, defined for
// -2^(w-1) <= x <= 2^w - 1.
inline uint64_t twos_complement_repr(int64_t x, uint32_t w) {
  if (x < 0) {
    if (x < smin_of(w))
      throw SynthError(SynthError::Code::WidthMismatch,
                       "value below signed range of width " + std::to_string(w));
  } else if (w < 64 && (uint64_t)x > bv_mask(w)) {
    throw SynthError(SynthError::Code::WidthMismatch,
                     "value above unsigned range of width " + std::to_string(w));
  }
  return (uint64_t)x & bv_mask(w);
}

struct Value {
  Sort sort;
  uint64_t bits = 0; // Bool: 0 or 1. BitVec: low sort.width bits.

  static Value bv(uint64_t v, uint32_t w) {
    return Value{Sort::bv(w), v & bv_mask(w)};
  }
  static Value boolean(bool b) {
    return Value{Sort::bool_sort(), b ? 1ull : 0ull};
  }

  bool operator==(const Value &o) const = default;

  bool as_bool() const {
    if (!sort.is_bool)
      throw SynthError(SynthError::Code::SortMismatch, "not a Bool value");
    return bits != 0;
  }
  int64_t as_signed() const { return to_signed(bits, sort.width); }

  std::string str() const {
    if (sort.is_bool)
      return bits ? "true" : "false";
    std::string s = "#b";
    for (uint32_t i = sort.width; i-- > 0;)
      s += (bits >> i) & 1 ? '1' : '0';
    return s;
  }
};

using Valuation = std::vector<std::pair<std::string, Value>>;

// One programming-by-example pair. Inputs are positional and aligned with
// the synthesized function's argument list.
struct Example {
  std::vector<Value> inputs;
  Value output;
};

inline size_t hash_mix(size_t h, size_t v) {
  // 64-bit splitmix-style combiner
  v += 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return h ^ (v ^ (v >> 31));
}

} // namespace absynth

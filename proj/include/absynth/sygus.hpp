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

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace absynth {

// A programming-by-example synthesis instance: one function to synthesize,
// its grammar, and the examples extracted from point constraints.
struct SynthProblem {
  std::string fname;
  std::vector<std::string> arg_names;
  std::vector<Sort> arg_sorts;
  Sort ret_sort;
  Grammar grammar;
  std::vector<Example> examples;
};

namespace sexpr {

struct Node {
  bool atom = false;
  std::string text;        // atoms
  std::vector<Node> items; // lists
  int line = 0, col = 0;
};

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::vector<Node> parse_all() {
    std::vector<Node> out;
    skip_ws();
    while (pos_ < src_.size()) {
      out.push_back(parse_node());
      skip_ws();
    }
    return out;
  }

private:
  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  [[noreturn]] void fail(const std::string &msg, int line, int col) {
    throw SynthError(SynthError::Code::ParseError,
                     std::to_string(line) + ":" + std::to_string(col) + ": " +
                         msg);
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          advance();
      } else if (isspace((unsigned char)c)) {
        advance();
      } else {
        return;
      }
    }
  }

  Node parse_node() {
    Node n;
    n.line = line_;
    n.col = col_;
    char c = src_[pos_];
    if (c == '(') {
      advance();
      skip_ws();
      while (pos_ < src_.size() && src_[pos_] != ')') {
        n.items.push_back(parse_node());
        skip_ws();
      }
      if (pos_ >= src_.size())
        fail("unterminated list", n.line, n.col);
      advance(); // ')'
      return n;
    }
    if (c == ')')
      fail("unexpected ')'", line_, col_);
    n.atom = true;
    while (pos_ < src_.size()) {
      c = src_[pos_];
      if (c == '(' || c == ')' || c == ';' || isspace((unsigned char)c))
        break;
      n.text += c;
      advance();
    }
    return n;
  }
};

} // namespace sexpr

namespace detail {

[[noreturn]] inline void parse_fail(const sexpr::Node &n,
                                    const std::string &msg) {
  throw SynthError(SynthError::Code::ParseError,
                   std::to_string(n.line) + ":" + std::to_string(n.col) +
                       ": " + msg);
}

[[noreturn]] inline void unsupported(const sexpr::Node &n,
                                     const std::string &msg) {
  throw SynthError(SynthError::Code::UnsupportedFeature,
                   std::to_string(n.line) + ":" + std::to_string(n.col) +
                       ": " + msg);
}

inline bool is_atom(const sexpr::Node &n, std::string_view s) {
  return n.atom && n.text == s;
}

inline Sort parse_sort(const sexpr::Node &n) {
  if (is_atom(n, "Bool"))
    return Sort::bool_sort();
  if (!n.atom && n.items.size() == 3 && is_atom(n.items[0], "_") &&
      is_atom(n.items[1], "BitVec") && n.items[2].atom) {
    const std::string &ws = n.items[2].text;
    uint64_t w = 0;
    for (char c : ws) {
      if (!isdigit((unsigned char)c))
        parse_fail(n, "bad bitvector width");
      w = w * 10 + (c - '0');
      if (w > 1000)
        break;
    }
    if (w == 0)
      parse_fail(n, "zero bitvector width");
    if (w > 64)
      unsupported(n, "bitvector widths above 64 are not supported");
    return Sort::bv((uint32_t)w);
  }
  parse_fail(n, "unsupported sort");
}

inline std::optional<Value> parse_literal(const sexpr::Node &n) {
  if (n.atom) {
    const std::string &t = n.text;
    if (t == "true")
      return Value::boolean(true);
    if (t == "false")
      return Value::boolean(false);
    if (t.size() > 2 && t[0] == '#' && t[1] == 'b') {
      uint32_t w = (uint32_t)t.size() - 2;
      if (w > 64)
        unsupported(n, "bitvector literal wider than 64");
      uint64_t v = 0;
      for (size_t i = 2; i < t.size(); ++i) {
        if (t[i] != '0' && t[i] != '1')
          parse_fail(n, "bad binary literal");
        v = (v << 1) | (uint64_t)(t[i] - '0');
      }
      return Value::bv(v, w);
    }
    if (t.size() > 2 && t[0] == '#' && t[1] == 'x') {
      uint32_t w = 4 * ((uint32_t)t.size() - 2);
      if (w > 64)
        unsupported(n, "bitvector literal wider than 64");
      uint64_t v = 0;
      for (size_t i = 2; i < t.size(); ++i) {
        char c = (char)tolower((unsigned char)t[i]);
        int d = c >= '0' && c <= '9'   ? c - '0'
                : c >= 'a' && c <= 'f' ? c - 'a' + 10
                                       : -1;
        if (d < 0)
          parse_fail(n, "bad hex literal");
        v = (v << 4) | (uint64_t)d;
      }
      return Value::bv(v, w);
    }
    return std::nullopt;
  }
  // (_ bvN w)
  if (n.items.size() == 3 && is_atom(n.items[0], "_") && n.items[1].atom &&
      n.items[1].text.size() > 2 && n.items[1].text.rfind("bv", 0) == 0 &&
      n.items[2].atom) {
    uint64_t v = 0;
    for (size_t i = 2; i < n.items[1].text.size(); ++i) {
      char c = n.items[1].text[i];
      if (!isdigit((unsigned char)c))
        parse_fail(n, "bad bv literal value");
      v = v * 10 + (uint64_t)(c - '0');
    }
    uint64_t w = 0;
    for (char c : n.items[2].text) {
      if (!isdigit((unsigned char)c))
        parse_fail(n, "bad bv literal width");
      w = w * 10 + (uint64_t)(c - '0');
    }
    if (w == 0 || w > 64) {
      if (w > 64)
        unsupported(n, "bitvector literal wider than 64");
      parse_fail(n, "zero-width bv literal");
    }
    return Value::bv(v, (uint32_t)w);
  }
  return std::nullopt;
}

struct GrammarCtx {
  const std::vector<std::string> &arg_names;
  const std::vector<Sort> &arg_sorts;
  Grammar &g;
};

inline void parse_production(GrammarCtx &ctx, int nt, const sexpr::Node &n) {
  Sort nts = ctx.g.nt_sorts[nt];
  if (auto lit = parse_literal(n)) {
    if (!(lit->sort == nts))
      parse_fail(n, "literal sort disagrees with nonterminal " +
                        ctx.g.nt_names[nt]);
    ctx.g.productions.push_back({nt, Term::constant(*lit), OpKind::BvNot, {}});
    return;
  }
  if (n.atom) {
    for (size_t i = 0; i < ctx.arg_names.size(); ++i)
      if (ctx.arg_names[i] == n.text) {
        if (!(ctx.arg_sorts[i] == nts))
          parse_fail(n, "argument sort disagrees with nonterminal " +
                            ctx.g.nt_names[nt]);
        ctx.g.productions.push_back(
            {nt, Term::var(n.text, ctx.arg_sorts[i]), OpKind::BvNot, {}});
        return;
      }
    if (ctx.g.find_nt(n.text) >= 0)
      unsupported(n, "bare nonterminal alternatives are not supported");
    parse_fail(n, "unknown symbol '" + n.text + "' in grammar");
  }
  if (n.items.empty() || !n.items[0].atom)
    parse_fail(n, "malformed production");
  auto op = op_from_name(n.items[0].text);
  if (!op)
    unsupported(n.items[0], "operator '" + n.items[0].text +
                                "' is not supported");
  if ((int)n.items.size() - 1 != op_arity(*op))
    parse_fail(n, "operator arity mismatch");
  std::vector<int> rhs;
  for (size_t i = 1; i < n.items.size(); ++i) {
    const sexpr::Node &a = n.items[i];
    if (!a.atom)
      unsupported(a, "operator operands must be nonterminal names");
    int r = ctx.g.find_nt(a.text);
    if (r < 0)
      unsupported(a, "operator operands must be nonterminal names");
    rhs.push_back(r);
  }
  ctx.g.productions.push_back({nt, nullptr, *op, std::move(rhs)});
}

inline void parse_synth_fun(SynthProblem &prob, const sexpr::Node &n) {
  if (n.items.size() != 6)
    unsupported(n, "synth-fun requires explicit nonterminal and rule lists");
  if (!n.items[1].atom)
    parse_fail(n.items[1], "function name expected");
  prob.fname = n.items[1].text;

  const sexpr::Node &params = n.items[2];
  if (params.atom)
    parse_fail(params, "parameter list expected");
  for (const sexpr::Node &p : params.items) {
    if (p.atom || p.items.size() != 2 || !p.items[0].atom)
      parse_fail(p, "parameter (name sort) expected");
    prob.arg_names.push_back(p.items[0].text);
    prob.arg_sorts.push_back(parse_sort(p.items[1]));
  }
  prob.ret_sort = parse_sort(n.items[3]);

  const sexpr::Node &decls = n.items[4];
  if (decls.atom || decls.items.empty())
    parse_fail(decls, "nonterminal declaration list expected");
  for (const sexpr::Node &d : decls.items) {
    if (d.atom || d.items.size() != 2 || !d.items[0].atom)
      parse_fail(d, "nonterminal (name sort) expected");
    prob.grammar.nt_names.push_back(d.items[0].text);
    prob.grammar.nt_sorts.push_back(parse_sort(d.items[1]));
  }
  prob.grammar.start = 0;
  if (!(prob.grammar.nt_sorts[0] == prob.ret_sort))
    parse_fail(decls, "start nonterminal sort disagrees with return sort");

  const sexpr::Node &groups = n.items[5];
  if (groups.atom || groups.items.size() != prob.grammar.nt_names.size())
    parse_fail(groups, "one rule group per declared nonterminal expected");
  GrammarCtx ctx{prob.arg_names, prob.arg_sorts, prob.grammar};
  for (size_t gi = 0; gi < groups.items.size(); ++gi) {
    const sexpr::Node &grp = groups.items[gi];
    if (grp.atom || grp.items.size() < 3 || !grp.items[0].atom)
      parse_fail(grp, "rule group (NT sort (rule...)) expected");
    if (grp.items[0].text != prob.grammar.nt_names[gi])
      parse_fail(grp.items[0], "rule groups must follow declaration order");
    Sort s = parse_sort(grp.items[1]);
    if (!(s == prob.grammar.nt_sorts[gi]))
      parse_fail(grp.items[1], "rule group sort disagrees with declaration");
    for (size_t ri = 2; ri < grp.items.size(); ++ri)
      parse_production(ctx, (int)gi, grp.items[ri]);
  }
  prob.grammar.index();
  try {
    prob.grammar.validate();
  } catch (const SynthError &e) {
    throw SynthError(SynthError::Code::ParseError, e.what());
  }
}

inline void parse_constraint(SynthProblem &prob, const sexpr::Node &n) {
  auto reject = [&](const std::string &why) {
    throw SynthError(SynthError::Code::NonPbeConstraint,
                     std::to_string(n.line) + ":" + std::to_string(n.col) +
                         ": " + why);
  };
  if (prob.fname.empty())
    parse_fail(n, "constraint before synth-fun");
  if (n.items.size() != 2 || n.items[1].atom)
    reject("constraint must be an equality between a call and a literal");
  const sexpr::Node &eq = n.items[1];
  if (eq.items.size() != 3 || !is_atom(eq.items[0], "="))
    reject("constraint must be an equality between a call and a literal");

  auto is_call = [&](const sexpr::Node &e) {
    return !e.atom && !e.items.empty() && is_atom(e.items[0], prob.fname);
  };
  const sexpr::Node *call = nullptr, *out = nullptr;
  if (is_call(eq.items[1]))
    call = &eq.items[1], out = &eq.items[2];
  else if (is_call(eq.items[2]))
    call = &eq.items[2], out = &eq.items[1];
  else
    reject("no call to the synthesized function on either side");

  auto o = parse_literal(*out);
  if (!o)
    reject("output side is not a literal");
  if (!(o->sort == prob.ret_sort))
    reject("output literal sort disagrees with the function");

  if (call->items.size() - 1 != prob.arg_names.size())
    reject("call argument count mismatch");
  Example ex;
  for (size_t i = 1; i < call->items.size(); ++i) {
    auto v = parse_literal(call->items[i]);
    if (!v)
      reject("call argument is not a literal");
    if (!(v->sort == prob.arg_sorts[i - 1]))
      reject("call argument sort mismatch");
    ex.inputs.push_back(*v);
  }
  ex.output = *o;
  prob.examples.push_back(std::move(ex));
}

} // namespace detail

// Parse the accepted SyGuS subset: (set-logic ...) is ignored, exactly one
// synth-fun with explicit grammar, point constraints only, (check-synth)
// required.
inline SynthProblem parse_problem(std::string_view text) {
  sexpr::Parser p(text);
  std::vector<sexpr::Node> forms = p.parse_all();

  SynthProblem prob;
  bool have_synth = false, have_check = false;
  for (const sexpr::Node &f : forms) {
    if (f.atom || f.items.empty() || !f.items[0].atom)
      detail::parse_fail(f, "unexpected top-level form");
    const std::string &head = f.items[0].text;
    if (have_check)
      detail::parse_fail(f, "content after (check-synth)");
    if (head == "set-logic" || head == "declare-var")
      continue;
    if (head == "synth-fun") {
      if (have_synth)
        detail::unsupported(f, "multiple synth-fun commands");
      detail::parse_synth_fun(prob, f);
      have_synth = true;
    } else if (head == "constraint") {
      if (!have_synth)
        detail::parse_fail(f, "constraint before synth-fun");
      detail::parse_constraint(prob, f);
    } else if (head == "check-synth") {
      have_check = true;
    } else {
      detail::unsupported(f.items[0], "unsupported command '" + head + "'");
    }
  }
  if (!have_synth)
    throw SynthError(SynthError::Code::ParseError, "no synth-fun command");
  if (!have_check)
    throw SynthError(SynthError::Code::ParseError, "missing (check-synth)");
  if (prob.examples.empty())
    throw SynthError(SynthError::Code::NonPbeConstraint,
                     "no point constraints; at least one example required");
  return prob;
}

inline std::string render_solution(const SynthProblem &prob,
                                   const TermPtr &t) {
  if (!t->complete())
    throw SynthError(SynthError::Code::IncompleteTerm,
                     "cannot render a term with holes");
  std::string s = "(define-fun " + prob.fname + " (";
  for (size_t i = 0; i < prob.arg_names.size(); ++i) {
    if (i)
      s += ' ';
    s += '(' + prob.arg_names[i] + ' ' + prob.arg_sorts[i].str() + ')';
  }
  s += ") " + prob.ret_sort.str() + " ";
  to_sexpr(t, s);
  s += ")";
  return s;
}

} // namespace absynth

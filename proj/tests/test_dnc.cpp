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

#include "absynth/dnc.hpp"

#include "absynth/sygus.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace absynth;

namespace {

const char *kMiniMax = R"((set-logic BV)
(synth-fun max2 ((x (_ BitVec 4)) (y (_ BitVec 4))) (_ BitVec 4)
  ((S (_ BitVec 4)) (B Bool))
  ((S (_ BitVec 4) x y (ite B S S))
   (B Bool (bvule S S))))
(constraint (= (max2 #b0000 #b0001) #b0001))
(constraint (= (max2 #b0010 #b0001) #b0010))
(constraint (= (max2 #b0101 #b0101) #b0101))
(constraint (= (max2 #b1001 #b0011) #b1001))
(check-synth)
)";

SearchConfig quick() {
  SearchConfig cfg;
  cfg.max_height = 1;
  cfg.timeout_seconds = 60.0;
  return cfg;
}

bool contains_op(const TermPtr &t, OpKind k) {
  if (t->kind == Term::Kind::App && t->op == k)
    return true;
  for (const TermPtr &c : t->children)
    if (contains_op(c, k))
      return true;
  return false;
}

} // namespace

TEST_CASE("label entropy") {
  std::vector<size_t> all{0, 1, 2, 3};
  CHECK(detail::entropy({0, 0, 0, 0}, all) == 0.0);
  CHECK(detail::entropy({0, 0, 1, 1}, all) == 1.0);
  CHECK(detail::entropy({1, 1, 0, 0}, {2, 3}) == 0.0); // subset view
  CHECK_THAT(detail::entropy({0, 1, 2, 1}, all),
             Catch::Matchers::WithinAbs(1.5, 1e-12));
}

TEST_CASE("decision tree induction") {
  const Sort bv4 = Sort::bv(4);
  std::vector<TermPtr> terms = {Term::var("a", bv4), Term::var("b", bv4)};
  std::vector<size_t> all{0, 1, 2, 3};

  SECTION("a pure node becomes a leaf without consuming predicates") {
    auto tree = detail::learn_tree(all, {1, 1, 1, 1}, terms, {});
    REQUIRE(tree);
    CHECK(term_eq(tree->leaf, terms[1]));
    CHECK(detail::tree_depth(*tree) == 0);
    CHECK(to_sexpr(detail::fold_tree(*tree)) == "b");
  }

  SECTION("a separating predicate splits the examples once") {
    std::vector<detail::Predicate> preds;
    preds.push_back({Term::var("p", Sort::bool_sort()), {true, false, true, false}});
    auto tree = detail::learn_tree(all, {0, 1, 0, 1}, terms, preds);
    REQUIRE(tree);
    CHECK(tree->pred == &preds[0]);
    CHECK(detail::tree_depth(*tree) == 1);
    CHECK(to_sexpr(detail::fold_tree(*tree)) == "(ite p a b)");
  }

  SECTION("the higher-gain predicate wins, earliest on ties") {
    std::vector<detail::Predicate> preds;
    preds.push_back({Term::var("weak", Sort::bool_sort()), {true, true, true, false}});
    preds.push_back({Term::var("exact", Sort::bool_sort()), {true, true, false, false}});
    auto tree = detail::learn_tree(all, {0, 0, 1, 1}, terms, preds);
    REQUIRE(tree);
    CHECK(tree->pred == &preds[1]); // perfect split beats the earlier one

    std::vector<detail::Predicate> tied;
    tied.push_back({Term::var("first", Sort::bool_sort()), {true, true, false, false}});
    tied.push_back({Term::var("second", Sort::bool_sort()), {false, false, true, true}});
    auto tree2 = detail::learn_tree(all, {0, 0, 1, 1}, terms, tied);
    REQUIRE(tree2);
    CHECK(tree2->pred == &tied[0]);
  }

  SECTION("nested splits recurse on the residual subsets") {
    std::vector<TermPtr> three = {Term::var("a", bv4), Term::var("b", bv4),
                                  Term::var("c", bv4)};
    std::vector<detail::Predicate> preds;
    preds.push_back({Term::var("p", Sort::bool_sort()), {true, true, false, false}});
    preds.push_back({Term::var("q", Sort::bool_sort()), {true, false, true, false}});
    auto tree = detail::learn_tree(all, {0, 1, 2, 2}, three, preds);
    REQUIRE(tree);
    CHECK(detail::tree_depth(*tree) == 2);
    auto folded = detail::fold_tree(*tree);
    CHECK(to_sexpr(folded) == "(ite p (ite q a b) c)");
  }

  SECTION("an unsplittable node reports failure") {
    CHECK(detail::learn_tree(all, {0, 1, 0, 1}, terms, {}) == nullptr);
    std::vector<detail::Predicate> oneway;
    oneway.push_back({Term::var("p", Sort::bool_sort()), {true, true, true, true}});
    CHECK(detail::learn_tree(all, {0, 1, 0, 1}, terms, oneway) == nullptr);
  }
}

TEST_CASE("a conditional maximum is assembled from covers") {
  SynthProblem p = parse_problem(kMiniMax);
  Outcome o = solve_with_dnc(p, quick());

  REQUIRE(o.kind == Outcome::Kind::Solution);
  REQUIRE(o.solution);
  CHECK(satisfies(o.solution, p.arg_names, p.examples));
  CHECK(contains_op(o.solution, OpKind::Ite));
  CHECK(o.stats.cover_terms == 2); // one branch per argument
  CHECK(o.stats.tree_depth == 1);
}

TEST_CASE("a single covering term needs no conditional") {
  std::string src = R"((synth-fun f ((x (_ BitVec 4)) (y (_ BitVec 4))) (_ BitVec 4)
  ((S (_ BitVec 4)) (B Bool))
  ((S (_ BitVec 4) x y #b0001 (bvadd S S) (ite B S S))
   (B Bool (bvule S S))))
(constraint (= (f #b0001 #b0010) #b0110))
(check-synth))";
  SynthProblem p = parse_problem(src);
  Outcome o = solve_with_dnc(p, quick());

  REQUIRE(o.kind == Outcome::Kind::Solution);
  CHECK(satisfies(o.solution, p.arg_names, p.examples));
  CHECK(!contains_op(o.solution, OpKind::Ite));
  CHECK(o.stats.cover_terms == 1);
  CHECK(o.stats.tree_depth == 0);

  // the same run under a unit size cap cannot even cover one example
  SearchConfig capped = quick();
  capped.max_size = 1;
  CHECK(solve_with_dnc(p, capped).kind == Outcome::Kind::Timeout);
}

TEST_CASE("grammars without branching fall back to the plain search") {
  std::string src = R"((synth-fun f ((x (_ BitVec 4))) (_ BitVec 4)
  ((S (_ BitVec 4))) ((S (_ BitVec 4) x #b0001 (bvadd S S))))
(constraint (= (f #b0011) #b0100))
(check-synth))";
  SynthProblem p = parse_problem(src);
  Outcome plain = solve(p, quick());
  Outcome dnc = solve_with_dnc(p, quick());
  REQUIRE(plain.kind == Outcome::Kind::Solution);
  REQUIRE(dnc.kind == Outcome::Kind::Solution);
  CHECK(term_eq(plain.solution, dnc.solution));
  CHECK(dnc.stats.cover_terms == 0); // phase one never ran
}

TEST_CASE("an uncoverable example makes the problem unrealizable") {
  // on a single input every conditional collapses to one branch, so an
  // example with no branch-free term refutes the conditional grammar too
  std::string src = R"((synth-fun f ((x (_ BitVec 4))) (_ BitVec 4)
  ((S (_ BitVec 4)) (B Bool))
  ((S (_ BitVec 4) x (ite B S S)) (B Bool (= S S))))
(constraint (= (f #b0000) #b1111))
(check-synth))";
  Outcome o = solve_with_dnc(parse_problem(src), quick());
  CHECK(o.kind == Outcome::Kind::Unrealizable);
  CHECK(!o.solution);
}

TEST_CASE("constant predicates cannot separate anything") {
  // the only predicates are literal truth values, whose truth vectors are
  // constant across examples; the finite predicate language runs out
  std::string src = R"((synth-fun f ((x (_ BitVec 4))) (_ BitVec 4)
  ((S (_ BitVec 4)) (L (_ BitVec 4)) (B Bool))
  ((S (_ BitVec 4) #b0000 #b0001 (ite B L L))
   (L (_ BitVec 4) #b0000 #b0001)
   (B Bool true false)))
(constraint (= (f #b0000) #b0000))
(constraint (= (f #b0001) #b0001))
(check-synth))";
  SynthProblem p = parse_problem(src);
  try {
    solve_with_dnc(p, quick());
    FAIL("expected a no-separating-predicate error");
  } catch (const SynthError &e) {
    CHECK(e.code() == SynthError::Code::NoSeparatingPredicate);
  }
}

TEST_CASE("divide and conquer merges statistics across subproblems") {
  SynthProblem p = parse_problem(kMiniMax);
  Outcome o = solve_with_dnc(p, quick());
  REQUIRE(o.kind == Outcome::Kind::Solution);
  // two cover searches plus the predicate pool all contribute
  CHECK(o.stats.dequeued > 0);
  CHECK(o.stats.tested_complete > 0);
  CHECK(o.stats.max_n >= 1);
  CHECK(!o.stats.pool_sizes.empty());
  CHECK(o.stats.solution_size == o.solution->size);
  CHECK(o.stats.total_seconds < 60.0);
}

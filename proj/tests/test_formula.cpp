#include "doctest.h"
#include "support.hpp"

using namespace h2ltl;

namespace {
const Alphabet kAB({"a", "b"});
}

TEST_CASE("parse and print round trip") {
  const char* texts[] = {
      "forall pi in D. exists pi1 in D. G (a[pi] <-> b[pi1])",
      "exists X. forall pi in X. a[pi] U b[pi]",
      "exists (X, min, forall pi in X. a[pi]). exists pi in X. X !b[pi]",
      "forall (Y, max, exists pi in D. pi |> Y). forall pi in Y. F a[pi]",
      "forall pi in ALL. a[pi] -> b[pi] | a[pi] & !b[pi]",
  };
  for (auto* t : texts) {
    Formula f = parse_formula(t, kAB);
    Formula g = parse_formula(print_formula(f), kAB);
    CHECK(structurally_equal(f, g));
    CHECK(print_formula(g) == print_formula(f));
  }
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_formula("forall pi in D.\n  c[pi]", kAB);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 3);
  }
  CHECK_THROWS_AS(parse_formula("forall pi in D. G (exists pi1 in D. a[pi1])", kAB), ParseError);
  CHECK_THROWS_AS(parse_formula("a[pi] &", kAB), ParseError);
}

TEST_CASE("free variables and sentences") {
  Formula f = parse_formula("forall pi in X. a[pi] & b[pi2]", kAB);
  CHECK(free_trace_vars(f) == std::set<std::string>{"pi2"});
  CHECK(free_set_vars(f) == std::set<std::string>{"X"});
  CHECK_FALSE(check_sentence(f, false).ok());
  Formula s = parse_formula("forall pi in ALL. a[pi]", kAB);
  CHECK(check_sentence(s, true).ok());
  CHECK_FALSE(check_sentence(s, false).ok());
}

TEST_CASE("desugar keeps only the core connectives in bodies") {
  Formula f = parse_formula("forall pi in D. G (a[pi] -> F b[pi]) & (a[pi] <-> b[pi])", kAB);
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (!g) return;
    if (!is_quantifier(g->op))
      CHECK((g->op == Op::Atom || g->op == Op::Not || g->op == Op::Or || g->op == Op::Next ||
             g->op == Op::Until));
    walk(g->a);
    walk(g->b);
    walk(g->guard);
  };
  walk(desugar(f));
}

TEST_CASE("alpha renaming separates clashing binders") {
  Formula f = parse_formula("(exists pi in D. a[pi]) & (forall pi in D. b[pi])", kAB);
  Formula g = alpha_rename(f);
  CHECK(g->a->var != g->b->var);
  TraceSet T = parse_traceset("aps: a b\n{a} ; {b}\n; {a,b}\n");
  CHECK(eval_closed_world(T, f) == eval_closed_world(T, g));
}

TEST_CASE("prenex normal form") {
  Formula f = parse_formula("(exists pi in D. a[pi]) & !(forall pi in D. b[pi])", kAB);
  Formula p = normalize_prenex(f);
  int quants = 0;
  Formula g = p;
  while (is_quantifier(g->op)) {
    ++quants;
    g = g->a;
  }
  CHECK(quants == 2);
  CHECK_FALSE(contains_quantifier(g));
  TraceSet T = parse_traceset("aps: a b\n{a} ; {}\n; {b}\n");
  CHECK(eval_closed_world(T, f) == eval_closed_world(T, p));
}

TEST_CASE("renaming free variables") {
  Formula f = parse_formula("(forall pi in X. a[pi]) & exists X. forall pi in X. b[pi]", kAB);
  Formula g = rename_free_set(f, "X", "Z");
  CHECK(free_set_vars(g) == std::set<std::string>{"Z"});
  Formula h = rename_free_trace(parse_formula("a[pi] & exists pi in D. b[pi]", kAB), "pi", "q");
  CHECK(free_trace_vars(h) == std::set<std::string>{"q"});
}

TEST_CASE("fresh names") {
  CHECK(fresh_name("X", {"X", "X_1"}) == "X_2");
  CHECK(fresh_name("Y", {}) == "Y_1");
}

TEST_CASE("structure metrics") {
  Formula f = parse_formula("forall pi in D. exists X. forall pi1 in X. X (a[pi] U F b[pi1])", kAB);
  CHECK(quantifier_depth(f) == 3);
  CHECK(temporal_depth(f) == 3);
  CHECK(node_count(f) > 5);
}

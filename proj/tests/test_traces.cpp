#include "doctest.h"
#include "support.hpp"

using namespace h2ltl;

TEST_CASE("canonical lassos") {
  Alphabet ap({"a"});
  Letter a = ap.bit("a");
  LassoTrace t = canonicalize({a, 0, a, 0}, {a, 0});
  CHECK(t.stem.empty());
  CHECK(t.loop == std::vector<Letter>{a, 0});
  LassoTrace u = canonicalize({0}, {a, a, a});
  CHECK(u.stem == std::vector<Letter>{0});
  CHECK(u.loop == std::vector<Letter>{a});
  CHECK(canonicalize({a}, {a}) == canonicalize({}, {a}));
  for (std::size_t i = 0; i < 10; ++i) CHECK(t.at(i) == (i % 2 == 0 ? a : 0));
}

TEST_CASE("trace text round trip") {
  Alphabet ap({"b", "a"});
  CHECK(ap.props() == std::vector<std::string>{"a", "b"});
  LassoTrace t = parse_trace("{a} {a,b} ; {} {b}", ap);
  CHECK(format_trace(t, ap) == "{a} {a,b} ; {} {b}");
  CHECK(parse_trace(format_trace(t, ap), ap) == t);
  CHECK_THROWS(parse_trace("{c} ; {}", ap));
  CHECK_THROWS(parse_trace("{a} ;", ap));
}

TEST_CASE("projection and pointwise union") {
  Alphabet ab({"a", "b"}), a({"a"}), c({"c"});
  LassoTrace t = parse_trace("{a,b} ; {b} {a}", ab);
  CHECK(format_trace(project(t, ab, a), a) == "; {a} {}");
  LassoTrace u = parse_trace("; {c} {} {}", c);
  Alphabet abc = ab.unite(c);
  LassoTrace w = pointwise_union(t, ab, u, c);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(project(w, abc, ab).at(i) == t.at(i));
    CHECK(project(w, abc, c).at(i) == u.at(i));
  }
}

TEST_CASE("trace sets are sorted and unique") {
  Alphabet ap({"a"});
  TraceSet T = parse_traceset("aps: a\n{a} ; {}\n; {}\n{a} ; {}\n");
  CHECK(T.size() == 2);
  CHECK(parse_traceset(format_traceset(T)) == T);
  CHECK(T.index_of(parse_trace("; {}", ap)) >= 0);
  CHECK_THROWS(parse_traceset("{a} ; {}\n"));
}

TEST_CASE("transition systems") {
  TransitionSystem ts = ts_allSets();
  CHECK(ts.num_vertices() == 8);
  CHECK(ts.num_edges() == 12);
  CHECK(ts.num_initial() == 6);
  CHECK(parse_ts(format_ts(ts)).succ == ts.succ);
  CHECK_THROWS(parse_ts("aps: a\nvertex 0 init {a}\n"));  // no successor

  // {+}^k {+,x} {+}^w for k < 4, {+}^w, the minus mirror and the s part
  TraceSet T = enumerate_lassos(ts, 4, 2);
  Alphabet ap = ts.ap;
  CHECK(T.contains(parse_trace("{plus} {plus} {plus} {plus,x} ; {plus}", ap)));
  CHECK_FALSE(T.contains(parse_trace("{plus} {plus} {plus} {plus} {plus,x} ; {plus}", ap)));
  CHECK(T.contains(parse_trace("; {plus}", ap)));
  CHECK(T.contains(parse_trace("; {s,x} {s}", ap)));
  for (auto& t : T.members()) CHECK((t.stem.size() <= 4 && t.loop.size() <= 2));
}

TEST_CASE("lasso space enumeration") {
  Alphabet ap({"a"});
  TraceSet S = testing::lasso_space(ap, 1, 1);
  // ; {} / ; {a} / {a} ; {} / {} ; {a}
  CHECK(S.size() == 4);
  CHECK(testing::universes(S, 0, 2).size() == 1 + 4 + 6);
}

TEST_CASE("shifting") {
  Alphabet ap({"a"});
  LassoTrace t = parse_trace("{a} {} ; {a} {}", ap);
  LassoTrace s = shift(t, 3);
  for (std::size_t i = 0; i < 10; ++i) CHECK(s.at(i) == t.at(i + 3));
}

#include "doctest.h"
#include "h2ltl/reductions.hpp"
#include "support.hpp"

using namespace h2ltl;

namespace {
const Alphabet kA({"a"});

TraceSet singletons(std::size_t n, const Alphabet& ap) {
  TraceSet T(ap);
  for (std::size_t i = 0; i < n; ++i) T.insert(singleton_trace(i, ap));
  return T;
}
}  // namespace

TEST_CASE("closed-world translation keeps verdicts on empty ranges") {
  Formula f = parse_formula("(exists pi in D. a[pi]) | (forall pi in D. a[pi])", kA);
  TraceSet empty(kA);
  CHECK(eval_closed_world(empty, f));
  CHECK(eval_standard(empty, cw_to_standard(f, kA), empty));
  CHECK_FALSE(eval_closed_world(empty, normalize_prenex(f)));

  Formula g = parse_formula("forall X. exists pi in D. (forall q in X. F a[q]) -> pi |> X", kA);
  TraceSet T = parse_traceset("aps: a\n; {a}\n; {}\n");
  TraceSet amb = testing::with(T, {parse_trace("{} ; {a}", kA)});
  CHECK(eval_closed_world(T, g) == eval_standard(T, cw_to_standard(g, kA), amb));
  CHECK_THROWS(cw_to_standard(parse_formula("exists pi in ALL. a[pi]", kA), kA));
}

TEST_CASE("min/max desugaring") {
  Formula f = parse_formula(
      "exists (X, min, exists pi in X. a[pi]). forall (Y, max, forall q in Y. !a[q]). exists q in Y. exists r in X. F (a[r] & !a[q])",
      kA);
  Formula d = mm_desugar(f, kA);
  for (auto& T : testing::universes(testing::lasso_space(kA, 1, 1), 0, 3))
    CHECK(eval_mm(T, f, Semantics::ClosedWorld) == eval_closed_world(T, d));
  Formula xs = strict_subset("Xs", "X", kA);
  CHECK(free_set_vars(xs) == std::set<std::string>{"X", "Xs"});
}

TEST_CASE("min/max encoding shape") {
  Formula f = parse_formula("exists X. forall Y. forall pi in X. exists q in Y. a[pi] -> a[q]", kA);
  MinMaxEncoding enc = minmax_encode(f, kA, Polarity::Max);
  CHECK(enc.set_vars == std::vector<std::string>{"X", "Y"});
  CHECK(enc.ap.contains("m0"));
  CHECK(enc.ap.contains("m1"));
  CHECK(enc.ap.contains("plus"));
  CHECK(enc.phi->op == Op::ExistsMM);
  CHECK(enc.phi->a->op == Op::ForallMM);
  CHECK(check_sentence(enc.phi, false).ok());
  CHECK(check_sentence(enc.phi_ext, false).ok());
  Formula h = parse_formula("forall pi in D. a[pi]", kA);
  CHECK(minmax_encode(h, kA, Polarity::Min).phi == h);
  CHECK_THROWS(minmax_encode(parse_formula("exists (X, min, exists pi in X. a[pi]). exists q in X. a[q]", kA),
                             kA, Polarity::Min));
  CHECK_THROWS(minmax_encode(h, Alphabet({"a", "m0"}), Polarity::Min));
}

TEST_CASE("marked extensions decode back") {
  TraceSet T = parse_traceset("aps: a\n; {a}\n; {}\n{a} ; {}\n");
  TraceSet sample = enumerate_lassos(ts_allSets(), 4, 2);
  TraceSet ext = ext_traceset(T, 2, sample);
  CHECK(ext.size() == 3 * T.size());
  CHECK(project(ext, kA).size() == T.size());
  for (auto& S : testing::universes(T, 0, 3)) {
    TraceSet marked = mark_subset(S, T, 1, 2, sample);
    CHECK(enc_marked(marked, 1, kA) == S);
    CHECK(enc_marked(marked, 0, kA).empty());
    CHECK(marked.subset_of(ext));
  }
  TraceSet all = ext_traceset(T, 1, sample, ExtMode::AllPairs);
  CHECK(all.size() == 2 * T.size() * sample.size());
  CHECK_THROWS(ext_traceset(T, 1, TraceSet(allsets_alphabet())));
}

TEST_CASE("extended transition system") {
  TransitionSystem ts;
  ts.ap = kA;
  ts.add_vertex(kA.bit("a"), true);
  ts.add_vertex(0, false);
  ts.add_edge(0, 1);
  ts.add_edge(1, 1);
  for (std::size_t k = 1; k <= 3; ++k) CHECK(ext_transition_system(ts, k).num_vertices() == 2 * 8 * k * 2);
  CHECK_THROWS(ext_transition_system(ts, 0));
  TraceSet traces = enumerate_lassos(ext_transition_system(ts, 1), 4, 2);
  Alphabet ext = ext_alphabet(kA, 1);
  TraceSet unmarked(kA);
  for (auto& t : traces.members()) {
    bool all_marked = true, none = true;
    for (std::size_t i = 0; i < 8; ++i) {
      bool m = t.at(i) & ext.bit("m0");
      all_marked = all_marked && m;
      none = none && !m;
    }
    CHECK((all_marked || none));
    unmarked.insert(project(t, ext, kA));
  }
  CHECK(unmarked == enumerate_lassos(ts, 4, 2));
}

TEST_CASE("arithmetic translation orders") {
  Formula f = parse_formula("forall pi in D. exists X. exists q in X. G (a[pi] -> X a[q])", kA);
  ArithFormula core = ar_core(f, kA);
  CHECK(max_quantifier_order(core) == 3);
  ArithFormula full = ar_translate(f, kA);
  CHECK(full->op == AOp::Exists);
  CHECK(full->order == 3);
  CHECK(arith_equal(parse_arith(print_arith(full)), full));
  Formula h = parse_formula("forall pi in D. exists q in D. F (a[pi] & X a[q])", kA);
  CHECK(max_quantifier_order(ar_core(h, kA)) == 2);
  TransitionSystem ts;
  ts.ap = kA;
  ts.add_vertex(kA.bit("a"), true);
  ts.add_edge(0, 0);
  ArithFormula mc = mc_arith_encode(ts, h);
  CHECK(max_quantifier_order(mc) == 3);
  CHECK(print_arith(mc).find("YY_D") != std::string::npos);
  CHECK(fssat_arith_encode(h, kA)->order == 3);
  CHECK_THROWS(ar_core(parse_formula("exists (X, min, exists pi in X. a[pi]). exists q in X. a[q]", kA), kA));
}

TEST_CASE("lfp model checking stays second order") {
  Alphabet ab({"a", "b"});
  Formula ck = phi_ck(ab, {{"a"}, {"b"}}, parse_formula("F a[pi]", ab), "pi", true);
  TransitionSystem ts = ts_full(ab);
  ArithFormula enc = lfp_mc_arith_encode(ts, validate_lfp_shape(ck, ab));
  CHECK(max_quantifier_order(enc) == 2);
  check_orders(enc);
}

TEST_CASE("hyp clauses") {
  HypOptions opt;
  opt.marker_of["YY"] = "m1";
  CHECK(print_formula(hyp_translate(parse_arith("y < y'"), opt)) == "F (x[pi_y] & X F x[pi_y_p])");
  CHECK(print_formula(hyp_translate(parse_arith("Y in YY"), opt)) == "m1[pi_Y]");
  CHECK(print_formula(hyp_translate(parse_arith("y in Y"), opt)) == "F (x[pi_y] & x[pi_Y])");
  CHECK_THROWS(hyp_translate(parse_arith("Y in ZZ"), opt));
  CHECK_THROWS(hyp_translate(parse_arith("exists3 ZZ. Y in ZZ"), opt));
}

TEST_CASE("hyp agrees with arithmetic on small numbers") {
  std::vector<std::string> props = {"x"};
  for (auto& p : kArithProps) props.push_back(p);
  Alphabet ap(props);
  TraceSet D = singletons(4, ap);
  D.insert(parse_trace("; {}", ap));
  Assignment free;
  free.sets["Xarith"] = plus_times(8, ap);
  HypOptions opt;
  auto holds = [&](const char* text) { return evaluate(D, hyp_translate(parse_arith(text), opt), {}, free); };
  CHECK(holds("exists1 y. y + y = 2"));
  CHECK_FALSE(holds("exists1 y. y + y = 3"));
  CHECK(holds("exists1 y. y * y = y & 0 < y"));
  CHECK(holds("forall1 y. y < 3 -> exists1 z. y < z"));
}

TEST_CASE("arithmetic fixpoint generates the add and mult traces") {
  Alphabet ap = arith_alphabet();
  TraceSet D = plus_times(4);
  FixpointSpec fp = arith_fixpoint("Xarith", "pi_add", "pi_mult", {});
  LfpSentence s;
  s.ap = ap;
  s.blocks = {{{true, "pi_add", kDom}, {true, "pi_mult", kDom}}, {}};
  s.fixpoints = {fp};
  s.matrix = parse_formula("add[pi_add]", ap);
  LfpSentence back = validate_lfp_shape(recompose(s), ap);
  CHECK(back.k() == 1);
  LfpContext ctx{&s, {}};
  ctx.pi.sets[kDom] = D;
  ctx.pi.traces["pi_add"] = parse_trace("{add,arg1,arg2,res} ; {add}", ap);
  ctx.pi.traces["pi_mult"] = parse_trace("{arg1,arg2,mult,res} ; {mult}", ap);
  Assignment seeds = ctx.pi;
  CHECK(eval_body(seeds, psi_s("pi_add", "pi_mult", {}), ap));
  CHECK(D.size() == 22);
  CHECK(compute_lfp(ctx, 1).result == D);
}

TEST_CASE("sigma12 encoding") {
  Sigma12Encoding enc = sigma12_encode(parse_arith("exists2 Y. x in Y & exists1 y. y < x & !(y in Y)"), 2);
  CHECK(enc.third_order.empty());
  CHECK(check_sentence(enc.phi, true).ok());
  Sigma12Encoding enc2 = sigma12_encode(parse_arith("exists2 Y. Y in ZZ & x in Y"), 1);
  CHECK(enc2.third_order == std::vector<std::string>{"ZZ"});
  CHECK(enc2.ap.contains("m1"));
  CHECK(print_formula(enc2.phi).find("m1[pi_Y]") != std::string::npos);
  CHECK_THROWS(sigma12_encode(parse_arith("exists3 ZZ. exists2 Y. Y in ZZ"), 0));
}

TEST_CASE("single initial vertex") {
  TransitionSystem ts;
  ts.ap = kA;
  ts.add_vertex(kA.bit("a"), true);
  ts.add_vertex(0, true);
  ts.add_edge(0, 1);
  ts.add_edge(1, 0);
  TransitionSystem one = ts_single_initial(ts);
  CHECK(one.num_vertices() == 3);
  CHECK(one.num_initial() == 1);
  Formula f = parse_formula("forall pi in D. exists q in D. G (a[pi] <-> !a[q])", kA);
  Formula g = phi_single_initial(f);
  CHECK(eval_closed_world(enumerate_lassos(ts, 4, 2), f) ==
        eval_closed_world(enumerate_lassos(one, 5, 2), g));
  CHECK_THROWS(phi_single_initial(next(parse_formula("exists pi in D. a[pi]", kA))));
}

TEST_CASE("satisfiability to model checking") {
  Formula f = parse_formula("forall pi in ALL. exists q in D. G (a[pi] <-> a[q])", kA);
  Formula r = rel_rewrite(f, kA, "Yp");
  CHECK(free_set_vars(r).count(kAll) == 0);
  FssatToMc enc = fssat_to_mc(parse_formula("exists pi in D. G a[pi]", kA), kA);
  CHECK(enc.ap.size() == 8);
  CHECK(enc.ts.num_vertices() == 256);
  CHECK(check_sentence(enc.phi, false).ok());
  CHECK_THROWS(fssat_to_mc(f, Alphabet({"x"})));
}

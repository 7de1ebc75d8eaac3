#include "h2ltl/reductions.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "h2ltl/library.hpp"

namespace h2ltl {

namespace {

Formula remake(const Formula& f, Formula a, Formula b, Formula guard) {
  if (a == f->a && b == f->b && guard == f->guard) return f;
  Node n = *f;
  n.a = std::move(a);
  n.b = std::move(b);
  n.guard = std::move(guard);
  return std::make_shared<const Node>(std::move(n));
}

Formula A(const std::string& p, const std::string& v) { return atom(p, v); }
Formula nA(const std::string& p, const std::string& v) { return lnot(atom(p, v)); }

Formula exactly_once(const std::string& p, const std::string& v) {
  return until(nA(p, v), land(A(p, v), next(globally(nA(p, v)))));
}

// conjunction that may be empty; nullptr stands for true
Formula conj_opt(const std::vector<Formula>& fs) { return fs.empty() ? nullptr : conj(fs); }
Formula and_opt(Formula a, Formula b) {
  if (!a) return b;
  if (!b) return a;
  return land(a, b);
}

LassoTrace lift(const LassoTrace& t, const Alphabet& from, const Alphabet& to) {
  std::vector<Letter> s, l;
  for (auto x : t.stem) s.push_back(from.translate(x, to));
  for (auto x : t.loop) l.push_back(from.translate(x, to));
  return canonicalize(std::move(s), std::move(l));
}

class Names {
 public:
  explicit Names(std::set<std::string> used) : used_(std::move(used)) {
    used_.insert(kDom);
    used_.insert(kAll);
  }
  std::string operator()(const std::string& base) {
    std::string n = base;
    if (used_.count(n)) n = fresh_name(base, used_);
    used_.insert(n);
    return n;
  }

 private:
  std::set<std::string> used_;
};

}  // namespace

// ---------------------------------------------------------------- cw / mm

Formula cw_to_standard(const Formula& phi, const Alphabet& ap, bool prenex) {
  Names fresh(all_names(phi));
  std::function<Formula(const Formula&)> go = [&](const Formula& f) -> Formula {
    if (!f) return f;
    if (is_trace_quantifier(f->op) && f->range == kAll)
      throw Error("cw_to_standard: input uses ALL");
    if (f->op == Op::ExistsMM || f->op == Op::ForallMM)
      throw Error("cw_to_standard: min/max quantifiers are not supported; desugar them first");
    if (f->op == Op::ExistsSet || f->op == Op::ForallSet) {
      std::string pi = fresh("pi_c"), w = fresh("pi_w");
      Formula sub = forall_trace(pi, f->var, in_set(pi, kDom, ap.props(), w));
      Formula body = go(f->a);
      return f->op == Op::ExistsSet ? exists_set(f->var, land(sub, body))
                                    : forall_set(f->var, implies(sub, body));
    }
    return remake(f, go(f->a), go(f->b), go(f->guard));
  };
  Formula out = go(phi);
  return prenex ? normalize_prenex(out) : out;
}

Formula strict_subset(const std::string& Xs, const std::string& X, const Alphabet& ap) {
  std::set<std::string> used = {Xs, X};
  std::string p = fresh_name("pi_s", used), q = fresh_name("pi_t", used);
  return land(forall_trace(p, Xs, in_set(p, X, ap.props(), q)),
              exists_trace(p, X, lnot(in_set(p, Xs, ap.props(), q))));
}

Formula mm_desugar(const Formula& phi, const Alphabet& ap, bool prenex) {
  Names fresh(all_names(phi));
  std::function<Formula(const Formula&)> go = [&](const Formula& f) -> Formula {
    if (!f) return f;
    if (f->op == Op::ExistsMM || f->op == Op::ForallMM) {
      Formula g = go(f->guard);
      std::string Xs = fresh(f->var + "_o");
      Formula other = f->pol == Polarity::Min ? strict_subset(Xs, f->var, ap)
                                              : strict_subset(f->var, Xs, ap);
      Formula optimal = forall_set(Xs, implies(other, lnot(rename_free_set(g, f->var, Xs))));
      Formula body = go(f->a);
      if (f->op == Op::ExistsMM) return exists_set(f->var, land(land(g, optimal), body));
      return forall_set(f->var, implies(land(g, optimal), body));
    }
    return remake(f, go(f->a), go(f->b), go(f->guard));
  };
  Formula out = go(phi);
  return prenex ? normalize_prenex(out) : out;
}

// ---------------------------------------------------------------- min/max encoding

std::string marker_name(std::size_t i) { return "m" + std::to_string(i); }

Alphabet ext_alphabet(const Alphabet& ap, std::size_t k) {
  std::vector<std::string> ps = ap.props();
  for (std::size_t i = 0; i < k; ++i) ps.push_back(marker_name(i));
  for (auto& p : kAllSetsProps) ps.push_back(p);
  Alphabet out(ps);
  if (out.size() != ps.size()) throw Error("alphabet collision with markers or allSets propositions");
  return out;
}

Formula phi_part(std::size_t i, std::size_t k, const std::string& X, const Alphabet& ap,
                 const Alphabet& ext_ap) {
  (void)ap;
  std::string m = marker_name(i);
  std::vector<Formula> others;
  for (std::size_t j = 0; j < k; ++j)
    if (j != i) others.push_back(globally(nA(marker_name(j), "pi")));
  Formula marked = lor(globally(A(m, "pi")), globally(nA(m, "pi")));
  Formula each = forall_trace("pi", X, and_opt(marked, conj_opt(others)));
  Formula unique = forall_trace(
      "pi", X,
      forall_trace("pi1", X,
                   implies(trace_equal("pi", "pi1", kAllSetsProps),
                           trace_equal("pi", "pi1", ext_ap.props()))));
  return land(each, unique);
}

Formula mark_trace_quantifiers(const Formula& phi,
                               const std::map<std::string, std::string>& marker_of) {
  std::function<Formula(const Formula&)> go = [&](const Formula& f) -> Formula {
    if (!f) return f;
    if (is_trace_quantifier(f->op)) {
      auto it = marker_of.find(f->range);
      Formula body = go(f->a);
      if (it == marker_of.end()) return remake(f, body, nullptr, nullptr);
      Formula m = A(it->second, f->var);
      return f->op == Op::ExistsTrace ? exists_trace(f->var, f->range, land(m, body))
                                      : forall_trace(f->var, f->range, implies(m, body));
    }
    if (is_set_quantifier(f->op) && marker_of.count(f->var)) {
      // an inner rebinding of the same name is not marked
      auto inner = marker_of;
      inner.erase(f->var);
      return remake(f, mark_trace_quantifiers(f->a, inner), nullptr,
                    f->guard ? mark_trace_quantifiers(f->guard, inner) : nullptr);
    }
    return remake(f, go(f->a), go(f->b), go(f->guard));
  };
  return go(phi);
}

MinMaxEncoding minmax_encode(const Formula& phi, const Alphabet& ap, Polarity pol) {
  Formula f = alpha_rename(phi);
  std::vector<std::string> sets;
  std::function<void(const Formula&)> collect = [&](const Formula& g) {
    if (!g) return;
    if (g->op == Op::ExistsMM || g->op == Op::ForallMM)
      throw Error("minmax_encode: input already has min/max quantifiers");
    if (is_trace_quantifier(g->op) && g->range == kAll)
      throw Error("minmax_encode: input uses ALL");
    if (g->op == Op::ExistsSet || g->op == Op::ForallSet) sets.push_back(g->var);
    collect(g->a);
    collect(g->b);
  };
  collect(f);
  std::size_t k = sets.size();
  MinMaxEncoding out;
  out.set_vars = sets;
  out.ap = ext_alphabet(ap, k);
  for (auto& p : ap.props())
    if (p.size() > 1 && p[0] == 'm' &&
        std::all_of(p.begin() + 1, p.end(), [](char c) { return std::isdigit(c); }))
      throw Error("alphabet collision: '" + p + "' looks like a marker");

  std::map<std::string, std::string> marker_of;
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < k; ++i) {
    marker_of[sets[i]] = marker_name(i);
    index_of[sets[i]] = i;
  }
  if (k == 0) {
    out.phi = phi;
  } else {
    std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
      if (!g) return g;
      if (g->op == Op::ExistsSet || g->op == Op::ForallSet) {
        std::size_t i = index_of.at(g->var);
        Formula guard = land(phi_allSets_mm(pol, g->var, out.ap.props()),
                             phi_part(i, k, g->var, ap, out.ap));
        Formula body = go(g->a);
        return g->op == Op::ExistsSet ? exists_mm(g->var, pol, guard, body)
                                      : forall_mm(g->var, pol, guard, body);
      }
      return remake(g, go(g->a), go(g->b), go(g->guard));
    };
    out.phi = mark_trace_quantifiers(go(f), marker_of);
  }

  // phi_ext
  std::string p = ap.empty() ? std::string("plus") : ap.props()[0];
  Formula empty = forall_trace("pi", kDom, land(A(p, "pi"), nA(p, "pi")));
  Formula all_traces = phi_allSets_mm(pol, kDom, out.ap.props());
  auto copy = [&](std::vector<Formula> marks) {
    std::vector<Formula> cs = {trace_equal("pi", "pi2", kAllSetsProps)};
    if (!ap.empty()) cs.push_back(trace_equal("pi1", "pi2", ap.props()));
    for (auto& m : marks) cs.push_back(m);
    return exists_trace("pi2", kDom, conj(cs));
  };
  std::vector<Formula> per_marker;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<Formula> marks = {globally(A(marker_name(i), "pi2"))};
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) marks.push_back(globally(nA(marker_name(j), "pi2")));
    per_marker.push_back(copy(marks));
  }
  std::vector<Formula> unmarked;
  for (std::size_t i = 0; i < k; ++i) unmarked.push_back(globally(nA(marker_name(i), "pi2")));
  Formula pairs = and_opt(conj_opt(per_marker), copy(unmarked));
  out.phi_ext =
      lor(empty, land(all_traces, forall_trace("pi", kDom, forall_trace("pi1", kDom, pairs))));
  return out;
}

TraceSet ext_traceset(const TraceSet& T, std::size_t k, const TraceSet& sample, ExtMode mode) {
  const Alphabet& ap = T.alphabet();
  Alphabet ext = ext_alphabet(ap, k);
  Alphabet as = allsets_alphabet();
  if (!(sample.alphabet() == as)) throw Error("ext_traceset: sample must be over the allSets propositions");
  if (mode == ExtMode::Injective && sample.size() < T.size())
    throw Error("ext_traceset: sample too small for an injection");
  TraceSet out(ext);
  auto add = [&](const LassoTrace& t, const LassoTrace& u) {
    LassoTrace base = pointwise_union(t, ap, u, as);
    Alphabet both = ap.unite(as);
    LassoTrace plain = lift(base, both, ext);
    out.insert(plain);
    for (std::size_t i = 0; i < k; ++i) {
      Letter m = ext.bit(marker_name(i));
      std::vector<Letter> s = plain.stem, l = plain.loop;
      for (auto& x : s) x |= m;
      for (auto& x : l) x |= m;
      out.insert(canonicalize(std::move(s), std::move(l)));
    }
  };
  for (std::size_t j = 0; j < T.size(); ++j) {
    if (mode == ExtMode::Injective) {
      add(T.members()[j], sample.members()[j]);
    } else {
      for (auto& u : sample.members()) add(T.members()[j], u);
    }
  }
  return out;
}

TraceSet mark_subset(const TraceSet& S, const TraceSet& T, std::size_t i, std::size_t k,
                     const TraceSet& sample) {
  if (!S.subset_of(T)) throw Error("mark_subset: S is not a subset of T");
  if (i >= k) throw Error("mark_subset: marker index out of range");
  const Alphabet& ap = T.alphabet();
  Alphabet ext = ext_alphabet(ap, k);
  Alphabet as = allsets_alphabet();
  if (sample.size() < T.size()) throw Error("mark_subset: sample too small for an injection");
  TraceSet out(ext);
  Letter m = ext.bit(marker_name(i));
  for (std::size_t j = 0; j < T.size(); ++j) {
    const LassoTrace& t = T.members()[j];
    LassoTrace plain = lift(pointwise_union(t, ap, sample.members()[j], as), ap.unite(as), ext);
    if (S.contains(t)) {
      for (auto& x : plain.stem) x |= m;
      for (auto& x : plain.loop) x |= m;
      plain = canonicalize(plain.stem, plain.loop);
    }
    out.insert(plain);
  }
  return out;
}

TraceSet enc_marked(const TraceSet& Tp, std::size_t i, const Alphabet& ap) {
  const Alphabet& from = Tp.alphabet();
  std::string m = marker_name(i);
  if (!from.contains(m)) throw Error("enc_marked: no marker " + m);
  Letter bit = from.bit(m);
  TraceSet out(ap);
  for (auto& t : Tp.members()) {
    bool all = std::all_of(t.stem.begin(), t.stem.end(), [&](Letter l) { return l & bit; }) &&
               std::all_of(t.loop.begin(), t.loop.end(), [&](Letter l) { return l & bit; });
    if (all) out.insert(project(t, from, ap));
  }
  return out;
}

TransitionSystem ext_transition_system(const TransitionSystem& ts, std::size_t k) {
  if (k == 0) throw Error("ext_transition_system: k must be positive");
  Alphabet ext = ext_alphabet(ts.ap, k);
  TransitionSystem as = ts_allSets();
  std::size_t nv = ts.num_vertices(), na = as.num_vertices();
  auto id = [&](std::size_t v, std::size_t a, std::size_t i, std::size_t b) {
    return static_cast<int>(((v * na + a) * k + i) * 2 + b);
  };
  TransitionSystem out;
  out.ap = ext;
  for (std::size_t v = 0; v < nv; ++v)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t b = 0; b < 2; ++b) {
          Letter l = ts.ap.translate(ts.label[v], ext) | as.ap.translate(as.label[a], ext);
          if (b) l |= ext.bit(marker_name(i));
          out.add_vertex(l, ts.initial[v] && as.initial[a]);
        }
  for (std::size_t v = 0; v < nv; ++v)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t b = 0; b < 2; ++b)
          for (int w : ts.succ[v])
            for (int c : as.succ[a]) out.add_edge(id(v, a, i, b), id(w, c, i, b));
  return out;
}

// ---------------------------------------------------------------- arithmetic

std::string ar_trace_name(const std::string& pi) { return "Y_" + pi; }
std::string ar_set_name(const std::string& X) { return "YY_" + X; }

namespace {

using AtomFn = std::function<ArithFormula(const std::string& var, const std::string& prop, TermP pos)>;
using QuantFn = std::function<ArithFormula(const Formula& f, TermP pos)>;

// Boolean and temporal clauses of ar over a desugared formula.
class PositionTranslator {
 public:
  PositionTranslator(FreshNames& fresh, AtomFn atom, QuantFn quant)
      : fresh_(fresh), atom_(std::move(atom)), quant_(std::move(quant)) {}

  ArithFormula operator()(const Formula& f, TermP pos) {
    switch (f->op) {
      case Op::Atom:
        return atom_(f->var, f->name, pos);
      case Op::Not:
        return a_not((*this)(f->a, pos));
      case Op::Or:
        return a_or((*this)(f->a, pos), (*this)(f->b, pos));
      case Op::And:
        return a_and((*this)(f->a, pos), (*this)(f->b, pos));
      case Op::Next: {
        std::string i1 = fresh_("i");
        return a_exists(1, i1, a_and(a_add(pos, tnum(1), tvar(i1)), (*this)(f->a, tvar(i1))));
      }
      case Op::Until: {
        std::string i2 = fresh_("i"), i1 = fresh_("i");
        ArithFormula before =
            a_forall(1, i1,
                     a_implies(a_and(a_ge(tvar(i1), pos), a_less(tvar(i1), tvar(i2))),
                               (*this)(f->a, tvar(i1))));
        return a_exists(1, i2,
                        a_conj({a_ge(tvar(i2), pos), (*this)(f->b, tvar(i2)), before}));
      }
      default:
        if (is_quantifier(f->op)) {
          if (!quant_) throw Error("unexpected quantifier");
          return quant_(f, pos);
        }
        throw Error("connective left after desugaring");
    }
  }

 private:
  FreshNames& fresh_;
  AtomFn atom_;
  QuantFn quant_;
};

FreshNames fresh_for(const Formula& phi) {
  FreshNames fresh;
  for (auto& n : all_names(phi)) {
    fresh.reserve(n);
    fresh.reserve(ar_trace_name(n));
    fresh.reserve(ar_set_name(n));
  }
  fresh.reserve(kYYa);
  fresh.reserve(kYYd);
  return fresh;
}

ArithFormula ar_core_impl(const Formula& phi, const Alphabet& ap, FreshNames& fresh) {
  PropCode e(ap);
  std::map<std::string, std::vector<std::string>> traces, sets;
  sets[kDom].push_back(kYYd);
  sets[kAll].push_back(kYYa);
  auto top = [](std::map<std::string, std::vector<std::string>>& m, const std::string& v,
                const char* what) -> const std::string& {
    auto it = m.find(v);
    if (it == m.end() || it->second.empty())
      throw Error(std::string("ar: unbound ") + what + " '" + v + "'");
    return it->second.back();
  };
  PositionTranslator* self = nullptr;
  AtomFn atom_fn = [&](const std::string& v, const std::string& p, TermP pos) {
    return a_in(tpair(pos, tnum(e.code(p))), top(traces, v, "trace variable"));
  };
  QuantFn quant_fn = [&](const Formula& f, TermP pos) -> ArithFormula {
    switch (f->op) {
      case Op::ExistsTrace:
      case Op::ForallTrace: {
        const std::string& YY = top(sets, f->range, "set variable");
        std::string Y = fresh(ar_trace_name(f->var));
        traces[f->var].push_back(Y);
        ArithFormula body = (*self)(f->a, pos);
        traces[f->var].pop_back();
        return f->op == Op::ExistsTrace ? a_exists(2, Y, a_and(a_in3(Y, YY), body))
                                        : a_forall(2, Y, a_implies(a_in3(Y, YY), body));
      }
      case Op::ExistsSet:
      case Op::ForallSet: {
        std::string YY = fresh(ar_set_name(f->var));
        ArithFormula only = ar_only_traces(YY, ap.size(), fresh);
        sets[f->var].push_back(YY);
        ArithFormula body = (*self)(f->a, pos);
        sets[f->var].pop_back();
        return f->op == Op::ExistsSet ? a_exists(3, YY, a_and(only, body))
                                      : a_forall(3, YY, a_implies(only, body));
      }
      default:
        throw Error("ar: min/max quantifiers have no arithmetic translation here");
    }
  };
  PositionTranslator tr(fresh, atom_fn, quant_fn);
  self = &tr;
  return tr(desugar(phi), tnum(0));
}

ArithFormula with_model_sets(const ArithFormula& core, std::size_t nap, FreshNames& fresh,
                             ArithFormula extra = nullptr) {
  ArithFormula all = ar_all_traces(kYYa, nap, fresh);
  ArithFormula only = ar_only_traces(kYYd, nap, fresh);
  std::vector<ArithFormula> cs = {all, only, core};
  if (extra) cs.push_back(extra);
  return a_exists(3, kYYa, a_exists(3, kYYd, a_conj(cs)));
}

// (forall T in YY_D. exists P. isPath & traceOf) & (forall P. isPath -> exists T in YY_D. traceOf)
ArithFormula paths_are_model(const std::string& n, const std::string& E, const std::string& I,
                             const std::string& L, FreshNames& fresh) {
  std::string T1 = fresh("T"), P1 = fresh("P"), T2 = fresh("T"), P2 = fresh("P");
  ArithFormula fwd = a_forall(
      2, T1,
      a_implies(a_in3(T1, kYYd),
                a_exists(2, P1,
                         a_and(ar_is_path(P1, n, E, I, fresh),
                               ar_trace_of(member_of(T1), P1, L, fresh)))));
  ArithFormula bwd = a_forall(
      2, P2,
      a_implies(ar_is_path(P2, n, E, I, fresh),
                a_exists(2, T2, a_and(a_in3(T2, kYYd), ar_trace_of(member_of(T2), P2, L, fresh)))));
  return a_and(fwd, bwd);
}

}  // namespace

ArithFormula ar_core(const Formula& phi, const Alphabet& ap) {
  FreshNames fresh = fresh_for(phi);
  return ar_core_impl(phi, ap, fresh);
}

ArithFormula ar_translate(const Formula& phi, const Alphabet& ap) {
  FreshNames fresh = fresh_for(phi);
  ArithFormula core = ar_core_impl(phi, ap, fresh);
  return with_model_sets(core, ap.size(), fresh);
}

ArithFormula fssat_arith_encode(const Formula& phi, const Alphabet& ap) {
  FreshNames fresh = fresh_for(phi);
  ArithFormula core = ar_core_impl(phi, ap, fresh);
  std::string n = fresh("n"), E = fresh("E"), I = fresh("I"), L = fresh("L");
  ArithFormula ts = a_and(ar_is_ts(n, E, I, L, ap.size(), fresh),
                          paths_are_model(n, E, I, L, fresh));
  ArithFormula sys = a_exists(1, n, a_exists(2, E, a_exists(2, I, a_exists(2, L, ts))));
  return with_model_sets(core, ap.size(), fresh, sys);
}

ArithFormula mc_arith_encode(const TransitionSystem& ts, const Formula& phi) {
  ts.validate();
  FreshNames fresh = fresh_for(phi);
  ArithFormula core = ar_core_impl(phi, ts.ap, fresh);
  PropCode e(ts.ap);
  std::string n = fresh("n"), E = fresh("E"), I = fresh("I"), L = fresh("L");
  std::string y = fresh("y"), v = fresh("v"), yl = fresh("y");
  std::vector<ArithFormula> edges, inits, labels;
  for (std::size_t a = 0; a < ts.num_vertices(); ++a) {
    for (int b : ts.succ[a]) edges.push_back(a_eq(tvar(y), tpair(tnum(a), tnum(b))));
    if (ts.initial[a]) inits.push_back(a_eq(tvar(v), tnum(a)));
    for (auto& p : ts.ap.props())
      if (ts.label[a] & ts.ap.bit(p))
        labels.push_back(a_eq(tvar(yl), tpair(tnum(a), tnum(e.code(p)))));
  }
  ArithFormula pin = a_conj({
      a_eq(tvar(n), tnum(ts.num_vertices())),
      a_forall(1, y, a_iff(a_in(tvar(y), E), a_disj(edges))),
      a_forall(1, v, a_iff(a_in(tvar(v), I), a_disj(inits))),
      a_forall(1, yl, a_iff(a_in(tvar(yl), L), a_disj(labels))),
  });
  ArithFormula sys = a_exists(
      1, n,
      a_exists(2, E, a_exists(2, I, a_exists(2, L, a_and(pin, paths_are_model(n, E, I, L, fresh))))));
  return with_model_sets(core, ts.ap.size(), fresh, sys);
}

// ---------------------------------------------------------------- lfp model checking

namespace {

class LfpArith {
 public:
  LfpArith(const TransitionSystem& ts, const LfpSentence& phi)
      : ts_(ts), phi_(phi), e_(ts.ap), nap_(ts.ap.size()) {
    for (auto& b : phi.blocks)
      for (auto& q : b) {
        fresh_.reserve(q.var);
        if (!slot_.count(q.var)) {
          Nat s = slot_.size();
          slot_[q.var] = s;
        }
      }
    for (auto& fp : phi.fixpoints) fresh_.reserve(fp.Y);
  }

  ArithFormula build() {
    std::string A0 = fresh_("A");
    std::string w = fresh_("w");
    ArithFormula empty = a_forall(1, w, a_not(a_in(tvar(w), A0)));
    return a_exists(2, A0, a_and(empty, blocks(0, 0, A0)));
  }

 private:
  const TransitionSystem& ts_;
  const LfpSentence& phi_;
  PropCode e_;
  std::size_t nap_;
  FreshNames fresh_;
  std::map<std::string, Nat> slot_;
  std::map<std::string, std::string> zname_;

  Nat k() const { return phi_.k(); }
  Nat tag_all() const { return k() + 1; }
  Nat tag_dom() const { return k() + 2; }

  ArithFormula blocks(std::size_t b, std::size_t q, const std::string& A) {
    if (b == phi_.blocks.size()) return matrix(A);
    if (q == phi_.blocks[b].size()) return blocks(b + 1, 0, A);  // fixpoint b+1 is erased
    const TraceQuant& tq = phi_.blocks[b][q];
    std::string Z = fresh_("Z_" + tq.var), A2 = fresh_("A");
    ArithFormula range = range_formula(tq.range, A, Z);
    ArithFormula upd = ar_update(A, A2, Z, slot_.at(tq.var), fresh_);
    auto saved = zname_.find(tq.var) == zname_.end() ? std::optional<std::string>()
                                                      : std::optional(zname_[tq.var]);
    zname_[tq.var] = Z;
    ArithFormula rest = blocks(b, q + 1, A2);
    if (saved)
      zname_[tq.var] = *saved;
    else
      zname_.erase(tq.var);
    ArithFormula head = a_and(range, upd);
    ArithFormula body = tq.existential ? a_and(head, rest) : a_implies(head, rest);
    return tq.existential ? a_exists(2, Z, a_exists(2, A2, body))
                          : a_forall(2, Z, a_forall(2, A2, body));
  }

  ArithFormula range_formula(const std::string& R, const std::string& A, const std::string& Z) {
    if (R == kDom) return ar_in_ts(member_of(Z), ts_, e_, fresh_);
    if (R == kAll) return ar_is_trace(member_of(Z), nap_, fresh_);
    int j = phi_.fixpoint_index(R);
    if (j == 0) throw ShapeError("unknown range '" + R + "'");
    return has_tree(A, Z, static_cast<Nat>(j));
  }

  ArithFormula matrix(const std::string& A) {
    (void)A;
    AtomFn atom = [&](const std::string& v, const std::string& p, TermP pos) {
      auto it = zname_.find(v);
      if (it == zname_.end()) throw ShapeError("free trace variable '" + v + "' in the matrix");
      return a_in(tpair(pos, tnum(e_.code(p))), it->second);
    };
    PositionTranslator tr(fresh_, atom, nullptr);
    return tr(desugar(phi_.matrix), tnum(0));
  }

  // ---- witness trees ----
  struct Tree {
    std::string C, L, G, s;
  };

  ArithFormula in_L(const Tree& t, TermP v, TermP m) { return a_in(tpair(v, m), t.L); }
  ArithFormula has_tag(const Tree& t, TermP v, Nat tag) { return a_in(tpair(v, tnum(tag)), t.G); }
  ArithFormula child(const Tree& t, TermP v, TermP i, TermP c) {
    return a_in(tpair(tpair(v, i), c), t.C);
  }
  ArithFormula leaf(const Tree& t, TermP v) {
    std::string i = fresh_("i"), c = fresh_("c");
    return a_forall(1, i, a_forall(1, c, a_not(child(t, v, tvar(i), tvar(c)))));
  }
  Member slice(const Tree& t, TermP v) {
    return [this, t, v](TermP m) { return in_L(t, v, std::move(m)); };
  }
  ArithFormula slice_is(const Tree& t, TermP v, const Member& other) {
    std::string m = fresh_("m");
    return a_forall(1, m, a_iff(in_L(t, v, tvar(m)), other(tvar(m))));
  }
  Member slot_of(const std::string& A, Nat slot) {
    return [A, slot](TermP m) { return a_in(tpair(tnum(slot), std::move(m)), A); };
  }

  Nat range_tag(const std::string& R) {
    if (R == kDom) return tag_dom();
    if (R == kAll) return tag_all();
    int j = phi_.fixpoint_index(R);
    if (j == 0) throw ShapeError("unknown step range '" + R + "'");
    return static_cast<Nat>(j);
  }

  ArithFormula step_case(const Tree& t, TermP v, const FixpointSpec& fp, const std::string& A) {
    std::size_t n = fp.steps.size();
    std::vector<std::string> cs;
    for (std::size_t i = 0; i < n; ++i) cs.push_back(fresh_("c"));
    std::map<std::string, std::string> child_of;
    for (std::size_t i = 0; i < n; ++i) child_of[fp.steps[i].var] = cs[i];
    std::vector<ArithFormula> parts;
    for (std::size_t i = 0; i < n; ++i) {
      parts.push_back(child(t, v, tnum(i), tvar(cs[i])));
      parts.push_back(has_tag(t, tvar(cs[i]), range_tag(fp.steps[i].range)));
    }
    std::string i0 = fresh_("i"), c0 = fresh_("c");
    std::vector<ArithFormula> idx;
    for (std::size_t i = 0; i < n; ++i) idx.push_back(a_eq(tvar(i0), tnum(i)));
    parts.push_back(a_forall(
        1, i0, a_forall(1, c0, a_implies(child(t, v, tvar(i0), tvar(c0)), a_disj(idx)))));
    parts.push_back(slice_is(t, v, slice(t, tvar(cs[fp.m - 1]))));
    AtomFn atom = [&](const std::string& var, const std::string& p, TermP pos) {
      TermP code = tpair(pos, tnum(e_.code(p)));
      auto it = child_of.find(var);
      if (it != child_of.end()) return in_L(t, tvar(it->second), code);
      auto s = slot_.find(var);
      if (s == slot_.end()) throw ShapeError("step body mentions unknown trace variable '" + var + "'");
      return a_in(tpair(tnum(s->second), code), A);
    };
    PositionTranslator tr(fresh_, atom, nullptr);
    parts.push_back(tr(desugar(fp.step_body), tnum(0)));
    ArithFormula body = a_conj(parts);
    for (auto it = cs.rbegin(); it != cs.rend(); ++it) body = a_exists(1, *it, body);
    return body;
  }

  ArithFormula vertex(const Tree& t, TermP v, const std::string& A) {
    std::vector<ArithFormula> cs;
    // exactly one tag
    std::vector<ArithFormula> some;
    for (Nat tag = 1; tag <= tag_dom(); ++tag) some.push_back(has_tag(t, v, tag));
    std::string g1 = fresh_("g"), g2 = fresh_("g");
    cs.push_back(a_disj(some));
    cs.push_back(a_forall(
        1, g1,
        a_forall(1, g2,
                 a_implies(a_and(a_in(tpair(v, tvar(g1)), t.G), a_in(tpair(v, tvar(g2)), t.G)),
                           a_eq(tvar(g1), tvar(g2))))));
    cs.push_back(ar_is_trace(slice(t, v), nap_, fresh_));
    std::string i = fresh_("i"), c = fresh_("c"), c2 = fresh_("c");
    cs.push_back(a_forall(
        1, i,
        a_forall(1, c,
                 a_implies(child(t, v, tvar(i), tvar(c)),
                           a_and(a_less(v, tvar(c)), a_less(tvar(c), tvar(t.s)))))));
    cs.push_back(a_forall(
        1, i,
        a_forall(1, c,
                 a_forall(1, c2,
                          a_implies(a_and(child(t, v, tvar(i), tvar(c)),
                                          child(t, v, tvar(i), tvar(c2))),
                                    a_eq(tvar(c), tvar(c2)))))));
    cs.push_back(a_implies(has_tag(t, v, tag_all()), leaf(t, v)));
    cs.push_back(a_implies(has_tag(t, v, tag_dom()),
                           a_and(leaf(t, v), ar_in_ts(slice(t, v), ts_, e_, fresh_))));
    for (Nat j = 1; j <= k(); ++j) {
      const FixpointSpec& fp = phi_.fixpoints[j - 1];
      std::vector<ArithFormula> seeds;
      for (auto& sd : fp.seeds) {
        auto s = slot_.find(sd);
        if (s == slot_.end()) throw ShapeError("unknown seed '" + sd + "'");
        seeds.push_back(slice_is(t, v, slot_of(A, s->second)));
      }
      ArithFormula from_seed = a_and(leaf(t, v), a_disj(seeds));
      cs.push_back(a_implies(has_tag(t, v, j), a_or(from_seed, step_case(t, v, fp, A))));
    }
    return a_conj(cs);
  }

  ArithFormula has_tree(const std::string& A, const std::string& Z, Nat j) {
    Tree t{fresh_("C"), fresh_("Lt"), fresh_("G"), fresh_("s")};
    std::string v = fresh_("v");
    ArithFormula root = a_conj({a_less(tnum(0), tvar(t.s)), has_tag(t, tnum(0), j),
                                slice_is(t, tnum(0), member_of(Z))});
    ArithFormula all = a_forall(1, v, a_implies(a_less(tvar(v), tvar(t.s)), vertex(t, tvar(v), A)));
    ArithFormula body = a_and(root, all);
    return a_exists(2, t.C, a_exists(2, t.L, a_exists(2, t.G, a_exists(1, t.s, body))));
  }
};

}  // namespace

ArithFormula lfp_mc_arith_encode(const TransitionSystem& ts, const LfpSentence& phi) {
  ts.validate();
  if (!(phi.ap == ts.ap)) throw ShapeError("sentence and system use different alphabets");
  return LfpArith(ts, phi).build();
}

// ---------------------------------------------------------------- hyp

std::string hyp_trace_name(const std::string& v) {
  std::string out = "pi_";
  for (char c : v) out += (c == '\'') ? std::string("_p") : std::string(1, c);
  return out;
}

namespace {

void collect_arith_names(const TermP& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == TermKind::Var) out.insert(t->name);
  collect_arith_names(t->a, out);
  collect_arith_names(t->b, out);
}

void collect_arith_names(const ArithFormula& f, std::set<std::string>& out) {
  if (!f) return;
  if (!f->var.empty()) out.insert(f->var);
  if (!f->set2.empty()) out.insert(f->set2);
  if (!f->set3.empty()) out.insert(f->set3);
  collect_arith_names(f->t1, out);
  collect_arith_names(f->t2, out);
  collect_arith_names(f->t3, out);
  collect_arith_names(f->a, out);
  collect_arith_names(f->b, out);
}

void collect_nums(const TermP& t, std::set<Nat>& out) {
  if (!t) return;
  if (t->kind == TermKind::Num) out.insert(t->value);
  collect_nums(t->a, out);
  collect_nums(t->b, out);
}

TermP replace_nums(const TermP& t, const std::map<Nat, std::string>& names) {
  if (!t) return t;
  if (t->kind == TermKind::Num) return tvar(names.at(t->value));
  if (t->kind == TermKind::Pair) return tpair(replace_nums(t->a, names), replace_nums(t->b, names));
  return t;
}

// c equals the numeral n, using only +, *, < and first-order quantifiers
ArithFormula numeral_def(const std::string& c, Nat n, FreshNames& fresh) {
  std::string z = fresh("z");
  ArithFormula zero = a_add(tvar(z), tvar(z), tvar(z));
  if (n == 0) return a_exists(1, z, a_and(zero, a_eq(tvar(c), tvar(z))));
  std::vector<std::string> pow = {fresh("p")};
  std::vector<ArithFormula> cs = {zero, a_less(tvar(z), tvar(pow[0])),
                                  a_mul(tvar(pow[0]), tvar(pow[0]), tvar(pow[0]))};
  int top = 63;
  while (!((n >> top) & 1)) --top;
  for (int b = 1; b <= top; ++b) {
    pow.push_back(fresh("p"));
    cs.push_back(a_add(tvar(pow[b - 1]), tvar(pow[b - 1]), tvar(pow[b])));
  }
  std::vector<std::string> exist = {z};
  for (auto& p : pow) exist.push_back(p);
  std::vector<int> bits;
  for (int b = 0; b <= top; ++b)
    if ((n >> b) & 1) bits.push_back(b);
  std::string acc = pow[bits[0]];
  for (std::size_t j = 1; j < bits.size(); ++j) {
    std::string next = j + 1 == bits.size() ? c : fresh("q");
    cs.push_back(a_add(tvar(acc), tvar(pow[bits[j]]), tvar(next)));
    if (next != c) exist.push_back(next);
    acc = next;
  }
  if (bits.size() == 1) cs.push_back(a_eq(tvar(c), tvar(acc)));
  ArithFormula body = a_conj(cs);
  for (auto it = exist.rbegin(); it != exist.rend(); ++it) body = a_exists(1, *it, body);
  return body;
}

ArithFormula expand_numerals(const ArithFormula& f, FreshNames& fresh) {
  if (!f) return f;
  switch (f->op) {
    case AOp::Add:
    case AOp::Mul:
    case AOp::Less:
    case AOp::Eq:
    case AOp::In: {
      std::set<Nat> nums;
      collect_nums(f->t1, nums);
      collect_nums(f->t2, nums);
      collect_nums(f->t3, nums);
      if (nums.empty()) return f;
      std::map<Nat, std::string> names;
      for (Nat n : nums) names[n] = fresh("c");
      ANode n = *f;
      n.t1 = replace_nums(f->t1, names);
      n.t2 = replace_nums(f->t2, names);
      n.t3 = replace_nums(f->t3, names);
      ArithFormula body = std::make_shared<const ANode>(std::move(n));
      std::vector<ArithFormula> defs;
      for (auto& [v, c] : names) defs.push_back(numeral_def(c, v, fresh));
      defs.push_back(body);
      body = a_conj(defs);
      for (auto it = names.rbegin(); it != names.rend(); ++it) body = a_exists(1, it->second, body);
      return body;
    }
    default: {
      ArithFormula a = expand_numerals(f->a, fresh), b = expand_numerals(f->b, fresh);
      if (a == f->a && b == f->b) return f;
      ANode n = *f;
      n.a = a;
      n.b = b;
      return std::make_shared<const ANode>(std::move(n));
    }
  }
}

Formula tautology(const std::string& v) { return lor(A("x", v), nA("x", v)); }

class HypTranslator {
 public:
  HypTranslator(const HypOptions& opt, std::set<std::string> used) : opt_(opt), fresh_(std::move(used)) {}

  Formula operator()(const ArithFormula& f) {
    switch (f->op) {
      case AOp::True:
        return tautology(witness());
      case AOp::False:
        return lnot(tautology(witness()));
      case AOp::Not:
        return lnot((*this)(f->a));
      case AOp::And:
        return land((*this)(f->a), (*this)(f->b));
      case AOp::Or:
        return lor((*this)(f->a), (*this)(f->b));
      case AOp::Implies:
        return implies((*this)(f->a), (*this)(f->b));
      case AOp::Iff:
        return iff((*this)(f->a), (*this)(f->b));
      case AOp::In3: {
        auto it = opt_.marker_of.find(f->set3);
        if (it == opt_.marker_of.end()) throw Error("hyp: no marker for '" + f->set3 + "'");
        return A(it->second, tv(f->set2));
      }
      case AOp::In:
        return eventually(land(A("x", tv(var(f->t1))), A("x", tv(f->set2))));
      case AOp::Less:
        return eventually(land(A("x", tv(var(f->t1))), next(eventually(A("x", tv(var(f->t2)))))));
      case AOp::Eq:
        return trace_equal(tv(var(f->t1)), tv(var(f->t2)), {"x"});
      case AOp::Add:
      case AOp::Mul: {
        std::string pi = fresh_("pi_op");
        const char* op = f->op == AOp::Add ? "add" : "mult";
        Formula body = conj({A(op, pi), eventually(land(A("x", tv(var(f->t1))), A("arg1", pi))),
                             eventually(land(A("x", tv(var(f->t2))), A("arg2", pi))),
                             eventually(land(A("x", tv(var(f->t3))), A("res", pi)))});
        return exists_trace(pi, opt_.arith_set, body);
      }
      case AOp::Exists:
      case AOp::Forall: {
        if (f->order == 3) throw Error("hyp: third-order quantifier inside the formula");
        std::string pi = hyp_trace_name(f->var);
        scope_.push_back(pi);
        Formula body = (*this)(f->a);
        scope_.pop_back();
        std::vector<Formula> g = {nA("add", pi), nA("mult", pi)};
        if (f->order == 1) g.push_back(exactly_once("x", pi));
        Formula guard = conj(g);
        return f->op == AOp::Exists ? exists_trace(pi, kDom, land(guard, body))
                                    : forall_trace(pi, kDom, implies(guard, body));
      }
    }
    throw Error("hyp: unexpected node");
  }

 private:
  const HypOptions& opt_;
  Names fresh_;
  std::vector<std::string> scope_;

  std::string witness() const {
    if (scope_.empty()) throw Error("hyp: truth constant outside every quantifier");
    return scope_.back();
  }
  static std::string tv(const std::string& v) { return hyp_trace_name(v); }
  static std::string var(const TermP& t) {
    if (!t || t->kind != TermKind::Var) throw Error("hyp: expected a variable term");
    return t->name;
  }
};

std::vector<std::string> minus(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  std::vector<std::string> out;
  for (auto& x : a)
    if (std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
  return out;
}

Formula op_format(const std::string& pi, const char* op, const std::vector<std::string>& other) {
  const char* not_op = std::string(op) == "add" ? "mult" : "add";
  std::vector<Formula> cs = {globally(A(op, pi)), globally(nA(not_op, pi)),
                             exactly_once("arg1", pi), exactly_once("arg2", pi),
                             exactly_once("res", pi)};
  for (auto& q : other) cs.push_back(globally(nA(q, pi)));
  return conj(cs);
}

// p at the same position on a and b
Formula same(const std::string& p, const std::string& a, const std::string& q, const std::string& b) {
  return eventually(land(A(p, a), A(q, b)));
}
// q on b one position after p on a
Formula succ(const std::string& p, const std::string& a, const std::string& q, const std::string& b) {
  return eventually(land(A(p, a), next(A(q, b))));
}

}  // namespace

Formula hyp_translate(const ArithFormula& psi, const HypOptions& opt) {
  std::set<std::string> used;
  collect_arith_names(psi, used);
  FreshNames fresh(used);
  ArithFormula flat = expand_numerals(expand_pairs(psi), fresh);
  std::set<std::string> tnames;
  collect_arith_names(flat, tnames);
  std::set<std::string> forbidden;
  for (auto& n : tnames) forbidden.insert(hyp_trace_name(n));
  forbidden.insert(opt.arith_set);
  HypTranslator tr(opt, forbidden);
  return tr(flat);
}

Formula psi_s(const std::string& pi_add, const std::string& pi_mult,
              const std::vector<std::string>& other_props) {
  auto at0 = [](const std::string& pi) {
    return conj({A("arg1", pi), A("arg2", pi), A("res", pi)});
  };
  return conj({op_format(pi_add, "add", other_props), at0(pi_add),
               op_format(pi_mult, "mult", other_props), at0(pi_mult)});
}

FixpointSpec arith_fixpoint(const std::string& X, const std::string& pi_add,
                            const std::string& pi_mult,
                            const std::vector<std::string>& other_props) {
  FixpointSpec fp;
  fp.Y = X;
  fp.existential = true;
  fp.seeds = {pi_add, pi_mult};
  fp.seed_fresh = {"pi_sa", "pi_sm"};
  const std::string p = "pi_p", q = "pi_q", r = "pi_r";
  fp.steps = {{false, p, X}, {false, q, X}, {false, r, kDom}};
  fp.m = 3;
  fp.target_fresh = "pi_t";
  // (a,b,c) -> (a+1,b,c+1) and (a,b+1,c+1)
  Formula add_inc1 = conj({succ("arg1", p, "arg1", r), same("arg2", p, "arg2", r),
                           succ("res", p, "res", r)});
  Formula add_inc2 = conj({same("arg1", p, "arg1", r), succ("arg2", p, "arg2", r),
                           succ("res", p, "res", r)});
  // (a,b,c) with q = (c,b,c+b) -> (a+1,b,c+b); with q = (c,a,c+a) -> (a,b+1,c+a)
  Formula mult_inc1 = conj({succ("arg1", p, "arg1", r), same("arg2", p, "arg2", r),
                            same("res", p, "arg1", q), same("arg2", p, "arg2", q),
                            same("res", q, "res", r)});
  Formula mult_inc2 = conj({same("arg1", p, "arg1", r), succ("arg2", p, "arg2", r),
                            same("res", p, "arg1", q), same("arg1", p, "arg2", q),
                            same("res", q, "res", r)});
  Formula adds = conj({op_format(p, "add", other_props), op_format(r, "add", other_props),
                       lor(add_inc1, add_inc2)});
  Formula mults = conj({op_format(p, "mult", other_props), op_format(q, "add", other_props),
                        op_format(r, "mult", other_props), lor(mult_inc1, mult_inc2)});
  fp.step_body = lor(adds, mults);
  return fp;
}

Formula phi_arith_guard(const std::string& X, const std::string& pi_add,
                        const std::string& pi_mult, const Alphabet& ap) {
  return guard_formula(arith_fixpoint(X, pi_add, pi_mult, minus(ap.props(), kArithProps)), ap);
}

Sigma12Encoding sigma12_encode(const ArithFormula& psi, Nat n, const std::string& free_var) {
  std::set<std::string> thirds;
  std::function<void(const ArithFormula&)> scan = [&](const ArithFormula& f) {
    if (!f) return;
    if ((f->op == AOp::Exists || f->op == AOp::Forall) && f->order == 3)
      throw Error("sigma12_encode: third-order quantifier inside the formula");
    if (f->op == AOp::In3) thirds.insert(f->set3);
    scan(f->a);
    scan(f->b);
  };
  scan(psi);
  Sigma12Encoding out;
  out.third_order.assign(thirds.begin(), thirds.end());
  HypOptions opt;
  std::vector<std::string> markers;
  for (std::size_t i = 0; i < out.third_order.size(); ++i) {
    markers.push_back("m" + std::to_string(i + 1));
    opt.marker_of[out.third_order[i]] = markers.back();
  }
  std::vector<std::string> props = {"x"};
  for (auto& m : markers) props.push_back(m);
  std::vector<std::string> xm = props;
  for (auto& p : kArithProps) props.push_back(p);
  out.ap = Alphabet(props);

  Formula cons = forall_trace(
      "pi", kDom,
      forall_trace("pi1", kDom, implies(trace_equal("pi", "pi1", {"x"}), trace_equal("pi", "pi1", xm))));
  std::vector<Formula> p0;
  for (auto& p : kArithProps) p0.push_back(globally(nA(p, "pi1")));
  for (auto& m : markers) p0.push_back(lor(globally(A(m, "pi1")), globally(nA(m, "pi1"))));
  std::vector<Formula> p1;
  for (auto& p : xm) p1.push_back(globally(nA(p, "pi1")));
  Formula closure = forall_trace(
      "pi", kAll,
      land(exists_trace("pi1", kDom, land(trace_equal("pi", "pi1", {"x"}), conj(p0))),
           exists_trace("pi1", kDom, land(trace_equal("pi", "pi1", kArithProps), conj(p1)))));

  ArithFormula full = a_exists(1, free_var, a_and(a_eq(tvar(free_var), tnum(n)), psi));
  Formula hyp = hyp_translate(full, opt);
  std::vector<std::string> other = xm;
  Formula seeds = land(psi_s("pi_add", "pi_mult", other),
                       exists_mm(opt.arith_set, Polarity::Min,
                                 phi_arith_guard(opt.arith_set, "pi_add", "pi_mult", out.ap), hyp));
  Formula tail = exists_trace("pi_add", kDom, exists_trace("pi_mult", kDom, seeds));
  out.phi = conj({cons, closure, tail});
  return out;
}

// ---------------------------------------------------------------- fssat -> mc

TransitionSystem ts_single_initial(const TransitionSystem& ts) {
  if (ts.ap.contains(kDollar)) throw Error("ts_single_initial: alphabet already has '" + kDollar + "'");
  TransitionSystem out;
  std::vector<std::string> ps = ts.ap.props();
  ps.push_back(kDollar);
  out.ap = Alphabet(ps);
  for (std::size_t v = 0; v < ts.num_vertices(); ++v)
    out.add_vertex(ts.ap.translate(ts.label[v], out.ap), false);
  for (std::size_t v = 0; v < ts.num_vertices(); ++v)
    for (int w : ts.succ[v]) out.add_edge(static_cast<int>(v), w);
  int vi = out.add_vertex(out.ap.bit(kDollar), true);
  out.add_edge(vi, vi);
  for (std::size_t v = 0; v < ts.num_vertices(); ++v)
    if (ts.initial[v]) out.add_edge(vi, static_cast<int>(v));
  return out;
}

Formula phi_single_initial(const Formula& phi) {
  std::function<Formula(const Formula&)> go = [&](const Formula& f) -> Formula {
    if (!contains_quantifier(f)) return next(f);
    if (is_temporal(f->op)) throw Error("phi_single_initial: quantifier under a temporal operator");
    if (is_trace_quantifier(f->op)) {
      Formula one = land(A(kDollar, f->var), next(nA(kDollar, f->var)));
      Formula body = go(f->a);
      return f->op == Op::ExistsTrace ? exists_trace(f->var, f->range, land(one, body))
                                      : forall_trace(f->var, f->range, implies(one, body));
    }
    if (is_set_quantifier(f->op))
      return remake(f, go(f->a), nullptr, f->guard ? go(f->guard) : nullptr);
    if (f->op == Op::Not) return lnot(go(f->a));
    return remake(f, go(f->a), f->b ? go(f->b) : nullptr, nullptr);
  };
  return go(phi);
}

namespace {

Formula iff_all(const std::vector<std::string>& props, const std::string& a, const std::string& b) {
  std::vector<Formula> cs;
  for (auto& p : props) cs.push_back(iff(A(p, a), A(p, b)));
  return conj_opt(cs);
}

Formula until_opt(Formula a, Formula b) { return a ? until(a, b) : eventually(b); }

}  // namespace

Formula rel_rewrite(const Formula& phi, const Alphabet& ap, const std::string& prefixes) {
  Names fresh(all_names(phi));
  fresh(prefixes);
  std::function<Formula(const Formula&)> go = [&](const Formula& f) -> Formula {
    if (!f) return f;
    if (is_trace_quantifier(f->op)) {
      Formula body = go(f->a);
      if (f->range == kAll) {
        return f->op == Op::ExistsTrace ? exists_trace(f->var, kDom, body)
                                        : forall_trace(f->var, kDom, body);
      }
      if (f->range != kDom) return remake(f, body, nullptr, nullptr);
      std::string q = fresh("pi_q"), pp = fresh("pi_pre");
      Formula lhs = land(nA(kSharp, q), exactly_once(kSharp, q));
      Formula rhs = exists_trace(
          pp, prefixes,
          land(eventually(land(A(kSharp, q), A(kSharp, pp))),
               until_opt(iff_all(ap.props(), f->var, pp), A(kSharp, pp))));
      Formula r = forall_trace(q, kDom, implies(lhs, rhs));
      return f->op == Op::ExistsTrace ? exists_trace(f->var, kDom, land(r, body))
                                      : forall_trace(f->var, kDom, implies(r, body));
    }
    return remake(f, go(f->a), go(f->b), go(f->guard));
  };
  return go(phi);
}

FssatToMc fssat_to_mc(const Formula& phi, const Alphabet& ap) {
  std::vector<std::string> extra = {"x", kSharp};
  for (auto& p : kArithProps) extra.push_back(p);
  for (auto& p : extra)
    if (ap.contains(p)) throw Error("fssat_to_mc: alphabet collision on '" + p + "'");
  std::vector<std::string> ps = ap.props();
  for (auto& p : extra) ps.push_back(p);
  FssatToMc out;
  out.ap = Alphabet(ps);
  out.ts = ts_full(out.ap);

  Names fresh(all_names(phi));
  std::string V = fresh("pi_V"), E = fresh("pi_E"), I = fresh("pi_init");
  std::string padd = fresh("pi_add"), pmult = fresh("pi_mult");
  std::string Xarith = fresh("Xarith"), Yp = fresh("Yprefixes");
  std::string pe = fresh("pi_e"), pe2 = fresh("pi_e2");
  std::string p0 = fresh("pi_0"), p1 = fresh("pi_1"), pm = fresh("pi_m"), pa = fresh("pi_a");
  const std::string& S = kSharp;
  const auto& AP = ap.props();

  Formula phiV = land(nA(S, V), exactly_once(S, V));
  Formula phiE = forall_trace(
      pe, Xarith,
      implies(conj({A("mult", pe), until(lnot(next(A(S, V))), A("arg1", pe)),
                    eventually(land(A("arg2", pe), next(A(S, V))))}),
              exists_trace(pe2, Xarith,
                           conj({A("add", pe2), eventually(land(A("arg1", pe2), A("res", pe))),
                                 until(lnot(next(A(S, V))), A("arg2", pe2)),
                                 eventually(land(A("res", pe2), A("x", E)))}))));
  auto prefix = [&](const std::string& v) {
    return land(exactly_once(S, v), until(next(nA(S, v)), A("x", v)));
  };
  Formula phiInit = and_opt(conj({prefix(I), A("x", I), next(A(S, I))}), iff_all(AP, V, I));

  std::vector<Formula> label_match;
  for (auto& p : AP)
    label_match.push_back(iff(eventually(land(A(p, V), A("x", p1))),
                              eventually(land(A(p, p1), next(A(S, p1))))));
  Formula edge = conj({A("mult", pm), eventually(land(A("arg1", pm), A("x", p0))),
                       eventually(land(A("arg2", pm), A(S, V))), A("add", pa),
                       eventually(land(A("arg1", pa), A("res", pm))),
                       eventually(land(A("arg2", pa), A("x", p1))),
                       eventually(land(A("res", pa), A("x", E)))});
  std::vector<Formula> step = {prefix(p1),
                               until_opt(iff_all(AP, p0, p1), land(A(S, p0), next(A(S, p1))))};
  if (!label_match.empty()) step.push_back(conj(label_match));
  step.push_back(edge);

  FixpointSpec con;
  con.Y = Yp;
  con.existential = true;
  con.seeds = {I};
  con.seed_fresh = {fresh("pi_si")};
  con.steps = {{false, p0, Yp}, {false, p1, kDom}, {false, pm, Xarith}, {false, pa, Xarith}};
  con.step_body = conj(step);
  con.m = 2;
  con.target_fresh = fresh("pi_ti");

  Formula inner = conj({phiV, phiE, phiInit,
                        exists_mm(Yp, Polarity::Min, guard_formula(con, out.ap),
                                  rel_rewrite(phi, ap, Yp))});
  Formula phi2 = exists_trace(V, kDom, exists_trace(E, kDom, exists_trace(I, kDom, inner)));
  std::vector<std::string> other = AP;
  other.push_back("x");
  other.push_back(S);
  Formula arith = exists_mm(Xarith, Polarity::Min, phi_arith_guard(Xarith, padd, pmult, out.ap), phi2);
  out.phi = exists_trace(padd, kDom,
                         exists_trace(pmult, kDom, land(psi_s(padd, pmult, other), arith)));
  return out;
}

}  // namespace h2ltl

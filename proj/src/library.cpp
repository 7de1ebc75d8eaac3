#include "h2ltl/library.hpp"

#include <algorithm>
#include <sstream>

namespace h2ltl {

namespace {

Formula A(const std::string& p, const std::string& v) { return atom(p, v); }
Formula nA(const std::string& p, const std::string& v) { return lnot(atom(p, v)); }

// !p U (p & X G !p)
Formula exactly_once(const std::string& p, const std::string& v) {
  return until(nA(p, v), land(A(p, v), next(globally(nA(p, v)))));
}

// exactly one of plus/minus/s, at every position
Formula phi0(const std::string& Z) {
  const std::vector<std::string> kinds = {"plus", "minus", "s"};
  std::vector<Formula> ds;
  for (auto& p : kinds) {
    std::vector<Formula> cs = {A(p, "pi")};
    for (auto& q : kinds)
      if (q != p) cs.push_back(nA(q, "pi"));
    ds.push_back(globally(conj(cs)));
  }
  return forall_trace("pi", Z, disj(ds));
}

Formula plus_or_minus(const std::string& v) { return lor(A("plus", v), A("minus", v)); }

Formula contradiction_free(const std::string& X, const std::string& Z,
                           const std::vector<std::string>& props) {
  Formula inside =
      forall_trace("pi", X, land(in_set("pi", Z, props, "pi_z"), plus_or_minus("pi")));
  Formula no_clash = forall_trace(
      "pi", X,
      forall_trace("pi1", X,
                   implies(land(A("plus", "pi"), A("minus", "pi1")),
                           lnot(eventually(land(A("x", "pi"), A("x", "pi1")))))));
  return land(inside, no_clash);
}

std::string set_name_avoiding(const std::string& base, const std::string& Z) {
  return fresh_name(base, {Z, kDom, kAll});
}

}  // namespace

Alphabet allsets_alphabet() { return Alphabet(kAllSetsProps); }
Alphabet arith_alphabet() { return Alphabet(kArithProps); }

std::vector<Formula> psi_example31_parts() {
  Formula p1 = forall_trace("pi", kDom, exactly_once("x", "pi"));
  Formula p2 = exists_trace("pi", kDom, A("x", "pi"));
  Formula p3 = forall_trace(
      "pi", kDom,
      exists_trace("pi1", kDom, eventually(land(A("x", "pi"), next(A("x", "pi1"))))));
  return {p1, p2, p3};
}

Formula psi_example31() { return conj(psi_example31_parts()); }

std::vector<Formula> phi_allSets_parts(const std::vector<std::string>& props) {
  const std::string& D = kDom;
  Formula f0 = phi0(D);
  Formula f1 = forall_trace("pi", D, implies(plus_or_minus("pi"), exactly_once("x", "pi")));
  std::vector<Formula> f2s, f3s;
  for (const char* p : {"plus", "minus"}) {
    f2s.push_back(exists_trace("pi", D, land(A(p, "pi"), A("x", "pi"))));
    f3s.push_back(forall_trace(
        "pi", D,
        exists_trace("pi1", D,
                     implies(A(p, "pi"),
                             land(A(p, "pi1"), eventually(land(A("x", "pi"), next(A("x", "pi1")))))))));
  }
  std::string X = set_name_avoiding("W", D);
  Formula consistent = forall_trace(
      "pi3", X,
      land(A("s", "pi2"),
           land(implies(A("plus", "pi3"), eventually(land(A("x", "pi3"), A("x", "pi2")))),
                implies(A("minus", "pi3"), eventually(land(A("x", "pi3"), nA("x", "pi2")))))));
  Formula f4 = forall_set(X, implies(contradiction_free(X, D, props),
                                     exists_trace("pi2", D, consistent)));
  return {f0, f1, conj(f2s), conj(f3s), f4};
}

Formula phi_allSets(const std::vector<std::string>& props) {
  return conj(phi_allSets_parts(props));
}

namespace {

std::vector<Formula> mm_first_four(const std::string& Z) {
  Formula f0 = phi0(Z);
  Formula f1 = forall_trace(
      "pi", Z,
      implies(plus_or_minus("pi"), lor(globally(nA("x", "pi")), exactly_once("x", "pi"))));
  std::vector<Formula> f2s, f3s;
  for (const char* p : {"plus", "minus"}) {
    f2s.push_back(land(exists_trace("pi", Z, land(A(p, "pi"), globally(nA("x", "pi")))),
                       exists_trace("pi", Z, land(A(p, "pi"), A("x", "pi")))));
    f3s.push_back(forall_trace(
        "pi", Z,
        exists_trace("pi1", Z,
                     implies(land(A(p, "pi"), eventually(A("x", "pi"))),
                             land(A(p, "pi1"), eventually(land(A("x", "pi"), next(A("x", "pi1")))))))));
  }
  return {f0, f1, conj(f2s), conj(f3s)};
}

}  // namespace

std::vector<Formula> phi_allSets_max_parts(const std::string& Z,
                                           const std::vector<std::string>& props) {
  auto parts = mm_first_four(Z);
  std::string X = set_name_avoiding("W", Z);
  Formula c1 = implies(land(A("plus", "pi3"), eventually(A("x", "pi3"))),
                       eventually(land(A("x", "pi3"), A("x", "pi2"))));
  Formula c2 = implies(land(A("minus", "pi3"), eventually(A("x", "pi3"))),
                       eventually(land(A("x", "pi3"), nA("x", "pi2"))));
  Formula body = exists_trace("pi2", Z, forall_trace("pi3", X, land(A("s", "pi2"), land(c1, c2))));
  parts.push_back(forall_mm(X, Polarity::Max, contradiction_free(X, Z, props), body));
  return parts;
}

std::vector<Formula> phi_allSets_min_parts(const std::string& Z,
                                           const std::vector<std::string>& props) {
  auto parts = mm_first_four(Z);
  std::string X = set_name_avoiding("W", Z);
  Formula complete = land(
      exists_trace("pi", X, land(A("x", "pi"), plus_or_minus("pi"))),
      forall_trace("pi", X,
                   exists_trace("pi1", X,
                                implies(plus_or_minus("pi"),
                                        land(plus_or_minus("pi1"),
                                             eventually(land(A("x", "pi"), next(A("x", "pi1")))))))));
  Formula guard = land(complete, contradiction_free(X, Z, props));
  Formula c1 = implies(A("plus", "pi3"), eventually(land(A("x", "pi3"), A("x", "pi2"))));
  Formula c2 = implies(A("minus", "pi3"), eventually(land(A("x", "pi3"), nA("x", "pi2"))));
  Formula body = exists_trace("pi2", Z, forall_trace("pi3", X, land(A("s", "pi2"), land(c1, c2))));
  parts.push_back(forall_mm(X, Polarity::Min, guard, body));
  return parts;
}

Formula phi_allSets_mm(Polarity pol, const std::string& Z, const std::vector<std::string>& props) {
  return conj(pol == Polarity::Max ? phi_allSets_max_parts(Z, props)
                                   : phi_allSets_min_parts(Z, props));
}

Formula phi_ck(const Alphabet& ap, const std::vector<std::vector<std::string>>& obs,
               const Formula& body, const std::string& body_var, bool lfp) {
  if (obs.empty()) throw Error("phi_ck needs at least one observation set");
  for (auto& o : obs) {
    if (o.empty()) throw Error("phi_ck: empty observation set");
    for (auto& p : o)
      if (!ap.contains(p)) throw Error("phi_ck: '" + p + "' is not in the alphabet");
  }
  std::set<std::string> used = all_names(body);
  std::string X = fresh_name("X", used);
  used.insert(X);
  std::string p0 = fresh_name("pi", used);
  used.insert(p0);
  std::string p1 = fresh_name("pi1", used);
  used.insert(p1);
  std::string p2 = fresh_name("pi2", used);
  used.insert(p2);
  std::string f0 = fresh_name("pi_s", used);
  used.insert(f0);
  std::string f1 = fresh_name("pi_t", used);
  used.insert(f1);
  std::vector<Formula> sims;
  for (auto& o : obs) sims.push_back(trace_equal(p1, p2, o));
  Formula closed = forall_trace(p1, X,
                                forall_trace(p2, kDom,
                                             implies(disj(sims), in_set(p2, X, ap.props(), f1))));
  Formula guard = land(in_set(p0, X, ap.props(), f0), closed);
  Formula all_know = forall_trace(p1, X, rename_free_trace(body, body_var, p1));
  if (lfp) return forall_trace(p0, kDom, exists_mm(X, Polarity::Min, guard, all_know));
  return forall_trace(p0, kDom, exists_set(X, land(guard, all_know)));
}

Formula phi_prefs() {
  Formula a = forall_trace("pi", kDom, exactly_once("sharp", "pi"));
  Formula b = exists_trace("pi", kDom, A("sharp", "pi"));
  auto extend = [](Formula last_x) {
    return forall_trace(
        "pi", kDom,
        exists_trace("pi1", kDom,
                     until(iff(A("x", "pi"), A("x", "pi1")),
                           land(A("sharp", "pi"), land(last_x, next(A("sharp", "pi1")))))));
  };
  return conj({a, b, extend(nA("x", "pi1")), extend(A("x", "pi1"))});
}

TransitionSystem ts_allSets() {
  TransitionSystem ts;
  ts.ap = allsets_alphabet();
  auto L = [&](std::initializer_list<const char*> ps) {
    Letter l = 0;
    for (auto p : ps) l |= ts.ap.bit(p);
    return l;
  };
  for (const char* sign : {"plus", "minus"}) {
    int before = ts.add_vertex(L({sign}), true);
    int mark = ts.add_vertex(L({"x", sign}), true);
    int after = ts.add_vertex(L({sign}), false);
    ts.add_edge(before, before);
    ts.add_edge(before, mark);
    ts.add_edge(mark, after);
    ts.add_edge(after, after);
  }
  int on = ts.add_vertex(L({"x", "s"}), true);
  int off = ts.add_vertex(L({"s"}), true);
  ts.add_edge(on, on);
  ts.add_edge(on, off);
  ts.add_edge(off, on);
  ts.add_edge(off, off);
  return ts;
}

TransitionSystem ts_full(const Alphabet& ap) {
  if (ap.size() > 16) throw Error("ts_full: alphabet too large");
  TransitionSystem ts;
  ts.ap = ap;
  Letter n = Letter{1} << ap.size();
  for (Letter l = 0; l < n; ++l) ts.add_vertex(l, true);
  for (Letter a = 0; a < n; ++a)
    for (Letter b = 0; b < n; ++b) ts.add_edge(static_cast<int>(a), static_cast<int>(b));
  return ts;
}

TraceSet plus_times(std::size_t bound, const std::optional<Alphabet>& target) {
  Alphabet ap = target ? *target : arith_alphabet();
  for (auto& p : kArithProps)
    if (!ap.contains(p)) throw Error("plus_times: alphabet lacks '" + p + "'");
  TraceSet out(ap);
  auto emit = [&](const char* op, std::size_t a, std::size_t b, std::size_t c) {
    std::vector<Letter> stem(bound, ap.bit(op));
    stem[a] |= ap.bit("arg1");
    stem[b] |= ap.bit("arg2");
    stem[c] |= ap.bit("res");
    out.insert(canonicalize(stem, {ap.bit(op)}));
  };
  for (std::size_t a = 0; a < bound; ++a)
    for (std::size_t b = 0; b < bound; ++b) {
      if (a + b < bound) emit("add", a, b, a + b);
      if (a * b < bound) emit("mult", a, b, a * b);
    }
  return out;
}

LassoTrace singleton_trace(std::size_t n, const Alphabet& ap, const std::string& prop) {
  std::vector<Letter> stem(n + 1, 0);
  stem[n] = ap.bit(prop);
  return canonicalize(stem, {0});
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string param(const std::map<std::string, std::string>& ps, const std::string& k,
                  const std::string& dflt) {
  auto it = ps.find(k);
  return it == ps.end() ? dflt : it->second;
}

}  // namespace

std::vector<std::string> library_names() {
  return {"psi_example31", "phi_allSets", "phi_allSets_max", "phi_allSets_min", "phi_ck",
          "phi_Prefs",     "ts_allSets",  "ts_full",         "plus_times"};
}

LibraryArtifact library(const std::string& name, const std::map<std::string, std::string>& ps) {
  LibraryArtifact out;
  if (name == "psi_example31") {
    out.formula = psi_example31();
    out.ap = Alphabet({"x"});
  } else if (name == "phi_allSets") {
    out.formula = phi_allSets();
    out.ap = allsets_alphabet();
  } else if (name == "phi_allSets_max" || name == "phi_allSets_min") {
    std::string Z = param(ps, "Z", "Z");
    out.formula =
        phi_allSets_mm(name == "phi_allSets_max" ? Polarity::Max : Polarity::Min, Z);
    out.ap = allsets_alphabet();
  } else if (name == "phi_ck") {
    out.ap = Alphabet(split(param(ps, "ap", "a,b"), ','));
    std::vector<std::vector<std::string>> obs;
    for (auto& group : split(param(ps, "obs", "a;b"), ';')) obs.push_back(split(group, ','));
    std::string body_text = param(ps, "body", "G " + out.ap.props()[0] + "[pi]");
    Formula body = parse_formula(body_text, out.ap);
    auto fv = free_trace_vars(body);
    if (fv.size() != 1) throw Error("phi_ck: body needs exactly one free trace variable");
    std::string lfp = param(ps, "lfp", "1");
    if (lfp != "0" && lfp != "1") throw Error("phi_ck: lfp must be 0 or 1");
    out.formula = phi_ck(out.ap, obs, body, *fv.begin(), lfp == "1");
  } else if (name == "phi_Prefs") {
    out.formula = phi_prefs();
    out.ap = Alphabet({"sharp", "x"});
  } else if (name == "ts_allSets") {
    out.ts = ts_allSets();
    out.ap = out.ts->ap;
  } else if (name == "ts_full") {
    out.ap = Alphabet(split(param(ps, "ap", "x"), ','));
    out.ts = ts_full(out.ap);
  } else if (name == "plus_times") {
    std::string b = param(ps, "bound", "4");
    std::size_t bound = 0;
    try {
      bound = std::stoul(b);
    } catch (const std::exception&) {
      throw Error("plus_times: bound must be a number");
    }
    if (bound == 0 || bound > 64) throw Error("plus_times: bound must be in 1..64");
    out.traces = plus_times(bound);
    out.ap = arith_alphabet();
  } else {
    throw Error("unknown library artifact '" + name + "'");
  }
  return out;
}

}  // namespace h2ltl

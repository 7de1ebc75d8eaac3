#include "h2ltl/eval.hpp"

#include <algorithm>
#include <boost/dynamic_bitset.hpp>
#include <cstdlib>
#include <map>
#include <numeric>
#include <unordered_map>

namespace h2ltl {

std::size_t EvalOptions::default_cap_traces() {
  if (const char* s = std::getenv("H2LTL_CAP_TRACES")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && v > 0) return static_cast<std::size_t>(v);
  }
  return 20;
}

namespace {

struct Joint {
  const Alphabet* ap;
  const std::vector<std::string>* vars;
  const std::vector<const LassoTrace*>* traces;
  std::size_t S, P, N;
};

using Vec = std::vector<char>;

const LassoTrace* lookup(const Joint& j, const std::string& v) {
  for (std::size_t i = 0; i < j.vars->size(); ++i)
    if ((*j.vars)[i] == v) return (*j.traces)[i];
  throw Error("unbound trace variable '" + v + "'");
}

Vec truth(const Node* f, const Joint& j) {
  const std::size_t N = j.N;
  auto succ = [&](std::size_t i) { return i + 1 < N ? i + 1 : j.S; };
  Vec r(N, 0);
  switch (f->op) {
    case Op::Atom: {
      const LassoTrace* t = lookup(j, f->var);
      int b = j.ap->index(f->name);
      if (b < 0) throw Error("proposition '" + f->name + "' not in the model alphabet");
      for (std::size_t i = 0; i < N; ++i) r[i] = (t->at(i) >> b) & 1;
      return r;
    }
    case Op::Not: {
      Vec a = truth(f->a.get(), j);
      for (std::size_t i = 0; i < N; ++i) r[i] = !a[i];
      return r;
    }
    case Op::Or:
    case Op::And:
    case Op::Implies:
    case Op::Iff:
    case Op::Xor: {
      Vec a = truth(f->a.get(), j), b = truth(f->b.get(), j);
      for (std::size_t i = 0; i < N; ++i) {
        bool x = a[i], y = b[i];
        switch (f->op) {
          case Op::Or: r[i] = x || y; break;
          case Op::And: r[i] = x && y; break;
          case Op::Implies: r[i] = !x || y; break;
          case Op::Iff: r[i] = x == y; break;
          default: r[i] = x != y; break;
        }
      }
      return r;
    }
    case Op::Next: {
      Vec a = truth(f->a.get(), j);
      for (std::size_t i = 0; i < N; ++i) r[i] = a[succ(i)];
      return r;
    }
    case Op::Until:
    case Op::Eventually:
    case Op::Globally: {
      Vec a, b;
      if (f->op == Op::Until) {
        a = truth(f->a.get(), j);
        b = truth(f->b.get(), j);
      } else if (f->op == Op::Eventually) {
        a.assign(N, 1);
        b = truth(f->a.get(), j);
      } else {  // G p = !(true U !p)
        a.assign(N, 1);
        b = truth(f->a.get(), j);
        for (auto& x : b) x = !x;
      }
      // least fixpoint of r = b | (a & r o succ), iterated backwards from false
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t k = N; k-- > 0;) {
          char v = b[k] || (a[k] && r[succ(k)]);
          if (v != r[k]) {
            r[k] = v;
            changed = true;
          }
        }
      }
      if (f->op == Op::Globally)
        for (auto& x : r) x = !x;
      return r;
    }
    default:
      throw Error("quantifier inside an LTL body");
  }
}

void collect_vars(const Formula& f, std::set<std::string>& out) {
  if (!f) return;
  if (f->op == Op::Atom) out.insert(f->var);
  collect_vars(f->a, out);
  collect_vars(f->b, out);
}

BodyTruth joint_truth(const Node* f, const Alphabet& ap, const std::vector<std::string>& vars,
                      const std::vector<const LassoTrace*>& traces) {
  std::size_t S = 0, P = 1;
  for (auto* t : traces) {
    S = std::max(S, t->stem.size());
    P = std::lcm(P, t->loop.size());
  }
  Joint j{&ap, &vars, &traces, S, P, S + P};
  BodyTruth bt;
  bt.stem = S;
  bt.period = P;
  Vec v = truth(f, j);
  bt.values.assign(v.begin(), v.end());
  return bt;
}

}  // namespace

BodyTruth body_truth(const Assignment& pi, const Formula& body, const Alphabet& ap) {
  if (contains_quantifier(body)) throw Error("eval_body expects a quantifier-free body");
  std::set<std::string> vs;
  collect_vars(body, vs);
  std::vector<std::string> vars(vs.begin(), vs.end());
  std::vector<const LassoTrace*> traces;
  for (auto& v : vars) {
    auto it = pi.traces.find(v);
    if (it == pi.traces.end()) throw Error("unbound trace variable '" + v + "'");
    traces.push_back(&it->second);
  }
  return joint_truth(body.get(), ap, vars, traces);
}

bool eval_body(const Assignment& pi, const Formula& body, const Alphabet& ap) {
  return body_truth(pi, body, ap).values.at(0);
}

// ---------------------------------------------------------------- sentences

namespace {

using SetVal = boost::dynamic_bitset<>;

bool lex_less(const SetVal& a, const SetVal& b) {
  std::size_t i = a.find_first(), j = b.find_first();
  while (i != SetVal::npos && j != SetVal::npos) {
    if (i != j) return i < j;
    i = a.find_next(i);
    j = b.find_next(j);
  }
  return i == SetVal::npos && j != SetVal::npos;
}

class Engine {
 public:
  Engine(const TraceSet& T, const EvalOptions& opt, const Assignment& free)
      : ap_(T.alphabet()), opt_(opt) {
    std::vector<LassoTrace> all = T.members();
    if (opt.ambient) {
      if (!(opt.ambient->alphabet() == ap_)) throw Error("ambient alphabet differs from model");
      all.insert(all.end(), opt.ambient->members().begin(), opt.ambient->members().end());
    }
    for (auto& [k, t] : free.traces) all.push_back(t);
    for (auto& [k, s] : free.sets) {
      if (!(s.alphabet() == ap_)) throw Error("set '" + k + "' alphabet differs from model");
      all.insert(all.end(), s.members().begin(), s.members().end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    universe_ = std::move(all);
    senv_.emplace_back(kDom, to_set(T.members()));
    if (opt.ambient) senv_.emplace_back(kAll, to_set(opt.ambient->members()));
    for (auto& [k, s] : free.sets) senv_.emplace_back(k, to_set(s.members()));
    for (auto& [k, t] : free.traces) tenv_.emplace_back(k, index(t));
  }

  bool eval(const Node* f) {
    if (!has_quant(f)) return eval_qf(f);
    switch (f->op) {
      case Op::Not: return !eval(f->a.get());
      case Op::Or: return eval(f->a.get()) || eval(f->b.get());
      case Op::And: return eval(f->a.get()) && eval(f->b.get());
      case Op::Implies: return !eval(f->a.get()) || eval(f->b.get());
      case Op::Iff: return eval(f->a.get()) == eval(f->b.get());
      case Op::Xor: return eval(f->a.get()) != eval(f->b.get());
      case Op::ExistsTrace:
      case Op::ForallTrace: return eval_trace_q(f, true);
      case Op::ExistsSet:
      case Op::ForallSet: return eval_set_q(f);
      case Op::ExistsMM:
      case Op::ForallMM: return eval_mm_q(f);
      default: throw Error("quantifier under a temporal operator");
    }
  }

  std::vector<SetVal> sol(const Node* mm_like, const std::string& X, Polarity pol,
                          const Node* guard) {
    std::string key = sol_key(guard, X, pol);
    auto it = sol_cache_.find(key);
    if (it != sol_cache_.end()) return it->second;
    SetVal dom = set_domain();
    std::vector<std::size_t> members;
    for (auto i = dom.find_first(); i != SetVal::npos; i = dom.find_next(i)) members.push_back(i);
    std::vector<SetVal> good;
    const std::uint64_t n = std::uint64_t{1} << members.size();
    for (std::uint64_t m = 0; m < n; ++m) {
      SetVal s(universe_.size());
      for (std::size_t b = 0; b < members.size(); ++b)
        if (m >> b & 1) s.set(members[b]);
      senv_.emplace_back(X, s);
      bool ok = eval(guard);
      senv_.pop_back();
      if (ok) good.push_back(std::move(s));
    }
    std::stable_sort(good.begin(), good.end(), [&](const SetVal& a, const SetVal& b) {
      return pol == Polarity::Min ? a.count() < b.count() : a.count() > b.count();
    });
    std::vector<SetVal> kept;
    for (auto& s : good) {
      bool dominated = false;
      for (auto& k : kept)
        if (pol == Polarity::Min ? k.is_subset_of(s) : s.is_subset_of(k)) {
          dominated = true;
          break;
        }
      if (!dominated) kept.push_back(s);
    }
    std::sort(kept.begin(), kept.end(), lex_less);
    (void)mm_like;
    sol_cache_[key] = kept;
    return kept;
  }

  TraceSet to_traceset(const SetVal& s) const {
    std::vector<LassoTrace> v;
    for (auto i = s.find_first(); i != SetVal::npos; i = s.find_next(i)) v.push_back(universe_[i]);
    return TraceSet(ap_, std::move(v));
  }

 private:
  const Alphabet& ap_;
  const EvalOptions& opt_;
  std::vector<LassoTrace> universe_;
  std::vector<std::pair<std::string, int>> tenv_;
  std::vector<std::pair<std::string, SetVal>> senv_;
  std::unordered_map<const Node*, bool> quant_memo_;
  std::unordered_map<const Node*, std::vector<std::string>> vars_memo_;
  std::map<std::pair<const Node*, std::vector<int>>, bool> body_cache_;
  std::map<std::string, std::vector<SetVal>> sol_cache_;

  SetVal to_set(const std::vector<LassoTrace>& ts) const {
    SetVal s(universe_.size());
    for (auto& t : ts) s.set(index(t));
    return s;
  }
  std::size_t index(const LassoTrace& t) const {
    return static_cast<std::size_t>(
        std::lower_bound(universe_.begin(), universe_.end(), t) - universe_.begin());
  }

  bool has_quant(const Node* f) {
    auto it = quant_memo_.find(f);
    if (it != quant_memo_.end()) return it->second;
    bool q = is_quantifier(f->op) || (f->a && has_quant(f->a.get())) ||
             (f->b && has_quant(f->b.get()));
    quant_memo_[f] = q;
    return q;
  }

  const std::vector<std::string>& vars_of(const Node* f) {
    auto it = vars_memo_.find(f);
    if (it != vars_memo_.end()) return it->second;
    std::set<std::string> vs;
    std::function<void(const Node*)> go = [&](const Node* g) {
      if (!g) return;
      if (g->op == Op::Atom) vs.insert(g->var);
      go(g->a.get());
      go(g->b.get());
    };
    go(f);
    return vars_memo_[f] = std::vector<std::string>(vs.begin(), vs.end());
  }

  int trace_of(const std::string& v) const {
    for (auto it = tenv_.rbegin(); it != tenv_.rend(); ++it)
      if (it->first == v) return it->second;
    throw Error("unbound trace variable '" + v + "'");
  }
  const SetVal& set_of(const std::string& X) const {
    for (auto it = senv_.rbegin(); it != senv_.rend(); ++it)
      if (it->first == X) return it->second;
    if (X == kAll) throw Error("ALL used but no ambient trace set was supplied");
    throw Error("unbound set variable '" + X + "'");
  }

  bool eval_qf(const Node* f) {
    const auto& vars = vars_of(f);
    std::vector<int> idx;
    idx.reserve(vars.size());
    for (auto& v : vars) idx.push_back(trace_of(v));
    auto key = std::make_pair(f, idx);
    auto it = body_cache_.find(key);
    if (it != body_cache_.end()) return it->second;
    std::vector<const LassoTrace*> ts;
    for (int i : idx) ts.push_back(&universe_[i]);
    bool v = joint_truth(f, ap_, vars, ts).values[0];
    body_cache_.emplace(std::move(key), v);
    return v;
  }

  bool eval_trace_q(const Node* f, bool chain_head) {
    if (chain_head) {
      double combos = 1;
      for (const Node* g = f; g && is_trace_quantifier(g->op); g = g->a.get()) {
        bool bound_inside = false;
        for (const Node* h = f; h != g; h = h->a.get()) bound_inside |= h->var == g->range;
        if (!bound_inside) combos *= std::max<std::size_t>(1, set_of(g->range).count());
      }
      if (combos > static_cast<double>(opt_.cap_assignments))
        throw CapExceeded("trace-quantifier block exceeds " +
                          std::to_string(opt_.cap_assignments) + " assignments");
    }
    const SetVal range = set_of(f->range);  // copy: senv_ grows below
    bool ex = f->op == Op::ExistsTrace;
    const Node* body = f->a.get();
    bool next_chain = is_trace_quantifier(body->op);
    for (auto i = range.find_first(); i != SetVal::npos; i = range.find_next(i)) {
      tenv_.emplace_back(f->var, static_cast<int>(i));
      bool v = next_chain ? eval_trace_q(body, false) : eval(body);
      tenv_.pop_back();
      if (v == ex) return ex;
    }
    return !ex;
  }

  SetVal set_domain() {
    if (opt_.semantics == Semantics::ClosedWorld) return set_of(kDom);
    if (!opt_.ambient) throw Error("standard semantics needs an ambient trace set");
    return set_of(kAll);
  }

  bool eval_set_q(const Node* f) {
    SetVal dom = set_domain();
    std::vector<std::size_t> members;
    for (auto i = dom.find_first(); i != SetVal::npos; i = dom.find_next(i)) members.push_back(i);
    if (members.size() > opt_.cap_traces)
      throw CapExceeded("set quantifier over " + std::to_string(members.size()) +
                        " traces exceeds the cap of " + std::to_string(opt_.cap_traces));
    bool ex = f->op == Op::ExistsSet;
    const std::uint64_t n = std::uint64_t{1} << members.size();
    for (std::uint64_t m = 0; m < n; ++m) {
      SetVal s(universe_.size());
      for (std::size_t b = 0; b < members.size(); ++b)
        if (m >> b & 1) s.set(members[b]);
      senv_.emplace_back(f->var, std::move(s));
      bool v = eval(f->a.get());
      senv_.pop_back();
      if (v == ex) return ex;
    }
    return !ex;
  }

  bool eval_mm_q(const Node* f) {
    if (set_domain().count() > opt_.cap_traces)
      throw CapExceeded("sol enumeration over " + std::to_string(set_domain().count()) +
                        " traces exceeds the cap of " + std::to_string(opt_.cap_traces));
    auto sols = sol(f, f->var, f->pol, f->guard.get());
    bool ex = f->op == Op::ExistsMM;
    for (auto& s : sols) {
      senv_.emplace_back(f->var, s);
      bool v = eval(f->a.get());
      senv_.pop_back();
      if (v == ex) return ex;
    }
    return !ex;
  }

  // Sol depends only on the guard's free variables.
  std::string sol_key(const Node* guard, const std::string& X, Polarity pol) {
    std::string k = std::to_string(reinterpret_cast<std::uintptr_t>(guard)) + "|" + X +
                    (pol == Polarity::Min ? "m" : "M");
    Formula g(std::shared_ptr<const Node>{}, guard);  // non-owning alias
    for (auto& v : free_trace_vars(g)) k += "|t" + v + "=" + std::to_string(trace_of(v));
    for (auto& v : free_set_vars(g)) {
      if (v == X) continue;
      std::string bits;
      boost::to_string(set_of(v), bits);
      k += "|s" + v + "=" + bits;
    }
    k += opt_.semantics == Semantics::ClosedWorld ? "|cw" : "|std";
    return k;
  }
};

void require_sentence(const Formula& phi, const Assignment& free, bool allow_xa) {
  auto rep = check_sentence(phi, true);
  for (auto& v : rep.free_trace_vars)
    if (!free.traces.count(v)) throw Error("free trace variable '" + v + "'");
  for (auto& v : rep.free_set_vars)
    if (v != kDom && v != kAll && !free.sets.count(v))
      throw Error("free set variable '" + v + "'");
  if (!allow_xa && rep.free_set_vars.count(kAll))
    throw Error("closed-world semantics forbids ALL");
}

bool has_mm(const Formula& f) {
  if (!f) return false;
  if (f->op == Op::ExistsMM || f->op == Op::ForallMM) return true;
  return has_mm(f->a) || has_mm(f->b) || has_mm(f->guard);
}

}  // namespace

bool evaluate(const TraceSet& T, const Formula& phi, const EvalOptions& opt,
              const Assignment& free) {
  require_sentence(phi, free, opt.semantics == Semantics::Standard);
  Engine e(T, opt, free);
  return e.eval(phi.get());
}

bool eval_standard(const TraceSet& T, const Formula& phi, const TraceSet& ambient) {
  if (has_mm(phi)) throw Error("formula has min/max quantifiers; use eval_mm");
  EvalOptions o;
  o.semantics = Semantics::Standard;
  o.ambient = ambient;
  return evaluate(T, phi, o);
}

bool eval_closed_world(const TraceSet& T, const Formula& phi) {
  if (has_mm(phi)) throw Error("formula has min/max quantifiers; use eval_mm");
  EvalOptions o;
  o.semantics = Semantics::ClosedWorld;
  return evaluate(T, phi, o);
}

bool eval_mm(const TraceSet& T, const Formula& phi, Semantics sem,
             const std::optional<TraceSet>& ambient) {
  EvalOptions o;
  o.semantics = sem;
  o.ambient = ambient;
  return evaluate(T, phi, o);
}

std::vector<TraceSet> compute_sol(const TraceSet& T, const Assignment& pi, const std::string& X,
                                  Polarity pol, const Formula& guard, const EvalOptions& opt) {
  Assignment free = pi;
  free.sets.erase(X);
  auto rep = check_sentence(guard, true);
  for (auto& v : rep.free_trace_vars)
    if (!free.traces.count(v)) throw Error("unbound guard variable '" + v + "'");
  for (auto& v : rep.free_set_vars)
    if (v != X && v != kDom && v != kAll && !free.sets.count(v))
      throw Error("unbound guard variable '" + v + "'");
  Engine e(T, opt, free);
  std::vector<TraceSet> out;
  for (auto& s : e.sol(nullptr, X, pol, guard.get())) out.push_back(e.to_traceset(s));
  return out;
}

Verdict model_check_bounded(const TransitionSystem& ts, const Formula& phi, std::size_t stem_bound,
                            std::size_t loop_bound, const EvalOptions& opt) {
  if (stem_bound < 1 || loop_bound < 1) throw Error("bounds must be >= 1");
  TraceSet T = enumerate_lassos(ts, stem_bound, loop_bound);
  Verdict v;
  v.stem_bound = stem_bound;
  v.loop_bound = loop_bound;
  v.traces = T.size();
  v.value = evaluate(T, phi, opt);
  v.caveat = "bounded: evaluated on lassos with stem <= " + std::to_string(stem_bound) +
             " and loop <= " + std::to_string(loop_bound) + " only";
  if (opt.semantics == Semantics::Standard) v.caveat += "; relative to the supplied ambient";
  return v;
}

}  // namespace h2ltl

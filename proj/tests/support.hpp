#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "h2ltl/eval.hpp"
#include "h2ltl/formula.hpp"
#include "h2ltl/library.hpp"
#include "h2ltl/trace.hpp"

namespace h2ltl::testing {

// Every lasso over ap with stem <= s and loop <= p, canonical and deduplicated.
inline TraceSet lasso_space(const Alphabet& ap, std::size_t s, std::size_t p) {
  return enumerate_lassos(ts_full(ap), s, p);
}

// All subsets of `space` with between lo and hi members.
inline std::vector<TraceSet> universes(const TraceSet& space, std::size_t lo, std::size_t hi) {
  std::vector<TraceSet> out;
  const auto& m = space.members();
  std::vector<LassoTrace> cur;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (cur.size() >= lo) out.emplace_back(space.alphabet(), cur);
    if (cur.size() == hi) return;
    for (std::size_t j = i; j < m.size(); ++j) {
      cur.push_back(m[j]);
      go(j + 1);
      cur.pop_back();
    }
  };
  go(0);
  return out;
}

inline TraceSet with(const TraceSet& T, const std::vector<LassoTrace>& extra) {
  TraceSet out = T;
  for (auto& t : extra) out.insert(t);
  return out;
}

class FormulaGen {
 public:
  FormulaGen(std::uint32_t seed, std::vector<std::string> props) : rng_(seed), props_(std::move(props)) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  Formula body(const std::vector<std::string>& vars, int depth, int temporal_left = 99) {
    if (depth <= 0 || coin(0.25)) return atom(props_[pick(props_.size())], vars[pick(vars.size())]);
    int k = static_cast<int>(pick(temporal_left > 0 ? 8 : 4));
    switch (k) {
      case 0: return lnot(body(vars, depth - 1, temporal_left));
      case 1: return land(body(vars, depth - 1, temporal_left), body(vars, depth - 1, temporal_left));
      case 2: return lor(body(vars, depth - 1, temporal_left), body(vars, depth - 1, temporal_left));
      case 3: return implies(body(vars, depth - 1, temporal_left), body(vars, depth - 1, temporal_left));
      case 4: return next(body(vars, depth - 1, temporal_left - 1));
      case 5: return until(body(vars, depth - 1, temporal_left - 1), body(vars, depth - 1, temporal_left - 1));
      case 6: return eventually(body(vars, depth - 1, temporal_left - 1));
      default: return globally(body(vars, depth - 1, temporal_left - 1));
    }
  }

  // Sentence without ALL. Quantifier depth <= qdepth. mm = true turns every
  // set quantifier into a min/max quantifier with a generated guard.
  Formula sentence(int qdepth, bool mm, int body_depth = 2, int temporal = 99) {
    return quantified(qdepth, {}, {}, mm, body_depth, temporal);
  }

 private:
  std::mt19937 rng_;
  std::vector<std::string> props_;
  int counter_ = 0;

  std::string fresh(const char* base) { return base + std::to_string(counter_++); }

  Formula guard(const std::string& X, const std::vector<std::string>& tv, int body_depth) {
    std::string p = fresh("g");
    std::vector<std::string> vars = tv;
    vars.push_back(p);
    Formula b = body(vars, body_depth, 1);
    std::string w = fresh("w");
    switch (pick(4)) {
      case 0: return forall_trace(p, X, b);
      case 1: return exists_trace(p, X, b);
      case 2: return forall_trace(p, kDom, implies(b, in_set(p, X, props_, w)));
      default: return exists_trace(p, kDom, land(b, in_set(p, X, props_, w)));
    }
  }

  Formula quantified(int qdepth, std::vector<std::string> tv, std::vector<std::string> sv, bool mm,
                     int body_depth, int temporal) {
    if (qdepth <= 0 || (!tv.empty() && coin(0.2))) {
      if (tv.empty()) {
        std::string p = fresh("p");
        return exists_trace(p, kDom, body({p}, body_depth, temporal));
      }
      return body(tv, body_depth, temporal);
    }
    if (!tv.empty() && qdepth >= 2 && coin(0.15)) {
      Formula l = quantified(qdepth - 1, tv, sv, mm, body_depth, temporal);
      Formula r = quantified(qdepth - 1, tv, sv, mm, body_depth, temporal);
      return coin() ? land(l, r) : lor(lnot(l), r);
    }
    bool ex = coin();
    if (coin(0.35)) {
      std::string X = fresh("X");
      auto sv2 = sv;
      sv2.push_back(X);
      Formula b = quantified(qdepth - 1, tv, sv2, mm, body_depth, temporal);
      if (mm) {
        Polarity pol = coin() ? Polarity::Min : Polarity::Max;
        Formula g = guard(X, tv, 1);
        if (coin(0.3)) g = land(g, guard(X, tv, 1));
        return ex ? exists_mm(X, pol, g, b) : forall_mm(X, pol, g, b);
      }
      return ex ? exists_set(X, b) : forall_set(X, b);
    }
    std::string p = fresh("p");
    std::string R = kDom;
    if (!sv.empty() && coin(0.6)) R = sv[pick(sv.size())];
    auto tv2 = tv;
    tv2.push_back(p);
    Formula b = quantified(qdepth - 1, tv2, sv, mm, body_depth, temporal);
    return ex ? exists_trace(p, R, b) : forall_trace(p, R, b);
  }
};

}  // namespace h2ltl::testing

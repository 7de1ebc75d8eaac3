#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "h2ltl/formula.hpp"
#include "h2ltl/trace.hpp"

namespace h2ltl {

// Proposition names: + is "plus", - is "minus".
inline const std::vector<std::string> kAllSetsProps = {"minus", "plus", "s", "x"};
inline const std::vector<std::string> kArithProps = {"add", "arg1", "arg2", "mult", "res"};
Alphabet allsets_alphabet();
Alphabet arith_alphabet();

// psi1, psi2, psi3 over {x}; the model of their conjunction is {{}^n {x} {}^w}.
std::vector<Formula> psi_example31_parts();
Formula psi_example31();

// The five conjuncts over D; `props` is the alphabet used by the |> shorthand.
std::vector<Formula> phi_allSets_parts(const std::vector<std::string>& props = kAllSetsProps);
Formula phi_allSets(const std::vector<std::string>& props = kAllSetsProps);

// Free set variable Z. max uses a max-quantifier over contradiction-free sets,
// min quantifies minimal complete contradiction-free sets.
std::vector<Formula> phi_allSets_max_parts(const std::string& Z = "Z",
                                           const std::vector<std::string>& props = kAllSetsProps);
std::vector<Formula> phi_allSets_min_parts(const std::string& Z = "Z",
                                           const std::vector<std::string>& props = kAllSetsProps);
Formula phi_allSets_mm(Polarity pol, const std::string& Z = "Z",
                       const std::vector<std::string>& props = kAllSetsProps);

// Common knowledge of `body` (free trace variable body_var) among agents with the
// given observation sets. lfp = true gives the min-quantifier form.
Formula phi_ck(const Alphabet& ap, const std::vector<std::vector<std::string>>& obs,
               const Formula& body, const std::string& body_var, bool lfp);

// Over {sharp, x}.
Formula phi_prefs();

TransitionSystem ts_allSets();
TransitionSystem ts_full(const Alphabet& ap);

// Add and mult traces (a, b, c) with every position below bound; the letters use
// the arithmetic propositions, re-expressed over `ap` when given.
TraceSet plus_times(std::size_t bound, const std::optional<Alphabet>& ap = std::nullopt);
// {}^n {x} {}^w over ap.
LassoTrace singleton_trace(std::size_t n, const Alphabet& ap, const std::string& prop = "x");

struct LibraryArtifact {
  std::optional<Formula> formula;
  std::optional<TransitionSystem> ts;
  std::optional<TraceSet> traces;
  Alphabet ap;
};

// Params: ap=a,b (ts_full, phi_ck), bound=N (plus_times), Z=name (mm variants),
// obs=a,b;c (phi_ck), body=<formula over pi> (phi_ck), lfp=0|1 (phi_ck).
LibraryArtifact library(const std::string& name, const std::map<std::string, std::string>& params);
std::vector<std::string> library_names();

}  // namespace h2ltl

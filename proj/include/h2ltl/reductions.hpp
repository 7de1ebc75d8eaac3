#pragma once

#include <map>
#include <string>
#include <vector>

#include "h2ltl/arith.hpp"
#include "h2ltl/formula.hpp"
#include "h2ltl/lfp.hpp"
#include "h2ltl/trace.hpp"

namespace h2ltl {

// ---- closed-world and min/max quantifiers ----

// Guards every set quantifier with "X is a subset of D". The guarded form is
// emitted as is; prenex = true pulls the quantifiers to the front, which is only
// exact when no quantifier range can be empty.
Formula cw_to_standard(const Formula& phi, const Alphabet& ap, bool prenex = false);

// Replaces every min/max quantifier by a plain one plus an explicit
// minimality (maximality) clause over strict subsets (supersets).
Formula mm_desugar(const Formula& phi, const Alphabet& ap, bool prenex = false);

// strictSub(Xs, X) = (forall pi in Xs. pi |> X) & (exists pi in X. !pi |> Xs)
Formula strict_subset(const std::string& Xs, const std::string& X, const Alphabet& ap);

std::string marker_name(std::size_t i);  // m0, m1, ...
// ap, the markers m0..m(k-1) and the allSets propositions
Alphabet ext_alphabet(const Alphabet& ap, std::size_t k);

struct MinMaxEncoding {
  Formula phi;      // both guards and marked trace quantifiers
  Formula phi_ext;  // models have the shape ext(T)
  Alphabet ap;      // extended alphabet
  std::vector<std::string> set_vars;  // X_i in binding order; marker i belongs to set_vars[i]
};

MinMaxEncoding minmax_encode(const Formula& phi, const Alphabet& ap, Polarity pol);

// Only the trace-quantifier half of the encoding: quantifiers over X get the
// marker conjunct / antecedent of marker_of[X].
Formula mark_trace_quantifiers(const Formula& phi,
                               const std::map<std::string, std::string>& marker_of);

Formula phi_part(std::size_t i, std::size_t k, const std::string& X, const Alphabet& ap,
                 const Alphabet& ext_ap);

enum class ExtMode {
  Injective,  // t ^ f(t) with f an injection into the sample
  AllPairs,   // t ^ t' for every t' in the sample
};

// T over ap, sample over the allSets propositions; result over ext_alphabet(ap, k).
TraceSet ext_traceset(const TraceSet& T, std::size_t k, const TraceSet& sample,
                      ExtMode mode = ExtMode::Injective);
// T' with enc_i(T') = S: members of S marked by m_i, the rest of T unmarked.
TraceSet mark_subset(const TraceSet& S, const TraceSet& T, std::size_t i, std::size_t k,
                     const TraceSet& sample);
// AP-projection of the m_i-marked members.
TraceSet enc_marked(const TraceSet& Tp, std::size_t i, const Alphabet& ap);

TransitionSystem ext_transition_system(const TransitionSystem& ts, std::size_t k);

// ---- arithmetic ----

// Second-order variable standing for trace variable pi, third-order one for set X.
std::string ar_trace_name(const std::string& pi);
std::string ar_set_name(const std::string& X);
inline const std::string kYYa = "YY_ALL";
inline const std::string kYYd = "YY_D";

// ar(phi)(0) with YY_ALL and YY_D free.
ArithFormula ar_core(const Formula& phi, const Alphabet& ap);
// exists YY_ALL, YY_D. allTraces(YY_ALL) & onlyTraces(YY_D) & ar(phi)(0)
ArithFormula ar_translate(const Formula& phi, const Alphabet& ap);

ArithFormula fssat_arith_encode(const Formula& phi, const Alphabet& ap);
ArithFormula mc_arith_encode(const TransitionSystem& ts, const Formula& phi);

// ar_T(phi)(0, {}) using witness trees for fixpoint membership; second-order only.
ArithFormula lfp_mc_arith_encode(const TransitionSystem& ts, const LfpSentence& phi);

// ---- arithmetic inside the logic ----

// Trace variable standing for arithmetic variable v.
std::string hyp_trace_name(const std::string& v);

struct HypOptions {
  std::map<std::string, std::string> marker_of;  // third-order name -> marker proposition
  std::string arith_set = "Xarith";
};

// hyp(psi). psi may use pair terms and numerals; they are replaced first.
Formula hyp_translate(const ArithFormula& psi, const HypOptions& opt);

// add (mult) everywhere, arg1, arg2 and res exactly at position 0
Formula psi_s(const std::string& pi_add, const std::string& pi_mult,
              const std::vector<std::string>& other_props);
// Least-fixpoint spec whose value over a model with enough arithmetic traces
// is the set of correctly formatted add and mult traces.
FixpointSpec arith_fixpoint(const std::string& X, const std::string& pi_add,
                            const std::string& pi_mult,
                            const std::vector<std::string>& other_props);
Formula phi_arith_guard(const std::string& X, const std::string& pi_add,
                        const std::string& pi_mult, const Alphabet& ap);

struct Sigma12Encoding {
  Formula phi;
  Alphabet ap;
  std::vector<std::string> third_order;  // Y_i in marker order m1..mk
};

// psi has the free first-order variable free_var and free third-order variables.
Sigma12Encoding sigma12_encode(const ArithFormula& psi, Nat n, const std::string& free_var = "x");

// ---- finite-state satisfiability to model checking ----

inline const std::string kDollar = "dollar";
inline const std::string kSharp = "sharp";

// Fresh initial vertex labeled {dollar} with a self-loop and edges to the old initial vertices.
TransitionSystem ts_single_initial(const TransitionSystem& ts);
// Adds X to each maximal quantifier-free subformula and restricts trace
// quantifiers to traces with exactly one leading dollar.
Formula phi_single_initial(const Formula& phi);

Formula rel_rewrite(const Formula& phi, const Alphabet& ap, const std::string& prefixes);

struct FssatToMc {
  TransitionSystem ts;  // complete system over ap
  Formula phi;
  Alphabet ap;
};
FssatToMc fssat_to_mc(const Formula& phi, const Alphabet& ap);

}  // namespace h2ltl

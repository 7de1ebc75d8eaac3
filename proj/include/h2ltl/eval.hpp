#pragma once

#include <optional>
#include <string>
#include <vector>

#include "h2ltl/formula.hpp"
#include "h2ltl/trace.hpp"

namespace h2ltl {

struct CapExceeded : Error {
  using Error::Error;
};

// Truth of every position 0..stem+period-1 of the joint lasso; position
// stem+period-1 is followed by position stem.
struct BodyTruth {
  std::size_t stem = 0, period = 1;
  std::vector<bool> values;
  bool at(std::size_t j) const {
    return j < values.size() ? values[j] : values[stem + (j - stem) % period];
  }
};

BodyTruth body_truth(const Assignment& pi, const Formula& body, const Alphabet& ap);
bool eval_body(const Assignment& pi, const Formula& body, const Alphabet& ap);

enum class Semantics { Standard, ClosedWorld };

struct EvalOptions {
  Semantics semantics = Semantics::ClosedWorld;
  std::optional<TraceSet> ambient;  // stands in for ALL; set-quantifier domain under Standard
  std::size_t cap_traces = default_cap_traces();
  std::size_t cap_assignments = std::size_t{1} << 20;

  static std::size_t default_cap_traces();  // 20, or $H2LTL_CAP_TRACES
};

// General entry point: T binds D, `free` binds any further free variables.
// MM quantifiers are evaluated through their sol sets.
bool evaluate(const TraceSet& T, const Formula& phi, const EvalOptions& opt,
              const Assignment& free = {});

bool eval_standard(const TraceSet& T, const Formula& phi, const TraceSet& ambient);
bool eval_closed_world(const TraceSet& T, const Formula& phi);
bool eval_mm(const TraceSet& T, const Formula& phi, Semantics sem,
             const std::optional<TraceSet>& ambient = std::nullopt);

// Minimal (or maximal) sets X over the mode's domain with pi[X -> set] |= guard.
// Sorted by the lexicographic order of member lists.
std::vector<TraceSet> compute_sol(const TraceSet& T, const Assignment& pi, const std::string& X,
                                  Polarity pol, const Formula& guard, const EvalOptions& opt);

struct Verdict {
  bool value = false;
  std::size_t stem_bound = 0, loop_bound = 0, traces = 0;
  std::string caveat;
};

Verdict model_check_bounded(const TransitionSystem& ts, const Formula& phi, std::size_t stem_bound,
                            std::size_t loop_bound, const EvalOptions& opt);

}  // namespace h2ltl

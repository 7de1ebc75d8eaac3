#pragma once

#include <optional>
#include <string>
#include <vector>

#include "h2ltl/eval.hpp"
#include "h2ltl/formula.hpp"
#include "h2ltl/trace.hpp"

namespace h2ltl {

struct TraceQuant {
  bool existential = true;
  std::string var, range;
  bool operator==(const TraceQuant&) const = default;
};

// One min-guarded set quantifier Q (Y, min, seeds & forall steps. body -> target |> Y).
struct FixpointSpec {
  std::string Y;
  bool existential = true;
  std::vector<std::string> seeds;       // trace variables whose values are put into Y
  std::vector<std::string> seed_fresh;  // fresh names used by each seed's |> expansion
  std::vector<TraceQuant> steps;        // universally quantified step variables and ranges
  Formula step_body;
  std::size_t m = 1;  // 1-based index of the step variable added to Y
  std::string target_fresh;
};

struct LfpSentence {
  Alphabet ap;
  std::vector<std::vector<TraceQuant>> blocks;  // k+1 blocks
  std::vector<FixpointSpec> fixpoints;          // k fixpoints, fixpoints[j-1] follows blocks[j-1]
  Formula matrix;

  std::size_t k() const { return fixpoints.size(); }
  bool uses_all() const;
  int fixpoint_index(const std::string& Y) const;  // 1-based, 0 if none
};

struct ShapeError : Error {
  using Error::Error;
};

LfpSentence validate_lfp_shape(const Formula& phi, const Alphabet& ap);
Formula recompose(const LfpSentence& s);
Formula guard_formula(const FixpointSpec& f, const Alphabet& ap);
bool same_decomposition(const LfpSentence& a, const LfpSentence& b);

// Pi binds D (and ALL when used), Y_1..Y_{j-1} and the trace variables of blocks 1..j.
struct LfpContext {
  const LfpSentence* phi;
  Assignment pi;
};

TraceSet lfp_step(const LfpContext& ctx, std::size_t j, const TraceSet& S);

struct FixpointTrace {
  std::vector<TraceSet> stages;  // stages[l-1] = S_l; the last stage is the fixpoint
  TraceSet result;
  std::size_t stage_of(const LassoTrace& t) const;  // 0 if absent
};

FixpointTrace compute_lfp(const LfpContext& ctx, std::size_t j);

bool eval_lfp_sentence(const TraceSet& T, const LfpSentence& phi,
                       const std::optional<TraceSet>& ambient = std::nullopt);

inline constexpr int kTagAll = -1;
inline constexpr int kTagDom = -2;

struct WitnessTree {
  LassoTrace trace;
  int tag = 1;  // fixpoint index 1..k, kTagAll, or kTagDom
  std::vector<WitnessTree> children;
  std::size_t height() const;
  std::vector<LassoTrace> traces() const;
};

std::optional<WitnessTree> build_witness_tree(const LfpContext& ctx, const LassoTrace& t,
                                              std::size_t j);
bool check_witness_tree(const LfpContext& ctx, const WitnessTree& b, const LassoTrace& t,
                        std::size_t j);

std::string format_witness_tree(const WitnessTree& b, const Alphabet& ap);

}  // namespace h2ltl

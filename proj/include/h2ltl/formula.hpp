#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "h2ltl/trace.hpp"

namespace h2ltl {

enum class Op {
  Atom,
  Not,
  Or,
  And,
  Implies,
  Iff,
  Xor,
  Next,
  Until,
  Eventually,
  Globally,
  ExistsSet,
  ForallSet,
  ExistsMM,
  ForallMM,
  ExistsTrace,
  ForallTrace,
};

enum class Polarity { Min, Max };

struct Node;
using Formula = std::shared_ptr<const Node>;

// Atom: name = proposition, var = trace variable.
// *Trace: var = bound trace variable, range = set variable.
// *Set / *MM: var = bound set variable; MM adds pol and guard.
// Unary nodes use a; binary nodes use a and b; quantifiers keep their body in a.
struct Node {
  Op op = Op::Atom;
  std::string name;
  std::string var;
  std::string range;
  Polarity pol = Polarity::Min;
  Formula guard;
  Formula a, b;
};

inline const std::string kAll = "ALL";
inline const std::string kDom = "D";

// constructors
Formula atom(const std::string& prop, const std::string& trace_var);
Formula lnot(Formula f);
Formula lor(Formula a, Formula b);
Formula land(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula lxor(Formula a, Formula b);
Formula next(Formula f);
Formula until(Formula a, Formula b);
Formula eventually(Formula f);
Formula globally(Formula f);
Formula exists_set(const std::string& X, Formula body);
Formula forall_set(const std::string& X, Formula body);
Formula exists_mm(const std::string& X, Polarity p, Formula guard, Formula body);
Formula forall_mm(const std::string& X, Polarity p, Formula guard, Formula body);
Formula exists_trace(const std::string& pi, const std::string& X, Formula body);
Formula forall_trace(const std::string& pi, const std::string& X, Formula body);

// left-nested; throws on empty input
Formula conj(const std::vector<Formula>& fs);
Formula disj(const std::vector<Formula>& fs);

// G AND_{p in props} (p[a] <-> p[b])
Formula trace_equal(const std::string& a, const std::string& b,
                    const std::vector<std::string>& props);
// exists fresh in X. trace_equal(pi, fresh, props)
Formula in_set(const std::string& pi, const std::string& X, const std::vector<std::string>& props,
               const std::string& fresh);

bool is_quantifier(Op op);
bool is_trace_quantifier(Op op);
bool is_set_quantifier(Op op);  // plain and MM
bool is_temporal(Op op);
bool is_existential(Op op);
bool contains_quantifier(const Formula& f);
bool structurally_equal(const Formula& a, const Formula& b);
std::size_t node_count(const Formula& f);
std::size_t temporal_depth(const Formula& f);
std::size_t quantifier_depth(const Formula& f);

struct ParseError : Error {
  int line, column;
  ParseError(const std::string& msg, int line, int column);
};

Formula parse_formula(const std::string& text, const Alphabet& ap);
std::string print_formula(const Formula& f);
std::string dump_ast(const Formula& f);

// Expansion to {Not, Or, Next, Until} in the body; quantifiers kept.
Formula desugar(const Formula& f);

std::set<std::string> free_trace_vars(const Formula& f);
std::set<std::string> free_set_vars(const Formula& f);  // includes ALL / D when used
std::set<std::string> all_names(const Formula& f);

Formula alpha_rename(const Formula& f);

// Pulls all quantifiers to the front (textual order). Exact whenever every
// quantifier range and every sol set met during evaluation is nonempty.
Formula normalize_prenex(const Formula& f);

Formula rename_free_set(const Formula& f, const std::string& from, const std::string& to);
Formula rename_free_trace(const Formula& f, const std::string& from, const std::string& to);

// Fresh name derived from base not in used (appends _1, _2, ...).
std::string fresh_name(const std::string& base, const std::set<std::string>& used);

struct SentenceReport {
  std::set<std::string> free_trace_vars;
  std::set<std::string> free_set_vars;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

SentenceReport check_sentence(const Formula& f, bool allow_xa);

}  // namespace h2ltl

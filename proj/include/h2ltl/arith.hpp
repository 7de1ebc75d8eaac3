#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "h2ltl/trace.hpp"

namespace h2ltl {

using Nat = std::uint64_t;
using NatSet = std::vector<Nat>;  // sorted, unique
using NatFamily = std::vector<NatSet>;  // sorted, unique

// ---- terms ----
enum class TermKind { Var, Num, Pair };
struct Term;
using TermP = std::shared_ptr<const Term>;
struct Term {
  TermKind kind = TermKind::Var;
  std::string name;
  Nat value = 0;
  TermP a, b;
};

TermP tvar(const std::string& x);
TermP tnum(Nat n);
TermP tpair(TermP a, TermP b);

// ---- formulas ----
enum class AOp { True, False, Add, Mul, Less, Eq, In, In3, Not, And, Or, Implies, Iff, Exists, Forall };

struct ANode;
using ArithFormula = std::shared_ptr<const ANode>;

// Add/Mul: t1 op t2 = t3.  Less/Eq: t1, t2.  In: t1 in set2.  In3: set2 in set3.
// Exists/Forall: order 1..3, var, body in a.
struct ANode {
  AOp op = AOp::True;
  int order = 1;
  std::string var;
  std::string set2, set3;
  TermP t1, t2, t3;
  ArithFormula a, b;
};

ArithFormula a_true();
ArithFormula a_false();
ArithFormula a_add(TermP x, TermP y, TermP z);
ArithFormula a_mul(TermP x, TermP y, TermP z);
ArithFormula a_less(TermP x, TermP y);
ArithFormula a_eq(TermP x, TermP y);
ArithFormula a_in(TermP x, const std::string& Y);
ArithFormula a_in3(const std::string& Y, const std::string& YY);
ArithFormula a_not(ArithFormula f);
ArithFormula a_and(ArithFormula f, ArithFormula g);
ArithFormula a_or(ArithFormula f, ArithFormula g);
ArithFormula a_implies(ArithFormula f, ArithFormula g);
ArithFormula a_iff(ArithFormula f, ArithFormula g);
ArithFormula a_exists(int order, const std::string& v, ArithFormula body);
ArithFormula a_forall(int order, const std::string& v, ArithFormula body);
ArithFormula a_conj(const std::vector<ArithFormula>& fs);  // empty -> true
ArithFormula a_disj(const std::vector<ArithFormula>& fs);  // empty -> false
// x >= y, written !(x < y)
ArithFormula a_ge(TermP x, TermP y);

bool arith_equal(const ArithFormula& f, const ArithFormula& g);
std::size_t arith_node_count(const ArithFormula& f);
int max_quantifier_order(const ArithFormula& f);  // 0 if quantifier-free
// Throws if a name is used at two different orders.
void check_orders(const ArithFormula& f);

std::string print_arith(const ArithFormula& f);
std::string dump_arith(const ArithFormula& f);
ArithFormula parse_arith(const std::string& text);

// pair(t,u) atoms rewritten into + and * atoms under fresh first-order existentials.
ArithFormula expand_pairs(const ArithFormula& f);

// ---- pairing & trace codes ----
Nat cantor_pair(Nat i, Nat j);  // throws on overflow
std::pair<Nat, Nat> cantor_unpair(Nat n);

// e maps proposition names to 0..|AP|-1; default is the alphabet's own order.
class PropCode {
 public:
  explicit PropCode(const Alphabet& ap);
  PropCode(const Alphabet& ap, const std::vector<std::string>& order);  // order = e^-1
  Nat code(const std::string& p) const;
  const Alphabet& alphabet() const { return ap_; }
  const std::vector<std::string>& order() const { return order_; }

 private:
  Alphabet ap_;
  std::vector<std::string> order_;
};

bool trace_code_contains(const LassoTrace& t, const PropCode& e, Nat n);
NatSet encode_trace(const LassoTrace& t, const PropCode& e, Nat limit);  // S_t cap [0, limit)
// Smallest limit whose restriction captures every position < positions.
Nat code_limit(std::size_t positions, std::size_t nap);

// ---- fresh names ----
class FreshNames {
 public:
  FreshNames() = default;
  explicit FreshNames(std::set<std::string> used) : used_(std::move(used)) {}
  std::string operator()(const std::string& base);
  void reserve(const std::string& n) { used_.insert(n); }

 private:
  std::set<std::string> used_;
};

// Membership callback: builds "t in <the set being described>".
using Member = std::function<ArithFormula(TermP)>;
Member member_of(const std::string& Y);

// ---- library ----
ArithFormula ar_is_trace(const Member& Y, std::size_t nap, FreshNames& fresh);
ArithFormula ar_only_traces(const std::string& YY, std::size_t nap, FreshNames& fresh);
ArithFormula ar_all_traces(const std::string& YY, std::size_t nap, FreshNames& fresh);
ArithFormula ar_is_ts(const std::string& n, const std::string& E, const std::string& I,
                      const std::string& L, std::size_t nap, FreshNames& fresh);
ArithFormula ar_is_path(const std::string& P, const std::string& n, const std::string& E,
                        const std::string& I, FreshNames& fresh);
ArithFormula ar_trace_of(const Member& T, const std::string& P, const std::string& L,
                         FreshNames& fresh);
// Variants with the system hardcoded.
ArithFormula ar_is_path_ts(const Member& Y, const TransitionSystem& ts, FreshNames& fresh);
ArithFormula ar_in_ts(const Member& Y, const TransitionSystem& ts, const PropCode& e,
                      FreshNames& fresh);
// A' = A with slot k replaced by Z.
ArithFormula ar_update(const std::string& A, const std::string& A2, const std::string& Z, Nat k,
                       FreshNames& fresh);

struct ArithLibParams {
  std::size_t nap = 1;
  std::optional<TransitionSystem> ts;
  Nat slot = 0;
};
// isTrace, onlyTraces, allTraces, isTS, isPath, traceOf, isPath_T, phi_T, update
ArithFormula arith_library(const std::string& name, const ArithLibParams& p);
std::vector<std::string> arith_library_names();

// ---- bounded evaluation ----
struct ScopeBounds {
  Nat first_bound = 0;
  std::optional<NatFamily> second_universe;
  std::optional<std::vector<NatFamily>> third_universe;
};

struct ArithEnv {
  std::map<std::string, Nat> first;
  std::map<std::string, NatSet> second;
  std::map<std::string, NatFamily> third;
};

struct ArithResult {
  bool value = false;
  std::string caveat = "bounded";
};

ArithResult eval_arith_bounded(const ArithFormula& f, const ScopeBounds& b,
                               const ArithEnv& env = {});

struct StabilityReport {
  bool small = false, large = false;
  bool stable() const { return small == large; }
};
StabilityReport recheck_stability(const ArithFormula& f, const ScopeBounds& small,
                                  const ScopeBounds& large, const ArithEnv& env = {});

NatFamily powerset_family(Nat first_bound);  // every subset of [0, first_bound); first_bound <= 4
NatFamily normalize_family(NatFamily f);

}  // namespace h2ltl

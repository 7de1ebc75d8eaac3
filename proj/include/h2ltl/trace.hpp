#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace h2ltl {

using Letter = std::uint32_t;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A finite, sorted set of proposition names. Letters are bitmasks over it.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> props);

  const std::vector<std::string>& props() const { return props_; }
  std::size_t size() const { return props_.size(); }
  bool empty() const { return props_.empty(); }
  bool contains(const std::string& p) const;
  int index(const std::string& p) const;  // -1 if absent
  Letter bit(const std::string& p) const;
  Letter full() const;
  bool subset_of(const Alphabet& other) const;
  bool disjoint(const Alphabet& other) const;
  Alphabet unite(const Alphabet& other) const;
  Alphabet intersect(const Alphabet& other) const;

  // Re-express a letter over this alphabet as a letter over `to` (dropping
  // propositions not in `to`).
  Letter translate(Letter l, const Alphabet& to) const;

  std::string format_letter(Letter l) const;
  Letter parse_letter(const std::string& text) const;

  auto operator<=>(const Alphabet&) const = default;

 private:
  std::vector<std::string> props_;
};

// stem . loop^omega in canonical form.
struct LassoTrace {
  std::vector<Letter> stem;
  std::vector<Letter> loop;

  Letter at(std::size_t i) const {
    return i < stem.size() ? stem[i] : loop[(i - stem.size()) % loop.size()];
  }
  std::vector<Letter> unfold(std::size_t n) const;

  auto operator<=>(const LassoTrace&) const = default;
};

LassoTrace canonicalize(std::vector<Letter> stem, std::vector<Letter> loop);
LassoTrace project(const LassoTrace& t, const Alphabet& from, const Alphabet& to);
LassoTrace pointwise_union(const LassoTrace& t, const Alphabet& ap, const LassoTrace& u,
                           const Alphabet& ap2);
LassoTrace shift(const LassoTrace& t, std::size_t j);

std::string format_trace(const LassoTrace& t, const Alphabet& ap);
LassoTrace parse_trace(const std::string& line, const Alphabet& ap);

class TraceSet {
 public:
  TraceSet() = default;
  explicit TraceSet(Alphabet ap) : ap_(std::move(ap)) {}
  TraceSet(Alphabet ap, std::vector<LassoTrace> members);

  const Alphabet& alphabet() const { return ap_; }
  const std::vector<LassoTrace>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(const LassoTrace& t) const;
  int index_of(const LassoTrace& t) const;
  void insert(const LassoTrace& t);
  bool subset_of(const TraceSet& o) const;
  TraceSet unite(const TraceSet& o) const;

  bool operator==(const TraceSet& o) const { return ap_ == o.ap_ && members_ == o.members_; }

 private:
  Alphabet ap_;
  std::vector<LassoTrace> members_;  // sorted, unique
};

TraceSet project(const TraceSet& t, const Alphabet& to);

std::string format_traceset(const TraceSet& t);
// Lines `stem ; loop`; `aps:` header optional when `ap` is provided.
TraceSet parse_traceset(const std::string& text, const std::optional<Alphabet>& ap = std::nullopt);

struct TransitionSystem {
  Alphabet ap;
  std::vector<std::vector<int>> succ;  // sorted, unique
  std::vector<bool> initial;
  std::vector<Letter> label;

  std::size_t num_vertices() const { return succ.size(); }
  std::size_t num_edges() const;
  std::size_t num_initial() const;
  int add_vertex(Letter l, bool init);
  void add_edge(int from, int to);
  void validate() const;  // throws if some vertex has no successor
};

std::string format_ts(const TransitionSystem& ts);
TransitionSystem parse_ts(const std::string& text);

TraceSet enumerate_lassos(const TransitionSystem& ts, std::size_t stem_bound,
                          std::size_t loop_bound);

struct Assignment {
  std::map<std::string, LassoTrace> traces;
  std::map<std::string, TraceSet> sets;
};

Assignment shift(const Assignment& a, std::size_t j);

}  // namespace h2ltl

#include "h2ltl/trace.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace h2ltl {

Alphabet::Alphabet(std::vector<std::string> props) : props_(std::move(props)) {
  std::sort(props_.begin(), props_.end());
  props_.erase(std::unique(props_.begin(), props_.end()), props_.end());
  if (props_.size() > 32) throw Error("alphabet larger than 32 propositions");
  for (auto& p : props_)
    if (p.empty()) throw Error("empty proposition name");
}

bool Alphabet::contains(const std::string& p) const { return index(p) >= 0; }

int Alphabet::index(const std::string& p) const {
  auto it = std::lower_bound(props_.begin(), props_.end(), p);
  if (it == props_.end() || *it != p) return -1;
  return static_cast<int>(it - props_.begin());
}

Letter Alphabet::bit(const std::string& p) const {
  int i = index(p);
  if (i < 0) throw Error("unknown proposition '" + p + "'");
  return Letter{1} << i;
}

Letter Alphabet::full() const {
  return props_.size() == 32 ? ~Letter{0} : (Letter{1} << props_.size()) - 1;
}

bool Alphabet::subset_of(const Alphabet& o) const {
  return std::includes(o.props_.begin(), o.props_.end(), props_.begin(), props_.end());
}

bool Alphabet::disjoint(const Alphabet& o) const {
  for (auto& p : props_)
    if (o.contains(p)) return false;
  return true;
}

Alphabet Alphabet::unite(const Alphabet& o) const {
  auto v = props_;
  v.insert(v.end(), o.props_.begin(), o.props_.end());
  return Alphabet(std::move(v));
}

Alphabet Alphabet::intersect(const Alphabet& o) const {
  std::vector<std::string> v;
  for (auto& p : props_)
    if (o.contains(p)) v.push_back(p);
  return Alphabet(std::move(v));
}

Letter Alphabet::translate(Letter l, const Alphabet& to) const {
  Letter out = 0;
  for (std::size_t i = 0; i < props_.size(); ++i)
    if (l >> i & 1) {
      int j = to.index(props_[i]);
      if (j >= 0) out |= Letter{1} << j;
    }
  return out;
}

std::string Alphabet::format_letter(Letter l) const {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < props_.size(); ++i)
    if (l >> i & 1) {
      if (!first) s += ",";
      s += props_[i];
      first = false;
    }
  return s + "}";
}

Letter Alphabet::parse_letter(const std::string& text) const {
  auto b = text.find('{');
  auto e = text.rfind('}');
  if (b == std::string::npos || e == std::string::npos || e < b)
    throw Error("malformed letter '" + text + "'");
  Letter l = 0;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) l |= bit(cur);
    cur.clear();
  };
  for (auto i = b + 1; i < e; ++i) {
    char c = text[i];
    if (c == ',' || std::isspace(static_cast<unsigned char>(c)))
      flush();
    else
      cur += c;
  }
  flush();
  return l;
}

std::vector<Letter> LassoTrace::unfold(std::size_t n) const {
  std::vector<Letter> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = at(i);
  return v;
}

LassoTrace canonicalize(std::vector<Letter> stem, std::vector<Letter> loop) {
  if (loop.empty()) throw Error("lasso loop must be nonempty");
  std::size_t n = loop.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = loop[i] == loop[i - p];
    if (ok) {
      loop.resize(p);
      break;
    }
  }
  while (!stem.empty() && stem.back() == loop.back()) {
    stem.pop_back();
    std::rotate(loop.rbegin(), loop.rbegin() + 1, loop.rend());
  }
  return LassoTrace{std::move(stem), std::move(loop)};
}

LassoTrace project(const LassoTrace& t, const Alphabet& from, const Alphabet& to) {
  if (!to.subset_of(from)) throw Error("projection alphabet is not a subset");
  auto f = [&](Letter l) { return from.translate(l, to); };
  std::vector<Letter> s, l;
  for (auto x : t.stem) s.push_back(f(x));
  for (auto x : t.loop) l.push_back(f(x));
  return canonicalize(std::move(s), std::move(l));
}

LassoTrace pointwise_union(const LassoTrace& t, const Alphabet& ap, const LassoTrace& u,
                           const Alphabet& ap2) {
  if (!ap.disjoint(ap2)) throw Error("pointwise union needs disjoint alphabets");
  Alphabet all = ap.unite(ap2);
  std::size_t S = std::max(t.stem.size(), u.stem.size());
  std::size_t P = std::lcm(t.loop.size(), u.loop.size());
  std::vector<Letter> s, l;
  for (std::size_t i = 0; i < S + P; ++i) {
    Letter x = ap.translate(t.at(i), all) | ap2.translate(u.at(i), all);
    (i < S ? s : l).push_back(x);
  }
  return canonicalize(std::move(s), std::move(l));
}

LassoTrace shift(const LassoTrace& t, std::size_t j) {
  if (j <= t.stem.size())
    return canonicalize({t.stem.begin() + j, t.stem.end()}, t.loop);
  std::size_t r = (j - t.stem.size()) % t.loop.size();
  std::vector<Letter> l(t.loop.begin() + r, t.loop.end());
  l.insert(l.end(), t.loop.begin(), t.loop.begin() + r);
  return canonicalize({}, std::move(l));
}

std::string format_trace(const LassoTrace& t, const Alphabet& ap) {
  std::string s;
  for (auto x : t.stem) s += ap.format_letter(x) + " ";
  s += ";";
  for (auto x : t.loop) s += " " + ap.format_letter(x);
  return s;
}

static std::vector<std::string> split_letters(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (text[i] != '{') throw Error("expected '{' in trace text: " + text);
    auto e = text.find('}', i);
    if (e == std::string::npos) throw Error("unterminated letter in: " + text);
    out.push_back(text.substr(i, e - i + 1));
    i = e + 1;
  }
  return out;
}

LassoTrace parse_trace(const std::string& line, const Alphabet& ap) {
  auto semi = line.find(';');
  if (semi == std::string::npos) throw Error("trace needs 'stem ; loop': " + line);
  std::vector<Letter> s, l;
  for (auto& w : split_letters(line.substr(0, semi))) s.push_back(ap.parse_letter(w));
  for (auto& w : split_letters(line.substr(semi + 1))) l.push_back(ap.parse_letter(w));
  if (l.empty()) throw Error("trace loop is empty: " + line);
  return canonicalize(std::move(s), std::move(l));
}

TraceSet::TraceSet(Alphabet ap, std::vector<LassoTrace> members)
    : ap_(std::move(ap)), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool TraceSet::contains(const LassoTrace& t) const {
  return std::binary_search(members_.begin(), members_.end(), t);
}

int TraceSet::index_of(const LassoTrace& t) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), t);
  if (it == members_.end() || *it != t) return -1;
  return static_cast<int>(it - members_.begin());
}

void TraceSet::insert(const LassoTrace& t) {
  auto it = std::lower_bound(members_.begin(), members_.end(), t);
  if (it == members_.end() || *it != t) members_.insert(it, t);
}

bool TraceSet::subset_of(const TraceSet& o) const {
  return std::includes(o.members_.begin(), o.members_.end(), members_.begin(), members_.end());
}

TraceSet TraceSet::unite(const TraceSet& o) const {
  if (!(ap_ == o.ap_)) throw Error("union of trace sets over different alphabets");
  auto v = members_;
  v.insert(v.end(), o.members_.begin(), o.members_.end());
  return TraceSet(ap_, std::move(v));
}

TraceSet project(const TraceSet& t, const Alphabet& to) {
  std::vector<LassoTrace> v;
  for (auto& m : t.members()) v.push_back(project(m, t.alphabet(), to));
  return TraceSet(to, std::move(v));
}

std::string format_traceset(const TraceSet& t) {
  std::string s = "aps:";
  for (auto& p : t.alphabet().props()) s += " " + p;
  s += "\n";
  for (auto& m : t.members()) s += format_trace(m, t.alphabet()) + "\n";
  return s;
}

static std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

static Alphabet parse_aps_line(const std::string& line) {
  std::istringstream in(line.substr(4));
  std::vector<std::string> v;
  for (std::string w; in >> w;) v.push_back(w);
  return Alphabet(v);
}

TraceSet parse_traceset(const std::string& text, const std::optional<Alphabet>& ap) {
  std::istringstream in(text);
  std::optional<Alphabet> alpha = ap;
  std::vector<LassoTrace> v;
  for (std::string line; std::getline(in, line);) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("aps:", 0) == 0) {
      Alphabet a = parse_aps_line(line);
      if (alpha && !(*alpha == a)) throw Error("trace file alphabet mismatch");
      alpha = a;
      continue;
    }
    if (!alpha) throw Error("trace set without 'aps:' header");
    v.push_back(parse_trace(line, *alpha));
  }
  if (!alpha) throw Error("trace set without 'aps:' header");
  return TraceSet(*alpha, std::move(v));
}

std::size_t TransitionSystem::num_edges() const {
  std::size_t n = 0;
  for (auto& s : succ) n += s.size();
  return n;
}

std::size_t TransitionSystem::num_initial() const {
  return static_cast<std::size_t>(std::count(initial.begin(), initial.end(), true));
}

int TransitionSystem::add_vertex(Letter l, bool init) {
  succ.emplace_back();
  initial.push_back(init);
  label.push_back(l);
  return static_cast<int>(succ.size() - 1);
}

void TransitionSystem::add_edge(int from, int to) {
  if (from < 0 || to < 0 || from >= static_cast<int>(succ.size()) ||
      to >= static_cast<int>(succ.size()))
    throw Error("edge endpoint out of range");
  auto& s = succ[from];
  auto it = std::lower_bound(s.begin(), s.end(), to);
  if (it == s.end() || *it != to) s.insert(it, to);
}

void TransitionSystem::validate() const {
  for (std::size_t v = 0; v < succ.size(); ++v)
    if (succ[v].empty()) throw Error("vertex " + std::to_string(v) + " has no outgoing edge");
}

std::string format_ts(const TransitionSystem& ts) {
  std::string s = "aps:";
  for (auto& p : ts.ap.props()) s += " " + p;
  s += "\n";
  for (std::size_t v = 0; v < ts.num_vertices(); ++v) {
    s += "vertex " + std::to_string(v) + (ts.initial[v] ? " init " : " ") +
         ts.ap.format_letter(ts.label[v]) + "\n";
  }
  for (std::size_t v = 0; v < ts.num_vertices(); ++v)
    for (int w : ts.succ[v]) s += "edge " + std::to_string(v) + " " + std::to_string(w) + "\n";
  return s;
}

TransitionSystem parse_ts(const std::string& text) {
  std::istringstream in(text);
  TransitionSystem ts;
  bool have_aps = false;
  std::vector<std::pair<int, int>> edges;
  std::map<int, std::pair<bool, Letter>> verts;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto where = [&] { return "line " + std::to_string(lineno) + ": "; };
    if (line.rfind("aps:", 0) == 0) {
      ts.ap = parse_aps_line(line);
      have_aps = true;
    } else if (line.rfind("vertex", 0) == 0) {
      if (!have_aps) throw Error(where() + "vertex before 'aps:'");
      std::istringstream ls(line.substr(6));
      int id;
      if (!(ls >> id) || id < 0) throw Error(where() + "bad vertex id");
      std::string rest;
      std::getline(ls, rest);
      rest = trim(rest);
      bool init = false;
      if (rest.rfind("init", 0) == 0) {
        init = true;
        rest = trim(rest.substr(4));
      }
      if (verts.count(id)) throw Error(where() + "duplicate vertex");
      verts[id] = {init, ts.ap.parse_letter(rest)};
    } else if (line.rfind("edge", 0) == 0) {
      std::istringstream ls(line.substr(4));
      int a, b;
      if (!(ls >> a >> b)) throw Error(where() + "bad edge");
      edges.emplace_back(a, b);
    } else {
      throw Error(where() + "unrecognized line");
    }
  }
  if (!have_aps) throw Error("transition system without 'aps:' line");
  int n = static_cast<int>(verts.size());
  for (int i = 0; i < n; ++i) {
    if (!verts.count(i)) throw Error("vertex ids must be 0..n-1");
    ts.add_vertex(verts[i].second, verts[i].first);
  }
  for (auto [a, b] : edges) ts.add_edge(a, b);
  ts.validate();
  return ts;
}

TraceSet enumerate_lassos(const TransitionSystem& ts, std::size_t stem_bound,
                          std::size_t loop_bound) {
  std::set<LassoTrace> out;
  const int n = static_cast<int>(ts.num_vertices());
  std::vector<int> cycle;
  std::vector<bool> on_cycle(n, false);
  std::vector<Letter> stem_letters;

  std::function<void(int)> extend_cycle = [&](int v) {
    if (cycle.size() > loop_bound) return;
    // close the cycle if v -> cycle[0]
    auto& s = ts.succ[v];
    if (std::binary_search(s.begin(), s.end(), cycle[0])) {
      std::vector<Letter> loop;
      for (int c : cycle) loop.push_back(ts.label[c]);
      out.insert(canonicalize(stem_letters, loop));
    }
    if (cycle.size() == loop_bound) return;
    for (int w : s) {
      if (on_cycle[w]) continue;
      on_cycle[w] = true;
      cycle.push_back(w);
      extend_cycle(w);
      cycle.pop_back();
      on_cycle[w] = false;
    }
  };
  auto start_cycle = [&](int c) {
    cycle = {c};
    on_cycle[c] = true;
    extend_cycle(c);
    on_cycle[c] = false;
    cycle.clear();
  };
  std::function<void(int)> extend_stem = [&](int v) {
    stem_letters.push_back(ts.label[v]);
    for (int w : ts.succ[v]) start_cycle(w);
    if (stem_letters.size() < stem_bound)
      for (int w : ts.succ[v]) extend_stem(w);
    stem_letters.pop_back();
  };
  for (int v = 0; v < n; ++v) {
    if (!ts.initial[v]) continue;
    start_cycle(v);
    if (stem_bound > 0) extend_stem(v);
  }
  return TraceSet(ts.ap, {out.begin(), out.end()});
}

Assignment shift(const Assignment& a, std::size_t j) {
  Assignment r = a;
  for (auto& [k, t] : r.traces) t = shift(t, j);
  return r;
}

}  // namespace h2ltl

#include "h2ltl/arith.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "h2ltl/formula.hpp"

namespace h2ltl {

// ---- construction ----

TermP tvar(const std::string& x) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Var;
  t->name = x;
  return t;
}

TermP tnum(Nat n) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Num;
  t->value = n;
  return t;
}

TermP tpair(TermP a, TermP b) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Pair;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

namespace {

ArithFormula mk(AOp op) {
  auto n = std::make_shared<ANode>();
  n->op = op;
  return n;
}

ArithFormula mk_terms(AOp op, TermP x, TermP y, TermP z = nullptr) {
  auto n = std::make_shared<ANode>();
  n->op = op;
  n->t1 = std::move(x);
  n->t2 = std::move(y);
  n->t3 = std::move(z);
  return n;
}

ArithFormula mk_bin(AOp op, ArithFormula f, ArithFormula g) {
  auto n = std::make_shared<ANode>();
  n->op = op;
  n->a = std::move(f);
  n->b = std::move(g);
  return n;
}

ArithFormula mk_quant(AOp op, int order, const std::string& v, ArithFormula body) {
  if (order < 1 || order > 3) throw Error("quantifier order must be 1, 2 or 3");
  auto n = std::make_shared<ANode>();
  n->op = op;
  n->order = order;
  n->var = v;
  n->a = std::move(body);
  return n;
}

}  // namespace

ArithFormula a_true() { return mk(AOp::True); }
ArithFormula a_false() { return mk(AOp::False); }
ArithFormula a_add(TermP x, TermP y, TermP z) { return mk_terms(AOp::Add, x, y, z); }
ArithFormula a_mul(TermP x, TermP y, TermP z) { return mk_terms(AOp::Mul, x, y, z); }
ArithFormula a_less(TermP x, TermP y) { return mk_terms(AOp::Less, x, y); }
ArithFormula a_eq(TermP x, TermP y) { return mk_terms(AOp::Eq, x, y); }

ArithFormula a_in(TermP x, const std::string& Y) {
  auto n = std::make_shared<ANode>();
  n->op = AOp::In;
  n->t1 = std::move(x);
  n->set2 = Y;
  return n;
}

ArithFormula a_in3(const std::string& Y, const std::string& YY) {
  auto n = std::make_shared<ANode>();
  n->op = AOp::In3;
  n->set2 = Y;
  n->set3 = YY;
  return n;
}

ArithFormula a_not(ArithFormula f) {
  auto n = std::make_shared<ANode>();
  n->op = AOp::Not;
  n->a = std::move(f);
  return n;
}

ArithFormula a_and(ArithFormula f, ArithFormula g) { return mk_bin(AOp::And, f, g); }
ArithFormula a_or(ArithFormula f, ArithFormula g) { return mk_bin(AOp::Or, f, g); }
ArithFormula a_implies(ArithFormula f, ArithFormula g) { return mk_bin(AOp::Implies, f, g); }
ArithFormula a_iff(ArithFormula f, ArithFormula g) { return mk_bin(AOp::Iff, f, g); }
ArithFormula a_exists(int order, const std::string& v, ArithFormula body) {
  return mk_quant(AOp::Exists, order, v, body);
}
ArithFormula a_forall(int order, const std::string& v, ArithFormula body) {
  return mk_quant(AOp::Forall, order, v, body);
}

ArithFormula a_conj(const std::vector<ArithFormula>& fs) {
  if (fs.empty()) return a_true();
  ArithFormula r = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) r = a_and(r, fs[i]);
  return r;
}

ArithFormula a_disj(const std::vector<ArithFormula>& fs) {
  if (fs.empty()) return a_false();
  ArithFormula r = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) r = a_or(r, fs[i]);
  return r;
}

ArithFormula a_ge(TermP x, TermP y) { return a_not(a_less(x, y)); }

// ---- structure ----

namespace {

bool term_equal(const TermP& a, const TermP& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Var: return a->name == b->name;
    case TermKind::Num: return a->value == b->value;
    case TermKind::Pair: return term_equal(a->a, b->a) && term_equal(a->b, b->b);
  }
  return false;
}

void collect_orders(const TermP& t, std::map<std::string, int>& seen) {
  if (!t) return;
  if (t->kind == TermKind::Var) {
    auto [it, ins] = seen.emplace(t->name, 1);
    if (!ins && it->second != 1)
      throw Error("variable '" + t->name + "' used at orders " + std::to_string(it->second) +
                  " and 1");
  }
  collect_orders(t->a, seen);
  collect_orders(t->b, seen);
}

void note_order(const std::string& v, int o, std::map<std::string, int>& seen) {
  auto [it, ins] = seen.emplace(v, o);
  if (!ins && it->second != o)
    throw Error("variable '" + v + "' used at orders " + std::to_string(it->second) + " and " +
                std::to_string(o));
}

void collect_orders(const ArithFormula& f, std::map<std::string, int>& seen) {
  if (!f) return;
  collect_orders(f->t1, seen);
  collect_orders(f->t2, seen);
  collect_orders(f->t3, seen);
  if (f->op == AOp::In) note_order(f->set2, 2, seen);
  if (f->op == AOp::In3) {
    note_order(f->set2, 2, seen);
    note_order(f->set3, 3, seen);
  }
  if (f->op == AOp::Exists || f->op == AOp::Forall) note_order(f->var, f->order, seen);
  collect_orders(f->a, seen);
  collect_orders(f->b, seen);
}

}  // namespace

bool arith_equal(const ArithFormula& f, const ArithFormula& g) {
  if (!f || !g) return f == g;
  return f->op == g->op && f->order == g->order && f->var == g->var && f->set2 == g->set2 &&
         f->set3 == g->set3 && term_equal(f->t1, g->t1) && term_equal(f->t2, g->t2) &&
         term_equal(f->t3, g->t3) && arith_equal(f->a, g->a) && arith_equal(f->b, g->b);
}

std::size_t arith_node_count(const ArithFormula& f) {
  if (!f) return 0;
  return 1 + arith_node_count(f->a) + arith_node_count(f->b);
}

int max_quantifier_order(const ArithFormula& f) {
  if (!f) return 0;
  int m = std::max(max_quantifier_order(f->a), max_quantifier_order(f->b));
  if (f->op == AOp::Exists || f->op == AOp::Forall) m = std::max(m, f->order);
  return m;
}

// Names are global here: a name bound twice at different orders is rejected too.
void check_orders(const ArithFormula& f) {
  std::map<std::string, int> seen;
  collect_orders(f, seen);
}

// ---- printing ----

namespace {

void print_term(const TermP& t, std::string& out) {
  switch (t->kind) {
    case TermKind::Var: out += t->name; break;
    case TermKind::Num: out += std::to_string(t->value); break;
    case TermKind::Pair:
      out += "pair(";
      print_term(t->a, out);
      out += ",";
      print_term(t->b, out);
      out += ")";
      break;
  }
}

int alevel(AOp op) {
  switch (op) {
    case AOp::Iff: return 1;
    case AOp::Implies: return 2;
    case AOp::Or: return 3;
    case AOp::And: return 4;
    case AOp::Not: return 5;
    case AOp::Exists:
    case AOp::Forall: return 0;
    default: return 6;
  }
}

void print_rec(const ArithFormula& f, int ctx, std::string& out) {
  int lv = alevel(f->op);
  bool paren = lv < ctx || (lv == 0 && ctx > 0);
  if (paren) out += "(";
  auto bin = [&](const char* sym, int l, int r) {
    print_rec(f->a, l, out);
    out += sym;
    print_rec(f->b, r, out);
  };
  switch (f->op) {
    case AOp::True: out += "true"; break;
    case AOp::False: out += "false"; break;
    case AOp::Add:
    case AOp::Mul:
      print_term(f->t1, out);
      out += f->op == AOp::Add ? "+" : "*";
      print_term(f->t2, out);
      out += "=";
      print_term(f->t3, out);
      break;
    case AOp::Less:
    case AOp::Eq:
      print_term(f->t1, out);
      out += f->op == AOp::Less ? "<" : "=";
      print_term(f->t2, out);
      break;
    case AOp::In:
      print_term(f->t1, out);
      out += " in " + f->set2;
      break;
    case AOp::In3: out += f->set2 + " in " + f->set3; break;
    case AOp::Not:
      out += "!";
      print_rec(f->a, 5, out);
      break;
    case AOp::And: bin(" & ", 4, 5); break;
    case AOp::Or: bin(" | ", 3, 4); break;
    case AOp::Implies: bin(" -> ", 3, 2); break;
    case AOp::Iff: bin(" <-> ", 1, 2); break;
    case AOp::Exists:
    case AOp::Forall:
      out += (f->op == AOp::Exists ? "exists" : "forall") + std::to_string(f->order) + " " +
             f->var + ". ";
      print_rec(f->a, 0, out);
      break;
  }
  if (paren) out += ")";
}

const char* aop_name(AOp op) {
  switch (op) {
    case AOp::True: return "True";
    case AOp::False: return "False";
    case AOp::Add: return "Add";
    case AOp::Mul: return "Mul";
    case AOp::Less: return "Less";
    case AOp::Eq: return "Eq";
    case AOp::In: return "In";
    case AOp::In3: return "In3";
    case AOp::Not: return "Not";
    case AOp::And: return "And";
    case AOp::Or: return "Or";
    case AOp::Implies: return "Implies";
    case AOp::Iff: return "Iff";
    case AOp::Exists: return "Exists";
    case AOp::Forall: return "Forall";
  }
  return "?";
}

void dump_rec(const ArithFormula& f, int depth, std::string& out) {
  out += std::string(2 * depth, ' ') + aop_name(f->op);
  switch (f->op) {
    case AOp::Exists:
    case AOp::Forall: out += " " + std::to_string(f->order) + " " + f->var; break;
    case AOp::True:
    case AOp::False:
    case AOp::Not:
    case AOp::And:
    case AOp::Or:
    case AOp::Implies:
    case AOp::Iff: break;
    default: {
      std::string s;
      print_rec(f, 6, s);
      out += " " + s;
    }
  }
  out += "\n";
  if (f->a) dump_rec(f->a, depth + 1, out);
  if (f->b) dump_rec(f->b, depth + 1, out);
}

}  // namespace

std::string print_arith(const ArithFormula& f) {
  std::string out;
  print_rec(f, 0, out);
  return out;
}

std::string dump_arith(const ArithFormula& f) {
  std::string out;
  dump_rec(f, 0, out);
  return out;
}

// ---- parsing ----

namespace {

struct AToken {
  enum Kind { Ident, Num, Sym, End } kind;
  std::string text;
  int line, col;
};

std::vector<AToken> atokenize(const std::string& s) {
  std::vector<AToken> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const std::vector<std::string> syms = {"<->", "->", "(", ")", ",", ".", "!",
                                                "|",   "&",  "+", "*", "=", "<"};
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      adv(1);
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' ||
                              s[j] == '\''))
        ++j;
      out.push_back({AToken::Ident, s.substr(i, j - i), line, col});
      adv(j - i);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({AToken::Num, s.substr(i, j - i), line, col});
      adv(j - i);
      continue;
    }
    bool matched = false;
    for (auto& sym : syms)
      if (s.compare(i, sym.size(), sym) == 0) {
        out.push_back({AToken::Sym, sym, line, col});
        adv(sym.size());
        matched = true;
        break;
      }
    if (!matched) throw ParseError(std::string("unexpected character '") + s[i] + "'", line, col);
  }
  out.push_back({AToken::End, "", line, col});
  return out;
}

bool quant_keyword(const std::string& s, bool& exists, int& order) {
  for (const char* kw : {"exists", "forall"}) {
    std::string k = kw;
    if (s.size() == k.size() + 1 && s.compare(0, k.size(), k) == 0 && s.back() >= '1' &&
        s.back() <= '3') {
      exists = k == "exists";
      order = s.back() - '0';
      return true;
    }
  }
  return false;
}

class AParser {
 public:
  explicit AParser(const std::string& text) : toks_(atokenize(text)) {}

  ArithFormula parse() {
    ArithFormula f = iff();
    if (peek().kind != AToken::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  std::vector<AToken> toks_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::string, int>> scope_;

  const AToken& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_sym(const std::string& s, std::size_t k = 0) const {
    return peek(k).kind == AToken::Sym && peek(k).text == s;
  }
  bool at_ident(const std::string& s, std::size_t k = 0) const {
    return peek(k).kind == AToken::Ident && peek(k).text == s;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }
  void expect(const std::string& s) {
    if (!at_sym(s)) fail("expected '" + s + "'");
    ++pos_;
  }

  int order_of(const std::string& n) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == n) return it->second;
    return std::isupper(static_cast<unsigned char>(n[0])) ? 2 : 1;
  }

  ArithFormula iff() {
    ArithFormula f = impl();
    while (at_sym("<->")) {
      ++pos_;
      f = a_iff(f, impl());
    }
    return f;
  }
  ArithFormula impl() {
    ArithFormula f = disj();
    if (at_sym("->")) {
      ++pos_;
      return a_implies(f, impl());
    }
    return f;
  }
  ArithFormula disj() {
    ArithFormula f = conj();
    while (at_sym("|")) {
      ++pos_;
      f = a_or(f, conj());
    }
    return f;
  }
  ArithFormula conj() {
    ArithFormula f = unary();
    while (at_sym("&")) {
      ++pos_;
      f = a_and(f, unary());
    }
    return f;
  }

  ArithFormula unary() {
    if (at_sym("!")) {
      ++pos_;
      return a_not(unary());
    }
    bool ex = false;
    int order = 0;
    if (peek().kind == AToken::Ident && quant_keyword(peek().text, ex, order)) {
      ++pos_;
      if (peek().kind != AToken::Ident) fail("expected variable after quantifier");
      std::string v = peek().text;
      ++pos_;
      expect(".");
      scope_.emplace_back(v, order);
      ArithFormula body = iff();
      scope_.pop_back();
      return ex ? a_exists(order, v, body) : a_forall(order, v, body);
    }
    if (at_ident("true")) {
      ++pos_;
      return a_true();
    }
    if (at_ident("false")) {
      ++pos_;
      return a_false();
    }
    if (at_sym("(")) {
      // parenthesized formula unless it is a term like (x) -- terms never need parens here
      ++pos_;
      ArithFormula f = iff();
      expect(")");
      return f;
    }
    return atom();
  }

  TermP term() {
    const AToken& t = peek();
    if (t.kind == AToken::Num) {
      ++pos_;
      return tnum(std::stoull(t.text));
    }
    if (t.kind == AToken::Ident && t.text == "pair") {
      ++pos_;
      expect("(");
      TermP a = term();
      expect(",");
      TermP b = term();
      expect(")");
      return tpair(a, b);
    }
    if (t.kind == AToken::Ident) {
      if (order_of(t.text) != 1) fail("'" + t.text + "' is not a first-order variable");
      ++pos_;
      return tvar(t.text);
    }
    fail("expected a term");
  }

  ArithFormula atom() {
    if (peek().kind == AToken::Ident && peek().text != "pair" && at_ident("in", 1) &&
        order_of(peek().text) == 2) {
      std::string Y = peek().text;
      pos_ += 2;
      if (peek().kind != AToken::Ident) fail("expected a third-order variable");
      std::string YY = peek().text;
      ++pos_;
      return a_in3(Y, YY);
    }
    TermP x = term();
    if (at_ident("in")) {
      ++pos_;
      if (peek().kind != AToken::Ident) fail("expected a second-order variable");
      std::string Y = peek().text;
      ++pos_;
      return a_in(x, Y);
    }
    if (at_sym("+") || at_sym("*")) {
      bool add = at_sym("+");
      ++pos_;
      TermP y = term();
      expect("=");
      TermP z = term();
      return add ? a_add(x, y, z) : a_mul(x, y, z);
    }
    if (at_sym("<")) {
      ++pos_;
      return a_less(x, term());
    }
    if (at_sym("=")) {
      ++pos_;
      return a_eq(x, term());
    }
    fail("expected an atom");
  }
};

}  // namespace

ArithFormula parse_arith(const std::string& text) { return AParser(text).parse(); }

// ---- pair expansion ----

namespace {

void collect_names(const TermP& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == TermKind::Var) out.insert(t->name);
  collect_names(t->a, out);
  collect_names(t->b, out);
}

void collect_names(const ArithFormula& f, std::set<std::string>& out) {
  if (!f) return;
  collect_names(f->t1, out);
  collect_names(f->t2, out);
  collect_names(f->t3, out);
  if (!f->var.empty()) out.insert(f->var);
  if (!f->set2.empty()) out.insert(f->set2);
  if (!f->set3.empty()) out.insert(f->set3);
  collect_names(f->a, out);
  collect_names(f->b, out);
}

// z = pair(x, y) as + and * atoms: s = x+y, s1 = s+1, q = s*s1, h+h = q, h+y = z
ArithFormula pair_def(TermP x, TermP y, TermP z, FreshNames& fresh) {
  std::string s = fresh("s"), s1 = fresh("s"), q = fresh("q"), h = fresh("h");
  return a_exists(
      1, s,
      a_and(a_add(x, y, tvar(s)),
            a_exists(1, s1,
                     a_and(a_add(tvar(s), tnum(1), tvar(s1)),
                           a_exists(1, q,
                                    a_and(a_mul(tvar(s), tvar(s1), tvar(q)),
                                          a_exists(1, h,
                                                   a_and(a_add(tvar(h), tvar(h), tvar(q)),
                                                         a_add(tvar(h), y, z)))))))));
}

// Replaces pair subterms of t by fresh variables, recording their definitions.
TermP flatten_term(const TermP& t, std::vector<std::pair<std::string, ArithFormula>>& defs,
                   FreshNames& fresh) {
  if (!t || t->kind != TermKind::Pair) return t;
  TermP a = flatten_term(t->a, defs, fresh);
  TermP b = flatten_term(t->b, defs, fresh);
  std::string z = fresh("p");
  defs.emplace_back(z, pair_def(a, b, tvar(z), fresh));
  return tvar(z);
}

ArithFormula expand_rec(const ArithFormula& f, FreshNames& fresh) {
  if (!f) return f;
  if (f->t1 || f->t2 || f->t3) {
    std::vector<std::pair<std::string, ArithFormula>> defs;
    auto n = std::make_shared<ANode>(*f);
    n->t1 = flatten_term(f->t1, defs, fresh);
    n->t2 = flatten_term(f->t2, defs, fresh);
    n->t3 = flatten_term(f->t3, defs, fresh);
    ArithFormula r = n;
    for (auto it = defs.rbegin(); it != defs.rend(); ++it)
      r = a_exists(1, it->first, a_and(it->second, r));
    return r;
  }
  auto n = std::make_shared<ANode>(*f);
  n->a = expand_rec(f->a, fresh);
  n->b = expand_rec(f->b, fresh);
  return n;
}

}  // namespace

ArithFormula expand_pairs(const ArithFormula& f) {
  std::set<std::string> used;
  collect_names(f, used);
  FreshNames fresh(used);
  return expand_rec(f, fresh);
}

// ---- pairing ----

Nat cantor_pair(Nat i, Nat j) {
  unsigned __int128 s = static_cast<unsigned __int128>(i) + j;
  unsigned __int128 v = s * (s + 1) / 2 + j;
  if (v > static_cast<unsigned __int128>(~Nat{0})) throw Error("pair overflow");
  return static_cast<Nat>(v);
}

std::pair<Nat, Nat> cantor_unpair(Nat n) {
  Nat w = static_cast<Nat>((std::sqrt(8.0L * n + 1) - 1) / 2);
  while (w * (w + 1) / 2 > n) --w;
  while ((w + 1) * (w + 2) / 2 <= n) ++w;
  Nat j = n - w * (w + 1) / 2;
  return {w - j, j};
}

PropCode::PropCode(const Alphabet& ap) : ap_(ap), order_(ap.props()) {}

PropCode::PropCode(const Alphabet& ap, const std::vector<std::string>& order)
    : ap_(ap), order_(order) {
  std::vector<std::string> s = order;
  std::sort(s.begin(), s.end());
  if (s != ap.props() || std::adjacent_find(s.begin(), s.end()) != s.end())
    throw Error("proposition code is not a bijection onto 0..|AP|-1");
}

Nat PropCode::code(const std::string& p) const {
  auto it = std::find(order_.begin(), order_.end(), p);
  if (it == order_.end()) throw Error("proposition '" + p + "' has no code");
  return static_cast<Nat>(it - order_.begin());
}

bool trace_code_contains(const LassoTrace& t, const PropCode& e, Nat n) {
  auto [j, c] = cantor_unpair(n);
  if (c >= e.order().size()) return false;
  return (t.at(j) & e.alphabet().bit(e.order()[c])) != 0;
}

NatSet encode_trace(const LassoTrace& t, const PropCode& e, Nat limit) {
  NatSet out;
  for (Nat n = 0; n < limit; ++n)
    if (trace_code_contains(t, e, n)) out.push_back(n);
  return out;
}

Nat code_limit(std::size_t positions, std::size_t nap) {
  if (positions == 0 || nap == 0) return 0;
  return cantor_pair(positions - 1, nap - 1) + 1;
}

// ---- fresh names ----

std::string FreshNames::operator()(const std::string& base) {
  std::string n = base;
  for (int k = 1; used_.count(n); ++k) n = base + "_" + std::to_string(k);
  used_.insert(n);
  return n;
}

Member member_of(const std::string& Y) {
  return [Y](TermP t) { return a_in(std::move(t), Y); };
}

// ---- library ----

ArithFormula ar_is_trace(const Member& Y, std::size_t nap, FreshNames& fresh) {
  std::string x = fresh("x"), y = fresh("y");
  return a_forall(1, x,
                  a_forall(1, y,
                           a_implies(a_ge(tvar(y), tnum(nap)),
                                     a_not(Y(tpair(tvar(x), tvar(y)))))));
}

ArithFormula ar_only_traces(const std::string& YY, std::size_t nap, FreshNames& fresh) {
  std::string Y = fresh("Y");
  return a_forall(2, Y, a_implies(a_in3(Y, YY), ar_is_trace(member_of(Y), nap, fresh)));
}

ArithFormula ar_all_traces(const std::string& YY, std::size_t nap, FreshNames& fresh) {
  ArithFormula only = ar_only_traces(YY, nap, fresh);
  std::string Y = fresh("Y");
  return a_and(only,
               a_forall(2, Y, a_implies(ar_is_trace(member_of(Y), nap, fresh), a_in3(Y, YY))));
}

ArithFormula ar_is_ts(const std::string& n, const std::string& E, const std::string& I,
                      const std::string& L, std::size_t nap, FreshNames& fresh) {
  TermP N = tvar(n);
  std::string y = fresh("y"), v = fresh("v"), v2 = fresh("v"), u = fresh("v"), u2 = fresh("v"),
              w = fresh("v"), yl = fresh("y"), vl = fresh("v"), p = fresh("p");
  ArithFormula nonempty = a_less(tnum(0), N);
  ArithFormula edges = a_forall(
      1, y,
      a_implies(a_in(tvar(y), E),
                a_exists(1, v,
                         a_exists(1, v2,
                                  a_conj({a_less(tvar(v), N), a_less(tvar(v2), N),
                                          a_eq(tvar(y), tpair(tvar(v), tvar(v2)))})))));
  ArithFormula succ = a_forall(
      1, u,
      a_implies(a_less(tvar(u), N),
                a_exists(1, u2,
                         a_and(a_less(tvar(u2), N), a_in(tpair(tvar(u), tvar(u2)), E)))));
  ArithFormula init = a_forall(1, w, a_implies(a_in(tvar(w), I), a_less(tvar(w), N)));
  ArithFormula label = a_forall(
      1, yl,
      a_implies(a_in(tvar(yl), L),
                a_exists(1, vl,
                         a_exists(1, p,
                                  a_conj({a_less(tvar(vl), N), a_less(tvar(p), tnum(nap)),
                                          a_eq(tvar(yl), tpair(tvar(vl), tvar(p)))})))));
  return a_conj({nonempty, edges, succ, init, label});
}

// The successor clause is stated as forall j, j1. j+1=j1 -> ..., which is
// equivalent over N and does not fail at the top of a bounded scope.
ArithFormula ar_is_path(const std::string& P, const std::string& n, const std::string& E,
                        const std::string& I, FreshNames& fresh) {
  TermP N = tvar(n);
  std::string j = fresh("j"), v = fresh("v"), v2 = fresh("v"), w = fresh("v");
  std::string k = fresh("j"), k1 = fresh("j"), a = fresh("v"), b = fresh("v");
  ArithFormula unique = a_forall(
      1, j,
      a_exists(1, v,
               a_conj({a_less(tvar(v), N), a_in(tpair(tvar(j), tvar(v)), P),
                       a_not(a_exists(1, v2,
                                      a_and(a_not(a_eq(tvar(v2), tvar(v))),
                                            a_in(tpair(tvar(j), tvar(v2)), P))))})));
  ArithFormula start =
      a_exists(1, w, a_and(a_in(tvar(w), I), a_in(tpair(tnum(0), tvar(w)), P)));
  ArithFormula step = a_forall(
      1, k,
      a_forall(1, k1,
               a_implies(a_add(tvar(k), tnum(1), tvar(k1)),
                         a_exists(1, a,
                                  a_exists(1, b,
                                           a_conj({a_in(tpair(tvar(k), tvar(a)), P),
                                                   a_in(tpair(tvar(k1), tvar(b)), P),
                                                   a_in(tpair(tvar(a), tvar(b)), E)}))))));
  return a_conj({unique, start, step});
}

ArithFormula ar_trace_of(const Member& T, const std::string& P, const std::string& L,
                         FreshNames& fresh) {
  std::string j = fresh("j"), p = fresh("p"), v = fresh("v");
  return a_forall(
      1, j,
      a_forall(1, p,
               a_iff(T(tpair(tvar(j), tvar(p))),
                     a_exists(1, v,
                              a_and(a_in(tpair(tvar(j), tvar(v)), P),
                                    a_in(tpair(tvar(v), tvar(p)), L))))));
}

ArithFormula ar_is_path_ts(const Member& Y, const TransitionSystem& ts, FreshNames& fresh) {
  Nat top = ts.num_vertices() - 1;
  std::string x = fresh("x"), y = fresh("y"), x2 = fresh("x"), y0 = fresh("y"), y1 = fresh("y");
  std::string j = fresh("j"), j1 = fresh("j");
  ArithFormula range = a_forall(
      1, x,
      a_forall(1, y, a_implies(a_less(tnum(top), tvar(y)), a_not(Y(tpair(tvar(x), tvar(y)))))));
  ArithFormula functional = a_forall(
      1, x2,
      a_forall(1, y0,
               a_forall(1, y1,
                        a_implies(a_and(Y(tpair(tvar(x2), tvar(y0))),
                                        Y(tpair(tvar(x2), tvar(y1)))),
                                  a_eq(tvar(y0), tvar(y1))))));
  std::vector<ArithFormula> inits;
  for (std::size_t v = 0; v < ts.num_vertices(); ++v)
    if (ts.initial[v]) inits.push_back(Y(tpair(tnum(0), tnum(v))));
  std::vector<ArithFormula> edges;
  for (std::size_t v = 0; v < ts.num_vertices(); ++v)
    for (int w : ts.succ[v])
      edges.push_back(a_and(Y(tpair(tvar(j), tnum(v))), Y(tpair(tvar(j1), tnum(w)))));
  ArithFormula step = a_forall(
      1, j, a_forall(1, j1, a_implies(a_add(tvar(j), tnum(1), tvar(j1)), a_disj(edges))));
  return a_conj({range, functional, a_disj(inits), step});
}

ArithFormula ar_in_ts(const Member& Y, const TransitionSystem& ts, const PropCode& e,
                      FreshNames& fresh) {
  std::string P = fresh("Yp"), j = fresh("j");
  ArithFormula path = ar_is_path_ts(member_of(P), ts, fresh);
  std::vector<ArithFormula> per_prop;
  for (auto& p : ts.ap.props()) {
    std::vector<ArithFormula> at;
    for (std::size_t v = 0; v < ts.num_vertices(); ++v)
      if (ts.label[v] & ts.ap.bit(p)) at.push_back(a_in(tpair(tvar(j), tnum(v)), P));
    per_prop.push_back(a_iff(Y(tpair(tvar(j), tnum(e.code(p)))), a_disj(at)));
  }
  return a_exists(2, P, a_and(path, a_forall(1, j, a_conj(per_prop))));
}

ArithFormula ar_update(const std::string& A, const std::string& A2, const std::string& Z, Nat k,
                       FreshNames& fresh) {
  std::string w = fresh("w"), s = fresh("s"), s2 = fresh("s");
  ArithFormula in_slot =
      a_exists(1, s, a_and(a_eq(tvar(w), tpair(tnum(k), tvar(s))), a_in(tvar(s), Z)));
  ArithFormula other = a_and(a_in(tvar(w), A),
                             a_not(a_exists(1, s2, a_eq(tvar(w), tpair(tnum(k), tvar(s2))))));
  return a_forall(1, w, a_iff(a_in(tvar(w), A2), a_or(in_slot, other)));
}

std::vector<std::string> arith_library_names() {
  return {"isTrace", "onlyTraces", "allTraces", "isTS", "isPath",
          "traceOf", "isPath_T",   "phi_T",     "update"};
}

ArithFormula arith_library(const std::string& name, const ArithLibParams& p) {
  FreshNames fresh;
  for (const char* r : {"Y", "YY", "n", "E", "I", "L", "P", "T", "A", "A'", "Z"}) fresh.reserve(r);
  auto need_ts = [&]() -> const TransitionSystem& {
    if (!p.ts) throw Error("'" + name + "' needs a transition system");
    return *p.ts;
  };
  if (name == "isTrace") return ar_is_trace(member_of("Y"), p.nap, fresh);
  if (name == "onlyTraces") return ar_only_traces("YY", p.nap, fresh);
  if (name == "allTraces") return ar_all_traces("YY", p.nap, fresh);
  if (name == "isTS") return ar_is_ts("n", "E", "I", "L", p.nap, fresh);
  if (name == "isPath") return ar_is_path("P", "n", "E", "I", fresh);
  if (name == "traceOf") return ar_trace_of(member_of("T"), "P", "L", fresh);
  if (name == "isPath_T") return ar_is_path_ts(member_of("Y"), need_ts(), fresh);
  if (name == "phi_T") {
    auto& ts = need_ts();
    return ar_in_ts(member_of("Y"), ts, PropCode(ts.ap), fresh);
  }
  if (name == "update") return ar_update("A", "A'", "Z", p.slot, fresh);
  throw Error("unknown arithmetic library formula '" + name + "'");
}

// ---- bounded evaluation ----

namespace {

class ArithEval {
 public:
  ArithEval(const ScopeBounds& b, const ArithEnv& env) : b_(b) {
    for (auto& [k, v] : env.first) first_[k] = v;
    for (auto& [k, v] : env.second) second_[k] = &v;
    for (auto& [k, v] : env.third) third_[k] = &v;
  }

  bool eval(const ANode* f) {
    switch (f->op) {
      case AOp::True: return true;
      case AOp::False: return false;
      case AOp::Add: return term(f->t1.get()) + term(f->t2.get()) == term(f->t3.get());
      case AOp::Mul: {
        unsigned __int128 p = static_cast<unsigned __int128>(term(f->t1.get())) *
                              term(f->t2.get());
        return p == term(f->t3.get());
      }
      case AOp::Less: return term(f->t1.get()) < term(f->t2.get());
      case AOp::Eq: return term(f->t1.get()) == term(f->t2.get());
      case AOp::In: {
        const NatSet& s = set2(f->set2);
        return std::binary_search(s.begin(), s.end(), term(f->t1.get()));
      }
      case AOp::In3: {
        const NatSet& s = set2(f->set2);
        const NatFamily& fam = set3(f->set3);
        return std::binary_search(fam.begin(), fam.end(), s);
      }
      case AOp::Not: return !eval(f->a.get());
      case AOp::And: return eval(f->a.get()) && eval(f->b.get());
      case AOp::Or: return eval(f->a.get()) || eval(f->b.get());
      case AOp::Implies: return !eval(f->a.get()) || eval(f->b.get());
      case AOp::Iff: return eval(f->a.get()) == eval(f->b.get());
      case AOp::Exists:
      case AOp::Forall: return quant(f);
    }
    return false;
  }

 private:
  const ScopeBounds& b_;
  std::map<std::string, Nat> first_;
  std::map<std::string, const NatSet*> second_;
  std::map<std::string, const NatFamily*> third_;

  Nat term(const Term* t) {
    switch (t->kind) {
      case TermKind::Num: return t->value;
      case TermKind::Pair: return cantor_pair(term(t->a.get()), term(t->b.get()));
      case TermKind::Var: {
        auto it = first_.find(t->name);
        if (it == first_.end()) throw Error("unbound first-order variable '" + t->name + "'");
        return it->second;
      }
    }
    return 0;
  }
  const NatSet& set2(const std::string& n) {
    auto it = second_.find(n);
    if (it == second_.end()) throw Error("unbound second-order variable '" + n + "'");
    return *it->second;
  }
  const NatFamily& set3(const std::string& n) {
    auto it = third_.find(n);
    if (it == third_.end()) throw Error("unbound third-order variable '" + n + "'");
    return *it->second;
  }

  template <class Map, class Val, class Range>
  bool scan(Map& m, const ANode* f, const Range& range) {
    bool ex = f->op == AOp::Exists;
    auto old = m.find(f->var);
    std::optional<typename Map::mapped_type> saved;
    if (old != m.end()) saved = old->second;
    bool result = !ex;
    for (auto& v : range) {
      m[f->var] = Val(v);
      if (eval(f->a.get()) == ex) {
        result = ex;
        break;
      }
    }
    if (saved)
      m[f->var] = *saved;
    else
      m.erase(f->var);
    return result;
  }

  bool quant(const ANode* f) {
    if (f->order == 1) {
      std::vector<Nat> r(b_.first_bound);
      for (Nat i = 0; i < b_.first_bound; ++i) r[i] = i;
      return scan<decltype(first_), Nat>(first_, f, r);
    }
    if (f->order == 2) {
      if (!b_.second_universe) throw Error("second-order quantifier but no second universe");
      std::vector<const NatSet*> r;
      for (auto& s : *b_.second_universe) r.push_back(&s);
      return scan<decltype(second_), const NatSet*>(second_, f, r);
    }
    if (!b_.third_universe) throw Error("third-order quantifier but no third universe");
    std::vector<const NatFamily*> r;
    for (auto& s : *b_.third_universe) r.push_back(&s);
    return scan<decltype(third_), const NatFamily*>(third_, f, r);
  }
};

}  // namespace

NatFamily normalize_family(NatFamily f) {
  for (auto& s : f) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

ArithResult eval_arith_bounded(const ArithFormula& f, const ScopeBounds& b, const ArithEnv& env) {
  int need = max_quantifier_order(f);
  if (need >= 2 && !b.second_universe)
    throw Error("formula quantifies second-order variables but no second universe is given");
  if (need >= 3 && !b.third_universe)
    throw Error("formula quantifies third-order variables but no third universe is given");
  ArithEnv norm = env;
  for (auto& [k, v] : norm.second) v = normalize_family({v}).front();
  for (auto& [k, v] : norm.third) v = normalize_family(v);
  ScopeBounds nb = b;
  if (nb.second_universe) nb.second_universe = normalize_family(*nb.second_universe);
  if (nb.third_universe)
    for (auto& fam : *nb.third_universe) fam = normalize_family(fam);
  ArithEval ev(nb, norm);
  ArithResult r;
  r.value = ev.eval(f.get());
  return r;
}

StabilityReport recheck_stability(const ArithFormula& f, const ScopeBounds& small,
                                  const ScopeBounds& large, const ArithEnv& env) {
  StabilityReport r;
  r.small = eval_arith_bounded(f, small, env).value;
  r.large = eval_arith_bounded(f, large, env).value;
  return r;
}

NatFamily powerset_family(Nat first_bound) {
  if (first_bound > 4) throw Error("powerset scope is capped at first_bound <= 4");
  NatFamily out;
  for (Nat mask = 0; mask < (Nat{1} << first_bound); ++mask) {
    NatSet s;
    for (Nat i = 0; i < first_bound; ++i)
      if (mask >> i & 1) s.push_back(i);
    out.push_back(s);
  }
  return normalize_family(out);
}

}  // namespace h2ltl

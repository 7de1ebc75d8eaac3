#include "h2ltl/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace h2ltl {

namespace {

Formula mk(Node n) { return std::make_shared<const Node>(std::move(n)); }

Formula mk1(Op op, Formula a) {
  Node n;
  n.op = op;
  n.a = std::move(a);
  return mk(std::move(n));
}

Formula mk2(Op op, Formula a, Formula b) {
  Node n;
  n.op = op;
  n.a = std::move(a);
  n.b = std::move(b);
  return mk(std::move(n));
}

}  // namespace

Formula atom(const std::string& prop, const std::string& trace_var) {
  Node n;
  n.op = Op::Atom;
  n.name = prop;
  n.var = trace_var;
  return mk(std::move(n));
}
Formula lnot(Formula f) { return mk1(Op::Not, std::move(f)); }
Formula lor(Formula a, Formula b) { return mk2(Op::Or, std::move(a), std::move(b)); }
Formula land(Formula a, Formula b) { return mk2(Op::And, std::move(a), std::move(b)); }
Formula implies(Formula a, Formula b) { return mk2(Op::Implies, std::move(a), std::move(b)); }
Formula iff(Formula a, Formula b) { return mk2(Op::Iff, std::move(a), std::move(b)); }
Formula lxor(Formula a, Formula b) { return mk2(Op::Xor, std::move(a), std::move(b)); }
Formula next(Formula f) { return mk1(Op::Next, std::move(f)); }
Formula until(Formula a, Formula b) { return mk2(Op::Until, std::move(a), std::move(b)); }
Formula eventually(Formula f) { return mk1(Op::Eventually, std::move(f)); }
Formula globally(Formula f) { return mk1(Op::Globally, std::move(f)); }

static Formula set_q(Op op, const std::string& X, Formula body) {
  Node n;
  n.op = op;
  n.var = X;
  n.a = std::move(body);
  return mk(std::move(n));
}
Formula exists_set(const std::string& X, Formula body) {
  return set_q(Op::ExistsSet, X, std::move(body));
}
Formula forall_set(const std::string& X, Formula body) {
  return set_q(Op::ForallSet, X, std::move(body));
}
static Formula mm_q(Op op, const std::string& X, Polarity p, Formula guard, Formula body) {
  Node n;
  n.op = op;
  n.var = X;
  n.pol = p;
  n.guard = std::move(guard);
  n.a = std::move(body);
  return mk(std::move(n));
}
Formula exists_mm(const std::string& X, Polarity p, Formula guard, Formula body) {
  return mm_q(Op::ExistsMM, X, p, std::move(guard), std::move(body));
}
Formula forall_mm(const std::string& X, Polarity p, Formula guard, Formula body) {
  return mm_q(Op::ForallMM, X, p, std::move(guard), std::move(body));
}
static Formula trace_q(Op op, const std::string& pi, const std::string& X, Formula body) {
  Node n;
  n.op = op;
  n.var = pi;
  n.range = X;
  n.a = std::move(body);
  return mk(std::move(n));
}
Formula exists_trace(const std::string& pi, const std::string& X, Formula body) {
  return trace_q(Op::ExistsTrace, pi, X, std::move(body));
}
Formula forall_trace(const std::string& pi, const std::string& X, Formula body) {
  return trace_q(Op::ForallTrace, pi, X, std::move(body));
}

Formula conj(const std::vector<Formula>& fs) {
  if (fs.empty()) throw Error("empty conjunction");
  Formula r = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) r = land(r, fs[i]);
  return r;
}

Formula disj(const std::vector<Formula>& fs) {
  if (fs.empty()) throw Error("empty disjunction");
  Formula r = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) r = lor(r, fs[i]);
  return r;
}

Formula trace_equal(const std::string& a, const std::string& b,
                    const std::vector<std::string>& props) {
  std::vector<Formula> cs;
  for (auto& p : props) cs.push_back(iff(atom(p, a), atom(p, b)));
  return globally(conj(cs));
}

Formula in_set(const std::string& pi, const std::string& X, const std::vector<std::string>& props,
               const std::string& fresh) {
  return exists_trace(fresh, X, trace_equal(pi, fresh, props));
}

bool is_quantifier(Op op) { return op >= Op::ExistsSet; }
bool is_trace_quantifier(Op op) { return op == Op::ExistsTrace || op == Op::ForallTrace; }
bool is_set_quantifier(Op op) { return is_quantifier(op) && !is_trace_quantifier(op); }
bool is_temporal(Op op) {
  return op == Op::Next || op == Op::Until || op == Op::Eventually || op == Op::Globally;
}
bool is_existential(Op op) {
  return op == Op::ExistsSet || op == Op::ExistsMM || op == Op::ExistsTrace;
}

bool contains_quantifier(const Formula& f) {
  if (!f) return false;
  if (is_quantifier(f->op)) return true;
  return contains_quantifier(f->a) || contains_quantifier(f->b);
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (!a || !b) return !a && !b;
  if (a.get() == b.get()) return true;
  if (a->op != b->op || a->name != b->name || a->var != b->var || a->range != b->range)
    return false;
  if ((a->op == Op::ExistsMM || a->op == Op::ForallMM) &&
      (a->pol != b->pol || !structurally_equal(a->guard, b->guard)))
    return false;
  return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
}

std::size_t node_count(const Formula& f) {
  if (!f) return 0;
  return 1 + node_count(f->guard) + node_count(f->a) + node_count(f->b);
}

std::size_t temporal_depth(const Formula& f) {
  if (!f) return 0;
  std::size_t d = std::max({temporal_depth(f->a), temporal_depth(f->b), temporal_depth(f->guard)});
  return is_temporal(f->op) ? d + 1 : d;
}

std::size_t quantifier_depth(const Formula& f) {
  if (!f) return 0;
  std::size_t d =
      std::max({quantifier_depth(f->a), quantifier_depth(f->b), quantifier_depth(f->guard)});
  return is_quantifier(f->op) ? d + 1 : d;
}

ParseError::ParseError(const std::string& msg, int l, int c)
    : Error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}

// ---------------------------------------------------------------- parser

namespace {

enum class Tok { Ident, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  static const std::vector<std::string> syms = {"<->", "->", "|>", "=_", "(", ")", "[", "]",
                                                "{",   "}",  ",",  ".",  "!", "|", "&", "^", "="};
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), line, col});
      adv(j - i);
      continue;
    }
    bool matched = false;
    for (auto& sym : syms) {
      if (s.compare(i, sym.size(), sym) == 0) {
        out.push_back({Tok::Sym, sym, line, col});
        adv(sym.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "exists" || s == "forall" || s == "in" || s == "X" || s == "F" || s == "G" ||
         s == "U";
}

class Parser {
 public:
  Parser(const std::string& text, const Alphabet& ap) : toks_(tokenize(text)), ap_(ap) {
    for (auto& t : toks_)
      if (t.kind == Tok::Ident) used_.insert(t.text);
  }

  Formula parse() {
    Formula f = level1();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Alphabet& ap_;
  std::set<std::string> used_;
  int temporal_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_sym(const std::string& s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }
  bool at_ident(const std::string& s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == s;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }
  void expect_sym(const std::string& s) {
    if (!at_sym(s)) fail("expected '" + s + "'");
    ++pos_;
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }
  std::string set_var() {
    std::string s = ident("set variable");
    if (!std::isupper(static_cast<unsigned char>(s[0])))
      fail("set variable '" + s + "' must start with an uppercase letter");
    return s;
  }
  std::string trace_var() {
    std::string s = ident("trace variable");
    if (is_keyword(s) || !std::islower(static_cast<unsigned char>(s[0])))
      fail("trace variable '" + s + "' must start with a lowercase letter");
    return s;
  }
  void no_temporal(const char* what) {
    if (temporal_ > 0)
      fail(std::string(what) +
           " under a temporal operator; only Boolean combinations of sentences are supported "
           "(see normalize_prenex)");
  }
  std::string fresh(const std::string& base) {
    std::string s = base + "'";
    while (used_.count(s)) s += "'";
    used_.insert(s);
    return s;
  }

  Formula level1() {
    Formula f = impl();
    while (at_sym("<->") || at_sym("^")) {
      bool is_iff = at_sym("<->");
      ++pos_;
      Formula g = impl();
      f = is_iff ? iff(f, g) : lxor(f, g);
    }
    return f;
  }
  Formula impl() {
    Formula f = disj_();
    if (at_sym("->")) {
      ++pos_;
      return implies(f, impl());
    }
    return f;
  }
  Formula disj_() {
    Formula f = conj_();
    while (at_sym("|")) {
      ++pos_;
      f = lor(f, conj_());
    }
    return f;
  }
  Formula conj_() {
    Formula f = until_();
    while (at_sym("&")) {
      ++pos_;
      f = land(f, until_());
    }
    return f;
  }
  Formula until_() {
    Formula f = unary();
    if (at_ident("U")) {
      ++pos_;
      ++temporal_;
      Formula g = until_();
      --temporal_;
      // the left operand was parsed before we knew it sits under U
      if (contains_quantifier(f)) no_temporal_force();
      return until(f, g);
    }
    return f;
  }
  [[noreturn]] void no_temporal_force() {
    fail("quantifier under a temporal operator; only Boolean combinations of sentences are "
         "supported (see normalize_prenex)");
  }
  Formula unary() {
    if (at_sym("!")) {
      ++pos_;
      return lnot(unary());
    }
    if (at_ident("X") || at_ident("F") || at_ident("G")) {
      std::string k = toks_[pos_++].text;
      ++temporal_;
      Formula f = unary();
      --temporal_;
      return k == "X" ? next(f) : k == "F" ? eventually(f) : globally(f);
    }
    if (at_ident("exists") || at_ident("forall")) return quant();
    return primary();
  }
  Formula quant() {
    no_temporal("quantifier");
    bool ex = toks_[pos_++].text == "exists";
    if (at_sym("(")) {
      ++pos_;
      std::string X = set_var();
      expect_sym(",");
      std::string pol = ident("min or max");
      if (pol != "min" && pol != "max") fail("expected min or max");
      expect_sym(",");
      Formula g = level1();
      expect_sym(")");
      expect_sym(".");
      Formula body = level1();
      Polarity p = pol == "min" ? Polarity::Min : Polarity::Max;
      return ex ? exists_mm(X, p, g, body) : forall_mm(X, p, g, body);
    }
    if (at_ident("in", 1)) {
      std::string pi = trace_var();
      ++pos_;
      std::string X = set_var();
      expect_sym(".");
      Formula body = level1();
      return ex ? exists_trace(pi, X, body) : forall_trace(pi, X, body);
    }
    std::string X = set_var();
    expect_sym(".");
    Formula body = level1();
    return ex ? exists_set(X, body) : forall_set(X, body);
  }
  std::vector<std::string> prop_list() {
    expect_sym("{");
    std::vector<std::string> v;
    if (!at_sym("}")) {
      v.push_back(prop());
      while (at_sym(",")) {
        ++pos_;
        v.push_back(prop());
      }
    }
    expect_sym("}");
    if (v.empty()) fail("empty proposition list in '=_{}'");
    return Alphabet(v).props();
  }
  std::string prop() {
    std::string p = ident("proposition");
    if (!ap_.contains(p)) {
      --pos_;
      fail("unknown proposition '" + p + "'");
    }
    return p;
  }
  Formula primary() {
    if (at_sym("(")) {
      ++pos_;
      Formula f = level1();
      expect_sym(")");
      return f;
    }
    if (peek().kind != Tok::Ident) fail("expected formula");
    if (at_sym("[", 1)) {
      std::string p = prop();
      expect_sym("[");
      std::string pi = trace_var();
      expect_sym("]");
      return atom(p, pi);
    }
    std::string pi = trace_var();
    if (at_sym("|>")) {
      no_temporal("'|>' shorthand");
      ++pos_;
      std::string X = set_var();
      return in_set(pi, X, ap_.props(), fresh(pi));
    }
    if (at_sym("=")) {
      ++pos_;
      return trace_equal(pi, trace_var(), ap_.props());
    }
    if (at_sym("=_")) {
      ++pos_;
      auto props = prop_list();
      return trace_equal(pi, trace_var(), props);
    }
    fail("expected '[' , '|>' or '=' after '" + pi + "'");
  }
};

int level(Op op) {
  switch (op) {
    case Op::Iff:
    case Op::Xor:
      return 1;
    case Op::Implies:
      return 2;
    case Op::Or:
      return 3;
    case Op::And:
      return 4;
    case Op::Until:
      return 5;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Globally:
      return 6;
    case Op::Atom:
      return 7;
    default:
      return 0;
  }
}

void print_rec(const Formula& f, int ctx, std::string& out) {
  int lv = level(f->op);
  bool paren = lv < ctx;
  if (paren) out += "(";
  auto bin = [&](const char* sym, int lctx, int rctx) {
    print_rec(f->a, lctx, out);
    out += sym;
    print_rec(f->b, rctx, out);
  };
  switch (f->op) {
    case Op::Atom:
      out += f->name + "[" + f->var + "]";
      break;
    case Op::Not:
      out += "!";
      print_rec(f->a, 6, out);
      break;
    case Op::Next:
    case Op::Eventually:
    case Op::Globally:
      out += f->op == Op::Next ? "X " : f->op == Op::Eventually ? "F " : "G ";
      print_rec(f->a, 6, out);
      break;
    case Op::Iff:
      bin(" <-> ", 1, 2);
      break;
    case Op::Xor:
      bin(" ^ ", 1, 2);
      break;
    case Op::Implies:
      bin(" -> ", 3, 2);
      break;
    case Op::Or:
      bin(" | ", 3, 4);
      break;
    case Op::And:
      bin(" & ", 4, 5);
      break;
    case Op::Until:
      bin(" U ", 6, 5);
      break;
    case Op::ExistsSet:
    case Op::ForallSet:
      out += (is_existential(f->op) ? "exists " : "forall ") + f->var + ". ";
      print_rec(f->a, 0, out);
      break;
    case Op::ExistsMM:
    case Op::ForallMM:
      out += (is_existential(f->op) ? "exists (" : "forall (") + f->var + ", " +
             (f->pol == Polarity::Min ? "min" : "max") + ", ";
      print_rec(f->guard, 0, out);
      out += "). ";
      print_rec(f->a, 0, out);
      break;
    case Op::ExistsTrace:
    case Op::ForallTrace:
      out += (is_existential(f->op) ? "exists " : "forall ") + f->var + " in " + f->range + ". ";
      print_rec(f->a, 0, out);
      break;
  }
  if (paren) out += ")";
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Atom: return "Atom";
    case Op::Not: return "Not";
    case Op::Or: return "Or";
    case Op::And: return "And";
    case Op::Implies: return "Implies";
    case Op::Iff: return "Iff";
    case Op::Xor: return "Xor";
    case Op::Next: return "Next";
    case Op::Until: return "Until";
    case Op::Eventually: return "Eventually";
    case Op::Globally: return "Globally";
    case Op::ExistsSet: return "ExistsSet";
    case Op::ForallSet: return "ForallSet";
    case Op::ExistsMM: return "ExistsMM";
    case Op::ForallMM: return "ForallMM";
    case Op::ExistsTrace: return "ExistsTrace";
    case Op::ForallTrace: return "ForallTrace";
  }
  return "?";
}

void dump_rec(const Formula& f, int indent, std::string& out) {
  out += std::string(indent, ' ') + op_name(f->op);
  if (f->op == Op::Atom) out += " " + f->name + " " + f->var;
  if (is_trace_quantifier(f->op)) out += " " + f->var + " in " + f->range;
  if (is_set_quantifier(f->op)) out += " " + f->var;
  if (f->op == Op::ExistsMM || f->op == Op::ForallMM) {
    out += f->pol == Polarity::Min ? " min\n" : " max\n";
    out += std::string(indent + 2, ' ') + "guard:\n";
    dump_rec(f->guard, indent + 4, out);
    out += std::string(indent + 2, ' ') + "body:\n";
    dump_rec(f->a, indent + 4, out);
    return;
  }
  out += "\n";
  if (f->a) dump_rec(f->a, indent + 2, out);
  if (f->b) dump_rec(f->b, indent + 2, out);
}

}  // namespace

Formula parse_formula(const std::string& text, const Alphabet& ap) {
  if (ap.empty()) throw Error("formula alphabet must be nonempty");
  return Parser(text, ap).parse();
}

std::string print_formula(const Formula& f) {
  std::string out;
  print_rec(f, 0, out);
  return out;
}

std::string dump_ast(const Formula& f) {
  std::string out;
  dump_rec(f, 0, out);
  return out;
}

// ---------------------------------------------------------------- transforms

static Formula rebuild(const Formula& f, Formula a, Formula b, Formula guard) {
  if (a == f->a && b == f->b && guard == f->guard) return f;
  Node n = *f;
  n.a = std::move(a);
  n.b = std::move(b);
  n.guard = std::move(guard);
  return mk(std::move(n));
}

Formula desugar(const Formula& f) {
  if (!f) return f;
  Formula a = desugar(f->a), b = desugar(f->b), g = desugar(f->guard);
  switch (f->op) {
    case Op::And:
      return lnot(lor(lnot(a), lnot(b)));
    case Op::Implies:
      return lor(lnot(a), b);
    case Op::Iff:
      return lnot(lor(lnot(lor(lnot(a), b)), lnot(lor(lnot(b), a))));
    case Op::Xor:
      return lnot(lnot(lor(lnot(lor(lnot(a), b)), lnot(lor(lnot(b), a)))));
    case Op::Eventually:
      return until(lnot(a), a);
    case Op::Globally:
      return lnot(until(lnot(lnot(a)), lnot(a)));
    default:
      return rebuild(f, a, b, g);
  }
}

static void free_rec(const Formula& f, std::set<std::string>& bt, std::set<std::string>& bs,
                     std::set<std::string>& ft, std::set<std::string>& fs) {
  if (!f) return;
  switch (f->op) {
    case Op::Atom:
      if (!bt.count(f->var)) ft.insert(f->var);
      return;
    case Op::ExistsTrace:
    case Op::ForallTrace: {
      if (!bs.count(f->range)) fs.insert(f->range);
      bool had = bt.count(f->var);
      bt.insert(f->var);
      free_rec(f->a, bt, bs, ft, fs);
      if (!had) bt.erase(f->var);
      return;
    }
    case Op::ExistsSet:
    case Op::ForallSet:
    case Op::ExistsMM:
    case Op::ForallMM: {
      bool had = bs.count(f->var);
      bs.insert(f->var);
      free_rec(f->guard, bt, bs, ft, fs);
      free_rec(f->a, bt, bs, ft, fs);
      if (!had) bs.erase(f->var);
      return;
    }
    default:
      free_rec(f->a, bt, bs, ft, fs);
      free_rec(f->b, bt, bs, ft, fs);
  }
}

std::set<std::string> free_trace_vars(const Formula& f) {
  std::set<std::string> bt, bs, ft, fs;
  free_rec(f, bt, bs, ft, fs);
  return ft;
}

std::set<std::string> free_set_vars(const Formula& f) {
  std::set<std::string> bt, bs, ft, fs;
  free_rec(f, bt, bs, ft, fs);
  return fs;
}

std::set<std::string> all_names(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (!g) return;
    if (!g->var.empty()) out.insert(g->var);
    if (!g->range.empty()) out.insert(g->range);
    go(g->guard);
    go(g->a);
    go(g->b);
  };
  go(f);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  for (int i = 1;; ++i) {
    std::string s = base + "_" + std::to_string(i);
    if (!used.count(s)) return s;
  }
}

Formula alpha_rename(const Formula& f) {
  std::set<std::string> used = all_names(f);
  used.insert(kAll);
  used.insert(kDom);
  std::set<std::string> taken = free_trace_vars(f);
  for (auto& s : free_set_vars(f)) taken.insert(s);
  taken.insert(kAll);
  taken.insert(kDom);
  std::map<std::string, std::vector<std::string>> scope;
  auto cur = [&](const std::string& v) {
    auto it = scope.find(v);
    return it == scope.end() || it->second.empty() ? v : it->second.back();
  };
  auto bind = [&](const std::string& v) {
    std::string n = v;
    if (taken.count(v)) {
      n = fresh_name(v, used);
      used.insert(n);
    }
    taken.insert(n);
    scope[v].push_back(n);
    return n;
  };
  std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
    if (!g) return g;
    if (g->op == Op::Atom) {
      std::string v = cur(g->var);
      if (v == g->var) return g;
      return atom(g->name, v);
    }
    if (is_quantifier(g->op)) {
      Node n = *g;
      if (is_trace_quantifier(g->op)) n.range = cur(g->range);
      n.var = bind(g->var);
      n.guard = go(g->guard);
      n.a = go(g->a);
      scope[g->var].pop_back();
      return mk(std::move(n));
    }
    return rebuild(g, go(g->a), go(g->b), g->guard);
  };
  return go(f);
}

namespace {

Formula expand_quantified_connectives(const Formula& f) {
  if (!f || is_temporal(f->op) || f->op == Op::Atom) return f;
  Formula a = expand_quantified_connectives(f->a);
  Formula b = expand_quantified_connectives(f->b);
  bool q = contains_quantifier(a) || contains_quantifier(b);
  if (q) {
    switch (f->op) {
      case Op::Implies:
        return lor(lnot(a), b);
      case Op::Iff:
        return land(lor(lnot(a), b), lor(lnot(b), a));
      case Op::Xor:
        return lnot(land(lor(lnot(a), b), lor(lnot(b), a)));
      default:
        break;
    }
  }
  return rebuild(f, a, b, f->guard);
}

struct Quant {
  Op op;
  std::string var, range;
  Polarity pol;
  Formula guard;
};

Op dual(Op op) {
  switch (op) {
    case Op::ExistsSet: return Op::ForallSet;
    case Op::ForallSet: return Op::ExistsSet;
    case Op::ExistsMM: return Op::ForallMM;
    case Op::ForallMM: return Op::ExistsMM;
    case Op::ExistsTrace: return Op::ForallTrace;
    case Op::ForallTrace: return Op::ExistsTrace;
    default: return op;
  }
}

Formula pull(const Formula& f, std::vector<Quant>& qs) {
  if (!contains_quantifier(f)) return f;
  if (is_quantifier(f->op)) {
    qs.push_back({f->op, f->var, f->range, f->pol, f->guard});
    return pull(f->a, qs);
  }
  if (f->op == Op::Not) {
    std::vector<Quant> inner;
    Formula m = pull(f->a, inner);
    for (auto& q : inner) {
      q.op = dual(q.op);
      qs.push_back(q);
    }
    return lnot(m);
  }
  if (f->op == Op::And || f->op == Op::Or) {
    Formula a = pull(f->a, qs);
    Formula b = pull(f->b, qs);
    return f->op == Op::And ? land(a, b) : lor(a, b);
  }
  throw Error("quantifier under a temporal operator cannot be prenexed");
}

}  // namespace

Formula normalize_prenex(const Formula& f) {
  Formula g = alpha_rename(expand_quantified_connectives(alpha_rename(f)));
  std::vector<Quant> qs;
  Formula m = pull(g, qs);
  for (auto it = qs.rbegin(); it != qs.rend(); ++it) {
    Node n;
  n.op = it->op;
    n.var = it->var;
    n.range = it->range;
    n.pol = it->pol;
    n.guard = it->guard;
    n.a = m;
    m = mk(std::move(n));
  }
  return m;
}

Formula rename_free_set(const Formula& f, const std::string& from, const std::string& to) {
  if (!f) return f;
  if (is_trace_quantifier(f->op)) {
    Node n = *f;
    if (n.range == from) n.range = to;
    n.a = rename_free_set(f->a, from, to);
    return mk(std::move(n));
  }
  if (is_set_quantifier(f->op) && f->var == from) return f;
  return rebuild(f, rename_free_set(f->a, from, to), rename_free_set(f->b, from, to),
                 rename_free_set(f->guard, from, to));
}

Formula rename_free_trace(const Formula& f, const std::string& from, const std::string& to) {
  if (!f) return f;
  if (f->op == Op::Atom) return f->var == from ? atom(f->name, to) : f;
  if (is_trace_quantifier(f->op) && f->var == from) return f;
  return rebuild(f, rename_free_trace(f->a, from, to), rename_free_trace(f->b, from, to),
                 rename_free_trace(f->guard, from, to));
}

SentenceReport check_sentence(const Formula& f, bool allow_xa) {
  SentenceReport r;
  r.free_trace_vars = free_trace_vars(f);
  r.free_set_vars = free_set_vars(f);
  for (auto& v : r.free_trace_vars) r.violations.push_back("free trace variable '" + v + "'");
  for (auto& v : r.free_set_vars) {
    if (v == kDom) continue;
    if (v == kAll) {
      if (!allow_xa) r.violations.push_back("ALL (the set of all traces) used in closed-world mode");
      continue;
    }
    r.violations.push_back("free set variable '" + v + "'");
  }
  std::function<void(const Formula&, bool)> go = [&](const Formula& g, bool under_temporal) {
    if (!g) return;
    if (is_quantifier(g->op)) {
      if (under_temporal) r.violations.push_back("quantifier under a temporal operator");
      if (is_set_quantifier(g->op) && (g->var == kAll || g->var == kDom))
        r.violations.push_back("reserved set variable '" + g->var + "' is bound");
    }
    bool t = under_temporal || is_temporal(g->op);
    go(g->guard, t);
    go(g->a, t);
    go(g->b, t);
  };
  go(f, false);
  return r;
}

}  // namespace h2ltl
